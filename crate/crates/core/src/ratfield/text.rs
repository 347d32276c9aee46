//! Text form: `{"num":"2*z1 - 1*z2","den":[["z1",1],["z1-z2",2]],"nvars":2}`.
//!
//! `nvars` is optional on input; when absent the largest variable index seen
//! is used.

use serde::{Deserialize, Serialize};

use super::poly::MultiPoly;
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};
use crate::rational::{fmt_q, parse_q, Q};
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatFuncText {
    pub num: String,
    pub den: Vec<(String, u32)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nvars: Option<usize>,
}

pub fn format_poly(p: &MultiPoly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut out = String::new();
    // highest total degree first, reads like hand-written polynomials
    let mut terms: Vec<(&Vec<u32>, &Q)> = p.terms().iter().collect();
    terms.sort_by(|a, b| {
        let da: u32 = a.0.iter().sum();
        let db: u32 = b.0.iter().sum();
        db.cmp(&da).then_with(|| b.0.cmp(a.0))
    });
    for (k, (e, c)) in terms.into_iter().enumerate() {
        let neg = c.is_negative();
        let mag = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&fmt_q(&mag));
        for (v, &x) in e.iter().enumerate() {
            match x {
                0 => {}
                1 => out.push_str(&format!("*z{}", v + 1)),
                _ => out.push_str(&format!("*z{}^{}", v + 1, x)),
            }
        }
    }
    out
}

pub fn to_text_struct(f: &RatFunc) -> RatFuncText {
    let mut den = Vec::new();
    for (i, &a) in f.axis_orders().iter().enumerate() {
        if a > 0 {
            den.push((format!("z{}", i + 1), a));
        }
    }
    for (&(i, j), &b) in f.diff_orders() {
        den.push((format!("z{}-z{}", i + 1, j + 1), b));
    }
    RatFuncText { num: format_poly(f.numerator()), den, nvars: Some(f.nvars()) }
}

pub fn to_text(f: &RatFunc) -> String {
    serde_json::to_string(&to_text_struct(f)).expect("serializable")
}

fn parse_var(s: &str) -> Result<usize> {
    let idx = s.strip_prefix('z').and_then(|d| d.parse::<usize>().ok()).filter(|&k| k >= 1).ok_or_else(|| Error::Parse(format!("bad variable `{s}`")))?;
    Ok(idx - 1)
}

type RawTerm = (Q, Vec<(usize, u32)>);

fn parse_poly_terms(s: &str) -> Result<Vec<RawTerm>> {
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err(Error::Parse("empty numerator".into()));
    }
    let mut chunks: Vec<(bool, String)> = Vec::new();
    let mut cur = String::new();
    let mut neg = false;
    for ch in cleaned.chars() {
        if (ch == '+' || ch == '-') && !cur.is_empty() {
            chunks.push((neg, std::mem::take(&mut cur)));
            neg = ch == '-';
        } else if ch == '+' || ch == '-' {
            if ch == '-' {
                neg = !neg;
            }
        } else {
            cur.push(ch);
        }
    }
    if cur.is_empty() {
        return Err(Error::Parse(format!("dangling sign in `{s}`")));
    }
    chunks.push((neg, cur));
    let mut out = Vec::new();
    for (neg, chunk) in chunks {
        let mut coef = Q::one();
        let mut vars = Vec::new();
        for factor in chunk.split('*') {
            if factor.starts_with('z') {
                let (v, e) = match factor.split_once('^') {
                    Some((v, e)) => (v, e.parse::<u32>().map_err(|_| Error::Parse(format!("bad exponent `{e}`")))?),
                    None => (factor, 1),
                };
                vars.push((parse_var(v)?, e));
            } else {
                let c = parse_q(factor).ok_or_else(|| Error::Parse(format!("bad coefficient `{factor}`")))?;
                coef *= c;
            }
        }
        if neg {
            coef = -coef;
        }
        out.push((coef, vars));
    }
    Ok(out)
}

pub fn from_text_struct(t: &RatFuncText) -> Result<RatFunc> {
    let terms = if t.num.trim() == "0" { Vec::new() } else { parse_poly_terms(&t.num)? };
    let mut factors = Vec::new();
    for (f, e) in &t.den {
        let f: String = f.chars().filter(|c| !c.is_whitespace()).collect();
        match f.split_once('-') {
            Some((a, b)) => factors.push((Some((parse_var(a)?, parse_var(b)?)), None, *e)),
            None => factors.push((None, Some(parse_var(&f)?), *e)),
        }
    }
    let mut maxv = 0;
    for (_, vars) in &terms {
        for &(v, _) in vars {
            maxv = maxv.max(v + 1);
        }
    }
    for (d, a, _) in &factors {
        if let Some((i, j)) = d {
            maxv = maxv.max(i + 1).max(j + 1);
        }
        if let Some(i) = a {
            maxv = maxv.max(i + 1);
        }
    }
    let n = match t.nvars {
        Some(n) if n < maxv => return Err(Error::Parse(format!("nvars {n} below largest index {maxv}"))),
        Some(n) => n,
        None => maxv.max(1),
    };
    let mut num = MultiPoly::zero(n);
    for (c, vars) in terms {
        let mut e = vec![0; n];
        for (v, x) in vars {
            e[v] += x;
        }
        num.add_term(e, c);
    }
    let mut axis = vec![0; n];
    let mut diff = Vec::new();
    for (d, a, e) in factors {
        if let Some(k) = d {
            diff.push((k, e));
        }
        if let Some(i) = a {
            axis[i] += e;
        }
    }
    if num.is_zero() && (axis.iter().any(|a| !a.is_zero()) || !diff.is_empty()) {
        return RatFunc::new(num, vec![0; n], Vec::new());
    }
    RatFunc::new(num, axis, diff)
}

pub fn from_text(s: &str) -> Result<RatFunc> {
    let t: RatFuncText = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    from_text_struct(&t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn spec_example_parses() {
        let f = from_text(r#"{"num":"2*z1 - 1*z2","den":[["z1",1],["z1-z2",2]]}"#).unwrap();
        assert_eq!(f.numerator(), &MultiPoly::linear(&[2, -1]));
        assert_eq!(f.diff_order(0, 1), 2);
        assert_eq!(from_text(&to_text(&f)).unwrap(), f);
    }

    #[test]
    fn reversed_factor_and_fractions() {
        let f = from_text(r#"{"num":"-3/4*z2^2 + 1/2","den":[["z2-z1",1]],"nvars":3}"#).unwrap();
        assert_eq!(f.nvars(), 3);
        assert_eq!(f.diff_order(0, 1), 1);
        assert_eq!(f.numerator().terms().get(&vec![0, 0, 0]), Some(&(-q(1) / q(2))));
        assert_eq!(from_text(&to_text(&f)).unwrap(), f);
    }
}
