//! Geometry of the ε-sewing of two spheres: domain inequalities, the pinch
//! `ζ_1 ζ_2 = ε`, the Möbius data `λ = -ξ ε^{1/2}`, and coincident points.
//!
//! Points are Gaussian rationals and every modulus comparison is done on
//! squared moduli, so nothing here rounds.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::eproduct::ExclusionList;
use crate::error::{Error, Result};
use crate::rational::{fmt_q, parse_q, Q};

/// `re + im·i` with rational parts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaussQ {
    pub re: Q,
    pub im: Q,
}

impl GaussQ {
    pub fn new(re: Q, im: Q) -> Self {
        GaussQ { re, im }
    }

    pub fn real(re: Q) -> Self {
        GaussQ { re, im: Q::zero() }
    }

    pub fn i() -> Self {
        GaussQ { re: Q::zero(), im: Q::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    /// `|z|^2`.
    pub fn norm2(&self) -> Q {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn conj(&self) -> Self {
        GaussQ { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn inv(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InvalidInput("division by zero".into()));
        }
        let n = self.norm2();
        Ok(GaussQ { re: &self.re / &n, im: -&self.im / &n })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inv()?)
    }

    /// `"p/q"`, `"p/q*i"`, or `"a + b*i"` with rational `a, b`.
    pub fn parse(s: &str) -> Option<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if let Some(v) = parse_q(&t) {
            return Some(Self::real(v));
        }
        let body = t.strip_suffix('i')?;
        let body = body.strip_suffix('*').unwrap_or(body);
        let split = body.char_indices().skip(1).filter(|&(k, c)| (c == '+' || c == '-') && !body[..k].ends_with('/')).map(|(k, _)| k).last();
        let (re, im) = match split {
            Some(k) => (parse_q(&body[..k])?, &body[k..]),
            None => (Q::zero(), body),
        };
        let im = match im {
            "" | "+" => Q::one(),
            "-" => -Q::one(),
            x => parse_q(x.strip_prefix('+').unwrap_or(x))?,
        };
        Some(GaussQ { re, im })
    }
}

impl fmt::Display for GaussQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_q(&self.re)),
            (true, false) => write!(f, "{}*i", fmt_q(&self.im)),
            _ => {
                let sign = if self.im.is_negative() { "-" } else { "+" };
                write!(f, "{} {} {}*i", fmt_q(&self.re), sign, fmt_q(&self.im.abs()))
            }
        }
    }
}

impl Add for &GaussQ {
    type Output = GaussQ;
    fn add(self, o: &GaussQ) -> GaussQ {
        GaussQ { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl Sub for &GaussQ {
    type Output = GaussQ;
    fn sub(self, o: &GaussQ) -> GaussQ {
        GaussQ { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl Mul for &GaussQ {
    type Output = GaussQ;
    fn mul(self, o: &GaussQ) -> GaussQ {
        GaussQ { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }
}

impl Neg for &GaussQ {
    type Output = GaussQ;
    fn neg(self) -> GaussQ {
        GaussQ { re: -self.re.clone(), im: -self.im.clone() }
    }
}

/// A point as written in a config: `"p/q"`, `"a + b*i"`, or `["a", "b"]`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum PointText {
    Text(String),
    Pair([String; 2]),
}

impl PointText {
    pub fn value(&self) -> Result<GaussQ> {
        match self {
            PointText::Text(s) => GaussQ::parse(s).ok_or_else(|| Error::Parse(format!("bad point {s:?}"))),
            PointText::Pair([a, b]) => match (parse_q(a), parse_q(b)) {
                (Some(re), Some(im)) => Ok(GaussQ { re, im }),
                _ => Err(Error::Parse(format!("bad point [{a:?}, {b:?}]"))),
            },
        }
    }
}

/// What a fixture case expects from validation and detection.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
pub struct Expectation {
    pub valid: Option<bool>,
    #[serde(default)]
    pub violations: Vec<String>,
    /// 1-based `(i, j)` pairs.
    pub pairs: Option<Vec<(usize, usize)>>,
    #[serde(default)]
    pub malformed: bool,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct SewingText {
    #[serde(default)]
    pub name: String,
    pub r1: String,
    pub r2: String,
    pub epsilon: String,
    #[serde(default)]
    pub x: Vec<PointText>,
    #[serde(default)]
    pub y: Vec<PointText>,
    /// Sample values of `ζ_1` for the pinch and Möbius checks.
    #[serde(default)]
    pub probes: Vec<PointText>,
    #[serde(default)]
    pub expect: Expectation,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
pub struct SewingFile {
    #[serde(default)]
    pub case: Vec<SewingText>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SewingConfig {
    pub r1: Q,
    pub r2: Q,
    pub epsilon: Q,
    pub x: Vec<GaussQ>,
    pub y: Vec<GaussQ>,
}

fn rat(s: &str, what: &str) -> Result<Q> {
    parse_q(s.trim()).ok_or_else(|| Error::Parse(format!("{what}: expected p/q, got {s:?}")))
}

impl SewingText {
    pub fn config(&self) -> Result<SewingConfig> {
        Ok(SewingConfig {
            r1: rat(&self.r1, "r1")?,
            r2: rat(&self.r2, "r2")?,
            epsilon: rat(&self.epsilon, "epsilon")?,
            x: self.x.iter().map(PointText::value).collect::<Result<_>>()?,
            y: self.y.iter().map(PointText::value).collect::<Result<_>>()?,
        })
    }

    pub fn probes(&self) -> Result<Vec<GaussQ>> {
        self.probes.iter().map(PointText::value).collect()
    }
}

/// Reads either one case at top level or a list of `[[case]]` tables.
pub fn parse_cases(text: &str) -> Result<Vec<SewingText>> {
    let v: toml::Value = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if v.get("case").is_some() {
        let f: SewingFile = v.try_into().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?;
        Ok(f.case)
    } else {
        Ok(vec![v.try_into().map_err(|e: toml::de::Error| Error::Parse(e.to_string()))?])
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub statement: String,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DomainReport {
    pub checks: Vec<Check>,
    pub violations: Vec<String>,
}

impl DomainReport {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn distinct(ps: &[GaussQ]) -> Option<(usize, usize)> {
    (0..ps.len()).flat_map(|i| (i + 1..ps.len()).map(move |j| (i, j))).find(|&(i, j)| ps[i] == ps[j])
}

/// Every inequality of the sewing domain, compared on squares.
pub fn validate(c: &SewingConfig) -> DomainReport {
    let mut checks = Vec::new();
    let mut push = |name: String, statement: String, holds: bool| checks.push(Check { name, statement, holds });
    let e2 = &c.epsilon * &c.epsilon;
    push("r1 > 0".into(), format!("r1 = {}", fmt_q(&c.r1)), c.r1.is_positive());
    push("r2 > 0".into(), format!("r2 = {}", fmt_q(&c.r2)), c.r2.is_positive());
    push("ε ≠ 0".into(), format!("ε = {}", fmt_q(&c.epsilon)), !c.epsilon.is_zero());
    let radii_ok = c.r1.is_positive() && c.r2.is_positive();
    let rr = &c.r1 * &c.r2;
    push("|ε| ≤ r1 r2".into(), format!("ε² = {} vs (r1 r2)² = {}", fmt_q(&e2), fmt_q(&(&rr * &rr))), e2 <= &rr * &rr);
    for (a, (ra, rbar)) in [(1, (&c.r1, &c.r2)), (2, (&c.r2, &c.r1))] {
        // the annulus |ε|/r_ā ≤ |ζ_a| ≤ r_a is nonempty
        let holds = radii_ok && e2 <= (ra * rbar) * (ra * rbar);
        push(format!("annulus {a} nonempty"), format!("|ε|/r{} ≤ r{a}", if a == 1 { 2 } else { 1 }), holds);
    }
    for (label, pts, r) in [("x", &c.x, &c.r2), ("y", &c.y, &c.r1)] {
        let other = if label == "x" { "r2" } else { "r1" };
        for (i, p) in pts.iter().enumerate() {
            let bound = if r.is_zero() { None } else { Some(&e2 / (r * r)) };
            let holds = bound.as_ref().is_some_and(|b| &p.norm2() >= b);
            push(
                format!("|{label}{}| ≥ |ε|/{other}", i + 1),
                format!("|{label}{}|² = {} vs {}", i + 1, fmt_q(&p.norm2()), bound.map_or("undefined".into(), |b| fmt_q(&b))),
                holds,
            );
        }
        if let Some((i, j)) = distinct(pts) {
            push(format!("{label} distinct"), format!("{label}{} = {label}{}", i + 1, j + 1), false);
        } else {
            push(format!("{label} distinct"), format!("{} points", pts.len()), true);
        }
    }
    // the pinch sends each point into the other sphere's disk
    if !c.epsilon.is_zero() {
        for (label, pts, r) in [("x", &c.x, &c.r2), ("y", &c.y, &c.r1)] {
            for (i, p) in pts.iter().enumerate() {
                let holds = match pinch(p, &GaussQ::real(c.epsilon.clone())) {
                    Ok(img) => img.norm2() <= r * r,
                    Err(_) => false,
                };
                push(format!("ε/{label}{} in the opposite disk", i + 1), format!("|ε/{label}{}| ≤ {}", i + 1, fmt_q(r)), holds);
            }
        }
    }
    let violations = checks.iter().filter(|c| !c.holds).map(|c| c.name.clone()).collect();
    DomainReport { checks, violations }
}

/// `ζ_2 = ε / ζ_1`.
pub fn pinch(zeta1: &GaussQ, eps: &GaussQ) -> Result<GaussQ> {
    if zeta1.is_zero() {
        return Err(Error::InvalidInput("ζ_1 = 0 has no pinch partner".into()));
    }
    eps.div(zeta1)
}

/// `a + b s` with `s² = ε` formal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqrtExt {
    pub a: GaussQ,
    pub b: GaussQ,
    pub eps: Q,
}

impl SqrtExt {
    pub fn square(&self) -> SqrtExt {
        let s2 = GaussQ::real(self.eps.clone());
        let two = GaussQ::real(Q::from_integer(2.into()));
        SqrtExt { a: &(&self.a * &self.a) + &(&(&self.b * &self.b) * &s2), b: &two * &(&self.a * &self.b), eps: self.eps.clone() }
    }

    /// The value when the formal part vanishes.
    pub fn as_gauss(&self) -> Option<GaussQ> {
        self.b.is_zero().then(|| self.a.clone())
    }

    /// The value when `ε` is the square of a rational.
    pub fn evaluate(&self) -> Option<GaussQ> {
        let s = rational_sqrt(&self.eps)?;
        Some(&self.a + &(&self.b * &GaussQ::real(s)))
    }
}

impl fmt::Display for SqrtExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) + ({})·√({})", self.a, self.b, fmt_q(&self.eps))
    }
}

fn rational_sqrt(x: &Q) -> Option<Q> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    (&n * &n == *x.numer() && &d * &d == *x.denom()).then(|| Q::new(n, d))
}

/// `λ = -ξ ε^{1/2}` with `ξ = ±i`, and the induced map `z ↦ -λ²/z`.
#[derive(Clone, Debug)]
pub struct MobiusConjugator {
    pub xi_sign: i8,
    pub lambda: SqrtExt,
}

impl MobiusConjugator {
    pub fn lambda_squared(&self) -> GaussQ {
        self.lambda.square().as_gauss().expect("λ is purely formal, so λ² is in Q(i)")
    }

    pub fn apply(&self, z: &GaussQ) -> Result<GaussQ> {
        (-&self.lambda_squared()).div(z)
    }
}

pub fn mobius_lambda(eps: &Q, xi_sign: i8) -> Result<MobiusConjugator> {
    if xi_sign != 1 && xi_sign != -1 {
        return Err(Error::InvalidInput("ξ is +i or -i".into()));
    }
    let xi = if xi_sign > 0 { GaussQ::i() } else { -&GaussQ::i() };
    Ok(MobiusConjugator { xi_sign, lambda: SqrtExt { a: GaussQ::real(Q::zero()), b: -&xi, eps: eps.clone() } })
}

/// Pinch and Möbius agreement at one probe.
#[derive(Clone, Debug, Serialize)]
pub struct ProbeCheck {
    pub zeta1: String,
    pub zeta2: String,
    pub involution: bool,
    pub mobius_matches: bool,
    pub xi_flip_same_map: bool,
    pub on_annulus: bool,
}

pub fn probe(c: &SewingConfig, z: &GaussQ) -> Result<ProbeCheck> {
    let eps = GaussQ::real(c.epsilon.clone());
    let z2 = pinch(z, &eps)?;
    let back = pinch(&z2, &eps)?;
    let plus = mobius_lambda(&c.epsilon, 1)?;
    let minus = mobius_lambda(&c.epsilon, -1)?;
    let e2 = &c.epsilon * &c.epsilon;
    let n = z.norm2();
    let on_annulus = c.r2.is_positive() && n >= &e2 / (&c.r2 * &c.r2) && n <= &c.r1 * &c.r1;
    Ok(ProbeCheck {
        zeta1: z.to_string(),
        zeta2: z2.to_string(),
        involution: back == *z,
        mobius_matches: plus.apply(z)? == z2,
        xi_flip_same_map: plus.apply(z)? == minus.apply(z)? && plus.lambda.b == -&minus.lambda.b,
        on_annulus,
    })
}

/// Pairs `x_i = y_j`, found by exact equality.
pub fn detect_coincident(c: &SewingConfig) -> Result<ExclusionList> {
    for (label, pts) in [("x", &c.x), ("y", &c.y)] {
        if let Some((i, j)) = distinct(pts) {
            return Err(Error::CoincidentPoints(format!("{label}{} = {label}{} on one sphere", i + 1, j + 1)));
        }
    }
    let pairs = c.x.iter().enumerate().flat_map(|(i, p)| c.y.iter().enumerate().filter(move |(_, q)| p == *q).map(move |(j, _)| (i, j))).collect();
    ExclusionList::new(pairs, 0)
}

/// One fixture case checked against its expectation.
#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub name: String,
    pub domain: Option<DomainReport>,
    pub probes: Vec<ProbeCheck>,
    /// 1-based pairs, or the detection error.
    pub pairs: std::result::Result<Vec<(usize, usize)>, String>,
    pub matches_expectation: bool,
    pub mismatches: Vec<String>,
}

pub fn run_case(t: &SewingText) -> CaseReport {
    let mut mismatches = Vec::new();
    let mut out = CaseReport { name: t.name.clone(), domain: None, probes: vec![], pairs: Ok(vec![]), matches_expectation: false, mismatches: vec![] };
    let c = match t.config() {
        Ok(c) => c,
        Err(e) => {
            out.mismatches.push(format!("config: {e}"));
            return out;
        }
    };
    let d = validate(&c);
    if let Some(v) = t.expect.valid {
        if d.valid() != v {
            mismatches.push(format!("expected valid = {v}, violations {:?}", d.violations));
        }
    }
    for v in &t.expect.violations {
        if !d.violations.contains(v) {
            mismatches.push(format!("expected violation {v:?} not reported"));
        }
    }
    match t.probes() {
        Ok(ps) => {
            for z in ps {
                match probe(&c, &z) {
                    Ok(p) => {
                        if !(p.involution && p.mobius_matches && p.xi_flip_same_map) {
                            mismatches.push(format!("pinch/Möbius disagree at {z}"));
                        }
                        out.probes.push(p);
                    }
                    Err(e) => mismatches.push(format!("probe {z}: {e}")),
                }
            }
        }
        Err(e) => mismatches.push(format!("probes: {e}")),
    }
    out.pairs = detect_coincident(&c).map(|l| l.pairs.iter().map(|&(i, j)| (i + 1, j + 1)).collect()).map_err(|e| e.to_string());
    match (&out.pairs, t.expect.malformed) {
        (Ok(_), true) => mismatches.push("expected a malformed configuration".into()),
        (Err(e), false) => mismatches.push(format!("unexpected detection error: {e}")),
        (Ok(p), false) => {
            if let Some(want) = &t.expect.pairs {
                if p != want {
                    mismatches.push(format!("pairs {p:?}, expected {want:?}"));
                }
            }
        }
        (Err(_), true) => {}
    }
    out.domain = Some(d);
    out.matches_expectation = mismatches.is_empty();
    out.mismatches = mismatches;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    fn cfg(eps: Q, x: Vec<Q>, y: Vec<Q>) -> SewingConfig {
        SewingConfig { r1: q(1), r2: q(1), epsilon: eps, x: x.into_iter().map(GaussQ::real).collect(), y: y.into_iter().map(GaussQ::real).collect() }
    }

    #[test]
    fn domain_examples() {
        assert!(validate(&cfg(qf(1, 100), vec![qf(1, 2)], vec![qf(3, 10)])).valid());
        let r = validate(&cfg(q(2), vec![], vec![]));
        assert!(r.violations.contains(&"|ε| ≤ r1 r2".to_string()));
        let r = validate(&cfg(qf(1, 100), vec![qf(1, 200)], vec![]));
        assert!(r.violations.contains(&"|x1| ≥ |ε|/r2".to_string()));
    }

    #[test]
    fn pinch_examples() {
        let e = GaussQ::real(qf(1, 100));
        assert_eq!(pinch(&GaussQ::real(qf(1, 10)), &e).unwrap(), GaussQ::real(qf(1, 10)));
        assert_eq!(pinch(&GaussQ::real(q(1)), &GaussQ::real(qf(1, 4))).unwrap(), GaussQ::real(qf(1, 4)));
        let z = GaussQ::new(qf(1, 3), qf(-2, 7));
        assert_eq!(pinch(&pinch(&z, &e).unwrap(), &e).unwrap(), z);
        assert!(pinch(&GaussQ::real(q(0)), &e).is_err());
    }

    #[test]
    fn mobius_matches_pinch() {
        let m = mobius_lambda(&qf(1, 4), 1).unwrap();
        // λ = -i·√ε, λ² = -ε
        assert_eq!(m.lambda_squared(), GaussQ::real(qf(-1, 4)));
        assert_eq!(m.lambda.evaluate(), Some(GaussQ::new(q(0), qf(-1, 2))));
        let z = GaussQ::new(qf(2, 3), q(1));
        assert_eq!(m.apply(&z).unwrap(), pinch(&z, &GaussQ::real(qf(1, 4))).unwrap());
        let n = mobius_lambda(&qf(1, 3), -1).unwrap();
        assert_eq!(n.lambda.evaluate(), None);
        assert_eq!(n.lambda_squared(), GaussQ::real(qf(-1, 3)));
    }

    #[test]
    fn coincidences() {
        let l = detect_coincident(&cfg(qf(1, 100), vec![qf(1, 2), qf(1, 5)], vec![qf(1, 5)])).unwrap();
        assert_eq!(l.pairs, vec![(1, 0)]);
        assert_eq!(l.r(), 1);
        assert!(detect_coincident(&cfg(qf(1, 100), vec![qf(1, 2)], vec![qf(1, 3)])).unwrap().pairs.is_empty());
        assert!(detect_coincident(&cfg(qf(1, 100), vec![], vec![qf(1, 2), qf(1, 2)])).is_err());
    }

    #[test]
    fn parses_points() {
        assert_eq!(GaussQ::parse("1/2"), Some(GaussQ::real(qf(1, 2))));
        assert_eq!(GaussQ::parse("1/2 - 3/4*i"), Some(GaussQ::new(qf(1, 2), qf(-3, 4))));
        assert_eq!(GaussQ::parse("-i"), Some(GaussQ::new(q(0), q(-1))));
        assert_eq!(GaussQ::parse("-1/3+i"), Some(GaussQ::new(qf(-1, 3), q(1))));
        assert_eq!(GaussQ::parse("2/5i"), Some(GaussQ::new(q(0), qf(2, 5))));
        let z = GaussQ::new(qf(-1, 3), qf(5, 2));
        assert_eq!(GaussQ::parse(&z.to_string()), Some(z));
        let cases = parse_cases("r1 = \"1\"\nr2 = \"1\"\nepsilon = \"1/100\"\nx = [\"1/2\", [\"0\", \"1/3\"]]\n").unwrap();
        assert_eq!(cases[0].config().unwrap().x[1], GaussQ::new(q(0), qf(1, 3)));
    }
}
