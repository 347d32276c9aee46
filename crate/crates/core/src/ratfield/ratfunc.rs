//! Rational functions with denominators supported on `z_i = 0` and `z_i = z_j`.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::perm::Permutation;
use super::poly::MultiPoly;
use crate::error::{Error, Result};
use crate::rational::{q, Q};

/// `num / (prod_i z_i^axis[i] * prod_{i<j} (z_i - z_j)^diff[(i,j)])`, kept in
/// canonical form: the numerator is not divisible by any pole factor present.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RatFunc {
    num: MultiPoly,
    axis: Vec<u32>,
    diff: BTreeMap<(usize, usize), u32>,
}

impl RatFunc {
    pub fn zero(nvars: usize) -> Self {
        RatFunc { num: MultiPoly::zero(nvars), axis: vec![0; nvars], diff: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::from_poly(MultiPoly::one(nvars))
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        Self::from_poly(MultiPoly::constant(nvars, c))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        Self::from_poly(MultiPoly::var(nvars, i))
    }

    pub fn from_poly(num: MultiPoly) -> Self {
        let n = num.nvars();
        RatFunc { num, axis: vec![0; n], diff: BTreeMap::new() }
    }

    /// Builds and canonicalizes. Difference keys may be given in either order.
    pub fn new(num: MultiPoly, axis: Vec<u32>, diff: impl IntoIterator<Item = ((usize, usize), u32)>) -> Result<Self> {
        let n = num.nvars();
        if axis.len() != n {
            return Err(Error::VariableCountMismatch(n, axis.len()));
        }
        let mut f = RatFunc { num, axis, diff: BTreeMap::new() };
        for ((i, j), b) in diff {
            if i >= n || j >= n {
                return Err(Error::IndexOutOfRange(i.max(j), n));
            }
            if i == j {
                return Err(Error::PoleLocusViolation(format!("degenerate factor z{0}-z{0}", i + 1)));
            }
            if b == 0 {
                continue;
            }
            let key = if i < j { (i, j) } else { (j, i) };
            if i > j && b % 2 == 1 {
                f.num = f.num.neg();
            }
            *f.diff.entry(key).or_insert(0) += b;
        }
        f.canonicalize();
        Ok(f)
    }

    /// `1 / (z_i - z_j)^k`
    pub fn inv_difference(nvars: usize, i: usize, j: usize, k: u32) -> Self {
        Self::new(MultiPoly::one(nvars), vec![0; nvars], [((i, j), k)]).expect("valid difference pole")
    }

    /// `1 / z_i^k`
    pub fn inv_var(nvars: usize, i: usize, k: u32) -> Self {
        let mut axis = vec![0; nvars];
        axis[i] = k;
        RatFunc { num: MultiPoly::one(nvars), axis, diff: BTreeMap::new() }
    }

    /// `form^k` for an integer linear form; negative `k` requires the form to
    /// be `±z_i` or `±(z_i - z_j)`.
    pub fn linear_power(form: &[i64], k: i64) -> Result<Self> {
        let n = form.len();
        if k >= 0 {
            return Ok(Self::from_poly(MultiPoly::linear(form).pow(k as u32)));
        }
        let k = (-k) as u32;
        let nz: Vec<(usize, i64)> = form.iter().copied().enumerate().filter(|&(_, c)| c != 0).collect();
        let sign = |c: i64| if c < 0 && k % 2 == 1 { -Q::one() } else { Q::one() };
        match nz.as_slice() {
            [(i, c)] if c.abs() == 1 => Ok(Self::inv_var(n, *i, k).scale(&sign(*c))),
            [(i, a), (j, b)] if *a == -*b && a.abs() == 1 => Ok(Self::inv_difference(n, *i, *j, k).scale(&sign(*a))),
            _ => Err(Error::PoleLocusViolation(format!("pole along {}", format_form(form)))),
        }
    }

    pub fn nvars(&self) -> usize {
        self.num.nvars()
    }

    pub fn numerator(&self) -> &MultiPoly {
        &self.num
    }

    pub fn axis_orders(&self) -> &[u32] {
        &self.axis
    }

    pub fn diff_orders(&self) -> &BTreeMap<(usize, usize), u32> {
        &self.diff
    }

    pub fn axis_order(&self, i: usize) -> u32 {
        self.axis[i]
    }

    pub fn diff_order(&self, i: usize, j: usize) -> u32 {
        let key = if i < j { (i, j) } else { (j, i) };
        self.diff.get(&key).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.axis.iter().all(|&a| a == 0) && self.diff.is_empty()
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.is_polynomial() {
            self.num.constant_value()
        } else {
            None
        }
    }

    /// Total degree of numerator minus denominator; `None` for zero.
    pub fn degree(&self) -> Option<i64> {
        let d = self.num.total_degree()? as i64;
        Some(d - self.denominator_degree() as i64)
    }

    pub fn denominator_degree(&self) -> u32 {
        self.axis.iter().sum::<u32>() + self.diff.values().sum::<u32>()
    }

    pub fn denominator(&self) -> MultiPoly {
        let n = self.nvars();
        let mut d = MultiPoly::monomial(n, self.axis.clone(), Q::one());
        for (&(i, j), &b) in &self.diff {
            d = d.mul(&MultiPoly::difference(n, i, j).pow(b));
        }
        d
    }

    fn canonicalize(&mut self) {
        if self.num.is_zero() {
            self.axis.iter_mut().for_each(|a| *a = 0);
            self.diff.clear();
            return;
        }
        for i in 0..self.axis.len() {
            while self.axis[i] > 0 {
                match self.num.div_var(i) {
                    Some(p) => {
                        self.num = p;
                        self.axis[i] -= 1;
                    }
                    None => break,
                }
            }
        }
        let keys: Vec<(usize, usize)> = self.diff.keys().copied().collect();
        for (i, j) in keys {
            let mut b = self.diff[&(i, j)];
            while b > 0 {
                match self.num.div_difference(i, j) {
                    Some(p) => {
                        self.num = p;
                        b -= 1;
                    }
                    None => break,
                }
            }
            if b == 0 {
                self.diff.remove(&(i, j));
            } else {
                self.diff.insert((i, j), b);
            }
        }
    }

    /// Whether the canonical-form invariant holds.
    pub fn is_canonical(&self) -> bool {
        if self.num.is_zero() {
            return self.is_polynomial();
        }
        let axis_ok = (0..self.axis.len()).all(|i| self.axis[i] == 0 || self.num.div_var(i).is_none());
        let diff_ok = self.diff.iter().all(|(&(i, j), &b)| i < j && b > 0 && self.num.div_difference(i, j).is_none());
        axis_ok && diff_ok
    }

    /// Numerator multiplied up to the denominator with orders `axis`, `diff`
    /// (each at least this function's own orders).
    fn lift_numerator(&self, axis: &[u32], diff: &BTreeMap<(usize, usize), u32>) -> MultiPoly {
        let n = self.nvars();
        let extra: Vec<u32> = axis.iter().zip(&self.axis).map(|(a, b)| a - b).collect();
        let mut p = self.num.shift(&extra);
        for (&(i, j), &b) in diff {
            let own = self.diff.get(&(i, j)).copied().unwrap_or(0);
            if b > own {
                p = p.mul(&MultiPoly::difference(n, i, j).pow(b - own));
            }
        }
        p
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.nvars() != other.nvars() {
            return Err(Error::VariableCountMismatch(self.nvars(), other.nvars()));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let axis: Vec<u32> = self.axis.iter().zip(&other.axis).map(|(a, b)| *a.max(b)).collect();
        let mut diff = self.diff.clone();
        for (&k, &b) in &other.diff {
            let e = diff.entry(k).or_insert(0);
            *e = (*e).max(b);
        }
        let num = self.lift_numerator(&axis, &diff).add(&other.lift_numerator(&axis, &diff));
        let mut f = RatFunc { num, axis, diff };
        f.canonicalize();
        Ok(f)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.try_add(other).expect("variable-count mismatch")
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        RatFunc { num: self.num.neg(), axis: self.axis.clone(), diff: self.diff.clone() }
    }

    pub fn scale(&self, s: &Q) -> Self {
        if s.is_zero() {
            return Self::zero(self.nvars());
        }
        RatFunc { num: self.num.scale(s), axis: self.axis.clone(), diff: self.diff.clone() }
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.nvars()));
        }
        let axis = self.axis.iter().zip(&other.axis).map(|(a, b)| a + b).collect();
        let mut diff = self.diff.clone();
        for (&k, &b) in &other.diff {
            *diff.entry(k).or_insert(0) += b;
        }
        let mut f = RatFunc { num: self.num.mul(&other.num), axis, diff };
        f.canonicalize();
        Ok(f)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.try_mul(other).expect("variable-count mismatch")
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(self.nvars()), |acc, _| acc.mul(self))
    }

    /// `f(λ z_1, .., λ z_n)`.
    pub fn scale_all_vars(&self, lambda: &Q) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let nv = self.nvars();
        let num = MultiPoly::from_terms(
            nv,
            self.num.terms().iter().map(|(e, c)| {
                let d: u32 = e.iter().sum();
                (e.clone(), c * crate::rational::pow_q(lambda, d as i64))
            }),
        );
        let den = crate::rational::pow_q(lambda, -(self.denominator_degree() as i64));
        RatFunc { num: num.scale(&den), axis: self.axis.clone(), diff: self.diff.clone() }
    }

    pub fn partial_derivative(&self, i: usize) -> Result<Self> {
        let n = self.nvars();
        if i >= n {
            return Err(Error::IndexOutOfRange(i, n));
        }
        let mut out = RatFunc { num: self.num.derivative(i), axis: self.axis.clone(), diff: self.diff.clone() };
        out.canonicalize();
        // log-derivative of each pole factor touching z_i
        if self.axis[i] > 0 {
            let mut t = self.clone();
            t.num = t.num.scale(&q(-(self.axis[i] as i64)));
            t.axis[i] += 1;
            t.canonicalize();
            out = out.add(&t);
        }
        for (&(a, b), &e) in &self.diff {
            if a != i && b != i {
                continue;
            }
            let s = if a == i { -(e as i64) } else { e as i64 };
            let mut t = self.clone();
            t.num = t.num.scale(&q(s));
            *t.diff.get_mut(&(a, b)).unwrap() += 1;
            t.canonicalize();
            out = out.add(&t);
        }
        Ok(out)
    }

    /// Replaces `z_i` by `z_{σ(i)}`.
    pub fn permute(&self, sigma: &Permutation) -> Result<Self> {
        let n = self.nvars();
        if sigma.n() != n {
            return Err(Error::VariableCountMismatch(n, sigma.n()));
        }
        let num = self.num.map_vars(sigma.images(), n);
        let mut axis = vec![0; n];
        for (i, &a) in self.axis.iter().enumerate() {
            axis[sigma.apply(i)] = a;
        }
        let diff: Vec<((usize, usize), u32)> = self.diff.iter().map(|(&(i, j), &b)| ((sigma.apply(i), sigma.apply(j)), b)).collect();
        Self::new(num, axis, diff)
    }

    /// Replaces `z_i` by `z_i - z_j`.
    pub fn shift_substitute(&self, i: usize, j: usize) -> Result<Self> {
        let n = self.nvars();
        if i >= n || j >= n {
            return Err(Error::IndexOutOfRange(i.max(j), n));
        }
        if i == j {
            return Err(Error::InvalidInput("shift of a variable by itself".into()));
        }
        if let Some((&(a, b), _)) = self.diff.iter().find(|(&(a, b), _)| a == i || b == i) {
            let mut form = vec![0i64; n];
            form[a] += 1;
            form[b] -= 1;
            form[j] -= if a == i { 1 } else { -1 };
            return Err(Error::PoleLocusViolation(format!("pole along {}", format_form(&form))));
        }
        let mut lin = vec![0i64; n];
        lin[i] = 1;
        lin[j] = -1;
        let num = self.num.substitute_linear(i, &lin);
        let mut axis = self.axis.clone();
        let a = axis[i];
        axis[i] = 0;
        let mut diff: Vec<((usize, usize), u32)> = self.diff.iter().map(|(&k, &b)| (k, b)).collect();
        diff.push(((i, j), a));
        Self::new(num, axis, diff)
    }

    /// Replaces every `z_k` at once by the integer linear form `forms[k]` in
    /// `new_nvars` variables; fails if a pole leaves the allowed locus.
    pub fn substitute_forms(&self, forms: &[Vec<i64>], new_nvars: usize) -> Result<Self> {
        if forms.len() != self.nvars() {
            return Err(Error::VariableCountMismatch(self.nvars(), forms.len()));
        }
        let lin: Vec<MultiPoly> = forms.iter().map(|f| MultiPoly::linear(f)).collect();
        let mut num = MultiPoly::zero(new_nvars);
        for (e, c) in self.num.terms() {
            let mut m = MultiPoly::constant(new_nvars, c.clone());
            for (k, &p) in e.iter().enumerate() {
                if p > 0 {
                    m = m.mul(&lin[k].pow(p));
                }
            }
            num = num.add(&m);
        }
        let mut out = Self::from_poly(num);
        for (k, &a) in self.axis.iter().enumerate() {
            if a > 0 {
                out = out.mul(&Self::linear_power(&forms[k], -(a as i64))?);
            }
        }
        for (&(i, j), &e) in &self.diff {
            let f: Vec<i64> = forms[i].iter().zip(&forms[j]).map(|(a, b)| a - b).collect();
            out = out.mul(&Self::linear_power(&f, -(e as i64))?);
        }
        Ok(out)
    }

    /// Replaces `z_i` by the integer linear form `form`; fails if a pole
    /// leaves the allowed locus.
    pub fn substitute_form(&self, i: usize, form: &[i64]) -> Result<Self> {
        let n = self.nvars();
        let num = Self::from_poly(self.num.substitute_linear(i, form));
        let mut den = Self::one(n);
        for (k, &a) in self.axis.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let f = if k == i { form.to_vec() } else { unit(n, k) };
            den = den.mul(&Self::linear_power(&f, -(a as i64))?);
        }
        for (&(a, b), &e) in &self.diff {
            let mut f = vec![0i64; n];
            let fa = if a == i { form.to_vec() } else { unit(n, a) };
            let fb = if b == i { form.to_vec() } else { unit(n, b) };
            for k in 0..n {
                f[k] = fa[k] - fb[k];
            }
            den = den.mul(&Self::linear_power(&f, -(e as i64))?);
        }
        Ok(num.mul(&den))
    }

    /// Renames variables: old `k` becomes new `map[k]`. Fails if a pole factor
    /// collapses to `z_k - z_k`.
    pub fn map_vars(&self, map: &[usize], new_nvars: usize) -> Result<Self> {
        if map.len() != self.nvars() {
            return Err(Error::VariableCountMismatch(self.nvars(), map.len()));
        }
        let num = self.num.map_vars(map, new_nvars);
        let mut axis = vec![0; new_nvars];
        for (k, &a) in self.axis.iter().enumerate() {
            axis[map[k]] += a;
        }
        let diff: Vec<((usize, usize), u32)> = self.diff.iter().map(|(&(i, j), &b)| ((map[i], map[j]), b)).collect();
        Self::new(num, axis, diff)
    }

    /// Adds a fresh variable at position `pos` on which nothing depends.
    pub fn insert_var(&self, pos: usize) -> Self {
        let n = self.nvars();
        let map: Vec<usize> = (0..n).map(|k| if k < pos { k } else { k + 1 }).collect();
        self.map_vars(&map, n + 1).expect("injective renaming")
    }

    /// Appends `extra` fresh variables.
    pub fn extend_vars(&self, extra: usize) -> Self {
        let n = self.nvars();
        let map: Vec<usize> = (0..n).collect();
        self.map_vars(&map, n + extra).expect("injective renaming")
    }

    /// For `f` over `nx` x-variables followed by y-variables: drops every
    /// `(x_i - y_j)` denominator factor for the given pairs, identifies `y_j`
    /// with `x_i`, and renumbers the unpaired y-variables after the x's.
    pub fn identify_and_exclude(&self, nx: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        let n = self.nvars();
        if nx > n {
            return Err(Error::IndexOutOfRange(nx, n));
        }
        let ny = n - nx;
        let mut target: Vec<Option<usize>> = vec![None; ny];
        let mut used_x = vec![false; nx];
        for &(i, j) in pairs {
            if i >= nx || j >= ny {
                return Err(Error::IndexOutOfRange(i.max(j), n));
            }
            if used_x[i] || target[j].is_some() {
                return Err(Error::InvalidInput(format!("pair ({}, {}) collides", i + 1, j + 1)));
            }
            used_x[i] = true;
            target[j] = Some(i);
        }
        let mut f = self.clone();
        for &(i, j) in pairs {
            f.diff.remove(&(i, nx + j));
        }
        let mut map: Vec<usize> = (0..nx).collect();
        let mut next = nx;
        for t in &target {
            match t {
                Some(i) => map.push(*i),
                None => {
                    map.push(next);
                    next += 1;
                }
            }
        }
        f.map_vars(&map, next)
    }

    /// Value at a point; `None` when the denominator vanishes there.
    pub fn eval_at(&self, point: &[Q]) -> Option<Q> {
        assert_eq!(point.len(), self.nvars());
        let den = self.denominator().eval(point);
        if den.is_zero() {
            return None;
        }
        Some(self.num.eval(point) / den)
    }

    /// Substitutes rational values for the variables flagged in `values`,
    /// keeping the rest (renumbered in order).
    pub fn specialize(&self, values: &[Option<Q>]) -> Result<Self> {
        let n = self.nvars();
        if values.len() != n {
            return Err(Error::VariableCountMismatch(n, values.len()));
        }
        let mut keep = Vec::new();
        let mut map = vec![0; n];
        for (k, v) in values.iter().enumerate() {
            if v.is_none() {
                map[k] = keep.len();
                keep.push(k);
            }
        }
        let m = keep.len();
        let evalp = |p: &MultiPoly| -> MultiPoly {
            let mut out = MultiPoly::zero(m);
            for (e, c) in p.terms() {
                let mut coef = c.clone();
                let mut e2 = vec![0; m];
                for (k, &x) in e.iter().enumerate() {
                    match &values[k] {
                        Some(v) => coef *= num_traits::pow(v.clone(), x as usize),
                        None => e2[map[k]] += x,
                    }
                }
                out.add_term(e2, coef);
            }
            out
        };
        let num = evalp(&self.num);
        let mut res = Self::from_poly(num);
        for (k, &a) in self.axis.iter().enumerate() {
            if a == 0 {
                continue;
            }
            match &values[k] {
                Some(v) => {
                    if v.is_zero() {
                        return Err(Error::PoleLocusViolation(format!("z{} = 0 is a pole", k + 1)));
                    }
                    res = res.scale(&crate::rational::pow_q(v, -(a as i64)));
                }
                None => res = res.mul(&Self::inv_var(m, map[k], a)),
            }
        }
        for (&(i, j), &b) in &self.diff {
            let factor = match (&values[i], &values[j]) {
                (Some(x), Some(y)) => {
                    let d = x - y;
                    if d.is_zero() {
                        return Err(Error::PoleLocusViolation(format!("z{} = z{} is a pole", i + 1, j + 1)));
                    }
                    Self::constant(m, crate::rational::pow_q(&d, -(b as i64)))
                }
                (None, None) => Self::inv_difference(m, map[i], map[j], b),
                (Some(x), None) | (None, Some(x)) => {
                    // (x - z)^-b or (z - x)^-b: only allowed if x = 0
                    if !x.is_zero() {
                        return Err(Error::PoleLocusViolation(format!("specialization moves pole z{}-z{} off the locus", i + 1, j + 1)));
                    }
                    let (k, s) = if values[i].is_none() { (map[i], 1) } else { (map[j], -1) };
                    let mut form = vec![0i64; m];
                    form[k] = s;
                    Self::linear_power(&form, -(b as i64))?
                }
            };
            res = res.mul(&factor);
        }
        Ok(res)
    }
}

fn unit(n: usize, k: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[k] = 1;
    v
}

pub(crate) fn format_form(form: &[i64]) -> String {
    let mut s = String::new();
    for (k, &c) in form.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let sign = if c < 0 {
            "-"
        } else if s.is_empty() {
            ""
        } else {
            "+"
        };
        let mag = if c.abs() == 1 { String::new() } else { format!("{}*", c.abs()) };
        s.push_str(&format!("{sign}{mag}z{}", k + 1));
    }
    if s.is_empty() {
        "0".into()
    } else {
        s
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", super::text::to_text(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qf;

    #[test]
    fn antisymmetric_sum_cancels() {
        let a = RatFunc::inv_difference(2, 0, 1, 1);
        let b = RatFunc::inv_difference(2, 1, 0, 1);
        assert!(a.add(&b).is_zero());
    }

    #[test]
    fn common_denominator() {
        let f = RatFunc::inv_difference(2, 0, 1, 1).add(&RatFunc::inv_var(2, 0, 1));
        assert_eq!(f.numerator(), &MultiPoly::linear(&[2, -1]));
        assert_eq!(f.axis_order(0), 1);
        assert_eq!(f.diff_order(0, 1), 1);
    }

    #[test]
    fn derivative_quotient_rule() {
        let f = RatFunc::var(2, 0).mul(&RatFunc::inv_difference(2, 0, 1, 2));
        let d = f.partial_derivative(1).unwrap();
        let expect = RatFunc::var(2, 0).scale(&q(2)).mul(&RatFunc::inv_difference(2, 0, 1, 3));
        assert_eq!(d, expect);
    }

    #[test]
    fn shift_and_violation() {
        let f = RatFunc::inv_var(2, 0, 1);
        assert_eq!(f.shift_substitute(0, 1).unwrap(), RatFunc::inv_difference(2, 0, 1, 1));
        let g = RatFunc::inv_difference(3, 0, 1, 1);
        assert!(matches!(g.shift_substitute(0, 2), Err(Error::PoleLocusViolation(_))));
    }

    #[test]
    fn identify_examples() {
        // 1/((x1-y1)(x1-y2)) over (x1,y1,y2)
        let f = RatFunc::inv_difference(3, 0, 1, 1).mul(&RatFunc::inv_difference(3, 0, 2, 1));
        let g = f.identify_and_exclude(1, &[(0, 0)]).unwrap();
        assert_eq!(g, RatFunc::inv_difference(2, 0, 1, 1));
        let h = RatFunc::from_poly(MultiPoly::difference(2, 0, 1));
        assert!(h.identify_and_exclude(1, &[(0, 0)]).unwrap().is_zero());
    }

    #[test]
    fn evaluation() {
        let f = RatFunc::inv_difference(2, 0, 1, 1);
        assert_eq!(f.eval_at(&[q(3), q(1)]), Some(qf(1, 2)));
        assert_eq!(f.eval_at(&[q(1), q(1)]), None);
    }
}
