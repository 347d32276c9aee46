//! Truncated multivariate Laurent expansions in a region `|z_{π(1)}| > … > |z_{π(n)}|`
//! and reconstruction of rational functions from them.
//!
//! A monomial `z^α` has grade `Σ_m m·α_{π(m)}` (0-based position `m`). Every
//! expansion factor `1/(z_i - z_j)` raises the grade by at least one per
//! term, so grade-truncation is the natural cut. A series stores `cut`: every
//! term of grade below `cut` is exact.

use std::collections::BTreeMap;

use num_traits::Zero;

use super::poly::MultiPoly;
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};
use crate::rational::{binomial, Q};

/// Extra grade levels that must vanish before a reconstruction is accepted.
pub const STABILIZATION_MARGIN: i64 = 2;

const UNBOUNDED: i64 = i64::MAX / 4;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentSeries {
    nvars: usize,
    region: Vec<usize>,
    position: Vec<i64>,
    cut: i64,
    terms: BTreeMap<Vec<i32>, Q>,
}

impl LaurentSeries {
    pub fn new(region: Vec<usize>, cut: i64) -> Result<Self> {
        let n = region.len();
        let mut position = vec![-1i64; n];
        for (m, &v) in region.iter().enumerate() {
            if v >= n || position[v] >= 0 {
                return Err(Error::InvalidInput(format!("region {region:?} is not a total order")));
            }
            position[v] = m as i64;
        }
        Ok(LaurentSeries { nvars: n, region, position, cut, terms: BTreeMap::new() })
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn region(&self) -> &[usize] {
        &self.region
    }

    pub fn cut(&self) -> i64 {
        self.cut
    }

    pub fn terms(&self) -> &BTreeMap<Vec<i32>, Q> {
        &self.terms
    }

    pub fn grade(&self, e: &[i32]) -> i64 {
        e.iter().enumerate().map(|(v, &x)| self.position[v] * x as i64).sum()
    }

    /// Adds a term; terms at or above the cut are discarded.
    pub fn add_term(&mut self, e: Vec<i32>, c: Q) {
        if c.is_zero() || self.grade(&e) >= self.cut {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn min_grade(&self) -> Option<i64> {
        self.terms.keys().map(|e| self.grade(e)).min()
    }

    /// Product, exact below `min(cut_a + low_b, cut_b + low_a)` where `low`
    /// is a lower bound for the grades present.
    pub fn mul(&self, other: &Self, low_self: i64, low_other: i64) -> Self {
        assert_eq!(self.region, other.region, "region mismatch");
        let cut = self.cut.saturating_add(low_other).min(other.cut.saturating_add(low_self)).min(UNBOUNDED);
        let mut out = LaurentSeries { cut, ..Self::new(self.region.clone(), cut).unwrap() };
        for (e1, c1) in &self.terms {
            let g1 = self.grade(e1);
            for (e2, c2) in &other.terms {
                if g1 + self.grade(e2) >= cut {
                    continue;
                }
                let e: Vec<i32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn from_poly(p: &MultiPoly, region: Vec<usize>) -> Result<Self> {
        let mut s = Self::new(region, UNBOUNDED)?;
        for (e, c) in p.terms() {
            s.add_term(e.iter().map(|&x| x as i32).collect(), c.clone());
        }
        Ok(s)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Upper bound on the pole orders a reconstruction may use.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PoleAnsatz {
    pub axis: Vec<u32>,
    pub diff: BTreeMap<(usize, usize), u32>,
}

impl PoleAnsatz {
    pub fn new(nvars: usize) -> Self {
        PoleAnsatz { axis: vec![0; nvars], diff: BTreeMap::new() }
    }

    pub fn of(f: &RatFunc) -> Self {
        PoleAnsatz { axis: f.axis_orders().to_vec(), diff: f.diff_orders().clone() }
    }

    pub fn with_diff(mut self, i: usize, j: usize, b: u32) -> Self {
        let key = if i < j { (i, j) } else { (j, i) };
        self.diff.insert(key, b);
        self
    }

    pub fn with_axis(mut self, i: usize, a: u32) -> Self {
        self.axis[i] = a;
        self
    }

    pub fn denominator(&self) -> MultiPoly {
        let n = self.axis.len();
        let mut d = MultiPoly::monomial(n, self.axis.clone(), Q::from_integer(1.into()));
        for (&(i, j), &b) in &self.diff {
            d = d.mul(&MultiPoly::difference(n, i, j).pow(b));
        }
        d
    }

    pub fn admits(&self, f: &RatFunc) -> bool {
        f.axis_orders().iter().zip(&self.axis).all(|(a, b)| a <= b) && f.diff_orders().iter().all(|(k, b)| self.diff.get(k).is_some_and(|x| b <= x))
    }
}

/// Series of `1/(z_i - z_j)^b` (with `i<j` sign convention) in the region,
/// exact below relative grade `budget` above its leading grade.
fn difference_inverse(s: &LaurentSeries, i: usize, j: usize, b: u32, budget: i64) -> (LaurentSeries, i64) {
    let n = s.nvars;
    let (big, small, sign) = if s.position[i] < s.position[j] { (i, j, 1) } else { (j, i, if b.is_multiple_of(2) { 1 } else { -1 }) };
    let step = (s.position[small] - s.position[big]).max(1);
    let lead = -(b as i64) * s.position[big];
    let mut out = LaurentSeries::new(s.region.clone(), lead + budget).unwrap();
    let mut k = 0i64;
    while k * step < budget {
        let mut e = vec![0i32; n];
        e[big] = -(b as i32) - k as i32;
        e[small] = k as i32;
        out.add_term(e, binomial(b as i64 + k - 1, k) * Q::from_integer(sign.into()));
        k += 1;
    }
    (out, lead)
}

/// Expansion of `f` in the region, exact for all terms of grade below
/// `leading grade of 1/den + max numerator grade + order`.
pub fn expand_region(f: &RatFunc, order: i64, region: &[usize]) -> Result<LaurentSeries> {
    let n = f.nvars();
    if region.len() != n {
        return Err(Error::VariableCountMismatch(n, region.len()));
    }
    let base = LaurentSeries::new(region.to_vec(), UNBOUNDED)?;
    if f.is_zero() {
        return LaurentSeries::new(region.to_vec(), order);
    }
    let num = LaurentSeries::from_poly(f.numerator(), region.to_vec())?;
    let gmin = num.min_grade().unwrap();
    let gmax = num.terms.keys().map(|e| num.grade(e)).max().unwrap();
    let budget = gmax - gmin + order;
    // axis part is a single monomial
    let mut inv = LaurentSeries::new(region.to_vec(), UNBOUNDED)?;
    inv.add_term(f.axis_orders().iter().map(|&a| -(a as i32)).collect(), Q::from_integer(1.into()));
    let mut lead = inv.min_grade().unwrap();
    for (&(i, j), &b) in f.diff_orders() {
        let (s, l) = difference_inverse(&base, i, j, b, budget);
        inv = inv.mul(&s, lead, l);
        lead += l;
    }
    Ok(inv.mul(&num, lead, gmin))
}

/// Smallest `order` for which `reconstruct(expand_region(f, order), ansatz)`
/// is guaranteed to stabilize when `f` fits the ansatz.
pub fn sufficient_order(f_den: &PoleAnsatz, ansatz: &PoleAnsatz, region: &[usize]) -> i64 {
    // spread of the extra factor D_ansatz / D_f
    let n = ansatz.axis.len();
    let base = LaurentSeries::new(region.to_vec(), UNBOUNDED).unwrap();
    let mut spread = 0;
    for (&(i, j), &b) in &ansatz.diff {
        let own = f_den.diff.get(&(i, j)).copied().unwrap_or(0);
        if b > own {
            spread += (b - own) as i64 * (base.position[i] - base.position[j]).abs();
        }
    }
    let _ = n;
    spread + STABILIZATION_MARGIN + 1
}

/// Multiplies the series by the ansatz denominator and reads off the
/// numerator; fails when negative exponents survive or the top
/// `STABILIZATION_MARGIN` exact grade levels do not vanish.
pub fn reconstruct(series: &LaurentSeries, ansatz: &PoleAnsatz) -> Result<RatFunc> {
    let n = series.nvars;
    if ansatz.axis.len() != n {
        return Err(Error::VariableCountMismatch(n, ansatz.axis.len()));
    }
    let d = ansatz.denominator();
    let ds = LaurentSeries::from_poly(&d, series.region.clone())?;
    let dmin = ds.min_grade().unwrap_or(0);
    let low = series.min_grade().unwrap_or(series.cut);
    let prod = series.mul(&ds, low, dmin);
    let cut = prod.cut;
    let mut num = MultiPoly::zero(n);
    for (e, c) in &prod.terms {
        if cut < UNBOUNDED && prod.grade(e) >= cut - STABILIZATION_MARGIN {
            return Err(Error::NonStabilization(format!(
                "nonzero term at grade {} within {} levels of the truncation {}",
                prod.grade(e),
                STABILIZATION_MARGIN,
                cut
            )));
        }
        if e.iter().any(|&x| x < 0) {
            return Err(Error::NonStabilization(format!("negative exponent {e:?} after clearing the ansatz")));
        }
        num.add_term(e.iter().map(|&x| x as u32).collect(), c.clone());
    }
    RatFunc::new(num, ansatz.axis.clone(), ansatz.diff.iter().map(|(&k, &b)| (k, b)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn term(s: &LaurentSeries, e: &[i32]) -> Q {
        s.terms().get(e).cloned().unwrap_or_else(Q::zero)
    }

    #[test]
    fn geometric_series() {
        let f = RatFunc::inv_difference(2, 0, 1, 1);
        let s = expand_region(&f, 3, &[0, 1]).unwrap();
        assert_eq!(s.terms().len(), 3);
        assert_eq!(term(&s, &[-1, 0]), q(1));
        assert_eq!(term(&s, &[-2, 1]), q(1));
        assert_eq!(term(&s, &[-3, 2]), q(1));
    }

    #[test]
    fn squared_difference() {
        let f = RatFunc::inv_difference(2, 0, 1, 2);
        let s = expand_region(&f, 3, &[0, 1]).unwrap();
        assert_eq!(term(&s, &[-2, 0]), q(1));
        assert_eq!(term(&s, &[-3, 1]), q(2));
        assert_eq!(term(&s, &[-4, 2]), q(3));
        assert_eq!(s.terms().len(), 3);
    }

    #[test]
    fn reversed_region() {
        // |z2| > |z1|: 1/(z1-z2) = -z2^-1 - z1 z2^-2 - ...
        let f = RatFunc::inv_difference(2, 0, 1, 1);
        let s = expand_region(&f, 2, &[1, 0]).unwrap();
        assert_eq!(term(&s, &[0, -1]), q(-1));
        assert_eq!(term(&s, &[1, -2]), q(-1));
    }

    #[test]
    fn round_trip_and_failure() {
        let f = RatFunc::inv_difference(2, 0, 1, 2);
        let ansatz = PoleAnsatz::new(2).with_diff(0, 1, 2);
        let s = expand_region(&f, 4, &[0, 1]).unwrap();
        assert_eq!(reconstruct(&s, &ansatz).unwrap(), f);
        let g = RatFunc::inv_difference(2, 0, 1, 3);
        let s = expand_region(&g, 8, &[0, 1]).unwrap();
        assert!(matches!(reconstruct(&s, &ansatz), Err(Error::NonStabilization(_))));
        let z = LaurentSeries::new(vec![0, 1], 5).unwrap();
        assert!(reconstruct(&z, &ansatz).unwrap().is_zero());
    }
}
