//! Series in one variable with rational-function coefficients, and their
//! reconstruction against a pole ansatz in that variable.
//!
//! Two shapes occur: descending expansions at `z_k = ∞` and ascending
//! expansions in `x = z_k - z_c` around a centre variable.

use std::collections::BTreeMap;

use super::laurent::STABILIZATION_MARGIN;
use super::poly::MultiPoly;
use super::ratfunc::RatFunc;
use crate::error::{Error, Result};

/// Poles allowed in the expansion variable `z_k`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct UniAnsatz {
    pub axis: u32,
    /// `(j, b)`: a factor `(z_k - z_j)^b`.
    pub diffs: Vec<(usize, u32)>,
}

impl UniAnsatz {
    pub fn degree(&self) -> u32 {
        self.axis + self.diffs.iter().map(|d| d.1).sum::<u32>()
    }
}

/// `D(z_k) = z_k^a Π (z_k - z_j)^b` as coefficients of powers of `s`, where
/// `z_k = s + shift` (shift is `z_c` or 0).
fn ansatz_coefficients(nvars: usize, centre: Option<usize>, ans: &UniAnsatz) -> Vec<MultiPoly> {
    // polynomials in s with MultiPoly coefficients over the other variables
    let mut acc: Vec<MultiPoly> = vec![MultiPoly::one(nvars)];
    let mul_linear = |acc: &Vec<MultiPoly>, c0: &MultiPoly| -> Vec<MultiPoly> {
        // (s + c0) * acc
        let mut out = vec![MultiPoly::zero(nvars); acc.len() + 1];
        for (q, a) in acc.iter().enumerate() {
            out[q + 1] = out[q + 1].add(a);
            out[q] = out[q].add(&a.mul(c0));
        }
        out
    };
    let shift = match centre {
        Some(c) => MultiPoly::var(nvars, c),
        None => MultiPoly::zero(nvars),
    };
    for _ in 0..ans.axis {
        acc = mul_linear(&acc, &shift);
    }
    for &(j, b) in &ans.diffs {
        let c0 = shift.sub(&MultiPoly::var(nvars, j));
        for _ in 0..b {
            acc = mul_linear(&acc, &c0);
        }
    }
    acc
}

fn ansatz_ratfunc(nvars: usize, k: usize, ans: &UniAnsatz) -> RatFunc {
    let mut axis = vec![0; nvars];
    axis[k] = ans.axis;
    RatFunc::new(MultiPoly::one(nvars), axis, ans.diffs.iter().map(|&(j, b)| ((k, j), b))).expect("ansatz poles lie on the locus")
}

/// `Σ_e c_e z_k^e` known exactly for all `e >= lowest_exact`.
#[derive(Clone, Debug)]
pub struct SeriesAtInfinity {
    pub nvars: usize,
    pub var: usize,
    pub coeffs: BTreeMap<i64, RatFunc>,
    pub lowest_exact: i64,
}

impl SeriesAtInfinity {
    pub fn new(nvars: usize, var: usize, lowest_exact: i64) -> Self {
        SeriesAtInfinity { nvars, var, coeffs: BTreeMap::new(), lowest_exact }
    }

    pub fn add(&mut self, e: i64, c: RatFunc) {
        if e < self.lowest_exact || c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(e).or_insert_with(|| RatFunc::zero(self.nvars));
        *slot = slot.add(&c);
    }

    /// The lowest exponent that must be exact for `reconstruct` to succeed
    /// when the numerator degree is at most `deg D + top`.
    pub fn required_lowest(ans: &UniAnsatz) -> i64 {
        -(ans.degree() as i64) - STABILIZATION_MARGIN
    }

    pub fn reconstruct(&self, ans: &UniAnsatz) -> Result<RatFunc> {
        let n = self.nvars;
        let k = self.var;
        let d = ansatz_coefficients(n, None, ans);
        let degd = d.len() as i64 - 1;
        if self.lowest_exact > -degd - STABILIZATION_MARGIN {
            return Err(Error::NonStabilization(format!(
                "series in z{} known only down to z^{}; need z^{}",
                k + 1,
                self.lowest_exact,
                -degd - STABILIZATION_MARGIN
            )));
        }
        let Some(&top) = self.coeffs.keys().next_back() else { return Ok(RatFunc::zero(n)) };
        let mut num = RatFunc::zero(n);
        let zk = RatFunc::var(n, k);
        for q in (-STABILIZATION_MARGIN..=top + degd).rev() {
            let mut pq = RatFunc::zero(n);
            for (dq, dpoly) in d.iter().enumerate() {
                if let Some(c) = self.coeffs.get(&(q - dq as i64)) {
                    pq = pq.add(&c.mul(&RatFunc::from_poly(dpoly.clone())));
                }
            }
            if q < 0 {
                if !pq.is_zero() {
                    return Err(Error::NonStabilization(format!("coefficient of z{}^{} is nonzero after clearing the ansatz", k + 1, q)));
                }
                continue;
            }
            num = num.add(&pq.mul(&zk.pow(q as u32)));
        }
        Ok(num.mul(&ansatz_ratfunc(n, k, ans)))
    }
}

/// `Σ_e c_e x^e` with `x = z_k - z_c`, known exactly for all `e <= highest_exact`.
#[derive(Clone, Debug)]
pub struct SeriesAround {
    pub nvars: usize,
    pub var: usize,
    pub centre: usize,
    pub coeffs: BTreeMap<i64, RatFunc>,
    pub highest_exact: i64,
}

impl SeriesAround {
    pub fn new(nvars: usize, var: usize, centre: usize, highest_exact: i64) -> Self {
        SeriesAround { nvars, var, centre, coeffs: BTreeMap::new(), highest_exact }
    }

    pub fn add(&mut self, e: i64, c: RatFunc) {
        if e > self.highest_exact || c.is_zero() {
            return;
        }
        let slot = self.coeffs.entry(e).or_insert_with(|| RatFunc::zero(self.nvars));
        *slot = slot.add(&c);
    }

    /// Reconstructs assuming the cleared numerator has `x`-degree at most
    /// `num_degree`; the next `STABILIZATION_MARGIN` orders must vanish.
    pub fn reconstruct(&self, ans: &UniAnsatz, num_degree: i64) -> Result<RatFunc> {
        let n = self.nvars;
        let (k, c) = (self.var, self.centre);
        if self.highest_exact < num_degree + STABILIZATION_MARGIN {
            return Err(Error::NonStabilization(format!("series in z{}-z{} known only up to order {}", k + 1, c + 1, self.highest_exact)));
        }
        let d = ansatz_coefficients(n, Some(c), ans);
        let Some(&low) = self.coeffs.keys().next() else { return Ok(RatFunc::zero(n)) };
        let x = RatFunc::from_poly(MultiPoly::difference(n, k, c));
        let mut num = RatFunc::zero(n);
        for q in low.min(0)..=num_degree + STABILIZATION_MARGIN {
            let mut pq = RatFunc::zero(n);
            for (dq, dpoly) in d.iter().enumerate() {
                if let Some(cf) = self.coeffs.get(&(q - dq as i64)) {
                    pq = pq.add(&cf.mul(&RatFunc::from_poly(dpoly.clone())));
                }
            }
            if pq.is_zero() {
                continue;
            }
            if q < 0 || q > num_degree {
                return Err(Error::NonStabilization(format!("coefficient of (z{}-z{})^{} is nonzero after clearing the ansatz", k + 1, c + 1, q)));
            }
            num = num.add(&pq.mul(&x.pow(q as u32)));
        }
        Ok(num.mul(&ansatz_ratfunc(n, k, ans)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{binomial, q};

    #[test]
    fn at_infinity_geometric() {
        // 1/(z1-z2)^2 = Σ_k (k+1) z2^k z1^{-k-2}
        let n = 2;
        let mut s = SeriesAtInfinity::new(n, 0, -10);
        for k in 0..9i64 {
            let c = RatFunc::var(n, 1).pow(k as u32).scale(&binomial(k + 1, 1));
            s.add(-k - 2, c);
        }
        let ans = UniAnsatz { axis: 0, diffs: vec![(1, 2)] };
        assert_eq!(s.reconstruct(&ans).unwrap(), RatFunc::inv_difference(n, 0, 1, 2));
        let tight = UniAnsatz { axis: 0, diffs: vec![(1, 1)] };
        assert!(s.reconstruct(&tight).is_err());
    }

    #[test]
    fn around_centre() {
        // f = 1/((z1-z2)^2 z1) around z1 = z2, x = z1-z2: 1/(x^2 (x + z2))
        let n = 2;
        let f = RatFunc::inv_difference(n, 0, 1, 2).mul(&RatFunc::inv_var(n, 0, 1));
        let mut s = SeriesAround::new(n, 0, 1, 6);
        // 1/(x+z2) = Σ (-1)^k x^k z2^{-k-1}
        for k in 0..9i64 {
            let c = RatFunc::inv_var(n, 1, (k + 1) as u32).scale(&q(if k % 2 == 0 { 1 } else { -1 }));
            s.add(k - 2, c);
        }
        let ans = UniAnsatz { axis: 1, diffs: vec![(1, 2)] };
        assert_eq!(s.reconstruct(&ans, 2).unwrap(), f);
    }
}
