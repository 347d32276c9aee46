//! Sparse multivariate polynomials with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::rational::{q, Q};

pub type Exponents = Vec<u32>;

/// A polynomial in `nvars` variables stored as a map from exponent vectors
/// to nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<Exponents, Q>,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, Q::one())
    }

    pub fn constant(nvars: usize, c: Q) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(nvars, e, Q::one())
    }

    pub fn monomial(nvars: usize, exps: Exponents, c: Q) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut p = Self::zero(nvars);
        p.add_term(exps, c);
        p
    }

    /// `sum_k coeffs[k] * z_k` with small integer coefficients.
    pub fn linear(coeffs: &[i64]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (k, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                let mut e = vec![0; n];
                e[k] = 1;
                p.add_term(e, q(c));
            }
        }
        p
    }

    /// `z_i - z_j`
    pub fn difference(nvars: usize, i: usize, j: usize) -> Self {
        let mut c = vec![0i64; nvars];
        c[i] += 1;
        c[j] -= 1;
        Self::linear(&c)
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Exponents, Q)>) -> Self {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, Q> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn constant_value(&self) -> Option<Q> {
        if self.is_zero() {
            return Some(Q::zero());
        }
        if self.is_constant() {
            self.terms.values().next().cloned()
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exps: Exponents, c: Q) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(exps.len(), self.nvars);
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get().clone() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable-count mismatch");
        let (big, small) = if self.len() >= other.len() { (self, other) } else { (other, self) };
        let mut out = big.clone();
        for (e, c) in &small.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        MultiPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect() }
    }

    pub fn scale(&self, s: &Q) -> Self {
        if s.is_zero() {
            return Self::zero(self.nvars);
        }
        MultiPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.nvars, other.nvars, "variable-count mismatch");
        let mut out = Self::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.nvars);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Multiplies by the monomial `z^shift`.
    pub fn shift(&self, shift: &[u32]) -> Self {
        MultiPoly { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.iter().zip(shift).map(|(a, b)| a + b).collect(), c.clone())).collect() }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[i]).max()
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut e2 = e.clone();
                e2[i] -= 1;
                out.add_term(e2, c * q(e[i] as i64));
            }
        }
        out
    }

    /// Exact division by `z_i`, or `None` when some term lacks `z_i`.
    pub fn div_var(&self, i: usize) -> Option<Self> {
        if self.terms.keys().any(|e| e[i] == 0) {
            return None;
        }
        Some(MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let mut e2 = e.clone();
                    e2[i] -= 1;
                    (e2, c.clone())
                })
                .collect(),
        })
    }

    /// Splits into coefficients of powers of `z_i` (those coefficients no
    /// longer contain `z_i`).
    pub fn coefficients_in(&self, i: usize) -> BTreeMap<u32, MultiPoly> {
        let mut out: BTreeMap<u32, MultiPoly> = BTreeMap::new();
        for (e, c) in &self.terms {
            let d = e[i];
            let mut e2 = e.clone();
            e2[i] = 0;
            out.entry(d).or_insert_with(|| MultiPoly::zero(self.nvars)).add_term(e2, c.clone());
        }
        out
    }

    /// Exact division by `z_i - z_j` via synthetic division in `z_i`.
    pub fn div_difference(&self, i: usize, j: usize) -> Option<Self> {
        if self.is_zero() {
            return Some(self.clone());
        }
        let coeffs = self.coefficients_in(i);
        let top = *coeffs.keys().next_back().unwrap();
        if top == 0 {
            return None;
        }
        let zj = MultiPoly::var(self.nvars, j);
        let mut quotient = MultiPoly::zero(self.nvars);
        // carry holds q_{d-1} while walking down from the top degree
        let mut carry = MultiPoly::zero(self.nvars);
        for d in (1..=top).rev() {
            let c = coeffs.get(&d).cloned().unwrap_or_else(|| MultiPoly::zero(self.nvars));
            carry = c.add(&zj.mul(&carry));
            let mut sh = vec![0; self.nvars];
            sh[i] = d - 1;
            quotient = quotient.add(&carry.shift(&sh));
        }
        let c0 = coeffs.get(&0).cloned().unwrap_or_else(|| MultiPoly::zero(self.nvars));
        let rem = c0.add(&zj.mul(&carry));
        if rem.is_zero() {
            Some(quotient)
        } else {
            None
        }
    }

    /// Substitutes `z_i -> sum_k lin[k] z_k`.
    pub fn substitute_linear(&self, i: usize, lin: &[i64]) -> Self {
        let form = MultiPoly::linear(lin);
        let mut powers: Vec<MultiPoly> = vec![MultiPoly::one(self.nvars)];
        let mut out = MultiPoly::zero(self.nvars);
        for (e, c) in &self.terms {
            let d = e[i] as usize;
            while powers.len() <= d {
                let next = powers.last().unwrap().mul(&form);
                powers.push(next);
            }
            let mut rest = e.clone();
            rest[i] = 0;
            out = out.add(&powers[d].shift(&rest).scale(c));
        }
        out
    }

    /// Renames variables: old variable `k` becomes new variable `map[k]`.
    /// Non-injective maps identify variables.
    pub fn map_vars(&self, map: &[usize], new_nvars: usize) -> Self {
        assert_eq!(map.len(), self.nvars);
        let mut out = MultiPoly::zero(new_nvars);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; new_nvars];
            for (k, &x) in e.iter().enumerate() {
                e2[map[k]] += x;
            }
            out.add_term(e2, c.clone());
        }
        out
    }

    pub fn eval(&self, point: &[Q]) -> Q {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (k, &x) in e.iter().enumerate() {
                if x > 0 {
                    t *= num_traits::pow(point[k].clone(), x as usize);
                }
            }
            acc += t;
        }
        acc
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::ratfield::text::format_poly(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_by_difference() {
        let d = MultiPoly::difference(2, 0, 1);
        let p = d.mul(&MultiPoly::linear(&[2, 3]));
        assert_eq!(p.div_difference(0, 1), Some(MultiPoly::linear(&[2, 3])));
        assert_eq!(MultiPoly::linear(&[1, 1]).div_difference(0, 1), None);
        // z2 - z1 divided by z1 - z2
        assert_eq!(MultiPoly::difference(2, 1, 0).div_difference(0, 1), Some(MultiPoly::constant(2, q(-1))));
    }

    #[test]
    fn substitution_expands() {
        // z1^2 with z1 -> z1 - z2
        let p = MultiPoly::var(2, 0).pow(2);
        let s = p.substitute_linear(0, &[1, -1]);
        assert_eq!(s, MultiPoly::difference(2, 0, 1).pow(2));
    }
}
