//! The rank-one Heisenberg vertex algebra with `[a(m), a(n)] = m δ_{m+n,0}`,
//! acting on itself as the adjoint module.

use std::collections::HashMap;
use std::sync::Mutex;

use num_traits::{One, Zero};

use super::fock::FockState;
use super::vector::ModuleVector;
use crate::error::{Error, Result};
use crate::rational::{binomial, factorial, pow_q, q, sign_pow, Q};

/// Operations every shipped instance provides. Only the Heisenberg algebra
/// implements it today.
pub trait VertexAlgebra: Sync {
    fn cutoff(&self) -> u32;
    fn basis(&self, weight: u32) -> Vec<FockState>;
    /// `u(n) w` for basis states.
    fn vertex_mode_basis(&self, u: &FockState, n: i64, w: &FockState) -> ModuleVector;
    fn virasoro(&self, k: i64, v: &ModuleVector) -> ModuleVector;
    fn bilinear_form(&self, a: &ModuleVector, b: &ModuleVector) -> Q;
}

type ModeKey = (FockState, i64, FockState);

pub struct Heisenberg {
    pub(crate) cutoff: u32,
    lambda: Q,
    cache: Mutex<HashMap<ModeKey, ModuleVector>>,
}

impl Heisenberg {
    pub fn new(cutoff: u32) -> Self {
        Self::with_lambda(cutoff, Q::one())
    }

    pub fn with_lambda(cutoff: u32, lambda: Q) -> Self {
        assert!(!lambda.is_zero(), "λ must be nonzero");
        Heisenberg { cutoff, lambda, cache: Mutex::new(HashMap::new()) }
    }

    pub fn lambda(&self) -> &Q {
        &self.lambda
    }

    pub fn central_charge(&self) -> Q {
        Q::one()
    }

    pub fn check_cutoff(&self, v: &ModuleVector) -> Result<()> {
        match v.max_weight() {
            Some(w) if w > self.cutoff => Err(Error::CutoffExceeded { weight: w, cutoff: self.cutoff }),
            _ => Ok(()),
        }
    }

    /// The Heisenberg mode `a(m)` on one basis state.
    pub fn mode_action_basis(m: i64, s: &FockState) -> ModuleVector {
        match m.cmp(&0) {
            std::cmp::Ordering::Less => ModuleVector::basis(s.with_part((-m) as u32)),
            std::cmp::Ordering::Equal => ModuleVector::zero(),
            std::cmp::Ordering::Greater => {
                let k = s.multiplicity(m as u32);
                match s.without_part(m as u32) {
                    Some(t) if k > 0 => ModuleVector::term(t, q(m * k as i64)),
                    _ => ModuleVector::zero(),
                }
            }
        }
    }

    pub fn mode_action(m: i64, v: &ModuleVector) -> ModuleVector {
        v.map_linear(|s| Self::mode_action_basis(m, s))
    }

    /// `v(n) w`, rejecting inputs above the cutoff.
    pub fn vertex_mode(&self, v: &ModuleVector, n: i64, w: &ModuleVector) -> Result<ModuleVector> {
        self.check_cutoff(v)?;
        self.check_cutoff(w)?;
        Ok(self.vertex_mode_unchecked(v, n, w))
    }

    pub fn vertex_mode_unchecked(&self, v: &ModuleVector, n: i64, w: &ModuleVector) -> ModuleVector {
        let mut out = ModuleVector::zero();
        for (u, cu) in v.iter() {
            for (t, ct) in w.iter() {
                out.add_scaled(&self.mode_basis(u, n, t), &(cu * ct));
            }
        }
        out
    }

    fn mode_basis(&self, u: &FockState, n: i64, w: &FockState) -> ModuleVector {
        let wt = u.weight() as i64 + w.weight() as i64 - n - 1;
        if wt < 0 {
            return ModuleVector::zero();
        }
        if u.is_vacuum() {
            return if n == -1 { ModuleVector::basis(w.clone()) } else { ModuleVector::zero() };
        }
        let key = (u.clone(), n, w.clone());
        if let Some(v) = self.cache.lock().unwrap().get(&key) {
            return v.clone();
        }
        // (a(-k)u')(n) = Σ_j C(k+j-1,j) [a(-k-j) u'(n+j) - (-1)^k u'(n-k-j) a(j)]
        let k = u.parts()[0] as i64;
        let rest = u.without_part(k as u32).unwrap();
        let mut out = ModuleVector::zero();
        let jmax = rest.weight() as i64 + w.weight() as i64 - n - 1;
        for j in 0..=jmax.max(0) {
            let inner = self.mode_basis(&rest, n + j, w);
            if !inner.is_zero() {
                out.add_scaled(&Self::mode_action(-k - j, &inner), &binomial(k + j - 1, j));
            }
        }
        for j in 1..=w.weight() as i64 {
            let aw = Self::mode_action_basis(j, w);
            if aw.is_zero() {
                continue;
            }
            let inner = self.vertex_mode_unchecked(&ModuleVector::basis(rest.clone()), n - k - j, &aw);
            out.add_scaled(&inner, &(-sign_pow(k) * binomial(k + j - 1, j)));
        }
        self.cache.lock().unwrap().insert(key, out.clone());
        out
    }

    /// Sugawara `L(n) = ½ Σ_m :a(n-m) a(m):`.
    pub fn virasoro_mode(n: i64, v: &ModuleVector) -> ModuleVector {
        let Some(top) = v.max_weight() else { return ModuleVector::zero() };
        let bound = top as i64 + n.abs() + 1;
        let mut out = ModuleVector::zero();
        for m in -bound..=bound {
            let (p, r) = (n - m, m);
            // annihilators to the right
            let (left, right) = if p > 0 && r <= 0 { (r, p) } else { (p, r) };
            let t = Self::mode_action(left, &Self::mode_action(right, v));
            out.add_scaled(&t, &Q::new(1.into(), 2.into()));
        }
        out
    }

    /// `L(-1)u = u(-2)1`, an independent route to translation.
    pub fn translation(&self, v: &ModuleVector) -> ModuleVector {
        self.vertex_mode_unchecked(v, -2, &ModuleVector::vacuum())
    }

    /// `u†(n) w` for homogeneous `u` of weight `d`:
    /// `Σ_k (-1)^{k+m+1} λ^{2d-2k-2m-2} (L(1)^k u / k!)(m) w` with `m = 2d-k-n-2`.
    pub fn adjoint_mode(&self, u: &ModuleVector, n: i64, w: &ModuleVector) -> ModuleVector {
        let mut out = ModuleVector::zero();
        for d in u.weights() {
            let ud = u.project_weight(d);
            let d = d as i64;
            let mut lk = ud;
            for k in 0..=d {
                if lk.is_zero() {
                    break;
                }
                let m = 2 * d - k - n - 2;
                let coeff = sign_pow(k + m + 1) * pow_q(&self.lambda, 2 * d - 2 * k - 2 * m - 2) / factorial(k as u32);
                out.add_scaled(&self.vertex_mode_unchecked(&lk, m, w), &coeff);
                lk = Self::virasoro_mode(1, &lk);
            }
        }
        out
    }

    /// The invariant form via `<a(-n)u, b> = (-1)^{n+1} λ^{-2n} <u, a(n) b>`.
    pub fn form(&self, a: &ModuleVector, b: &ModuleVector) -> Q {
        let mut acc = Q::zero();
        for (s, c) in a.iter() {
            acc += c * self.form_basis(s, b);
        }
        acc
    }

    fn form_basis(&self, s: &FockState, b: &ModuleVector) -> Q {
        if s.is_vacuum() {
            return b.coeff(s);
        }
        let n = s.parts()[0];
        let rest = s.without_part(n).unwrap();
        let ab = Self::mode_action(n as i64, &b.project_weight(s.weight()));
        if ab.is_zero() {
            return Q::zero();
        }
        let n = n as i64;
        sign_pow(n + 1) * pow_q(&self.lambda, -2 * n) * self.form_basis(&rest, &ab)
    }

    /// Closed-form diagonal Gram entry, used as an oracle.
    pub fn gram_oracle(&self, s: &FockState, t: &FockState) -> Q {
        if s != t {
            return Q::zero();
        }
        let mut acc = Q::one();
        for &n in s.parts() {
            let n = n as i64;
            acc *= sign_pow(n + 1) * pow_q(&self.lambda, -2 * n) * q(n);
        }
        let mut i = 0;
        while i < s.parts().len() {
            let k = s.multiplicity(s.parts()[i]);
            acc *= factorial(k as u32);
            i += k;
        }
        acc
    }
}

impl VertexAlgebra for Heisenberg {
    fn cutoff(&self) -> u32 {
        self.cutoff
    }

    fn basis(&self, weight: u32) -> Vec<FockState> {
        FockState::basis(weight)
    }

    fn vertex_mode_basis(&self, u: &FockState, n: i64, w: &FockState) -> ModuleVector {
        self.mode_basis(u, n, w)
    }

    fn virasoro(&self, k: i64, v: &ModuleVector) -> ModuleVector {
        Self::virasoro_mode(k, v)
    }

    fn bilinear_form(&self, a: &ModuleVector, b: &ModuleVector) -> Q {
        self.form(a, b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn st(s: &str) -> ModuleVector {
        ModuleVector::basis(s.parse().unwrap())
    }

    #[test]
    fn heisenberg_modes() {
        assert_eq!(Heisenberg::mode_action(1, &st("a(-1)|0>")), ModuleVector::vacuum());
        assert_eq!(Heisenberg::mode_action(-2, &ModuleVector::vacuum()), st("a(-2)|0>"));
        assert!(Heisenberg::mode_action(2, &st("a(-1)^2|0>")).is_zero());
    }

    #[test]
    fn vertex_mode_examples() {
        let h = Heisenberg::new(4);
        let a = st("a(-1)|0>");
        let w = st("a(-2)a(-1)|0>");
        assert_eq!(h.vertex_mode(&ModuleVector::vacuum(), -1, &w).unwrap(), w);
        assert!(h.vertex_mode(&ModuleVector::vacuum(), 0, &w).unwrap().is_zero());
        assert!(h.vertex_mode(&a, 0, &a).unwrap().is_zero());
        assert_eq!(h.vertex_mode(&a, 1, &a).unwrap(), ModuleVector::vacuum());
        assert!(h.vertex_mode(&st("a(-5)|0>"), 0, &a).is_err());
    }

    #[test]
    fn virasoro_examples() {
        let v = st("a(-2)a(-1)|0>");
        assert_eq!(Heisenberg::virasoro_mode(0, &v), v.scale(&q(3)));
        assert!(Heisenberg::virasoro_mode(-1, &ModuleVector::vacuum()).is_zero());
        assert_eq!(Heisenberg::virasoro_mode(1, &st("a(-2)|0>")), st("a(-1)|0>").scale(&q(2)));
    }

    #[test]
    fn translation_matches_sugawara() {
        let h = Heisenberg::new(5);
        for s in FockState::basis_upto(4) {
            let v = ModuleVector::basis(s);
            assert_eq!(h.translation(&v), Heisenberg::virasoro_mode(-1, &v));
        }
    }

    #[test]
    fn form_matches_gram_oracle() {
        for lambda in [q(1), q(2), Q::new((-1).into(), 3.into())] {
            let h = Heisenberg::with_lambda(5, lambda);
            let b = FockState::basis_upto(4);
            for s in &b {
                for t in &b {
                    let got = h.form(&ModuleVector::basis(s.clone()), &ModuleVector::basis(t.clone()));
                    assert_eq!(got, h.gram_oracle(s, t), "{s} {t}");
                }
            }
        }
        let h = Heisenberg::new(2);
        assert_eq!(h.form(&st("a(-1)|0>"), &st("a(-1)|0>")), q(1));
    }

    #[test]
    fn adjoint_of_translation() {
        // <L(-1)x, y> = -λ^{-2} <x, L(1)y>
        let h = Heisenberg::with_lambda(5, q(3));
        for s in FockState::basis_upto(3) {
            for t in FockState::basis(s.weight() + 1) {
                let x = ModuleVector::basis(s.clone());
                let y = ModuleVector::basis(t);
                let lhs = h.form(&Heisenberg::virasoro_mode(-1, &x), &y);
                let rhs = -pow_q(h.lambda(), -2) * h.form(&x, &Heisenberg::virasoro_mode(1, &y));
                assert_eq!(lhs, rhs);
            }
        }
    }
}
