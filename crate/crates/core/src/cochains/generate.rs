//! Constructors for test cochains.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::validate::validate_all;
use super::{unit_form, Cochain, Op, Slot, Term};
use crate::correlators::Context;
use crate::error::{Error, Result};
use crate::ratfield::Permutation;
use crate::rational::Q;
use crate::voa::ModuleVector;

/// Input cutoff `K` and stored dual weight for generated cochains.
#[derive(Clone, Copy, Debug)]
pub struct Generator {
    pub cutoff: u32,
    pub dual_cutoff: u32,
}

#[derive(Clone, Debug)]
pub enum Kind {
    ModuleVector(ModuleVector),
    FromYW(ModuleVector),
    FromE(usize, ModuleVector),
    Zero(usize),
    RandomValid(usize, u64),
}

impl Generator {
    pub fn new(cutoff: u32, dual_cutoff: u32) -> Self {
        Generator { cutoff, dual_cutoff }
    }

    fn terms_for(w: &ModuleVector, ops: Vec<Op>) -> Vec<Term> {
        w.iter().map(|(s, c)| Term { coef: c.clone(), ops: ops.clone(), w: s.clone() }).collect()
    }

    /// The 0-cochain `w`.
    pub fn from_module_vector(&self, w: &ModuleVector, m: Option<u32>) -> Cochain {
        Cochain::from_terms(0, m, self.cutoff, self.dual_cutoff, 0, Self::terms_for(w, vec![]))
    }

    /// `(v, z) ↦ E^{(1)}_W(v; w)`.
    pub fn from_yw(&self, w: &ModuleVector, m: Option<u32>) -> Result<Cochain> {
        self.from_e(1, w, m)
    }

    /// `(v_1..v_n) ↦ E^{(n)}_W(v_1..v_n; w)`.
    pub fn from_e(&self, n: usize, w: &ModuleVector, m: Option<u32>) -> Result<Cochain> {
        self.from_e_ordered(&(0..n).collect::<Vec<_>>(), w, m)
    }

    /// The same with the operators written in the order `order`: position
    /// `k` holds `Y(v_{order[k]}, z_{order[k]})`.
    pub fn from_e_ordered(&self, order: &[usize], w: &ModuleVector, m: Option<u32>) -> Result<Cochain> {
        let n = order.len();
        Permutation::new(order.to_vec())?;
        let ops = order.iter().map(|&i| Op { slot: Slot::Input(i), point: unit_form(n, i) }).collect();
        Ok(Cochain::from_terms(n, m, self.cutoff, self.dual_cutoff, 0, Self::terms_for(w, ops)))
    }

    pub fn zero(&self, n: usize, m: Option<u32>) -> Cochain {
        Cochain::zero(n, m, self.cutoff, self.dual_cutoff)
    }

    /// A seeded combination of E-built cochains on the vacuum, written in
    /// random operator orders, with small nonzero rational coefficients.
    pub fn random_valid(&self, n: usize, m: Option<u32>, seed: u64) -> Result<Cochain> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let perms = Permutation::all(n);
        let count = rng.gen_range(1..=3usize);
        let mut out = self.zero(n, m);
        for _ in 0..count {
            let p = &perms[rng.gen_range(0..perms.len())];
            let num: i64 = loop {
                let x = rng.gen_range(-5i64..=5);
                if x != 0 {
                    break x;
                }
            };
            let den: i64 = rng.gen_range(1i64..=4);
            let c = Q::new(num.into(), den.into());
            let e = self.from_e_ordered(p.images(), &ModuleVector::vacuum(), m)?;
            out = out.add_scaled(&e, &c)?;
        }
        if out.terms().is_some_and(|t| t.is_empty()) {
            // cancellation: fall back to a single unit-coefficient term
            out = self.from_e(n, &ModuleVector::vacuum(), m)?;
        }
        Ok(out)
    }

    pub fn raw(&self, kind: &Kind, m: Option<u32>) -> Result<Cochain> {
        match kind {
            Kind::ModuleVector(w) => Ok(self.from_module_vector(w, m)),
            Kind::FromYW(w) => self.from_yw(w, m),
            Kind::FromE(n, w) => self.from_e(*n, w, m),
            Kind::Zero(n) => Ok(self.zero(*n, m)),
            Kind::RandomValid(n, seed) => self.random_valid(*n, m, *seed),
        }
    }

    /// Construction followed by validation; fails if any validator fails.
    pub fn build(&self, ctx: &Context, kind: &Kind, m: Option<u32>) -> Result<Cochain> {
        let mut phi = self.raw(kind, m)?;
        let reports = validate_all(ctx, &mut phi)?;
        if let Some(r) = reports.iter().find(|r| !r.passed()) {
            return Err(Error::Inconsistent(format!("generated cochain failed validation: {}", r.witness.clone().unwrap_or_default())));
        }
        let comp = crate::correlators::composability::check_composability(ctx, &phi, m.unwrap_or(0))?;
        phi.flags.composability = comp.flag;
        phi.bounds = comp.bounds_map();
        Ok(phi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::voa::Heisenberg;

    #[test]
    fn seeded_generation_is_deterministic() {
        let g = Generator::new(2, 2);
        let a = g.random_valid(1, Some(2), 7).unwrap();
        let b = g.random_valid(1, Some(2), 7).unwrap();
        assert_eq!(a.expr, b.expr);
    }

    #[test]
    fn built_cochains_are_flagged() {
        let ctx = Context::new(Heisenberg::new(6), 2);
        let g = Generator::new(1, 2);
        let phi = g.build(&ctx, &Kind::FromE(2, ModuleVector::vacuum()), Some(1)).unwrap();
        assert!(phi.flags.all_verified());
        let vac = g.build(&ctx, &Kind::ModuleVector(ModuleVector::vacuum()), Some(3)).unwrap();
        assert!(vac.flags.all_verified());
        assert!(g.build(&ctx, &Kind::FromYW(ModuleVector::a(1)), Some(2)).is_err());
    }
}
