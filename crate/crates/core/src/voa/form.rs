//! Dual bases for the invariant form.

use num_traits::Zero;

use super::fock::FockState;
use super::heisenberg::Heisenberg;
use super::vector::ModuleVector;
use crate::error::{Error, Result};
use crate::linalg::{inverse, Matrix};
use crate::rational::Q;

/// A basis `{u^α}` of one weight space and its dual `{ū^β}` with
/// `<u^α, ū^β> = δ^{αβ}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualBasis {
    pub weight: u32,
    pub basis: Vec<ModuleVector>,
    pub dual: Vec<ModuleVector>,
}

impl DualBasis {
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&ModuleVector, &ModuleVector)> {
        self.basis.iter().zip(&self.dual)
    }
}

impl Heisenberg {
    pub fn gram(&self, basis: &[ModuleVector]) -> Matrix {
        basis.iter().map(|x| basis.iter().map(|y| self.form(x, y)).collect()).collect()
    }

    /// Dual basis of the Fock basis of weight `l`.
    pub fn dual_basis(&self, l: u32) -> Result<DualBasis> {
        if l > self.cutoff {
            return Err(Error::CutoffExceeded { weight: l, cutoff: self.cutoff });
        }
        let basis: Vec<ModuleVector> = FockState::basis(l).into_iter().map(ModuleVector::basis).collect();
        self.dual_of(l, basis)
    }

    /// Dual of an arbitrary basis of the weight-`l` space.
    pub fn dual_of(&self, l: u32, basis: Vec<ModuleVector>) -> Result<DualBasis> {
        if basis.len() != FockState::basis(l).len() || basis.iter().any(|v| v.homogeneous_weight().is_some_and(|w| w != l)) {
            return Err(Error::InvalidInput(format!("not a basis of the weight-{l} space")));
        }
        let g = self.gram(&basis);
        let ginv = inverse(&g)?;
        let n = basis.len();
        let dual = (0..n)
            .map(|beta| {
                let mut v = ModuleVector::zero();
                for (gamma, u) in basis.iter().enumerate() {
                    if !ginv[gamma][beta].is_zero() {
                        v.add_scaled(u, &ginv[gamma][beta]);
                    }
                }
                v
            })
            .collect();
        Ok(DualBasis { weight: l, basis, dual })
    }

    pub fn pairing_matrix(&self, d: &DualBasis) -> Vec<Vec<Q>> {
        d.basis.iter().map(|x| d.dual.iter().map(|y| self.form(x, y)).collect()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::identity;
    use crate::rational::q;
    use crate::voa::VertexAlgebra;

    #[test]
    fn dual_bases_pair_to_identity() {
        let h = Heisenberg::new(5);
        assert_eq!(h.dual_basis(0).unwrap().dual, vec![ModuleVector::vacuum()]);
        assert_eq!(h.dual_basis(1).unwrap().dual, vec![ModuleVector::a(1)]);
        for l in 0..=5 {
            let d = h.dual_basis(l).unwrap();
            assert_eq!(h.pairing_matrix(&d), identity(d.len()));
        }
        assert!(h.dual_basis(6).is_err());
        assert_eq!(h.cutoff(), 5);
        assert_eq!(h.form(&ModuleVector::a(2), &ModuleVector::a(2)), q(-2));
    }
}
