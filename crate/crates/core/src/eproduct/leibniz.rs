//! `δ(Φ ·_ε Ψ)` against `(δΦ) ·_ε Ψ + (-1)^k Φ ·_ε (δΨ)`, coefficient by
//! coefficient. The left side treats the product as a module-valued
//! function and applies the coboundary through series and reconstruction;
//! the right side applies the symbolic coboundary to each factor.

use serde::Serialize;

use super::{coefficient, product_slot, ExclusionList};
use crate::cochains::{basis_tuples, Cochain};
use crate::correlators::{Context, RationalSection};
use crate::differential::delta;
use crate::differential::generic::{delta_entry_with, DeltaBudget};
use crate::error::{Error, Result};
use crate::rational::sign_pow;
use crate::voa::{DualBasis, FockState, ModuleVector};

#[derive(Clone, Debug, Serialize)]
pub struct LeibnizFailure {
    pub tuple: Vec<String>,
    pub l: u32,
    pub reason: String,
    pub left: Option<serde_json::Value>,
    pub right: Option<serde_json::Value>,
}

#[derive(Clone, Debug, Serialize)]
pub struct LeibnizReport {
    pub degrees: (usize, usize),
    pub r: usize,
    pub order: u32,
    pub tuples: usize,
    pub coefficients_checked: usize,
    pub equal: usize,
    /// Coefficients where the right side with the opposite sign matches.
    pub equal_with_opposite_sign: usize,
    pub first_failure: Option<LeibnizFailure>,
}

impl LeibnizReport {
    pub fn passed(&self) -> bool {
        self.first_failure.is_none() && self.equal == self.coefficients_checked
    }
}

fn show(t: &[FockState]) -> Vec<String> {
    t.iter().map(FockState::to_string).collect()
}

/// `δ` of the `ε^l` coefficient of `Φ ·_ε Ψ`, with `l` the weight of
/// `basis`, on one tuple of `k + n - r + 1` states.
pub fn delta_of_product(ctx: &Context, phi: &Cochain, psi: &Cochain, excl: &ExclusionList, basis: &DualBasis, t: &[FockState]) -> Result<RationalSection> {
    let nin = phi.n + psi.n - excl.r();
    let wmax = phi.terms().into_iter().chain(psi.terms()).flatten().map(|x| x.w.weight()).max().unwrap_or(0);
    let value = |ins: &[ModuleVector], b: u32| coefficient(ctx, phi, psi, excl, basis, ins, b);
    let budget = DeltaBudget { axis: basis.weight + wmax + 1, param: wmax + ctx.dual_cutoff + 1 };
    delta_entry_with(ctx, nin, 2, &value, t, budget, ctx.dual_cutoff)
}

/// Checks the law on every tuple of `k + n - r + 1` states of weight at most
/// `cutoff`, for `l <= order`.
pub fn check_leibniz(ctx: &Context, phi: &Cochain, psi: &Cochain, excl: &ExclusionList, order: u32, cutoff: u32) -> Result<LeibnizReport> {
    let (nin, m) = product_slot(phi, psi, excl)?;
    if m == 0 || phi.m == Some(0) || psi.m == Some(0) {
        return Err(Error::NotComposable("the Leibniz check needs m, m' >= 1 and m + m' - t >= 1".into()));
    }
    let dphi = delta(ctx, phi)?;
    let dpsi = delta(ctx, psi)?;
    let sign = sign_pow(phi.n as i64);
    let bases = (0..=order).map(|l| ctx.h.dual_basis(l)).collect::<Result<Vec<_>>>()?;
    let tuples = basis_tuples(nin + 1, cutoff);
    let mut report = LeibnizReport {
        degrees: (phi.n, psi.n),
        r: excl.r(),
        order,
        tuples: tuples.len(),
        coefficients_checked: 0,
        equal: 0,
        equal_with_opposite_sign: 0,
        first_failure: None,
    };
    for t in &tuples {
        let ins: Vec<ModuleVector> = t.iter().cloned().map(ModuleVector::basis).collect();
        for b in &bases {
            report.coefficients_checked += 1;
            let first = coefficient(ctx, &dphi, psi, excl, b, &ins, ctx.dual_cutoff)?;
            let second = coefficient(ctx, phi, &dpsi, excl, b, &ins, ctx.dual_cutoff)?;
            let left = match delta_of_product(ctx, phi, psi, excl, b, t) {
                Ok(x) => x,
                Err(e) => {
                    if report.first_failure.is_none() {
                        report.first_failure = Some(LeibnizFailure { tuple: show(t), l: b.weight, reason: format!("left side: {e}"), left: None, right: None });
                    }
                    continue;
                }
            };
            let mut right = first.clone();
            right.add_scaled(&second, &sign);
            let mut flipped = first;
            flipped.add_scaled(&second, &-sign.clone());
            if left.table == right.table {
                report.equal += 1;
            } else if report.first_failure.is_none() {
                report.first_failure = Some(LeibnizFailure {
                    tuple: show(t),
                    l: b.weight,
                    reason: "coefficients differ".into(),
                    left: Some(left.to_json()),
                    right: Some(right.to_json()),
                });
            }
            if left.table == flipped.table {
                report.equal_with_opposite_sign += 1;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochains::Generator;
    use crate::voa::Heisenberg;

    #[test]
    fn zero_factor_gives_zero_on_both_sides() {
        let ctx = Context::new(Heisenberg::new(10), 2);
        let g = Generator::new(1, 2);
        let chi = g.from_module_vector(&ModuleVector::vacuum(), Some(3));
        let r = check_leibniz(&ctx, &g.zero(1, Some(2)), &chi, &ExclusionList::none(), 1, 0).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.coefficients_checked, 2);
    }
}
