//! The coboundary through series and reconstruction, needing only the
//! entries of the cochain. Works on bare tables as long as the merged
//! states stay within the table's input cutoff.

use std::collections::BTreeMap;

use num_traits::One;

use crate::cochains::{basis_tuples, Cochain, Expr, Flags};
use crate::correlators::composability::axis_orders;
use crate::correlators::generic::{merged_slot_series, vertex_on_section, PoleBudget};
use crate::correlators::{Context, RationalSection};
use crate::error::{Error, Result};
use crate::rational::{sign_pow, Q};
use crate::voa::{FockState, ModuleVector};

/// Multilinear value of `phi` on arbitrary vectors. Tables refuse inputs
/// above their cutoff instead of reading them as zero.
fn value(ctx: &Context, phi: &Cochain, inputs: &[ModuleVector], max_weight: u32) -> Result<RationalSection> {
    let mut stack: Vec<(Vec<FockState>, Q)> = vec![(Vec::new(), Q::one())];
    for v in inputs {
        stack = stack.into_iter().flat_map(|(t, c)| v.iter().map(move |(s, a)| ([t.clone(), vec![s.clone()]].concat(), &c * a)).collect::<Vec<_>>()).collect();
    }
    let mut out = RationalSection::zero(phi.nvars(), vec![]);
    for (t, c) in stack {
        if matches!(phi.expr, Expr::Table) {
            if let Some(s) = t.iter().find(|s| s.weight() > phi.cutoff) {
                return Err(Error::CutoffExceeded { weight: s.weight(), cutoff: phi.cutoff });
            }
        }
        out.add_scaled(&phi.entry_at(ctx, &t, max_weight)?, &c);
    }
    Ok(out)
}

/// Pole order of the entries along the axes, used for the origin budget.
fn axis_estimate(ctx: &Context, phi: &Cochain) -> Result<u32> {
    match &phi.expr {
        Expr::Terms(ts) => Ok(ts.iter().map(|t| t.w.weight()).max().unwrap_or(0)),
        Expr::Table => {
            let mut best = 0;
            for t in phi.tuples() {
                best = best.max(axis_orders(&phi.entry(ctx, &t)?).into_iter().max().unwrap_or(0));
            }
            Ok(best)
        }
    }
}

/// Pole budget for the new variable of a coboundary: `axis` is added to
/// the weight of the acting state at the origin (0 means no pole there) and
/// `param` is the pole order allowed against each parameter variable.
#[derive(Clone, Copy, Debug)]
pub struct DeltaBudget {
    pub axis: u32,
    pub param: u32,
}

/// `(δΦ)` on one tuple of `n + 1` basis states.
pub fn delta_entry(ctx: &Context, phi: &Cochain, t: &[FockState], axis: u32) -> Result<RationalSection> {
    let value = |ins: &[ModuleVector], b: u32| value(ctx, phi, ins, b);
    delta_entry_with(ctx, phi.n, phi.nparams, &value, t, DeltaBudget { axis, param: 1 }, phi.dual_cutoff)
}

/// The coboundary of any function of `n` inputs with values over `n +
/// nparams` variables, on one tuple, through series and reconstruction.
pub fn delta_entry_with(
    ctx: &Context,
    n: usize,
    nparams: usize,
    value: &dyn Fn(&[ModuleVector], u32) -> Result<RationalSection>,
    t: &[FockState],
    budget: DeltaBudget,
    top: u32,
) -> Result<RationalSection> {
    if t.len() != n + 1 {
        return Err(Error::VariableCountMismatch(n + 1, t.len()));
    }
    let wt = |k: usize| t[k].weight();
    let at_origin = |w: u32| if budget.axis == 0 { 0 } else { w + budget.axis };
    let outer = |first: usize, rest: &[FockState], pos: usize| -> Result<RationalSection> {
        let u = &t[first];
        let pb = PoleBudget {
            axis: at_origin(u.weight()),
            diffs: (0..rest.len() + nparams).map(|k| (k, u.weight() + rest.get(k).map(|s| s.weight()).unwrap_or(budget.param))).collect(),
        };
        let rest: Vec<ModuleVector> = rest.iter().cloned().map(ModuleVector::basis).collect();
        let mut f_at = |b: u32| value(&rest, b);
        vertex_on_section(&ctx.h, u, &mut f_at, pos, &pb, top)
    };
    let mut out = outer(0, &t[1..], 0)?;
    out.add_scaled(&outer(n, &t[..n], n)?, &sign_pow(n as i64 + 1));
    for a in 0..n {
        let pb = PoleBudget {
            axis: at_origin(wt(a)),
            diffs: (0..n + 1 + nparams).filter(|&k| k != a).map(|k| (k, wt(a) + if k <= n { wt(k) } else { budget.param })).collect(),
        };
        let mut phi_on = |x: &ModuleVector| {
            let mut ins: Vec<ModuleVector> = Vec::with_capacity(n);
            for k in 0..n + 1 {
                if k == a {
                    continue;
                }
                ins.push(if k == a + 1 { x.clone() } else { ModuleVector::basis(t[k].clone()) });
            }
            value(&ins, top)
        };
        let num = pb.degree() as i64 + top as i64;
        let mid = merged_slot_series(&ctx.h, &t[a], &t[a + 1], &mut phi_on, a, &pb, num)?;
        if mid.nvars != 0 {
            out.add_scaled(&mid, &sign_pow(a as i64 + 1));
        }
    }
    Ok(out)
}

/// `δΦ` as a table over all tuples of weight at most `out_cutoff`.
pub fn delta_generic(ctx: &Context, phi: &Cochain, out_cutoff: u32) -> Result<Cochain> {
    let m = match phi.m {
        Some(m) if m >= 1 => m - 1,
        _ => return Err(Error::NotComposable("the coboundary needs m >= 1".into())),
    };
    let axis = axis_estimate(ctx, phi)?;
    let mut table = BTreeMap::new();
    for t in basis_tuples(phi.n + 1, out_cutoff) {
        let e = delta_entry(ctx, phi, &t, axis)?;
        if !e.is_zero() {
            table.insert(t, e);
        }
    }
    Ok(Cochain {
        n: phi.n + 1,
        m: Some(m),
        cutoff: out_cutoff,
        dual_cutoff: phi.dual_cutoff,
        nparams: phi.nparams,
        expr: Expr::Table,
        table,
        bounds: BTreeMap::new(),
        flags: Flags::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochains::Generator;
    use crate::differential::delta;
    use crate::voa::Heisenberg;

    #[test]
    fn generic_matches_term_by_term() {
        let ctx = Context::new(Heisenberg::new(12), 2);
        let g = Generator::new(1, 2);
        for (n, seed) in [(1usize, 3u64), (2, 4)] {
            let phi = g.random_valid(n, Some(2), seed).unwrap();
            let sym = delta(&ctx, &phi).unwrap();
            let gen = delta_generic(&ctx, &phi, 1).unwrap();
            for t in basis_tuples(n + 1, 1) {
                assert_eq!(sym.entry(&ctx, &t).unwrap().table, gen.entry(&ctx, &t).unwrap().table, "n = {n}, {t:?}");
            }
        }
    }

    #[test]
    fn tables_refuse_merged_states_above_cutoff() {
        let ctx = Context::new(Heisenberg::new(12), 2);
        let g = Generator::new(1, 2);
        let phi = g.from_e(1, &ModuleVector::vacuum(), Some(1)).unwrap().into_table(&ctx).unwrap();
        assert!(matches!(delta_generic(&ctx, &phi, 1), Err(Error::CutoffExceeded { .. })));
    }
}
