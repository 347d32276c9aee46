//! Pole-order bounds and composition with further vertex operators.

use std::collections::BTreeMap;

use serde::Serialize;

use super::generic::{axis_pole_order, pole_order, vertex_on_section, PoleBudget};
use super::Context;
use crate::cochains::{Cochain, Expr, Flag, Op, Slot, Term};
use crate::error::{Error, Result};
use crate::voa::FockState;

/// Bound on the pole order along `z_i = z_j` for inputs `u`, `v`.
pub fn pole_bound(u: &FockState, v: &FockState) -> u32 {
    u.weight() + v.weight()
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundRecord {
    pub left: String,
    pub right: String,
    pub found: u32,
    pub allowed: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct ComposabilityReport {
    pub flag: Flag,
    pub m: u32,
    pub tuples: usize,
    pub compositions: usize,
    /// Compositions not attempted because a bare table lacks the weights.
    pub skipped: usize,
    /// Tightest pole orders found, per input pair.
    pub bounds: Vec<BoundRecord>,
    pub failures: Vec<String>,
}

impl ComposabilityReport {
    pub fn bounds_map(&self) -> BTreeMap<(FockState, FockState), u32> {
        self.bounds.iter().filter_map(|b| Some(((b.left.parse().ok()?, b.right.parse().ok()?), b.found))).collect()
    }

    pub fn passed(&self) -> bool {
        self.flag == Flag::Verified
    }
}

/// Largest input weight used for the composition part of the check.
pub const COMPOSITION_INPUT_WEIGHT: u32 = 1;
/// Number of extra operators actually applied in the composition part.
pub const COMPOSITION_DEPTH: u32 = 2;

/// Checks every stored tuple for pole orders within `pole_bound`, then for
/// inputs of weight at most `COMPOSITION_INPUT_WEIGHT` applies up to
/// `min(m, COMPOSITION_DEPTH)` operators `Y(a, ζ)` by series and
/// reconstruction, requiring stabilization and, for symbolic cochains,
/// agreement with the operator placed directly in the correlator.
pub fn check_composability(ctx: &Context, phi: &Cochain, m: u32) -> Result<ComposabilityReport> {
    let mut found: BTreeMap<(FockState, FockState), (u32, u32)> = BTreeMap::new();
    let mut failures = Vec::new();
    let tuples = phi.tuples();
    let mut compositions = 0;
    let mut skipped = 0;
    for t in &tuples {
        let f = phi.entry(ctx, t)?;
        for i in 0..phi.n {
            for j in i + 1..phi.n {
                let p = pole_order(&f, i, j);
                let allowed = pole_bound(&t[i], &t[j]);
                let slot = found.entry((t[i].clone(), t[j].clone())).or_insert((0, allowed));
                slot.0 = slot.0.max(p);
                if p > allowed {
                    failures.push(format!("pole of order {p} > {allowed} along z{}=z{} at {:?}", i + 1, j + 1, show(t)));
                }
            }
        }
        if m == 0 || t.iter().any(|s| s.weight() > COMPOSITION_INPUT_WEIGHT) {
            continue;
        }
        let a = FockState::single(1);
        let depth = m.min(COMPOSITION_DEPTH) as usize;
        let mut current = phi.clone();
        for k in 0..depth {
            compositions += 1;
            let nv = current.nvars();
            let budget = composition_budget(&current, t, &a, nv);
            let cur = current.clone();
            let mut f_at = |b: u32| cur.entry_at(ctx, t, b);
            let generic = match vertex_on_section(&ctx.h, &a, &mut f_at, nv, &budget, phi.dual_cutoff) {
                Ok(g) => g,
                Err(Error::CutoffExceeded { .. }) if matches!(current.expr, Expr::Table) => {
                    compositions -= 1;
                    skipped += 1;
                    break;
                }
                Err(e) => {
                    failures.push(format!("operator {} at {}: {e}", k + 1, show(t)));
                    break;
                }
            };
            if let Expr::Terms(ts) = &current.expr {
                let prepended: Vec<Term> = ts
                    .iter()
                    .map(|term| {
                        let mut ops: Vec<Op> = term.ops.iter().map(|o| Op { slot: o.slot.clone(), point: [o.point.clone(), vec![0]].concat() }).collect();
                        let mut p = vec![0; nv + 1];
                        p[nv] = 1;
                        ops.insert(0, Op { slot: Slot::Fixed(crate::voa::ModuleVector::basis(a.clone())), point: p });
                        Term { coef: term.coef.clone(), ops, w: term.w.clone() }
                    })
                    .collect();
                let next = Cochain::from_terms(current.n, current.m, current.cutoff, current.dual_cutoff, current.nparams + 1, prepended);
                let direct = next.entry_at(ctx, t, phi.dual_cutoff)?;
                if direct.table != generic.table {
                    failures.push(format!("operator {} at {}: series and direct placement disagree", k + 1, show(t)));
                    break;
                }
                current = next;
            } else {
                break;
            }
        }
    }
    let bounds = found.into_iter().map(|((l, r), (f, a))| BoundRecord { left: l.to_string(), right: r.to_string(), found: f, allowed: a }).collect();
    let flag = if failures.is_empty() { Flag::Verified } else { Flag::Failed };
    Ok(ComposabilityReport { flag, m, tuples: tuples.len(), compositions, skipped, bounds, failures })
}

/// Poles of a new operator `Y(a, ζ)` against every existing variable.
fn composition_budget(phi: &Cochain, t: &[FockState], a: &FockState, nv: usize) -> PoleBudget {
    let axis = match &phi.expr {
        Expr::Terms(ts) => ts.iter().map(|x| if x.w.is_vacuum() { 0 } else { a.weight() + x.w.weight() }).max().unwrap_or(0),
        Expr::Table => 0,
    };
    let diffs = (0..nv)
        .map(|k| {
            let wk = if k < t.len() { t[k].weight() } else { a.weight() };
            (k, a.weight() + wk)
        })
        .collect();
    PoleBudget { axis, diffs }
}

fn show(t: &[FockState]) -> String {
    let parts: Vec<String> = t.iter().map(|s| s.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Pole orders along the coordinate axes, per slot.
pub fn axis_orders(f: &super::RationalSection) -> Vec<u32> {
    (0..f.nvars).map(|i| axis_pole_order(f, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochains::Generator;
    use crate::ratfield::RatFunc;
    use crate::voa::{Heisenberg, ModuleVector};

    #[test]
    fn e2_passes_with_bounds_and_corruption_fails() {
        let ctx = Context::new(Heisenberg::new(10), 2);
        let g = Generator::new(1, 2);
        let phi = g.from_e(2, &ModuleVector::vacuum(), Some(1)).unwrap();
        let r = check_composability(&ctx, &phi, 1).unwrap();
        assert!(r.passed(), "{:?}", r.failures);
        let aa = r.bounds.iter().find(|b| b.left == "a(-1)|0>" && b.right == "a(-1)|0>").unwrap();
        assert_eq!(aa.found, 2);
        assert!(check_composability(&ctx, &g.zero(2, Some(3)), 3).unwrap().passed());
        let mut bad = phi.into_table(&ctx).unwrap();
        let key = vec![FockState::single(1), FockState::single(1)];
        let sec = bad.table.get(&key).cloned().unwrap();
        bad.table.insert(key, sec.map(|f| Ok(f.mul(&RatFunc::inv_difference(2, 0, 1, 1)))).unwrap());
        let r = check_composability(&ctx, &bad, 1).unwrap();
        assert!(!r.passed());
    }
}
