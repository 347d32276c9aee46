//! Coboundary operators on cochains, the half-slot operator, and the
//! chain-complex check.

pub mod cohomology;
pub mod generic;

use num_traits::One;
use serde::Serialize;

use crate::cochains::{Cochain, Expr, Flag, Op, Slot, Term};
use crate::correlators::Context;
use crate::error::{Error, Result};
use crate::rational::{sign_pow, Q};
use crate::voa::FockState;

pub use cohomology::{truncated_cohomology, RankReport, SlotKind};

/// Renames a point over `old` variables into `new` variables.
fn remap(point: &[i64], map: &dyn Fn(usize) -> usize, new: usize) -> Vec<i64> {
    let mut p = vec![0; new];
    for (k, &c) in point.iter().enumerate() {
        p[map(k)] += c;
    }
    p
}

fn unit(n: usize, i: usize) -> Vec<i64> {
    let mut p = vec![0; n];
    p[i] = 1;
    p
}

/// Leading term: `Y(v_1, z_1) Φ(v_2..v_{n+1})(z_2..z_{n+1})`.
fn leading(phi: &Cochain, ts: &[Term]) -> Vec<Term> {
    let nv = phi.nvars() + 1;
    ts.iter()
        .map(|t| {
            let mut ops: Vec<Op> = t
                .ops
                .iter()
                .map(|o| Op {
                    slot: match &o.slot {
                        Slot::Input(i) => Slot::Input(i + 1),
                        f => f.clone(),
                    },
                    point: remap(&o.point, &|k| k + 1, nv),
                })
                .collect();
            ops.insert(0, Op { slot: Slot::Input(0), point: unit(nv, 0) });
            Term { coef: t.coef.clone(), ops, w: t.w.clone() }
        })
        .collect()
}

/// Middle term `a` (0-based): `Φ(.., Y(v_a, z_a - z_{a+1}) v_{a+1}, ..)` at
/// `(z_1..z_a, z_{a+2}..)`; the merged slot at point `p` becomes `v_a` at
/// `p + z_a - z_{a+1}` followed by `v_{a+1}` at `p`.
fn middle(phi: &Cochain, ts: &[Term], a: usize) -> Vec<Term> {
    let nv = phi.nvars() + 1;
    let vmap = |k: usize| if k < a { k } else { k + 1 };
    ts.iter()
        .map(|t| {
            let mut ops = Vec::new();
            for o in &t.ops {
                let p = remap(&o.point, &vmap, nv);
                match &o.slot {
                    Slot::Input(i) if *i == a => {
                        let mut q = p.clone();
                        q[a] += 1;
                        q[a + 1] -= 1;
                        ops.push(Op { slot: Slot::Input(a), point: q });
                        ops.push(Op { slot: Slot::Input(a + 1), point: p });
                    }
                    Slot::Input(i) => ops.push(Op { slot: Slot::Input(if *i < a { *i } else { i + 1 }), point: p }),
                    f => ops.push(Op { slot: f.clone(), point: p }),
                }
            }
            Term { coef: t.coef.clone(), ops, w: t.w.clone() }
        })
        .collect()
}

/// Trailing term: `Y(v_{n+1}, z_{n+1}) Φ(v_1..v_n)(z_1..z_n)`.
fn trailing(phi: &Cochain, ts: &[Term]) -> Vec<Term> {
    let n = phi.n;
    let nv = phi.nvars() + 1;
    let vmap = |k: usize| if k < n { k } else { k + 1 };
    ts.iter()
        .map(|t| {
            let mut ops: Vec<Op> = t.ops.iter().map(|o| Op { slot: o.slot.clone(), point: remap(&o.point, &vmap, nv) }).collect();
            ops.insert(0, Op { slot: Slot::Input(n), point: unit(nv, n) });
            Term { coef: t.coef.clone(), ops, w: t.w.clone() }
        })
        .collect()
}

fn scaled(ts: Vec<Term>, c: &Q) -> impl Iterator<Item = Term> + '_ {
    ts.into_iter().map(move |t| Term { coef: &t.coef * c, ops: t.ops, w: t.w })
}

/// The three-part coboundary on a symbolic cochain, term by term.
pub fn delta_terms(phi: &Cochain) -> Result<Vec<Term>> {
    let ts = phi.terms().ok_or_else(|| Error::InvalidInput("the symbolic coboundary needs a symbolic cochain".into()))?;
    let n = phi.n;
    let mut out: Vec<Term> = leading(phi, ts);
    for a in 0..n {
        out.extend(scaled(middle(phi, ts, a), &sign_pow(a as i64 + 1)));
    }
    out.extend(scaled(trailing(phi, ts), &sign_pow(n as i64 + 1)));
    Ok(out)
}

fn next_m(phi: &Cochain) -> Result<Option<u32>> {
    match phi.m {
        Some(m) if m >= 1 => Ok(Some(m - 1)),
        Some(_) => Err(Error::NotComposable("the coboundary needs m >= 1".into())),
        None => Err(Error::NotComposable("use delta_half on the half slot".into())),
    }
}

/// `δ^n_m Φ` at `(n+1, m-1)`. Symbolic cochains go term by term; bare
/// tables go through series reconstruction.
pub fn delta(ctx: &Context, phi: &Cochain) -> Result<Cochain> {
    let m = next_m(phi)?;
    match &phi.expr {
        Expr::Terms(_) => {
            let terms = delta_terms(phi)?;
            Ok(Cochain::from_terms(phi.n + 1, m, phi.cutoff, phi.dual_cutoff, phi.nparams, terms))
        }
        Expr::Table => generic::delta_generic(ctx, phi, phi.cutoff),
    }
}

/// `δ^2_{1/2}` on the half slot. The last term is `E^{W;(1)}_{WV} ∘_2 Φ`,
/// taken with the sign under which the operator restricts to `δ^2_1` on
/// `C^2_1`.
pub fn delta_half(ctx: &Context, phi: &Cochain) -> Result<Cochain> {
    delta_half_with_sign(ctx, phi, &-Q::one())
}

/// The same with an explicit coefficient on the last term.
pub fn delta_half_with_sign(_ctx: &Context, phi: &Cochain, last: &Q) -> Result<Cochain> {
    if phi.n != 2 {
        return Err(Error::InvalidInput(format!("the half-slot operator acts on 2-cochains, got {}", phi.n)));
    }
    let ts = phi.terms().ok_or_else(|| Error::InvalidInput("the half-slot operator needs a symbolic cochain".into()))?;
    let mut out = leading(phi, ts);
    // Φ(v_1 ⊗ E^{(2)}(v_2, v_3)) and Φ(E^{(2)}(v_1, v_2) ⊗ v_3)
    out.extend(middle(phi, ts, 1));
    out.extend(scaled(middle(phi, ts, 0), &-Q::one()));
    out.extend(scaled(trailing(phi, ts), last));
    Ok(Cochain::from_terms(3, Some(0), phi.cutoff, phi.dual_cutoff, phi.nparams, out))
}

/// The two convergence surrogates for the half slot: on every tuple of
/// weight at most 1, the four sums rebuilt by series and reconstruction
/// stabilize and agree with the symbolic operator. Returns the first
/// offending tuple.
pub fn half_surrogates(ctx: &Context, phi: &Cochain) -> Result<Option<Vec<FockState>>> {
    let sym = delta_half(ctx, phi)?;
    let axis = phi.terms().map(|ts| ts.iter().map(|t| t.w.weight()).max().unwrap_or(0)).unwrap_or(0);
    for t in crate::cochains::basis_tuples(3, 1) {
        match generic::delta_entry(ctx, phi, &t, axis) {
            Ok(g) if g.table == sym.entry(ctx, &t)?.table => {}
            _ => return Ok(Some(t)),
        }
    }
    Ok(None)
}

/// `delta_half` after the surrogate check.
pub fn delta_half_checked(ctx: &Context, phi: &Cochain) -> Result<Cochain> {
    if let Some(t) = half_surrogates(ctx, phi)? {
        let shown: Vec<String> = t.iter().map(FockState::to_string).collect();
        return Err(Error::NotComposable(format!("half-slot surrogate fails at ({})", shown.join(", "))));
    }
    delta_half(ctx, phi)
}

/// Moves a cochain into the half slot (the embedding of `C^2_m`).
pub fn to_half_slot(phi: &Cochain) -> Result<Cochain> {
    if phi.n != 2 {
        return Err(Error::InvalidInput("only 2-cochains embed in the half slot".into()));
    }
    let mut out = phi.clone();
    out.m = None;
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct ComplexReport {
    pub slot: (usize, String),
    pub preconditions_verified: bool,
    pub tuples_checked: usize,
    pub delta_delta_zero: bool,
    pub first_nonzero: Option<Vec<String>>,
    /// The nonzero entry of `δδΦ` at that tuple.
    pub first_value: Option<serde_json::Value>,
    pub seconds: f64,
}

impl ComplexReport {
    /// Passing means δδ = 0; a nonzero result with failed preconditions is
    /// reported but is not an identity failure.
    pub fn identity_failure(&self) -> bool {
        self.preconditions_verified && !self.delta_delta_zero
    }
}

fn slot_label(m: Option<u32>) -> String {
    m.map(|m| m.to_string()).unwrap_or_else(|| "1/2".into())
}

/// Applies two coboundaries (through the half slot when the first lands at
/// `(2, m)` and `half` is set) and checks every entry of the result.
pub fn check_complex(ctx: &Context, phi: &Cochain, half: bool) -> Result<ComplexReport> {
    let start = std::time::Instant::now();
    let once = delta(ctx, phi)?;
    let twice = if half { delta_half(ctx, &to_half_slot(&once)?)? } else { delta(ctx, &once)? };
    let pre = phi.flags.l_minus1 == Flag::Verified && phi.flags.l0 == Flag::Verified && phi.flags.shuffle == Flag::Verified;
    let mut checked = 0;
    let mut first = None;
    let mut value = None;
    if twice.terms().is_some_and(|t| !t.is_empty()) || matches!(twice.expr, Expr::Table) {
        for t in twice.tuples() {
            checked += 1;
            let e = twice.entry(ctx, &t)?;
            if !e.is_zero() {
                first = Some(t.iter().map(FockState::to_string).collect());
                value = Some(e.to_json());
                break;
            }
        }
    }
    Ok(ComplexReport {
        slot: (phi.n, slot_label(phi.m)),
        preconditions_verified: pre,
        tuples_checked: checked,
        delta_delta_zero: first.is_none(),
        first_nonzero: first,
        first_value: value,
        seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochains::Generator;
    use crate::correlators::{Insertion, RationalSection};
    use crate::voa::{Heisenberg, ModuleVector};

    fn ctx() -> Context {
        Context::new(Heisenberg::new(10), 2)
    }

    #[test]
    fn delta_of_zero_and_of_vacuum() {
        let c = ctx();
        let g = Generator::new(2, 2);
        let z = delta(&c, &g.zero(1, Some(2))).unwrap();
        assert!(z.terms().unwrap().is_empty());
        // n = 0: Y(v_1, z_1) w - Y(v_1, z_1) w
        let w = ModuleVector::a(1);
        let d0 = delta(&c, &g.from_module_vector(&w, Some(3))).unwrap();
        assert_eq!(d0.n, 1);
        assert_eq!(d0.is_zero_on_tuples(&c).unwrap(), None);
    }

    #[test]
    fn delta_of_yw_term_by_term() {
        let c = ctx();
        let g = Generator::new(1, 2);
        let w = ModuleVector::vacuum();
        let phi = g.from_yw(&w, Some(2)).unwrap();
        let d = delta(&c, &phi).unwrap();
        let a = ModuleVector::a(1);
        let got = d.evaluate(&c, &[a.clone(), a.clone()]).unwrap();
        // leading + trailing minus the merged insertion at z_2
        let lead = c.section(&[Insertion::at_var(a.clone(), 2, 0), Insertion::at_var(a.clone(), 2, 1)], &w, 2, 2).unwrap();
        let trail = c.section(&[Insertion::at_var(a.clone(), 2, 1), Insertion::at_var(a.clone(), 2, 0)], &w, 2, 2).unwrap();
        let mut mid = RationalSection::zero(2, vec![]);
        let mut phi_on = |x: &ModuleVector| c.section(&[Insertion::at_var(x.clone(), 1, 0)], &w, 1, 2);
        let budget = crate::correlators::generic::PoleBudget { axis: 0, diffs: vec![(1, 2)] };
        mid.add_scaled(
            &crate::correlators::generic::merged_slot_series(&c.h, &FockState::single(1), &FockState::single(1), &mut phi_on, 0, &budget, 4).unwrap(),
            &Q::one(),
        );
        let want = lead.sub(&mid).add(&trail);
        assert_eq!(got.table, want.table);
    }

    #[test]
    fn half_slot_four_terms_on_e2() {
        let c = ctx();
        let g = Generator::new(1, 2);
        let phi = to_half_slot(&g.from_e(2, &ModuleVector::vacuum(), Some(1)).unwrap()).unwrap();
        let a = FockState::single(1);
        let t = [a.clone(), a.clone(), a.clone()];
        let sym = delta_half(&c, &phi).unwrap().entry(&c, &t).unwrap();
        let four = generic::delta_entry(&c, &phi, &t, 0).unwrap();
        assert_eq!(sym.table, four.table);
        assert!(half_surrogates(&c, &phi).unwrap().is_none());
        assert!(delta_half(&c, &to_half_slot(&g.zero(2, Some(1))).unwrap()).unwrap().terms().unwrap().is_empty());
    }

    #[test]
    fn complex_condition_on_small_cochains() {
        let c = ctx();
        let g = Generator::new(1, 2);
        for n in 0..=2 {
            let phi = g.random_valid(n, Some(3), 11 + n as u64).unwrap();
            let r = check_complex(&c, &phi, false).unwrap();
            assert!(r.delta_delta_zero, "n = {n}: {:?}", r.first_nonzero);
        }
        let psi = g.random_valid(1, Some(2), 5).unwrap();
        assert!(check_complex(&c, &psi, true).unwrap().delta_delta_zero);
        // the opposite sign on the last half-slot term does not close
        let once = to_half_slot(&delta(&c, &psi).unwrap()).unwrap();
        let other = delta_half_with_sign(&c, &once, &Q::one()).unwrap();
        assert!(other.is_zero_on_tuples(&c).unwrap().is_some());
    }
}
