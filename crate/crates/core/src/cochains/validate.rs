//! Membership conditions checked entry by entry.

use num_traits::One;
use serde::Serialize;

use super::{Cochain, Expr, Flag};
use crate::correlators::{Context, RationalSection};
use crate::error::Result;
use crate::ratfield::Permutation;
use crate::rational::{pow_q, Q};
use crate::voa::{FockState, Heisenberg, ModuleVector, VertexAlgebra};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub flag: Flag,
    pub checked: usize,
    pub witness: Option<String>,
}

impl ValidationReport {
    fn pass(checked: usize) -> Self {
        ValidationReport { flag: Flag::Verified, checked, witness: None }
    }

    fn fail(checked: usize, witness: String) -> Self {
        ValidationReport { flag: Flag::Failed, checked, witness: Some(witness) }
    }

    pub fn passed(&self) -> bool {
        self.flag == Flag::Verified
    }
}

fn show(t: &[FockState]) -> String {
    let parts: Vec<String> = t.iter().map(|s| s.to_string()).collect();
    format!("({})", parts.join(", "))
}

/// Shuffles of `l` letters keeping the first `s` and the last `l - s` in order.
pub fn shuffles(l: usize, s: usize) -> Vec<Permutation> {
    Permutation::all(l)
        .into_iter()
        .filter(|p| {
            let im = p.images();
            im[..s].windows(2).all(|w| w[0] < w[1]) && im[s..].windows(2).all(|w| w[0] < w[1])
        })
        .collect()
}

/// `Σ_{σ ∈ J_{l;s}^{-1}} (-1)^{|σ|} σ(Φ)` vanishes on every stored tuple.
pub fn validate_shuffle(ctx: &Context, phi: &Cochain) -> Result<ValidationReport> {
    let l = phi.n;
    if l < 2 {
        return Ok(ValidationReport::pass(0));
    }
    let mut images: Vec<Vec<(Q, Cochain)>> = Vec::new();
    for s in 1..l {
        let mut acts = Vec::new();
        for p in shuffles(l, s) {
            let inv = p.inverse();
            acts.push((Q::from_integer(inv.sign().into()), phi.sigma_act(&inv)?));
        }
        images.push(acts);
    }
    let mut checked = 0;
    for t in phi.tuples() {
        for (k, acts) in images.iter().enumerate() {
            let mut sum = RationalSection::zero(phi.nvars(), vec![]);
            for (sign, img) in acts {
                sum.add_scaled(&img.entry(ctx, &t)?, sign);
            }
            checked += 1;
            if !sum.is_zero() {
                return Ok(ValidationReport::fail(checked, format!("s = {} at {}", k + 1, show(&t))));
            }
        }
    }
    Ok(ValidationReport::pass(checked))
}

/// `<s̄, L(-1).F> = -λ^{-2} <L(1) s̄, F>` for every basis state of weight at
/// most `max_weight`; `s̄` is the dual of `s`.
pub fn transport_l_minus1(h: &Heisenberg, f: &RationalSection, max_weight: u32) -> Result<RationalSection> {
    let mut out = RationalSection::zero(f.nvars, f.tags.clone());
    let c = -Q::one() / (h.lambda() * h.lambda());
    for l in 0..=max_weight {
        let db = h.dual_basis(l)?;
        for (u, ubar) in db.pairs() {
            let s = u.iter().next().expect("basis vector").0.clone();
            let shifted = h.virasoro(1, ubar);
            let g = f.pair(h, &shifted).scale(&c);
            out.add_term(&s, &g);
        }
    }
    Ok(out)
}

/// The derivative property in each slot and for the total derivative.
pub fn validate_l_minus1(ctx: &Context, phi: &Cochain) -> Result<ValidationReport> {
    let h = &ctx.h;
    let d = phi.dual_cutoff;
    let mut checked = 0;
    for t in phi.tuples() {
        let f = phi.entry(ctx, &t)?;
        let mut total = RationalSection::zero(phi.nvars(), f.tags.clone());
        for i in 0..phi.n {
            let df = f.map(|g| g.partial_derivative(i))?;
            total = total.add(&df);
            let moved = h.virasoro(-1, &ModuleVector::basis(t[i].clone()));
            if matches!(phi.expr, Expr::Table) && t[i].weight() + 1 > phi.cutoff {
                continue;
            }
            let mut inputs: Vec<ModuleVector> = t.iter().map(|s| ModuleVector::basis(s.clone())).collect();
            inputs[i] = moved;
            let rhs = evaluate_unbounded(ctx, phi, &inputs, d)?;
            checked += 1;
            if df.table != rhs.table {
                return Ok(ValidationReport::fail(checked, format!("slot {} at {}", i + 1, show(&t))));
            }
        }
        if phi.nparams == 0 {
            let rhs = transport_l_minus1(h, &f, d)?;
            checked += 1;
            if total.table != rhs.table {
                return Ok(ValidationReport::fail(checked, format!("total derivative at {}", show(&t))));
            }
        }
    }
    Ok(ValidationReport::pass(checked))
}

/// Multilinear evaluation that may read inputs above the table cutoff when
/// the cochain is symbolic.
pub(crate) fn evaluate_unbounded(ctx: &Context, phi: &Cochain, inputs: &[ModuleVector], max_weight: u32) -> Result<RationalSection> {
    let mut stack: Vec<(Vec<FockState>, Q)> = vec![(Vec::new(), Q::one())];
    for v in inputs {
        stack = stack.into_iter().flat_map(|(t, c)| v.iter().map(move |(s, a)| ([t.clone(), vec![s.clone()]].concat(), &c * a)).collect::<Vec<_>>()).collect();
    }
    let mut out = RationalSection::zero(phi.nvars(), vec![]);
    for (t, c) in stack {
        let e = if t.iter().all(|s| s.weight() <= phi.cutoff) { phi.entry(ctx, &t)? } else { phi.entry_at(ctx, &t, max_weight)? };
        out.add_scaled(&e, &c);
    }
    Ok(out)
}

pub const L0_SCALES: [i64; 3] = [2, 3, -1];

/// `λ^{L(0)} Φ(v; z) = Φ(λ^{L(0)} v; λ z)` at each test scale.
pub fn validate_l0(ctx: &Context, phi: &Cochain) -> Result<ValidationReport> {
    if phi.nparams > 0 {
        return Ok(ValidationReport { flag: Flag::Unchecked, checked: 0, witness: None });
    }
    let mut checked = 0;
    for t in phi.tuples() {
        let f = phi.entry(ctx, &t)?;
        let wt_in: i64 = t.iter().map(|s| s.weight() as i64).sum();
        for &l in &L0_SCALES {
            let lam = Q::from_integer(l.into());
            checked += 1;
            let states: std::collections::BTreeSet<&FockState> = f.table.keys().collect();
            for s in states {
                let lhs = f.get(s).scale(&pow_q(&lam, s.weight() as i64));
                let rhs = f.get(s).scale_all_vars(&lam).scale(&pow_q(&lam, wt_in));
                if lhs != rhs {
                    return Ok(ValidationReport::fail(checked, format!("scale {l} at {}, component {s}", show(&t))));
                }
            }
        }
    }
    Ok(ValidationReport::pass(checked))
}

/// Runs the three validators and stores their flags.
pub fn validate_all(ctx: &Context, phi: &mut Cochain) -> Result<[ValidationReport; 3]> {
    let a = validate_l_minus1(ctx, phi)?;
    let b = validate_l0(ctx, phi)?;
    let c = validate_shuffle(ctx, phi)?;
    phi.flags.l_minus1 = a.flag;
    phi.flags.l0 = b.flag;
    phi.flags.shuffle = c.flag;
    Ok([a, b, c])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochains::Generator;

    fn ctx() -> Context {
        Context::new(Heisenberg::new(6), 2)
    }

    #[test]
    fn shuffle_counts() {
        assert_eq!(shuffles(3, 1).len(), 3);
        assert_eq!(shuffles(4, 2).len(), 6);
        assert_eq!(shuffles(2, 1).len(), 2);
    }

    #[test]
    fn transport_matches_direct_action() {
        let c = ctx();
        let w = ModuleVector::a(1).add(&ModuleVector::vacuum());
        let f = RationalSection::constant(1, &w);
        let t = transport_l_minus1(&c.h, &f, 2).unwrap();
        let direct = RationalSection::constant(1, &c.h.virasoro(-1, &w));
        assert_eq!(t, direct);
    }

    #[test]
    fn e_cochains_pass_and_corruption_fails() {
        let c = ctx();
        let g = Generator::new(2, 2);
        for n in 1..=2 {
            let phi = g.from_e(n, &ModuleVector::vacuum(), Some(1)).unwrap();
            assert!(validate_l_minus1(&c, &phi).unwrap().passed());
            assert!(validate_l0(&c, &phi).unwrap().passed());
            assert!(validate_shuffle(&c, &phi).unwrap().passed());
        }
        let mut bad = g.from_e(2, &ModuleVector::vacuum(), Some(1)).unwrap().into_table(&c).unwrap();
        let key = vec![FockState::single(1), FockState::vacuum()];
        let sec = bad.table.get(&key).cloned().unwrap();
        let bumped = sec.map(|f| Ok(f.mul(&crate::ratfield::RatFunc::inv_difference(2, 0, 1, 1)))).unwrap();
        bad.table.insert(key, bumped);
        assert!(!validate_l0(&c, &bad).unwrap().passed());
        assert!(!validate_shuffle(&c, &bad).unwrap().passed());
        assert!(!validate_l_minus1(&c, &bad).unwrap().passed());
    }
}
