//! Solving `δχ = Φ·α` on the family, the relations among `δχ, χ, Φ, α,
//! δΦ, δα`, and the Jacobi identity of the resulting bracket table.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use super::{solve_on, SampledSeries, Sampling};
use crate::cochains::{basis_tuples, Cochain, Generator};
use crate::correlators::Context;
use crate::differential::cohomology::e_family;
use crate::differential::delta;
use crate::eproduct::{product_slot, ExclusionList};
use crate::error::{Error, Result};
use crate::rational::Q;
use crate::voa::FockState;

#[derive(Clone, Debug, Serialize)]
pub struct AlphaSolution {
    pub t: u32,
    pub slot: (usize, u32),
    pub feasible: bool,
    pub family_size: usize,
    /// Dimension of the family's solution space; 0 when infeasible.
    pub solution_dimension: usize,
    /// `Φ·α` reproduces the target on every sampled tuple.
    pub residual_zero: bool,
    /// `Φ·δχ = 0` on the sampled pairs; `None` when not applicable.
    pub orthogonal: Option<bool>,
    #[serde(skip)]
    pub alpha: Option<Cochain>,
}

/// Coincidence of the single inputs of `Φ` and `α`, which puts `Φ·α` at
/// `(1, 2)`.
fn shared(t: u32) -> Result<ExclusionList> {
    ExclusionList::new(vec![(0, 0)], t)
}

/// Finds `α` in the family at `(1, t)` with `Φ·α = target` on the target's
/// tuples. Picks a nonzero solution when the solution space allows one.
pub fn solve_product_equation(ctx: &Context, phi: &Cochain, target: &SampledSeries, t: u32, order: u32) -> Result<AlphaSolution> {
    let g = Generator::new(phi.cutoff, phi.dual_cutoff);
    let family = e_family(&g, 1, Some(t))?;
    let excl = shared(t)?;
    let tuples: Vec<Vec<FockState>> = target.values.iter().map(|(u, _)| u.clone()).collect();
    let cols = family.iter().map(|a| SampledSeries::product(ctx, phi, a, &excl, order, &tuples)).collect::<Result<Vec<_>>>()?;
    let mut out = AlphaSolution {
        t,
        slot: (1, t),
        feasible: false,
        family_size: family.len(),
        solution_dimension: 0,
        residual_zero: false,
        orthogonal: None,
        alpha: None,
    };
    let Some((mut x, kernel)) = solve_on(&cols, target)? else {
        return Ok(out);
    };
    if x.iter().all(Zero::is_zero) {
        if let Some(k) = kernel.first() {
            x = k.clone();
        }
    }
    let mut alpha = g.zero(1, Some(t));
    for (f, c) in family.iter().zip(&x) {
        if !c.is_zero() {
            alpha = alpha.add_scaled(f, c)?;
        }
    }
    let check = SampledSeries::product(ctx, phi, &alpha, &excl, order, &tuples)?;
    out.feasible = true;
    out.solution_dimension = kernel.len();
    out.residual_zero = check.sub(target)?.is_zero();
    out.alpha = Some(alpha);
    Ok(out)
}

/// `α` at `(1, t)` with `δχ = Φ·α`, trying `t = 2, 1, 0` in turn; the
/// first feasible `t` is returned.
pub fn solve_alpha(ctx: &Context, chi: &Cochain, phi: &Cochain, s: Sampling) -> Result<AlphaSolution> {
    if (chi.n, chi.m) != (0, Some(3)) || (phi.n, phi.m) != (1, Some(2)) {
        return Err(Error::NotComposable("χ must sit at (0, 3) and Φ at (1, 2)".into()));
    }
    let dchi = delta(ctx, chi)?;
    let pairs = basis_tuples(2, s.cutoff);
    let orthogonal = SampledSeries::product(ctx, phi, &dchi, &ExclusionList::none(), s.order, &pairs)?.is_zero();
    let singles = basis_tuples(1, s.cutoff);
    let target = SampledSeries::lifted(ctx, &dchi, s.order, &singles)?;
    let mut last = None;
    for t in [2, 1, 0] {
        let mut r = solve_product_equation(ctx, phi, &target, t, s.order)?;
        r.orthogonal = Some(orthogonal);
        if r.feasible {
            return Ok(r);
        }
        last = Some(r);
    }
    Ok(last.expect("three attempts"))
}

#[derive(Clone, Debug, Serialize)]
pub struct Relation {
    pub name: String,
    pub lhs_slot: (usize, u32),
    pub rhs_slot: (usize, u32),
    pub tuples: usize,
    pub holds: bool,
    /// Set for relations that also assert a nonzero value.
    pub nonzero: Option<bool>,
    pub note: Option<String>,
}

impl Relation {
    fn ok(&self) -> bool {
        self.holds && self.nonzero != Some(false)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TrivialBracket {
    pub pair: (String, String),
    pub slot: Option<(usize, u32)>,
    pub tuples: usize,
    pub vanishes: Option<bool>,
    pub first_nonzero: Option<(Vec<String>, u32)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct BracketTable {
    pub generators: Vec<(String, (usize, String))>,
    pub relations: Vec<Relation>,
    pub declared_trivial: Vec<TrivialBracket>,
    pub jacobi_triples: usize,
    pub jacobi_failures: Vec<(String, String, String)>,
    /// `δ` of both sides of `(δΦ)·α = Φ·δα`: whether they agree, on
    /// tuples of weight at most the closed cutoff.
    pub consequence_after_delta: Option<bool>,
}

impl BracketTable {
    pub fn passed(&self) -> bool {
        self.relations.iter().all(Relation::ok) && self.declared_trivial.iter().all(|b| b.vanishes != Some(false)) && self.jacobi_failures.is_empty()
    }
}

struct Gen {
    name: &'static str,
    c: Option<Cochain>,
}

/// Every tuple of length `n` with entries from `vs`.
fn words(vs: &[FockState], n: usize) -> Vec<Vec<FockState>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|w: Vec<FockState>| vs.iter().map(move |v| [w.clone(), vec![v.clone()]].concat())).collect();
    }
    out
}

fn compare(name: &str, lhs: &SampledSeries, rhs: &SampledSeries, nonzero: bool) -> Result<Relation> {
    if lhs.slot != rhs.slot {
        return Err(Error::NotComposable(format!("relation {name} relates {:?} to {:?}", lhs.slot, rhs.slot)));
    }
    Ok(Relation {
        name: name.into(),
        lhs_slot: lhs.slot,
        rhs_slot: rhs.slot,
        tuples: lhs.values.len(),
        holds: lhs.sub(rhs)?.is_zero(),
        nonzero: nonzero.then(|| !lhs.is_zero()),
        note: None,
    })
}

fn missing(name: &str, why: &str) -> Relation {
    Relation { name: name.into(), lhs_slot: (0, 0), rhs_slot: (0, 0), tuples: 0, holds: false, nonzero: None, note: Some(why.into()) }
}

const NAMES: [&str; 7] = ["H", "H*", "X+", "X-", "Y+", "Y-", "Z"];

/// Structure constants: `[X+, X-] = H`, `[X+, Y-] = [X-, Y+] = Z`, and
/// every other bracket of basis elements zero.
fn structure() -> BTreeMap<(usize, usize), Vec<Q>> {
    let unit = |k: usize| (0..NAMES.len()).map(|i| if i == k { Q::one() } else { Q::zero() }).collect::<Vec<Q>>();
    let neg = |v: Vec<Q>| v.into_iter().map(|x| -x).collect::<Vec<Q>>();
    let mut t = BTreeMap::new();
    for (a, b, c) in [(2, 3, 0), (2, 5, 6), (3, 4, 6)] {
        t.insert((a, b), unit(c));
        t.insert((b, a), neg(unit(c)));
    }
    t
}

fn bracket(t: &BTreeMap<(usize, usize), Vec<Q>>, x: &[Q], y: &[Q]) -> Vec<Q> {
    let mut out = vec![Q::zero(); x.len()];
    for (i, a) in x.iter().enumerate().filter(|(_, a)| !a.is_zero()) {
        for (j, b) in y.iter().enumerate().filter(|(_, b)| !b.is_zero()) {
            if let Some(v) = t.get(&(i, j)) {
                for (o, c) in out.iter_mut().zip(v) {
                    *o += a * b * c;
                }
            }
        }
    }
    out
}

fn jacobi() -> (usize, Vec<(String, String, String)>) {
    let t = structure();
    let d = NAMES.len();
    let unit = |k: usize| (0..d).map(|i| if i == k { Q::one() } else { Q::zero() }).collect::<Vec<Q>>();
    let mut failures = Vec::new();
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                let (x, y, z) = (unit(a), unit(b), unit(c));
                let j1 = bracket(&t, &bracket(&t, &x, &y), &z);
                let j2 = bracket(&t, &bracket(&t, &y, &z), &x);
                let j3 = bracket(&t, &bracket(&t, &z, &x), &y);
                if j1.iter().zip(&j2).zip(&j3).any(|((p, q), r)| !(p + q + r).is_zero()) {
                    failures.push((NAMES[a].into(), NAMES[b].into(), NAMES[c].into()));
                }
            }
        }
    }
    (d * d * d, failures)
}

/// The bracket table on `χ`, `Φ` and a solved `α`, with the relations read
/// on tuples built from `v1, v2`.
pub fn lie_table(ctx: &Context, v1: &FockState, v2: &FockState, chi: &Cochain, phi: &Cochain, alpha: &AlphaSolution, s: Sampling) -> Result<BracketTable> {
    let a = alpha.alpha.as_ref().ok_or_else(|| Error::InvalidInput("no solved α".into()))?;
    let t = alpha.t;
    let vs = vec![v1.clone(), v2.clone()];
    let none = ExclusionList::none();
    let dchi = delta(ctx, chi)?;
    let dphi = delta(ctx, phi)?;
    let dalpha = if t >= 1 { Some(delta(ctx, a)?) } else { None };
    let gens = [
        Gen { name: "H", c: Some(dchi.clone()) },
        Gen { name: "H*", c: Some(chi.clone()) },
        Gen { name: "X+", c: Some(phi.clone()) },
        Gen { name: "X-", c: Some(a.clone()) },
        Gen { name: "Y+", c: Some(dphi.clone()) },
        Gen { name: "Y-", c: dalpha.clone() },
    ];
    let generators = gens.iter().map(|g| (g.name.to_string(), g.c.as_ref().map_or((0, "undefined".into()), |c| (c.n, super::slot_label(c.m))))).collect();

    let mut relations = Vec::new();
    let singles = words(&vs, 1);
    let sh = shared(t)?;
    let h = SampledSeries::lifted(ctx, &dchi, s.order, &singles)?;
    relations.push(compare("δχ = Φ·α", &h, &SampledSeries::product(ctx, phi, a, &sh, s.order, &singles)?, false)?);
    relations.push(compare("[X+, X-] = H", &SampledSeries::commutator(ctx, phi, a, &sh, s.order, &singles)?, &h, false)?);
    let triples = words(&vs, 3);
    let mut consequence_after_delta = None;
    match &dalpha {
        Some(da) => {
            let left = SampledSeries::product(ctx, phi, da, &none, s.order, &triples)?;
            let right = SampledSeries::product(ctx, a, &dphi, &none, s.order, &triples)?;
            relations.push(compare("Φ·δα = α·δΦ ≠ 0", &left, &right, true)?);
            let proof_form = SampledSeries::product(ctx, &dphi, a, &none, s.order, &triples)?;
            relations.push(compare("(δΦ)·α = Φ·δα", &proof_form, &left, false)?);
            let l = SampledSeries::commutator(ctx, phi, da, &none, s.order, &triples)?;
            let r = SampledSeries::commutator(ctx, a, &dphi, &none, s.order, &triples)?;
            relations.push(compare("[X+, Y-] = [X-, Y+]", &l, &r, false)?);
            let bases = (0..=s.order).map(|l| ctx.h.dual_basis(l)).collect::<Result<Vec<_>>>()?;
            let mut agree = true;
            'outer: for u in basis_tuples(4, s.closed_cutoff) {
                for b in &bases {
                    let x = crate::eproduct::delta_of_product(ctx, &dphi, a, &none, b, &u)?;
                    let y = crate::eproduct::delta_of_product(ctx, phi, da, &none, b, &u)?;
                    if x.table != y.table {
                        agree = false;
                        break 'outer;
                    }
                }
            }
            consequence_after_delta = Some(agree);
        }
        None => {
            let why = "δα is undefined at t = 0";
            relations.push(missing("Φ·δα = α·δΦ ≠ 0", why));
            relations.push(missing("(δΦ)·α = Φ·δα", why));
            relations.push(missing("[X+, Y-] = [X-, Y+]", why));
        }
    }

    let nontrivial = [("X+", "X-"), ("X+", "Y-"), ("X-", "Y+")];
    let mut declared_trivial = Vec::new();
    for (i, g1) in gens.iter().enumerate() {
        for g2 in &gens[i..] {
            if nontrivial.iter().any(|&(p, q)| (p, q) == (g1.name, g2.name) || (q, p) == (g1.name, g2.name)) {
                continue;
            }
            let pair = (g1.name.to_string(), g2.name.to_string());
            let (Some(c1), Some(c2)) = (&g1.c, &g2.c) else {
                declared_trivial.push(TrivialBracket { pair, slot: None, tuples: 0, vanishes: None, first_nonzero: None });
                continue;
            };
            let slot = product_slot(c1, c2, &none)?;
            let ts = words(&vs, slot.0);
            let c = SampledSeries::commutator(ctx, c1, c2, &none, s.order, &ts)?;
            let first_nonzero = c.first_nonzero();
            declared_trivial.push(TrivialBracket { pair, slot: Some(slot), tuples: ts.len(), vanishes: Some(first_nonzero.is_none()), first_nonzero });
        }
    }
    let (jacobi_triples, jacobi_failures) = jacobi();
    Ok(BracketTable { generators, relations, declared_trivial, jacobi_triples, jacobi_failures, consequence_after_delta })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::voa::{Heisenberg, ModuleVector};

    fn ctx() -> Context {
        Context::new(Heisenberg::new(10), 2)
    }

    #[test]
    fn closed_chi_is_solved_by_zero_target() {
        let c = ctx();
        let g = Generator::new(1, 2);
        let chi = g.from_module_vector(&ModuleVector::a(1), Some(3));
        let phi = g.from_yw(&ModuleVector::vacuum(), Some(2)).unwrap();
        let s = Sampling { order: 1, cutoff: 1, closed_cutoff: 0 };
        let r = solve_alpha(&c, &chi, &phi, s).unwrap();
        assert!(r.feasible && r.residual_zero);
        assert_eq!(r.orthogonal, Some(true));
        assert_eq!(r.slot, (1, 2));
    }

    #[test]
    fn engineered_target_is_recovered() {
        let c = ctx();
        let g = Generator::new(1, 2);
        let phi = g.from_yw(&ModuleVector::vacuum(), Some(2)).unwrap();
        let alpha0 = g.from_yw(&ModuleVector::a(1), Some(1)).unwrap();
        let ts = basis_tuples(1, 1);
        let target = SampledSeries::product(&c, &phi, &alpha0, &shared(1).unwrap(), 1, &ts).unwrap();
        let r = solve_product_equation(&c, &phi, &target, 1, 1).unwrap();
        assert!(r.feasible && r.residual_zero);
        let diff = r.alpha.unwrap().add_scaled(&alpha0, &-Q::one()).unwrap();
        assert!(SampledSeries::product(&c, &phi, &diff, &shared(1).unwrap(), 1, &ts).unwrap().is_zero());
    }

    #[test]
    fn abstract_table_satisfies_jacobi() {
        let (n, f) = jacobi();
        assert_eq!(n, 343);
        assert!(f.is_empty());
        let t = structure();
        let x = (0..7).map(|i| if i == 2 { Q::one() } else { Q::zero() }).collect::<Vec<_>>();
        assert!(bracket(&t, &x, &x).iter().all(Zero::is_zero));
    }
}
