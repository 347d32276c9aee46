//! Closed and exact cochains, the orthogonality condition, class
//! representatives `(δΦ)·Φ` and their shift behaviour, and the bracket
//! table of the short sequence.
//!
//! Products are only available tuple by tuple, so every statement about a
//! product is checked on a finite sample of basis tuples and `ε`-orders.
//! Exactness and solvability are decided on the E-generated family.

pub mod lie;

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::cochains::Generator;
use crate::cochains::{basis_tuples, Cochain, Expr};
use crate::correlators::Context;
use crate::differential::cohomology::{common_coordinates, e_family, matrix};
use crate::differential::delta;
use crate::eproduct::{commutator, delta_of_product, eps_product, product_slot, EpsSeries, ExclusionList};
use crate::error::{Error, Result};
use crate::linalg::{nullspace, rank, solve};
use crate::ratfield::RatFunc;
use crate::rational::Q;
use crate::voa::FockState;

pub use lie::{lie_table, solve_alpha, solve_product_equation, AlphaSolution, BracketTable, Relation};

/// Which tuples and orders a product statement is checked on.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Sampling {
    /// Highest `ε` power.
    pub order: u32,
    /// Weight cutoff for the inputs of products.
    pub cutoff: u32,
    /// Weight cutoff for the inputs of `δ` applied to a product.
    pub closed_cutoff: u32,
}

fn show(t: &[FockState]) -> Vec<String> {
    t.iter().map(FockState::to_string).collect()
}

/// A product on a list of tuples.
#[derive(Clone, Debug)]
pub struct SampledSeries {
    pub slot: (usize, u32),
    pub values: Vec<(Vec<FockState>, EpsSeries)>,
}

impl SampledSeries {
    pub fn product(ctx: &Context, a: &Cochain, b: &Cochain, excl: &ExclusionList, order: u32, tuples: &[Vec<FockState>]) -> Result<Self> {
        let slot = product_slot(a, b, excl)?;
        let values = tuples.iter().map(|t| Ok((t.clone(), eps_product(ctx, a, b, excl, order, t)?))).collect::<Result<_>>()?;
        Ok(SampledSeries { slot, values })
    }

    pub fn commutator(ctx: &Context, a: &Cochain, b: &Cochain, excl: &ExclusionList, order: u32, tuples: &[Vec<FockState>]) -> Result<Self> {
        let slot = product_slot(a, b, excl)?;
        let values = tuples.iter().map(|t| Ok((t.clone(), commutator(ctx, a, b, excl, order, t)?))).collect::<Result<_>>()?;
        Ok(SampledSeries { slot, values })
    }

    /// A cochain read on the same tuples as `ε^0` series.
    pub fn lifted(ctx: &Context, c: &Cochain, order: u32, tuples: &[Vec<FockState>]) -> Result<Self> {
        let slot = (c.n, c.m.ok_or_else(|| Error::InvalidInput("half slot has no product".into()))?);
        let values = tuples.iter().map(|t| Ok((t.clone(), EpsSeries::lift(&c.entry(ctx, t)?, slot, order)?))).collect::<Result<_>>()?;
        Ok(SampledSeries { slot, values })
    }

    fn zip(&self, other: &Self, f: impl Fn(&EpsSeries, &EpsSeries) -> EpsSeries) -> Result<Self> {
        if self.slot != other.slot || self.values.len() != other.values.len() {
            return Err(Error::NotComposable(format!("series at {:?} and {:?}", self.slot, other.slot)));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|((t, a), (u, b))| if t == u { Ok((t.clone(), f(a, b))) } else { Err(Error::Inconsistent("tuple lists differ".into())) })
            .collect::<Result<_>>()?;
        Ok(SampledSeries { slot: self.slot, values })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.add(b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a.sub(b))
    }

    /// First tuple and order with a nonzero coefficient.
    pub fn first_nonzero(&self) -> Option<(Vec<String>, u32)> {
        self.values.iter().find_map(|(t, s)| s.coefficients.iter().find(|(_, c)| !c.is_zero()).map(|(l, _)| (show(t), *l)))
    }

    pub fn is_zero(&self) -> bool {
        self.first_nonzero().is_none()
    }

    /// Coefficient functions keyed by tuple index, order and state.
    fn keyed(&self) -> BTreeMap<(usize, u32, FockState), RatFunc> {
        let mut out = BTreeMap::new();
        for (i, (_, s)) in self.values.iter().enumerate() {
            for (l, c) in &s.coefficients {
                for (st, f) in &c.table {
                    out.insert((i, *l, st.clone()), f.clone());
                }
            }
        }
        out
    }

    fn nvars(&self) -> Option<usize> {
        self.values.iter().flat_map(|(_, s)| s.coefficients.values()).map(|c| c.nvars).next()
    }
}

/// Solves `Σ c_j cols_j = target` exactly on common coordinates.
fn solve_on(cols: &[SampledSeries], target: &SampledSeries) -> Result<Option<(Vec<Q>, Vec<Vec<Q>>)>> {
    let nv = match cols.iter().chain([target]).find_map(SampledSeries::nvars) {
        Some(nv) => nv,
        None => return Ok(Some((vec![Q::zero(); cols.len()], nullspace(&vec![], cols.len())))),
    };
    let mut all: Vec<_> = cols.iter().map(SampledSeries::keyed).collect();
    all.push(target.keyed());
    let coords = common_coordinates(&all, nv)?;
    let full = matrix(&coords);
    let a: Vec<Vec<Q>> = full.iter().map(|r| r[..cols.len()].to_vec()).collect();
    let b: Vec<Q> = full.iter().map(|r| r[cols.len()].clone()).collect();
    match solve(&a, &b, cols.len()) {
        Ok(x) => Ok(Some((x, nullspace(&a, cols.len())))),
        Err(Error::Inconsistent(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Exactness {
    /// `δΨ = Φ` for `Ψ = Σ c_j F_j` over the labelled family members.
    Witness {
        coefficients: Vec<(String, String)>,
    },
    /// Ranks of the family images without and with `Φ` appended.
    Infeasible {
        family_size: usize,
        rank_images: usize,
        rank_augmented: usize,
    },
    NotApplicable {
        reason: String,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub slot: (usize, String),
    pub preconditions_verified: bool,
    /// `None` when no coboundary leaves the slot.
    pub closed: Option<bool>,
    pub exactness: Exactness,
    #[serde(skip)]
    pub witness: Option<Cochain>,
    pub label: String,
}

fn slot_label(m: Option<u32>) -> String {
    m.map_or_else(|| "1/2".into(), |m| m.to_string())
}

fn family_label(c: &Cochain) -> String {
    match &c.expr {
        Expr::Terms(ts) => ts.first().map_or_else(
            || "0".into(),
            |t| {
                let order: Vec<String> = t.ops.iter().map(|o| format!("{:?}", o.slot)).collect();
                format!("E[{}; {}]", order.join(" "), t.w)
            },
        ),
        Expr::Table => "table".into(),
    }
}

/// Closedness by the coboundary and exactness by an exact solve over
/// `δ` of the family at `(n - 1, m + 1)`.
pub fn classify(ctx: &Context, phi: &Cochain) -> Result<Classification> {
    let closed = match phi.m {
        Some(m) if m >= 1 => Some(delta(ctx, phi)?.is_zero_on_tuples(ctx)?.is_none()),
        _ => None,
    };
    let label = format!("family-relative, inputs of weight <= {}", phi.cutoff);
    let mut out = Classification {
        slot: (phi.n, slot_label(phi.m)),
        preconditions_verified: phi.flags.all_verified(),
        closed,
        exactness: Exactness::NotApplicable { reason: String::new() },
        witness: None,
        label,
    };
    let m_in = match phi.m {
        Some(m) => m + 1,
        None => {
            out.exactness = Exactness::NotApplicable { reason: "the half slot is reached from (1, 2) through the half coboundary".into() };
            return Ok(out);
        }
    };
    if phi.n == 0 {
        let zero = phi.is_zero_on_tuples(ctx)?.is_none();
        out.exactness = if zero {
            out.witness = Some(Cochain::zero(0, phi.m, phi.cutoff, phi.dual_cutoff));
            Exactness::Witness { coefficients: vec![] }
        } else {
            Exactness::NotApplicable { reason: "degree 0 has no incoming coboundary".into() }
        };
        return Ok(out);
    }
    let g = Generator::new(phi.cutoff, phi.dual_cutoff);
    let family = e_family(&g, phi.n - 1, Some(m_in))?;
    let images: Vec<Cochain> = family.iter().map(|f| delta(ctx, f)).collect::<Result<_>>()?;
    let tuples = basis_tuples(phi.n, phi.cutoff);
    let keyed = |c: &Cochain| -> Result<BTreeMap<(Vec<FockState>, FockState), RatFunc>> {
        let mut out = BTreeMap::new();
        for t in &tuples {
            for (s, f) in c.entry(ctx, t)?.table {
                out.insert((t.clone(), s), f);
            }
        }
        Ok(out)
    };
    let mut cols: Vec<_> = images.iter().map(keyed).collect::<Result<_>>()?;
    cols.push(keyed(phi)?);
    let coords = common_coordinates(&cols, phi.nvars())?;
    let full = matrix(&coords);
    let k = family.len();
    let a: Vec<Vec<Q>> = full.iter().map(|r| r[..k].to_vec()).collect();
    let b: Vec<Q> = full.iter().map(|r| r[k].clone()).collect();
    match solve(&a, &b, k) {
        Ok(x) => {
            let mut psi = Cochain::zero(phi.n - 1, Some(m_in), phi.cutoff, phi.dual_cutoff);
            let mut coefficients = Vec::new();
            for (f, c) in family.iter().zip(&x) {
                if !c.is_zero() {
                    psi = psi.add_scaled(f, c)?;
                    coefficients.push((family_label(f), c.to_string()));
                }
            }
            if delta(ctx, &psi)?.first_difference(ctx, phi)?.is_some() {
                return Err(Error::Inconsistent("exactness witness does not reproduce the cochain".into()));
            }
            out.witness = Some(psi);
            out.exactness = Exactness::Witness { coefficients };
        }
        Err(Error::Inconsistent(_)) => {
            out.exactness = Exactness::Infeasible { family_size: k, rank_images: rank(&a), rank_augmented: rank(&full) };
        }
        Err(e) => return Err(e),
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalityReport {
    pub holds: bool,
    pub tuples: usize,
    pub order: u32,
    pub first_nonzero: Option<(Vec<String>, u32)>,
}

/// `[Φ_1, δΦ_2] = 0` on every tuple of weight at most `cutoff`, to order
/// `order`.
pub fn orthogonality(ctx: &Context, phi1: &Cochain, phi2: &Cochain, excl: &ExclusionList, order: u32, cutoff: u32) -> Result<OrthogonalityReport> {
    let d = delta(ctx, phi2)?;
    let (nin, _) = product_slot(phi1, &d, excl)?;
    let tuples = basis_tuples(nin, cutoff);
    let c = SampledSeries::commutator(ctx, phi1, &d, excl, order, &tuples)?;
    let first_nonzero = c.first_nonzero();
    Ok(OrthogonalityReport { holds: first_nonzero.is_none(), tuples: tuples.len(), order, first_nonzero })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    DPhiPhi,
    DChiChi,
    DAlphaAlpha,
}

impl ClassKind {
    fn expected_slot(self) -> Option<(usize, Option<u32>)> {
        match self {
            ClassKind::DPhiPhi => Some((1, Some(2))),
            ClassKind::DChiChi => Some((0, Some(3))),
            ClassKind::DAlphaAlpha => None,
        }
    }
}

/// `δ` of a sampled product, on tuples one longer.
#[derive(Clone, Debug, Serialize)]
pub struct ClosednessCertificate {
    pub tuples: usize,
    pub order: u32,
    pub closed: bool,
    pub first_nonzero: Option<(Vec<String>, u32)>,
}

pub fn product_closedness(ctx: &Context, a: &Cochain, b: &Cochain, excl: &ExclusionList, order: u32, cutoff: u32) -> Result<ClosednessCertificate> {
    let (nin, m) = product_slot(a, b, excl)?;
    if m == 0 {
        return Err(Error::NotComposable("the coboundary needs m >= 1".into()));
    }
    let tuples = basis_tuples(nin + 1, cutoff);
    let bases = (0..=order).map(|l| ctx.h.dual_basis(l)).collect::<Result<Vec<_>>>()?;
    let mut first_nonzero = None;
    'outer: for t in &tuples {
        for b_l in &bases {
            if !delta_of_product(ctx, a, b, excl, b_l, t)?.is_zero() {
                first_nonzero = Some((show(t), b_l.weight));
                break 'outer;
            }
        }
    }
    Ok(ClosednessCertificate { tuples: tuples.len(), order, closed: first_nonzero.is_none(), first_nonzero })
}

/// A representative with its certificates.
#[derive(Clone, Debug, Serialize)]
pub struct ClassWitness {
    pub kind: ClassKind,
    pub input_slot: (usize, String),
    pub slot: (usize, u32),
    pub sampling: Sampling,
    pub tuples: usize,
    pub closedness: ClosednessCertificate,
    /// Where the representative is nonzero; `None` is inconclusive at this
    /// truncation, not a proof of vanishing.
    pub nonvanishing: Option<(Vec<String>, u32)>,
    pub shift: Option<ShiftReport>,
    #[serde(skip)]
    pub representative: Option<SampledSeries>,
}

impl ClassWitness {
    pub fn passed(&self) -> bool {
        self.closedness.closed && self.nonvanishing.is_some() && self.shift.as_ref().is_none_or(ShiftReport::passed)
    }
}

/// `(δX)·X` for `X = Φ, χ, α`, its closedness, where it is nonzero, and
/// optionally the shift test against `eta`.
pub fn class_representative(ctx: &Context, kind: ClassKind, x: &Cochain, eta: Option<&Cochain>, s: Sampling) -> Result<ClassWitness> {
    match kind.expected_slot() {
        Some((n, m)) if (x.n, x.m) != (n, m) => {
            return Err(Error::NotComposable(format!("{kind:?} expects the slot ({n}, {}), got ({}, {})", slot_label(m), x.n, slot_label(x.m))));
        }
        None if x.n != 1 || !matches!(x.m, Some(1..=2)) => {
            return Err(Error::NotComposable(format!("α must sit at (1, t) with 1 <= t <= 2 for δα to exist, got ({}, {})", x.n, slot_label(x.m))));
        }
        _ => {}
    }
    let excl = ExclusionList::none();
    let dx = delta(ctx, x)?;
    let (nin, _) = product_slot(&dx, x, &excl)?;
    let tuples = basis_tuples(nin, s.cutoff);
    let rep = SampledSeries::product(ctx, &dx, x, &excl, s.order, &tuples)?;
    let closedness = product_closedness(ctx, &dx, x, &excl, s.order, s.closed_cutoff)?;
    let shift = eta.map(|e| shift_invariance_test(ctx, x, e, s)).transpose()?;
    Ok(ClassWitness {
        kind,
        input_slot: (x.n, slot_label(x.m)),
        slot: rep.slot,
        sampling: s,
        tuples: tuples.len(),
        closedness,
        nonvanishing: rep.first_nonzero(),
        shift,
        representative: Some(rep),
    })
}

/// The four pieces of `(δ(Φ+η))·(Φ+η)`.
#[derive(Clone, Debug, Serialize)]
pub struct ShiftReport {
    pub tuples: usize,
    pub order: u32,
    /// Left side equals the sum of the four pieces.
    pub decomposition_holds: bool,
    /// `[Φ, δη] + [δη, Φ] = 0`, the cancellation as commutators.
    pub commutator_cancellation: bool,
    /// Whether `Φ·δη + (δη)·Φ` itself vanishes.
    pub middle_literal_zero: bool,
    pub base_zero: bool,
    pub correction_zero: bool,
    pub quadratic_zero: bool,
}

impl ShiftReport {
    pub fn passed(&self) -> bool {
        self.decomposition_holds && self.commutator_cancellation
    }
}

/// Expands `(δ(Φ+η))·(Φ+η)` as `(δΦ)·Φ + ((δΦ)·η - Φ·δη) + (Φ·δη +
/// (δη)·Φ) + (δη)·η` on every tuple of weight at most `s.cutoff`.
pub fn shift_invariance_test(ctx: &Context, phi: &Cochain, eta: &Cochain, s: Sampling) -> Result<ShiftReport> {
    if (phi.n, phi.m) != (eta.n, eta.m) {
        return Err(Error::NotComposable("Φ and η must share a slot".into()));
    }
    let excl = ExclusionList::none();
    let sum = phi.add_scaled(eta, &Q::from_integer(1.into()))?;
    let (dphi, deta, dsum) = (delta(ctx, phi)?, delta(ctx, eta)?, delta(ctx, &sum)?);
    let (nin, _) = product_slot(&dphi, phi, &excl)?;
    let tuples = basis_tuples(nin, s.cutoff);
    let p = |a: &Cochain, b: &Cochain| SampledSeries::product(ctx, a, b, &excl, s.order, &tuples);
    let lhs = p(&dsum, &sum)?;
    let base = p(&dphi, phi)?;
    let correction = p(&dphi, eta)?.sub(&p(phi, &deta)?)?;
    let middle = p(phi, &deta)?.add(&p(&deta, phi)?)?;
    let quadratic = p(&deta, eta)?;
    let total = base.add(&correction)?.add(&middle)?.add(&quadratic)?;
    let c = |a: &Cochain, b: &Cochain| SampledSeries::commutator(ctx, a, b, &excl, s.order, &tuples);
    let cancel = c(phi, &deta)?.add(&c(&deta, phi)?)?;
    Ok(ShiftReport {
        tuples: tuples.len(),
        order: s.order,
        decomposition_holds: lhs.sub(&total)?.is_zero(),
        commutator_cancellation: cancel.is_zero(),
        middle_literal_zero: middle.is_zero(),
        base_zero: base.is_zero(),
        correction_zero: correction.is_zero(),
        quadratic_zero: quadratic.is_zero(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::voa::{Heisenberg, ModuleVector};

    fn ctx() -> Context {
        Context::new(Heisenberg::new(10), 2)
    }

    #[test]
    fn zero_is_closed_and_exact() {
        let c = ctx();
        let g = Generator::new(1, 2);
        let r = classify(&c, &g.zero(1, Some(2))).unwrap();
        assert_eq!(r.closed, Some(true));
        assert!(matches!(r.exactness, Exactness::Witness { .. }));
    }

    #[test]
    fn coboundary_of_yw_is_exact() {
        let c = ctx();
        let g = Generator::new(1, 2);
        let yw = g.from_yw(&ModuleVector::a(1), Some(2)).unwrap();
        let d = delta(&c, &yw).unwrap();
        let r = classify(&c, &d).unwrap();
        assert_eq!(r.closed, Some(true));
        let w = r.witness.unwrap();
        assert!(delta(&c, &w).unwrap().first_difference(&c, &d).unwrap().is_none());
        // E^{(1)} itself is not closed
        assert_eq!(classify(&c, &yw).unwrap().closed, Some(false));
    }

    #[test]
    fn orthogonal_to_closed_cochains() {
        let c = ctx();
        let g = Generator::new(1, 2);
        let phi = g.from_yw(&ModuleVector::vacuum(), Some(2)).unwrap();
        let chi = g.from_module_vector(&ModuleVector::a(1), Some(3));
        assert!(orthogonality(&c, &phi, &chi, &ExclusionList::none(), 1, 1).unwrap().holds);
    }

    #[test]
    fn shift_with_zero_and_with_itself() {
        let c = ctx();
        let g = Generator::new(1, 2);
        let phi = g.from_yw(&ModuleVector::vacuum(), Some(2)).unwrap();
        let s = Sampling { order: 1, cutoff: 1, closed_cutoff: 0 };
        let r = shift_invariance_test(&c, &phi, &g.zero(1, Some(2)), s).unwrap();
        assert!(r.passed() && r.correction_zero && r.middle_literal_zero && r.quadratic_zero, "{r:?}");
        let r = shift_invariance_test(&c, &phi, &phi, s).unwrap();
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn zero_input_has_no_nonvanishing_certificate() {
        let c = ctx();
        let g = Generator::new(1, 2);
        let s = Sampling { order: 1, cutoff: 1, closed_cutoff: 0 };
        let w = class_representative(&c, ClassKind::DPhiPhi, &g.zero(1, Some(2)), None, s).unwrap();
        assert!(w.closedness.closed);
        assert!(w.nonvanishing.is_none());
        assert!(!w.passed());
    }
}
