//! The ε-product of two cochains over graded dual bases, the commutator
//! product, and the Leibniz check.
//!
//! A factor `<w', Y_{WV}(Φ(v; x), ζ) u>` is computed as the correlator
//! `<w', Y(v_1, x_1 + ζ) ⋯ Y(w, ζ) u>`. The shift parameter enters as
//! `η = -ζ` so that every pole sits on `x_i = η` or `η = 0`. Product
//! variables are the inputs' variables followed by `η_1, η_2`.

pub mod leibniz;

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cochains::{Cochain, Slot};
use crate::correlators::{Context, Insertion, RationalSection};
use crate::error::{Error, Result};
use crate::ratfield::{Permutation, RatFunc};
use crate::rational::Q;
use crate::voa::{DualBasis, FockState, ModuleVector};

pub use leibniz::{check_leibniz, delta_of_product, LeibnizReport};

/// Coinciding parameters `x_i = y_j` (0-based) and the number `t` of
/// shared composable operators, declared by the caller.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ExclusionList {
    pub pairs: Vec<(usize, usize)>,
    pub t: u32,
}

impl ExclusionList {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(pairs: Vec<(usize, usize)>, t: u32) -> Result<Self> {
        for (a, p) in pairs.iter().enumerate() {
            for q in &pairs[a + 1..] {
                if p.0 == q.0 || p.1 == q.1 {
                    return Err(Error::InvalidInput(format!("exclusion pairs {p:?} and {q:?} share a coordinate")));
                }
            }
        }
        Ok(ExclusionList { pairs, t })
    }

    pub fn r(&self) -> usize {
        self.pairs.len()
    }

    /// The same coincidences seen from the other factor.
    pub fn swapped(&self) -> Self {
        ExclusionList { pairs: self.pairs.iter().map(|&(i, j)| (j, i)).collect(), t: self.t }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ZetaPolicy {
    Independent,
    Pinched,
}

/// Coefficients of `ε^l` for `l <= order`.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsSeries {
    pub order: u32,
    pub policy: ZetaPolicy,
    pub slot: (usize, u32),
    pub coefficients: BTreeMap<u32, RationalSection>,
}

impl EpsSeries {
    pub fn is_zero(&self) -> bool {
        self.coefficients.values().all(RationalSection::is_zero)
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (l, c) in &other.coefficients {
            let e = out.coefficients.entry(*l).or_insert_with(|| RationalSection::zero(c.nvars, c.tags.clone()));
            *e = e.sub(c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (l, c) in &other.coefficients {
            let e = out.coefficients.entry(*l).or_insert_with(|| RationalSection::zero(c.nvars, c.tags.clone()));
            *e = e.add(c);
        }
        out
    }

    /// A cochain value as a series: the `ε^0` coefficient, constant in
    /// `η_1, η_2`.
    pub fn lift(section: &RationalSection, slot: (usize, u32), order: u32) -> Result<Self> {
        let nv = section.nvars;
        let map: Vec<usize> = (0..nv).collect();
        let mut c = section.map(|f| f.map_vars(&map, nv + 2))?;
        c.nvars = nv + 2;
        c.tags.extend([0, 0]);
        Ok(EpsSeries { order, policy: ZetaPolicy::Independent, slot, coefficients: BTreeMap::from([(0, c)]) })
    }

    /// First `ε^l` on which two series differ.
    pub fn first_difference(&self, other: &Self) -> Option<u32> {
        (0..=self.order.max(other.order)).find(|l| {
            let a = self.coefficients.get(l).map(|c| &c.table);
            let b = other.coefficients.get(l).map(|c| &c.table);
            let empty = BTreeMap::new();
            a.unwrap_or(&empty) != b.unwrap_or(&empty)
        })
    }

    /// Numerical value of the truncated series under the pinch `ζ_1 ζ_2 = ε`
    /// at given input variables and `ζ_1`.
    pub fn eval_pinched(&self, zs: &[Q], zeta1: &Q, eps: &Q) -> Result<BTreeMap<FockState, Q>> {
        if zeta1.is_zero() {
            return Err(Error::InvalidInput("ζ_1 must be nonzero".into()));
        }
        let zeta2 = eps / zeta1;
        let mut point = zs.to_vec();
        point.push(-zeta1.clone());
        point.push(-zeta2);
        let mut out: BTreeMap<FockState, Q> = BTreeMap::new();
        let mut epow = Q::one();
        for l in 0..=self.order {
            if let Some(c) = self.coefficients.get(&l) {
                for (s, f) in &c.table {
                    let v = f.eval_at(&point).ok_or_else(|| Error::PoleLocusViolation(format!("ε^{l} coefficient at {s}")))?;
                    *out.entry(s.clone()).or_insert_with(Q::zero) += &epow * v;
                }
            }
            epow *= eps;
        }
        out.retain(|_, v| !v.is_zero());
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "order": self.order,
            "policy": self.policy,
            "slot": self.slot,
            "coefficients": self.coefficients.iter().map(|(l, c)| serde_json::json!({"l": l, "section": c.to_json()})).collect::<Vec<_>>(),
        })
    }
}

/// `<w', Y_{WV}(Φ(inputs), ζ) u>` over Φ's variables and `η = -ζ`.
pub fn factor(ctx: &Context, phi: &Cochain, inputs: &[ModuleVector], u: &ModuleVector, max_weight: u32) -> Result<RationalSection> {
    if phi.nparams != 0 {
        return Err(Error::InvalidInput("ε-product factors must not carry parameters".into()));
    }
    if inputs.len() != phi.n {
        return Err(Error::VariableCountMismatch(phi.n, inputs.len()));
    }
    let ts = phi.terms().ok_or_else(|| Error::InvalidInput("ε-product factors must be symbolic".into()))?;
    let nv = phi.n + 1;
    let mut eta = vec![0i64; nv];
    eta[phi.n] = -1;
    let mut out = RationalSection::zero(nv, inputs.iter().map(|v| v.homogeneous_weight().unwrap_or(0)).chain([0]).collect());
    for t in ts {
        let mut ins: Vec<Insertion> = t
            .ops
            .iter()
            .map(|o| {
                let mut p = o.point.clone();
                p.push(-1);
                Insertion {
                    state: match &o.slot {
                        Slot::Input(i) => inputs[*i].clone(),
                        Slot::Fixed(v) => v.clone(),
                    },
                    point: p,
                }
            })
            .collect();
        ins.push(Insertion { state: ModuleVector::basis(t.w.clone()), point: eta.clone() });
        out.add_scaled(&ctx.section(&ins, u, nv, max_weight)?, &t.coef);
    }
    Ok(out)
}

/// Splits product inputs between the factors; a shared input feeds both.
fn split_inputs(k: usize, n: usize, excl: &ExclusionList, inputs: &[ModuleVector]) -> Result<(Vec<ModuleVector>, Vec<ModuleVector>)> {
    if inputs.len() + excl.r() != k + n {
        return Err(Error::VariableCountMismatch(k + n - excl.r(), inputs.len()));
    }
    let left = inputs[..k].to_vec();
    let mut rest = inputs[k..].iter();
    let mut right = Vec::with_capacity(n);
    for j in 0..n {
        match excl.pairs.iter().find(|p| p.1 == j) {
            Some(&(i, _)) => right.push(left[i].clone()),
            None => right.push(rest.next().cloned().ok_or_else(|| Error::InvalidInput("too few inputs".into()))?),
        }
    }
    Ok((left, right))
}

/// Output slot `(k + n - r, m + m' - t)`.
pub fn product_slot(phi: &Cochain, psi: &Cochain, excl: &ExclusionList) -> Result<(usize, u32)> {
    let (m1, m2) = match (phi.m, psi.m) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::InvalidInput("the ε-product takes integer slots".into())),
    };
    let m = (m1 + m2).checked_sub(excl.t).ok_or_else(|| Error::InvalidInput("t exceeds m + m'".into()))?;
    Ok((phi.n + psi.n - excl.r(), m))
}

/// The `ε^l` coefficient on arbitrary inputs, with `(u, ū)` from `basis`.
pub fn coefficient(
    ctx: &Context,
    phi: &Cochain,
    psi: &Cochain,
    excl: &ExclusionList,
    basis: &DualBasis,
    inputs: &[ModuleVector],
    max_weight: u32,
) -> Result<RationalSection> {
    let (k, n) = (phi.n, psi.n);
    let (left, right) = split_inputs(k, n, excl, inputs)?;
    // both factors over (x_1..x_k, y_1..y_n, η_1, η_2)
    let total = k + n + 2;
    let map1: Vec<usize> = (0..k).chain([k + n]).collect();
    let map2: Vec<usize> = (k..k + n).chain([k + n + 1]).collect();
    let nout = total - excl.r();
    let tags: Vec<u32> = inputs.iter().map(|v| v.homogeneous_weight().unwrap_or(0)).chain([0, 0]).collect();
    let mut out = RationalSection::zero(nout, tags);
    for (u, ubar) in basis.pairs() {
        let f1 = factor(ctx, phi, &left, u, max_weight)?;
        if f1.is_zero() {
            continue;
        }
        let f2 = factor(ctx, psi, &right, ubar, max_weight)?;
        for (s, g1) in &f1.table {
            let Some(g2) = f2.table.get(s) else { continue };
            let prod = g1.map_vars(&map1, total)?.mul(&g2.map_vars(&map2, total)?);
            out.add_term(s, &prod.identify_and_exclude(k, &excl.pairs)?);
        }
    }
    Ok(out)
}

/// `Φ ·_ε Ψ` on one tuple of basis states, for `l <= order`.
pub fn eps_product(ctx: &Context, phi: &Cochain, psi: &Cochain, excl: &ExclusionList, order: u32, tuple: &[FockState]) -> Result<EpsSeries> {
    let bases = (0..=order).map(|l| ctx.h.dual_basis(l)).collect::<Result<Vec<_>>>()?;
    eps_product_with(ctx, phi, psi, excl, &bases, tuple)
}

/// The same over caller-chosen bases, one per weight `0..=order`.
pub fn eps_product_with(ctx: &Context, phi: &Cochain, psi: &Cochain, excl: &ExclusionList, bases: &[DualBasis], tuple: &[FockState]) -> Result<EpsSeries> {
    let slot = product_slot(phi, psi, excl)?;
    let inputs: Vec<ModuleVector> = tuple.iter().cloned().map(ModuleVector::basis).collect();
    let mut coefficients = BTreeMap::new();
    for b in bases {
        coefficients.insert(b.weight, coefficient(ctx, phi, psi, excl, b, &inputs, ctx.dual_cutoff)?);
    }
    Ok(EpsSeries { order: bases.len().saturating_sub(1) as u32, policy: ZetaPolicy::Independent, slot, coefficients })
}

/// A seeded invertible change of the Fock basis of weight `l`: unit
/// triangular factors with small integer entries.
pub fn random_basis(ctx: &Context, l: u32, seed: u64) -> Result<DualBasis> {
    let fock = FockState::basis(l);
    let d = fock.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(l as u64));
    let mut lower = vec![vec![Q::zero(); d]; d];
    let mut upper = vec![vec![Q::zero(); d]; d];
    for i in 0..d {
        lower[i][i] = Q::one();
        upper[i][i] = Q::from_integer(rng.gen_range(1i64..=3).into()) * if rng.gen_bool(0.5) { Q::one() } else { -Q::one() };
        for j in 0..i {
            lower[i][j] = Q::from_integer(rng.gen_range(-3i64..=3).into());
        }
        for j in i + 1..d {
            upper[i][j] = Q::new(rng.gen_range(-3i64..=3).into(), rng.gen_range(1i64..=2).into());
        }
    }
    let m = crate::linalg::mat_mul(&lower, &upper);
    let basis =
        m.iter().map(|row| ModuleVector::from_terms(row.iter().zip(&fock).filter(|(c, _)| !c.is_zero()).map(|(c, s)| (s.clone(), c.clone())))).collect();
    ctx.h.dual_of(l, basis)
}

/// Recomputes the product with a random basis change at every weight.
pub fn check_basis_independence(ctx: &Context, phi: &Cochain, psi: &Cochain, excl: &ExclusionList, order: u32, tuple: &[FockState], seed: u64) -> Result<bool> {
    let a = eps_product(ctx, phi, psi, excl, order, tuple)?;
    let bases = (0..=order).map(|l| random_basis(ctx, l, seed)).collect::<Result<Vec<_>>>()?;
    let b = eps_product_with(ctx, phi, psi, excl, &bases, tuple)?;
    Ok(a.first_difference(&b).is_none())
}

/// `σ(Φ ·_ε Ψ)` at `tuple`: the product read at `t` with `t_i = u_{σ(i)}`
/// and its input variables renamed by `σ`.
pub fn sigma_act_product(
    ctx: &Context,
    sigma: &Permutation,
    phi: &Cochain,
    psi: &Cochain,
    excl: &ExclusionList,
    order: u32,
    tuple: &[FockState],
) -> Result<EpsSeries> {
    let nin = phi.n + psi.n - excl.r();
    if sigma.n() != nin || tuple.len() != nin {
        return Err(Error::VariableCountMismatch(nin, sigma.n()));
    }
    let t: Vec<FockState> = (0..nin).map(|i| tuple[sigma.apply(i)].clone()).collect();
    let full = Permutation::new((0..nin + 2).map(|i| if i < nin { sigma.apply(i) } else { i }).collect())?;
    let mut out = eps_product(ctx, phi, psi, excl, order, &t)?;
    for c in out.coefficients.values_mut() {
        *c = c.permute(&full)?;
    }
    Ok(out)
}

/// `Φ ·_ε Ψ - Ψ ·_ε Φ`; the second product feeds Ψ the first inputs.
pub fn commutator(ctx: &Context, phi: &Cochain, psi: &Cochain, excl: &ExclusionList, order: u32, tuple: &[FockState]) -> Result<EpsSeries> {
    let a = eps_product(ctx, phi, psi, excl, order, tuple)?;
    let b = eps_product(ctx, psi, phi, &excl.swapped(), order, tuple)?;
    Ok(a.sub(&b))
}

/// Swaps `η_1` and `η_2` in every coefficient.
pub fn swap_zetas(s: &EpsSeries) -> Result<EpsSeries> {
    let mut out = s.clone();
    for c in out.coefficients.values_mut() {
        let nv = c.nvars;
        let p = Permutation::new(
            (0..nv)
                .map(|i| {
                    if i == nv - 2 {
                        nv - 1
                    } else if i == nv - 1 {
                        nv - 2
                    } else {
                        i
                    }
                })
                .collect(),
        )?;
        *c = c.permute(&p)?;
    }
    Ok(out)
}

/// Helper for tests and reports: the product of two 0-cochains at `l = 0`
/// from the translation operator directly.
pub fn translated_pair(ctx: &Context, w1: &ModuleVector, w2: &ModuleVector) -> Result<RationalSection> {
    let mut out = RationalSection::zero(2, vec![0, 0]);
    let t1 = translation_series(ctx, w1, 0, 2)?;
    let t2 = translation_series(ctx, w2, 1, 2)?;
    for (s, f) in &t1.table {
        if let Some(g) = t2.table.get(s) {
            out.add_term(s, &f.mul(g));
        }
    }
    Ok(out)
}

/// `e^{ζ L(-1)} w` over `η = -ζ` at position `var` of `nvars`.
fn translation_series(ctx: &Context, w: &ModuleVector, var: usize, nvars: usize) -> Result<RationalSection> {
    let mut out = RationalSection::zero(nvars, vec![0; nvars]);
    let mut term = w.clone();
    let mut fact = Q::one();
    let eta = RatFunc::var(nvars, var);
    let mut k = 0u32;
    while !term.is_zero() {
        let c = RatFunc::constant(nvars, Q::one() / &fact).mul(&eta.pow(k)).scale(&if k.is_multiple_of(2) { Q::one() } else { -Q::one() });
        for (s, a) in term.iter() {
            if s.weight() <= ctx.dual_cutoff {
                out.add_term(s, &c.scale(a));
            }
        }
        k += 1;
        fact *= Q::from_integer(k.into());
        term = ctx.h.translation(&term);
        if term.iter().all(|(s, _)| s.weight() > ctx.dual_cutoff) {
            break;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochains::Generator;
    use crate::voa::Heisenberg;

    fn ctx() -> Context {
        Context::new(Heisenberg::new(10), 2)
    }

    #[test]
    fn zero_cochains_at_order_zero() {
        let c = ctx();
        let g = Generator::new(2, 2);
        let w1 = ModuleVector::a(1);
        let w2 = ModuleVector::basis(FockState::new(vec![1, 1]).unwrap());
        let p = eps_product(&c, &g.from_module_vector(&w1, Some(1)), &g.from_module_vector(&w2, Some(1)), &ExclusionList::none(), 0, &[]).unwrap();
        assert_eq!(p.slot, (0, 2));
        assert_eq!(p.coefficients[&0].table, translated_pair(&c, &w1, &w2).unwrap().table);
    }

    #[test]
    fn zero_factor_and_slots() {
        let c = ctx();
        let g = Generator::new(1, 2);
        let phi = g.from_e(1, &ModuleVector::vacuum(), Some(2)).unwrap();
        let z = g.zero(1, Some(2));
        let a = FockState::single(1);
        let p = eps_product(&c, &phi, &z, &ExclusionList::none(), 2, &[a.clone(), a.clone()]).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.slot, (2, 4));
        let shared = ExclusionList::new(vec![(0, 0)], 1).unwrap();
        let q = eps_product(&c, &phi, &phi, &shared, 1, std::slice::from_ref(&a)).unwrap();
        assert_eq!(q.slot, (1, 3));
        assert!(ExclusionList::new(vec![(0, 0), (0, 1)], 0).is_err());
    }

    #[test]
    fn basis_independence_and_nilpotency() {
        let c = ctx();
        let g = Generator::new(1, 2);
        let phi = g.random_valid(1, Some(2), 9).unwrap();
        let psi = g.from_module_vector(&ModuleVector::a(1), Some(3));
        let a = FockState::single(1);
        assert!(check_basis_independence(&c, &phi, &psi, &ExclusionList::none(), 2, std::slice::from_ref(&a), 5).unwrap());
        assert!(commutator(&c, &phi, &phi, &ExclusionList::none(), 2, &[a.clone(), a.clone()]).unwrap().is_zero());
        let ab = commutator(&c, &phi, &psi, &ExclusionList::none(), 1, std::slice::from_ref(&a)).unwrap();
        let ba = commutator(&c, &psi, &phi, &ExclusionList::none(), 1, std::slice::from_ref(&a)).unwrap();
        // antisymmetry: ab + ba = 0
        assert!(ab.sub(&ba.sub(&ba).sub(&ba)).is_zero());
    }

    #[test]
    fn sigma_on_products() {
        let c = ctx();
        let g = Generator::new(1, 2);
        let phi = g.random_valid(1, Some(2), 4).unwrap();
        let t = [FockState::single(1), FockState::vacuum()];
        let id = Permutation::identity(2);
        let swap = Permutation::transposition(2, 0, 1);
        let p = eps_product(&c, &phi, &phi, &ExclusionList::none(), 1, &t).unwrap();
        assert_eq!(sigma_act_product(&c, &id, &phi, &phi, &ExclusionList::none(), 1, &t).unwrap(), p);
        // swapping the blocks of Φ·Φ exchanges the two sewing parameters
        let s = sigma_act_product(&c, &swap, &phi, &phi, &ExclusionList::none(), 1, &t).unwrap();
        assert_eq!(s.first_difference(&swap_zetas(&p).unwrap()), None);
    }
}
