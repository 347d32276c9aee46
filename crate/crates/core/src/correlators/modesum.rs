//! Correlators by explicit mode sums.
//!
//! `Y(v_1,z_1)⋯Y(v_n,z_n)w` is built from the right. At each step the
//! coefficient of a basis state `s` is the sum over intermediate states `s'`
//! of `[v_k(j)s']_s z_k^{-j-1}` times the already rationalized coefficient of
//! `s'`; this series in `z_k` at infinity is reconstructed against the pole
//! ansatz in `z_k` before moving left.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::ratfield::laurent::STABILIZATION_MARGIN;
use crate::ratfield::uniseries::{SeriesAtInfinity, UniAnsatz};
use crate::ratfield::RatFunc;
use crate::voa::{FockState, Heisenberg, ModuleVector};

/// Pole-order bound between two inputs.
pub fn pair_bound(u: &FockState, v: &FockState) -> u32 {
    u.weight() + v.weight()
}

/// Pole-order bound at the origin for an input acting on `w`.
pub fn origin_bound(u: &FockState, w: &FockState) -> u32 {
    if w.is_vacuum() {
        0
    } else {
        u.weight() + w.weight()
    }
}

/// Coefficients of every basis state of weight at most `max_weight` in
/// `E(Y(v_1,z_{x_1})⋯Y(v_n,z_{x_n})w)`; the insertions carry variable
/// indices `x_k`, which must be distinct.
pub fn section(h: &Heisenberg, ins: &[(FockState, usize)], w: &FockState, nvars: usize, max_weight: u32) -> Result<BTreeMap<FockState, RatFunc>> {
    let mut seen = vec![false; nvars];
    for &(_, x) in ins {
        if x >= nvars || seen[x] {
            return Err(Error::InvalidInput("mode-sum insertions need distinct variables".into()));
        }
        seen[x] = true;
    }
    if ins.is_empty() {
        let mut out = BTreeMap::new();
        if w.weight() <= max_weight {
            out.insert(w.clone(), RatFunc::one(nvars));
        }
        return Ok(out);
    }
    // weight bounds per level, from the left
    let n = ins.len();
    let mut bounds = vec![max_weight as i64; n];
    for k in 0..n - 1 {
        let deg = ansatz_for(ins, w, k).degree() as i64;
        bounds[k + 1] = (bounds[k] - ins[k].0.weight() as i64).max(0) + deg + STABILIZATION_MARGIN;
    }
    // innermost level: a single mode application per weight
    let (vn, xn) = &ins[n - 1];
    let mut level: BTreeMap<FockState, RatFunc> = BTreeMap::new();
    let base = vn.weight() as i64 + w.weight() as i64 - 1;
    for j in (base - bounds[n - 1]).min(base)..=base {
        let out = h.vertex_mode_unchecked(&ModuleVector::basis(vn.clone()), j, &ModuleVector::basis(w.clone()));
        for (s, c) in out.iter() {
            let e = -j - 1;
            let mono = if e >= 0 { RatFunc::var(nvars, *xn).pow(e as u32) } else { RatFunc::inv_var(nvars, *xn, (-e) as u32) };
            let slot = level.entry(s.clone()).or_insert_with(|| RatFunc::zero(nvars));
            *slot = slot.add(&mono.scale(c));
        }
    }
    level.retain(|_, f| !f.is_zero());
    for k in (0..n - 1).rev() {
        let (vk, xk) = &ins[k];
        let ans = ansatz_for(ins, w, k);
        let bk = bounds[k];
        let mut series: BTreeMap<FockState, SeriesAtInfinity> = BTreeMap::new();
        let vkv = ModuleVector::basis(vk.clone());
        for (sp, g) in &level {
            let base = vk.weight() as i64 + sp.weight() as i64 - 1;
            for j in (base - bk).min(base)..=base {
                let out = h.vertex_mode_unchecked(&vkv, j, &ModuleVector::basis(sp.clone()));
                for (s, c) in out.iter() {
                    let lowest = s.weight() as i64 - vk.weight() as i64 - bounds[k + 1];
                    let entry = series.entry(s.clone()).or_insert_with(|| SeriesAtInfinity::new(nvars, *xk, lowest));
                    entry.add(-j - 1, g.scale(c));
                }
            }
        }
        let mut next = BTreeMap::new();
        for (s, ser) in series {
            let f = ser.reconstruct(&ans)?;
            if !f.is_zero() {
                next.insert(s, f);
            }
        }
        level = next;
    }
    level.retain(|s, _| s.weight() <= max_weight);
    Ok(level)
}

fn ansatz_for(ins: &[(FockState, usize)], w: &FockState, k: usize) -> UniAnsatz {
    let (vk, _) = &ins[k];
    UniAnsatz { axis: origin_bound(vk, w), diffs: ins[k + 1..].iter().map(|(u, x)| (*x, pair_bound(vk, u))).collect() }
}

/// `<t, Y(v_1,z_{x_1})⋯Y(v_n,z_{x_n}) w>` through the form.
pub fn matrix_element(h: &Heisenberg, t: &ModuleVector, ins: &[(FockState, usize)], w: &FockState, nvars: usize) -> Result<RatFunc> {
    let Some(top) = t.max_weight() else { return Ok(RatFunc::zero(nvars)) };
    let sec = section(h, ins, w, nvars, top)?;
    let mut acc = RatFunc::zero(nvars);
    for (s, f) in &sec {
        let c = h.form(t, &ModuleVector::basis(s.clone()));
        if !c.is_zero() {
            acc = acc.add(&f.scale(&c));
        }
    }
    Ok(acc)
}

/// The same matrix element with the operators applied in reversed order,
/// i.e. expanded in the opposite region; equal by locality.
pub fn matrix_element_reversed(h: &Heisenberg, t: &ModuleVector, ins: &[(FockState, usize)], w: &FockState, nvars: usize) -> Result<RatFunc> {
    let rev: Vec<(FockState, usize)> = ins.iter().rev().cloned().collect();
    matrix_element(h, t, &rev, w, nvars)
}

/// Whether the two region orderings agree.
pub fn region_independent(h: &Heisenberg, t: &ModuleVector, ins: &[(FockState, usize)], w: &FockState, nvars: usize) -> Result<bool> {
    Ok(matrix_element(h, t, ins, w, nvars)? == matrix_element_reversed(h, t, ins, w, nvars)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn two_point_from_modes() {
        let h = Heisenberg::new(6);
        let a = FockState::single(1);
        let f = matrix_element(&h, &ModuleVector::vacuum(), &[(a.clone(), 0), (a.clone(), 1)], &FockState::vacuum(), 2).unwrap();
        assert_eq!(f, RatFunc::inv_difference(2, 0, 1, 2));
        assert!(region_independent(&h, &ModuleVector::vacuum(), &[(a.clone(), 0), (a, 1)], &FockState::vacuum(), 2).unwrap());
    }

    #[test]
    fn identity_insertion() {
        let h = Heisenberg::new(4);
        let w = FockState::new(vec![2, 1]).unwrap();
        let wv = ModuleVector::basis(w.clone());
        let f = matrix_element(&h, &wv, &[(FockState::vacuum(), 0)], &w, 1).unwrap();
        assert_eq!(f, RatFunc::constant(1, h.form(&wv, &wv)));
        assert_eq!(f, RatFunc::constant(1, q(-2)));
    }
}
