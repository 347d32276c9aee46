//! Vertex operators applied to truncated sections, through series in one
//! variable and reconstruction. These need nothing but the section's
//! components, so they apply to bare tables as well as symbolic cochains.

use std::collections::BTreeMap;

use super::section::RationalSection;
use crate::error::Result;
use crate::ratfield::laurent::STABILIZATION_MARGIN;
use crate::ratfield::uniseries::{SeriesAround, SeriesAtInfinity, UniAnsatz};
use crate::voa::{FockState, Heisenberg, ModuleVector};

/// Expected poles of the new variable: `axis` at the origin and `(old
/// variable, order)` pairs.
#[derive(Clone, Debug, Default)]
pub struct PoleBudget {
    pub axis: u32,
    pub diffs: Vec<(usize, u32)>,
}

impl PoleBudget {
    pub fn degree(&self) -> u32 {
        self.axis + self.diffs.iter().map(|d| d.1).sum::<u32>()
    }
}

/// `R(Y(u, ζ) F)` truncated at `max_weight`, with `ζ` a new variable inserted
/// at index `pos`. `f_at(B)` must return `F` truncated at weight `B`.
pub fn vertex_on_section(
    h: &Heisenberg,
    u: &FockState,
    f_at: &mut dyn FnMut(u32) -> Result<RationalSection>,
    pos: usize,
    budget: &PoleBudget,
    max_weight: u32,
) -> Result<RationalSection> {
    let wu = u.weight() as i64;
    let need = (max_weight as i64 - wu + budget.degree() as i64 + STABILIZATION_MARGIN).max(0) as u32;
    let f = f_at(need)?;
    let nold = f.nvars;
    let nv = nold + 1;
    let shift = |k: usize| if k < pos { k } else { k + 1 };
    let ans = UniAnsatz { axis: budget.axis, diffs: budget.diffs.iter().map(|&(k, b)| (shift(k), b)).collect() };
    let uv = ModuleVector::basis(u.clone());
    let mut series: BTreeMap<FockState, SeriesAtInfinity> = BTreeMap::new();
    for (sp, g) in &f.table {
        let g = g.insert_var(pos);
        let top = wu + sp.weight() as i64 - 1;
        for j in (top - max_weight as i64)..=top {
            let out = h.vertex_mode_unchecked(&uv, j, &ModuleVector::basis(sp.clone()));
            for (s, c) in out.iter() {
                let lowest = s.weight() as i64 - wu - need as i64;
                let e = series.entry(s.clone()).or_insert_with(|| SeriesAtInfinity::new(nv, pos, lowest));
                e.add(-j - 1, g.scale(c));
            }
        }
    }
    let mut tags = f.tags.clone();
    tags.insert(pos.min(tags.len()), u.weight());
    let mut out = RationalSection::zero(nv, tags);
    for (s, ser) in series {
        out.add_term(&s, &ser.reconstruct(&ans)?);
    }
    Ok(out)
}

/// `R(Φ(.., Y(v_i, z_i - z_{i+1}) v_{i+1}, ..))` from the values of `Φ` on the
/// states `v_i(j) v_{i+1}`: `phi_on(x)` returns `Φ` with `x` in the merged
/// slot, as a section over the variables without `z_i`. The result lives
/// over one more variable, with `z_i` at index `var` and `z_{i+1}` at
/// `var + 1`.
#[allow(clippy::too_many_arguments)]
pub fn merged_slot_series(
    h: &Heisenberg,
    vi: &FockState,
    vj: &FockState,
    phi_on: &mut dyn FnMut(&ModuleVector) -> Result<RationalSection>,
    var: usize,
    budget: &PoleBudget,
    num_degree: i64,
) -> Result<RationalSection> {
    let wsum = vi.weight() as i64 + vj.weight() as i64;
    let highest = num_degree + STABILIZATION_MARGIN;
    let vv = ModuleVector::basis(vi.clone());
    let wv = ModuleVector::basis(vj.clone());
    let mut series: BTreeMap<FockState, SeriesAround> = BTreeMap::new();
    let mut nv = 0;
    let mut tags = Vec::new();
    for e in -wsum..=highest {
        let j = -e - 1;
        let x = h.vertex_mode_unchecked(&vv, j, &wv);
        if x.is_zero() {
            continue;
        }
        let sec = phi_on(&x)?;
        nv = sec.nvars + 1;
        tags = sec.tags.clone();
        for (s, g) in &sec.table {
            let g = g.insert_var(var);
            let ser = series.entry(s.clone()).or_insert_with(|| SeriesAround::new(nv, var, var + 1, highest));
            ser.add(e, g);
        }
    }
    if nv == 0 {
        return Ok(RationalSection::zero(0, vec![]));
    }
    let ans = UniAnsatz { axis: budget.axis, diffs: budget.diffs.clone() };
    if tags.len() + 1 == nv {
        tags.insert(var, vi.weight());
        tags[var + 1] = vj.weight();
    }
    let mut out = RationalSection::zero(nv, tags);
    for (s, ser) in series {
        let f = ser.reconstruct(&ans, num_degree)?;
        if !f.is_zero() {
            out.add_term(&s, &f);
        }
    }
    Ok(out)
}

/// Highest pole order along `z_i = z_j` over all components.
pub fn pole_order(f: &RationalSection, i: usize, j: usize) -> u32 {
    f.table.values().map(|g| g.diff_order(i, j)).max().unwrap_or(0)
}

pub fn axis_pole_order(f: &RationalSection, i: usize) -> u32 {
    f.table.values().map(|g| g.axis_order(i)).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlators::{Context, Insertion};

    #[test]
    fn vertex_on_constant_section_is_e1() {
        let ctx = Context::new(Heisenberg::new(12), 2);
        let a = FockState::single(1);
        // F(z2) = E(Y(a, z2) 1); then Y(a, z1) F is the two-point section
        let mut f_at = |b: u32| ctx.section(&[Insertion::at_var(ModuleVector::a(1), 1, 0)], &ModuleVector::vacuum(), 1, b);
        let budget = PoleBudget { axis: 0, diffs: vec![(0, 2)] };
        let got = vertex_on_section(&ctx.h, &a, &mut f_at, 0, &budget, 2).unwrap();
        let want = ctx.e_map(&[ModuleVector::a(1), ModuleVector::a(1)], &ModuleVector::vacuum()).unwrap();
        assert_eq!(got.table, want.table);
    }

    #[test]
    fn merged_slot_matches_two_point() {
        let ctx = Context::new(Heisenberg::new(12), 2);
        let a = FockState::single(1);
        // Φ = E^{(1)}(·; 1) in one variable; merging a with a gives E^{(2)}(a, a; 1)
        let mut phi_on = |x: &ModuleVector| ctx.section(&[Insertion::at_var(x.clone(), 1, 0)], &ModuleVector::vacuum(), 1, 2);
        let budget = PoleBudget { axis: 0, diffs: vec![(1, 2)] };
        let got = merged_slot_series(&ctx.h, &a, &a, &mut phi_on, 0, &budget, 2 + 2).unwrap();
        let want = ctx.e_map(&[ModuleVector::a(1), ModuleVector::a(1)], &ModuleVector::vacuum()).unwrap();
        assert_eq!(got.table, want.table);
    }
}
