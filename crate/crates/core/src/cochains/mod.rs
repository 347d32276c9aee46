//! Truncated elements of the cochain spaces: symbolic correlator sums or
//! bare tables on basis tuples, with the symmetric-group action.

pub mod file;
pub mod generate;
pub mod validate;

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::correlators::{Context, Insertion, RationalSection};
use crate::error::{Error, Result};
use crate::ratfield::Permutation;
use crate::rational::Q;
use crate::voa::{FockState, ModuleVector};

pub use generate::Generator;
pub use validate::{validate_l0, validate_l_minus1, validate_shuffle, ValidationReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Flag {
    Verified,
    Failed,
    #[default]
    Unchecked,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Flags {
    pub l_minus1: Flag,
    pub l0: Flag,
    pub shuffle: Flag,
    pub composability: Flag,
}

impl Flags {
    pub fn all_verified(&self) -> bool {
        [self.l_minus1, self.l0, self.shuffle, self.composability].iter().all(|f| *f == Flag::Verified)
    }
}

/// What sits in an operator position of a correlator term.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Slot {
    Input(usize),
    Fixed(ModuleVector),
}

/// `Y(slot, point)` with `point` a linear form in all variables.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Op {
    pub slot: Slot,
    pub point: Vec<i64>,
}

/// `coef * E(Y(op_1)⋯Y(op_k) w)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coef: Q,
    pub ops: Vec<Op>,
    pub w: FockState,
}

/// How entries are produced.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    /// A finite sum of correlator terms, valid at every weight.
    Terms(Vec<Term>),
    /// Only the stored table is known.
    Table,
}

/// Degree `n`, composability `m`; the variables are `z_1..z_n` followed by
/// `nparams` spectator parameters.
#[derive(Clone, Debug)]
pub struct Cochain {
    pub n: usize,
    /// Composability index; `None` is the half slot.
    pub m: Option<u32>,
    pub cutoff: u32,
    pub dual_cutoff: u32,
    pub nparams: usize,
    pub expr: Expr,
    pub table: BTreeMap<Vec<FockState>, RationalSection>,
    pub bounds: BTreeMap<(FockState, FockState), u32>,
    pub flags: Flags,
}

/// Canonical form of a term list: equal operator strings merged.
pub fn normalize_terms(terms: Vec<Term>) -> Vec<Term> {
    let mut acc: BTreeMap<(Vec<Op>, FockState), Q> = BTreeMap::new();
    for t in terms {
        *acc.entry((t.ops, t.w)).or_insert_with(Q::zero) += t.coef;
    }
    acc.into_iter().filter(|(_, c)| !c.is_zero()).map(|((ops, w), coef)| Term { coef, ops, w }).collect()
}

/// All n-tuples of basis states of weight at most `cutoff`.
pub fn basis_tuples(n: usize, cutoff: u32) -> Vec<Vec<FockState>> {
    let b = FockState::basis_upto(cutoff);
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|t| b.iter().map(move |s| [t.clone(), vec![s.clone()]].concat())).collect();
    }
    out
}

impl Cochain {
    pub fn from_terms(n: usize, m: Option<u32>, cutoff: u32, dual_cutoff: u32, nparams: usize, terms: Vec<Term>) -> Self {
        Cochain {
            n,
            m,
            cutoff,
            dual_cutoff,
            nparams,
            expr: Expr::Terms(normalize_terms(terms)),
            table: BTreeMap::new(),
            bounds: BTreeMap::new(),
            flags: Flags::default(),
        }
    }

    pub fn zero(n: usize, m: Option<u32>, cutoff: u32, dual_cutoff: u32) -> Self {
        Self::from_terms(n, m, cutoff, dual_cutoff, 0, Vec::new())
    }

    pub fn nvars(&self) -> usize {
        self.n + self.nparams
    }

    pub fn terms(&self) -> Option<&[Term]> {
        match &self.expr {
            Expr::Terms(t) => Some(t),
            Expr::Table => None,
        }
    }

    pub fn tuples(&self) -> Vec<Vec<FockState>> {
        basis_tuples(self.n, self.cutoff)
    }

    /// Entry on a basis tuple, truncated at `max_weight`.
    pub fn entry_at(&self, ctx: &Context, tuple: &[FockState], max_weight: u32) -> Result<RationalSection> {
        if tuple.len() != self.n {
            return Err(Error::VariableCountMismatch(self.n, tuple.len()));
        }
        let tags: Vec<u32> = tuple.iter().map(|s| s.weight()).chain(std::iter::repeat_n(0, self.nparams)).collect();
        match &self.expr {
            Expr::Terms(terms) => {
                let mut out = RationalSection::zero(self.nvars(), tags);
                for t in terms {
                    let ins: Vec<Insertion> = t
                        .ops
                        .iter()
                        .map(|op| Insertion {
                            state: match &op.slot {
                                Slot::Input(i) => ModuleVector::basis(tuple[*i].clone()),
                                Slot::Fixed(v) => v.clone(),
                            },
                            point: op.point.clone(),
                        })
                        .collect();
                    let sec = ctx.section(&ins, &ModuleVector::basis(t.w.clone()), self.nvars(), max_weight)?;
                    out.add_scaled(&sec, &t.coef);
                }
                Ok(out)
            }
            Expr::Table => {
                if max_weight > self.dual_cutoff {
                    return Err(Error::CutoffExceeded { weight: max_weight, cutoff: self.dual_cutoff });
                }
                let mut out = self.table.get(tuple).cloned().unwrap_or_else(|| RationalSection::zero(self.nvars(), tags.clone()));
                out.tags = tags;
                Ok(out.truncate(max_weight))
            }
        }
    }

    /// Entry on a basis tuple at the stored truncation.
    pub fn entry(&self, ctx: &Context, tuple: &[FockState]) -> Result<RationalSection> {
        if tuple.iter().any(|s| s.weight() > self.cutoff) {
            let w = tuple.iter().map(|s| s.weight()).max().unwrap_or(0);
            return Err(Error::CutoffExceeded { weight: w, cutoff: self.cutoff });
        }
        if let Some(s) = self.table.get(tuple) {
            return Ok(s.clone());
        }
        self.entry_at(ctx, tuple, self.dual_cutoff)
    }

    /// Multilinear extension of the table.
    pub fn evaluate(&self, ctx: &Context, inputs: &[ModuleVector]) -> Result<RationalSection> {
        if inputs.len() != self.n {
            return Err(Error::VariableCountMismatch(self.n, inputs.len()));
        }
        let mut out = RationalSection::zero(self.nvars(), vec![0; self.nvars()]);
        let mut first = true;
        let mut stack: Vec<(Vec<FockState>, Q)> = vec![(Vec::new(), Q::one())];
        for v in inputs {
            stack =
                stack.into_iter().flat_map(|(t, c)| v.iter().map(move |(s, a)| ([t.clone(), vec![s.clone()]].concat(), &c * a)).collect::<Vec<_>>()).collect();
        }
        for (t, c) in stack {
            let e = self.entry(ctx, &t)?;
            if first {
                out.tags = e.tags.clone();
                first = false;
            }
            out.add_scaled(&e, &c);
        }
        Ok(out)
    }

    /// Fills the table on every basis tuple.
    pub fn materialize(&mut self, ctx: &Context) -> Result<()> {
        if matches!(self.expr, Expr::Table) {
            return Ok(());
        }
        let mut table = BTreeMap::new();
        for t in self.tuples() {
            let e = self.entry_at(ctx, &t, self.dual_cutoff)?;
            if !e.is_zero() {
                table.insert(t, e);
            }
        }
        self.table = table;
        Ok(())
    }

    /// Forgets the symbolic form, keeping a materialized table.
    pub fn into_table(mut self, ctx: &Context) -> Result<Self> {
        self.materialize(ctx)?;
        self.expr = Expr::Table;
        Ok(self)
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = self.clone();
        out.expr = match &self.expr {
            Expr::Terms(ts) => Expr::Terms(normalize_terms(ts.iter().map(|t| Term { coef: &t.coef * c, ops: t.ops.clone(), w: t.w.clone() }).collect())),
            Expr::Table => Expr::Table,
        };
        out.table = self.table.iter().map(|(k, s)| (k.clone(), s.scale(c))).filter(|(_, s)| !s.is_zero()).collect();
        out.flags = Flags::default();
        out
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, other: &Self, c: &Q) -> Result<Self> {
        if self.n != other.n || self.nparams != other.nparams {
            return Err(Error::VariableCountMismatch(self.nvars(), other.nvars()));
        }
        let mut out = self.clone();
        out.flags = Flags::default();
        out.cutoff = self.cutoff.min(other.cutoff);
        out.dual_cutoff = self.dual_cutoff.min(other.dual_cutoff);
        out.m = match (self.m, other.m) {
            (Some(a), Some(b)) => Some(a.min(b)),
            _ => None,
        };
        match (&self.expr, &other.expr) {
            (Expr::Terms(a), Expr::Terms(b)) => {
                let scaled = b.iter().map(|t| Term { coef: &t.coef * c, ops: t.ops.clone(), w: t.w.clone() });
                out.expr = Expr::Terms(normalize_terms(a.iter().cloned().chain(scaled).collect()));
                out.table.clear();
            }
            _ => {
                return Err(Error::InvalidInput("sums need symbolic cochains; materialize tables separately".into()));
            }
        }
        Ok(out)
    }

    /// `σ(Φ)(v_1..v_n)(z_1..z_n) = Φ(v_{σ(1)}..v_{σ(n)})(z_{σ(1)}..z_{σ(n)})`.
    pub fn sigma_act(&self, sigma: &Permutation) -> Result<Self> {
        if sigma.n() != self.n {
            return Err(Error::VariableCountMismatch(self.n, sigma.n()));
        }
        let nv = self.nvars();
        let full = Permutation::new((0..nv).map(|i| if i < self.n { sigma.apply(i) } else { i }).collect())?;
        let mut out = self.clone();
        out.flags = Flags::default();
        if let Expr::Terms(ts) = &self.expr {
            let moved = ts
                .iter()
                .map(|t| Term {
                    coef: t.coef.clone(),
                    w: t.w.clone(),
                    ops: t
                        .ops
                        .iter()
                        .map(|op| {
                            let mut p = vec![0; nv];
                            for (i, &c) in op.point.iter().enumerate() {
                                p[full.apply(i)] = c;
                            }
                            Op {
                                slot: match &op.slot {
                                    Slot::Input(i) => Slot::Input(sigma.apply(*i)),
                                    f => f.clone(),
                                },
                                point: p,
                            }
                        })
                        .collect(),
                })
                .collect();
            out.expr = Expr::Terms(normalize_terms(moved));
        }
        let mut table = BTreeMap::new();
        for (t, sec) in &self.table {
            // σΦ at u reads Φ at (u_{σ(1)}..), so Φ's tuple t is σΦ's tuple u with u_{σ(i)} = t_i
            let mut u = t.clone();
            for (i, s) in t.iter().enumerate() {
                u[sigma.apply(i)] = s.clone();
            }
            let mut moved = sec.permute(&full)?;
            moved.tags = u.iter().map(|s| s.weight()).chain(std::iter::repeat_n(0, self.nparams)).collect();
            table.insert(u, moved);
        }
        out.table = table;
        Ok(out)
    }

    /// Entry-by-entry comparison on every basis tuple.
    pub fn first_difference(&self, ctx: &Context, other: &Self) -> Result<Option<Vec<FockState>>> {
        for t in self.tuples() {
            if t.iter().any(|s| s.weight() > other.cutoff) {
                continue;
            }
            if self.entry(ctx, &t)?.table != other.entry(ctx, &t)?.table {
                return Ok(Some(t));
            }
        }
        Ok(None)
    }

    pub fn is_zero_on_tuples(&self, ctx: &Context) -> Result<Option<Vec<FockState>>> {
        for t in self.tuples() {
            if !self.entry(ctx, &t)?.is_zero() {
                return Ok(Some(t));
            }
        }
        Ok(None)
    }
}

/// A variable form `z_i` in `nvars` variables.
pub fn unit_form(nvars: usize, i: usize) -> Vec<i64> {
    let mut p = vec![0; nvars];
    p[i] = 1;
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratfield::RatFunc;
    use crate::voa::Heisenberg;

    fn ctx() -> Context {
        Context::new(Heisenberg::new(6), 2)
    }

    #[test]
    fn sigma_action_composes() {
        let c = ctx();
        let g = Generator::new(2, 2);
        let phi = g.from_e(3, &ModuleVector::vacuum(), Some(1)).unwrap();
        let phi = phi.add_scaled(&g.from_e_ordered(&[2, 0, 1], &ModuleVector::vacuum(), Some(1)).unwrap(), &Q::from_integer(3.into())).unwrap();
        let s = Permutation::from_one_based(&[2, 3, 1]).unwrap();
        let t = Permutation::from_one_based(&[2, 1, 3]).unwrap();
        let lhs = phi.sigma_act(&s.compose(&t)).unwrap();
        let rhs = phi.sigma_act(&t).unwrap().sigma_act(&s).unwrap();
        let u = [FockState::single(1), FockState::single(2), FockState::new(vec![1, 1]).unwrap()];
        assert_eq!(lhs.entry(&c, &u).unwrap(), rhs.entry(&c, &u).unwrap());
        let id = phi.sigma_act(&Permutation::identity(3)).unwrap();
        assert_eq!(id.entry(&c, &u).unwrap(), phi.entry(&c, &u).unwrap());
        // the table path agrees with the symbolic path
        let mut small = g.from_e(2, &ModuleVector::vacuum(), Some(1)).unwrap();
        small.cutoff = 1;
        let tab = small.clone().into_table(&c).unwrap();
        let sw = Permutation::transposition(2, 0, 1);
        let a = tab.sigma_act(&sw).unwrap();
        let b = small.sigma_act(&sw).unwrap();
        assert_eq!(a.first_difference(&c, &b).unwrap(), None);
    }

    #[test]
    fn evaluate_is_linear() {
        let c = ctx();
        let g = Generator::new(2, 2);
        let phi = g.from_e(2, &ModuleVector::vacuum(), Some(1)).unwrap();
        let a = ModuleVector::a(1);
        let e = phi.evaluate(&c, &[a.clone(), a.clone()]).unwrap();
        assert_eq!(e.pair(&c.h, &ModuleVector::vacuum()), RatFunc::inv_difference(2, 0, 1, 2));
        let two = Q::from_integer(2.into());
        let e2 = phi.evaluate(&c, &[a.scale(&two), a.clone()]).unwrap();
        assert_eq!(e2, e.scale(&two));
    }
}
