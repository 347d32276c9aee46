//! Module-valued rational functions at truncation.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratfield::text::{from_text_struct, to_text_struct, RatFuncText};
use crate::ratfield::{Permutation, RatFunc};
use crate::rational::Q;
use crate::voa::{FockState, Heisenberg, ModuleVector};

/// `table[s]` is the coefficient of the basis state `s`; states above the
/// stored weight are not recorded. `tags[i]` is the weight of the input in
/// slot `i` (the power of `dz_i`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalSection {
    pub nvars: usize,
    pub tags: Vec<u32>,
    pub table: BTreeMap<FockState, RatFunc>,
}

impl RationalSection {
    pub fn zero(nvars: usize, tags: Vec<u32>) -> Self {
        RationalSection { nvars, tags, table: BTreeMap::new() }
    }

    /// The constant section `w`.
    pub fn constant(nvars: usize, w: &ModuleVector) -> Self {
        let mut s = Self::zero(nvars, vec![0; nvars]);
        for (st, c) in w.iter() {
            s.table.insert(st.clone(), RatFunc::constant(nvars, c.clone()));
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.table.values().all(|f| f.is_zero())
    }

    pub fn get(&self, s: &FockState) -> RatFunc {
        self.table.get(s).cloned().unwrap_or_else(|| RatFunc::zero(self.nvars))
    }

    pub fn add_term(&mut self, s: &FockState, f: &RatFunc) {
        if f.is_zero() {
            return;
        }
        let slot = self.table.entry(s.clone()).or_insert_with(|| RatFunc::zero(self.nvars));
        *slot = slot.add(f);
        if slot.is_zero() {
            self.table.remove(s);
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (s, f) in &other.table {
            self.add_term(s, &f.scale(c));
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &Q::from_integer(1.into()));
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &Q::from_integer((-1).into()));
        out
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Self::zero(self.nvars, self.tags.clone());
        out.add_scaled(self, c);
        out
    }

    /// Drops every state above `max_weight`.
    pub fn truncate(&self, max_weight: u32) -> Self {
        let mut out = self.clone();
        out.table.retain(|s, _| s.weight() <= max_weight);
        out
    }

    pub fn max_weight(&self) -> Option<u32> {
        self.table.keys().map(|s| s.weight()).max()
    }

    /// `<t, F>` through the form.
    pub fn pair(&self, h: &Heisenberg, t: &ModuleVector) -> RatFunc {
        let mut acc = RatFunc::zero(self.nvars);
        for (s, f) in &self.table {
            let c = h.form(t, &ModuleVector::basis(s.clone()));
            if !c.is_zero() {
                acc = acc.add(&f.scale(&c));
            }
        }
        acc
    }

    pub fn map(&self, mut f: impl FnMut(&RatFunc) -> Result<RatFunc>) -> Result<Self> {
        let mut out = Self::zero(self.nvars, self.tags.clone());
        for (s, g) in &self.table {
            let v = f(g)?;
            out.nvars = v.nvars();
            out.add_term(s, &v);
        }
        Ok(out)
    }

    /// Variables renamed by `z_i -> z_{σ(i)}`; tags follow their variables.
    pub fn permute(&self, sigma: &Permutation) -> Result<Self> {
        if sigma.n() != self.nvars {
            return Err(Error::VariableCountMismatch(self.nvars, sigma.n()));
        }
        let mut out = self.map(|f| f.permute(sigma))?;
        if self.tags.len() == self.nvars {
            let mut tags = vec![0; self.nvars];
            for (i, &t) in self.tags.iter().enumerate() {
                tags[sigma.apply(i)] = t;
            }
            out.tags = tags;
        }
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let table: Vec<(String, RatFuncText)> = self.table.iter().map(|(s, f)| (s.to_string(), to_text_struct(f))).collect();
        serde_json::to_value(SectionFile { nvars: self.nvars, tags: self.tags.clone(), table }).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let file: SectionFile = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let mut out = Self::zero(file.nvars, file.tags);
        for (s, f) in file.table {
            let st: FockState = s.parse()?;
            let g = from_text_struct(&f)?;
            if g.nvars() != out.nvars {
                return Err(Error::VariableCountMismatch(out.nvars, g.nvars()));
            }
            out.add_term(&st, &g);
        }
        Ok(out)
    }
}

#[derive(Serialize, Deserialize)]
struct SectionFile {
    nvars: usize,
    tags: Vec<u32>,
    table: Vec<(String, RatFuncText)>,
}
