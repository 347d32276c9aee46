//! Finite exact combinations of Fock states.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::fock::FockState;
use crate::error::Error;
use crate::rational::{fmt_q, parse_q, Q};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct ModuleVector {
    comps: BTreeMap<FockState, Q>,
}

impl ModuleVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn vacuum() -> Self {
        Self::basis(FockState::vacuum())
    }

    pub fn basis(s: FockState) -> Self {
        Self::term(s, Q::one())
    }

    pub fn term(s: FockState, c: Q) -> Self {
        let mut v = Self::zero();
        v.add_term(s, c);
        v
    }

    /// `a(-n)|0>`
    pub fn a(n: u32) -> Self {
        Self::basis(FockState::single(n))
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (FockState, Q)>) -> Self {
        let mut v = Self::zero();
        for (s, c) in terms {
            v.add_term(s, c);
        }
        v
    }

    pub fn add_term(&mut self, s: FockState, c: Q) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.comps.entry(s) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Self, c: &Q) {
        if c.is_zero() {
            return;
        }
        for (s, x) in &other.comps {
            self.add_term(s.clone(), x * c);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &Q::one());
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, &-Q::one());
        out
    }

    pub fn scale(&self, c: &Q) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Q::one())
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn coeff(&self, s: &FockState) -> Q {
        self.comps.get(s).cloned().unwrap_or_else(Q::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FockState, &Q)> {
        self.comps.iter()
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    /// Homogeneous component of weight `m`.
    pub fn project_weight(&self, m: u32) -> Self {
        ModuleVector { comps: self.comps.iter().filter(|(s, _)| s.weight() == m).map(|(s, c)| (s.clone(), c.clone())).collect() }
    }

    pub fn max_weight(&self) -> Option<u32> {
        self.comps.keys().map(FockState::weight).max()
    }

    /// The weight if every component shares it.
    pub fn homogeneous_weight(&self) -> Option<u32> {
        let mut ws = self.comps.keys().map(FockState::weight);
        let w = ws.next()?;
        ws.all(|x| x == w).then_some(w)
    }

    pub fn weights(&self) -> Vec<u32> {
        let mut ws: Vec<u32> = self.comps.keys().map(FockState::weight).collect();
        ws.sort_unstable();
        ws.dedup();
        ws
    }

    /// Applies a linear map defined on basis states.
    pub fn map_linear(&self, mut f: impl FnMut(&FockState) -> ModuleVector) -> ModuleVector {
        let mut out = Self::zero();
        for (s, c) in &self.comps {
            out.add_scaled(&f(s), c);
        }
        out
    }
}

impl fmt::Display for ModuleVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (s, c)) in self.comps.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({}) {}", fmt_q(c), s)?;
        }
        Ok(())
    }
}

impl Serialize for ModuleVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<(String, String)> = self.comps.iter().map(|(st, c)| (st.to_string(), fmt_q(c))).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ModuleVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pairs: Vec<(String, String)> = Vec::deserialize(d)?;
        let mut v = ModuleVector::zero();
        for (s, c) in pairs {
            let st: FockState = s.parse().map_err(serde::de::Error::custom)?;
            let c = parse_q(&c).ok_or_else(|| serde::de::Error::custom(Error::Parse(format!("bad rational `{c}`"))))?;
            v.add_term(st, c);
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    #[test]
    fn projection_and_json() {
        let v = ModuleVector::vacuum().add(&ModuleVector::a(1).scale(&qf(3, 2)));
        assert_eq!(v.project_weight(0), ModuleVector::vacuum());
        assert!(ModuleVector::vacuum().project_weight(5).is_zero());
        let js = serde_json::to_string(&v).unwrap();
        assert_eq!(js, r#"[["|0>","1"],["a(-1)|0>","3/2"]]"#);
        let back: ModuleVector = serde_json::from_str(&js).unwrap();
        assert_eq!(back, v);
        assert!(v.sub(&v).is_zero());
        assert_eq!(v.coeff(&FockState::single(1)), qf(3, 2));
        assert_eq!(v.scale(&q(0)), ModuleVector::zero());
    }
}
