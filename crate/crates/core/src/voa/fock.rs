//! Partition-indexed Fock states `a(-n1)…a(-nk)|0>`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A basis state stored as a non-increasing list of positive parts.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FockState {
    parts: Vec<u32>,
}

impl FockState {
    pub fn vacuum() -> Self {
        FockState { parts: Vec::new() }
    }

    pub fn new(mut parts: Vec<u32>) -> Result<Self, Error> {
        if parts.contains(&0) {
            return Err(Error::InvalidInput("Fock parts must be positive".into()));
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(FockState { parts })
    }

    /// `a(-n)|0>`
    pub fn single(n: u32) -> Self {
        FockState::new(vec![n]).expect("positive part")
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn is_vacuum(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn multiplicity(&self, n: u32) -> usize {
        self.parts.iter().filter(|&&p| p == n).count()
    }

    pub fn with_part(&self, n: u32) -> Self {
        let pos = self.parts.iter().position(|&p| p < n).unwrap_or(self.parts.len());
        let mut parts = self.parts.clone();
        parts.insert(pos, n);
        FockState { parts }
    }

    pub fn without_part(&self, n: u32) -> Option<Self> {
        let pos = self.parts.iter().position(|&p| p == n)?;
        let mut parts = self.parts.clone();
        parts.remove(pos);
        Some(FockState { parts })
    }

    /// All states of weight `w`, largest parts first: for `w = 2`,
    /// `a(-2)|0>` then `a(-1)^2|0>`.
    pub fn basis(w: u32) -> Vec<FockState> {
        let mut out = Vec::new();
        let mut cur = Vec::new();
        partitions(w, w, &mut cur, &mut out);
        out.into_iter().map(|parts| FockState { parts }).collect()
    }

    /// All states of weight at most `w`, ordered by weight.
    pub fn basis_upto(w: u32) -> Vec<FockState> {
        (0..=w).flat_map(FockState::basis).collect()
    }
}

fn partitions(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if rest == 0 {
        out.push(cur.clone());
        return;
    }
    for p in (1..=max.min(rest)).rev() {
        cur.push(p);
        partitions(rest - p, p, cur, out);
        cur.pop();
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut i = 0;
        while i < self.parts.len() {
            let p = self.parts[i];
            let k = self.multiplicity(p);
            if k == 1 {
                write!(f, "a(-{p})")?;
            } else {
                write!(f, "a(-{p})^{k}")?;
            }
            i += k;
        }
        write!(f, "|0>")
    }
}

impl FromStr for FockState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let body = s.strip_suffix("|0>").ok_or_else(|| Error::Parse(format!("missing |0> in `{s}`")))?;
        let mut parts = Vec::new();
        let mut rest = body;
        while !rest.is_empty() {
            let r = rest.strip_prefix("a(-").ok_or_else(|| Error::Parse(format!("expected a(-n) in `{s}`")))?;
            let close = r.find(')').ok_or_else(|| Error::Parse(format!("unclosed mode in `{s}`")))?;
            let n: u32 = r[..close].parse().map_err(|_| Error::Parse(format!("bad mode in `{s}`")))?;
            rest = &r[close + 1..];
            let mut k = 1u32;
            if let Some(r2) = rest.strip_prefix('^') {
                let end = r2.find(|c: char| !c.is_ascii_digit()).unwrap_or(r2.len());
                k = r2[..end].parse().map_err(|_| Error::Parse(format!("bad power in `{s}`")))?;
                rest = &r2[end..];
            }
            parts.extend(std::iter::repeat_n(n, k as usize));
        }
        FockState::new(parts)
    }
}

impl Serialize for FockState {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FockState {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let s: FockState = "a(-2)a(-1)^2|0>".parse().unwrap();
        assert_eq!(s.parts(), &[2, 1, 1]);
        assert_eq!(s.weight(), 4);
        assert_eq!(s.to_string(), "a(-2)a(-1)^2|0>");
        assert_eq!("|0>".parse::<FockState>().unwrap(), FockState::vacuum());
    }

    #[test]
    fn partition_counts() {
        let counts: Vec<usize> = (0..=6).map(|w| FockState::basis(w).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 3, 5, 7, 11]);
        assert_eq!(FockState::basis(2)[0], FockState::single(2));
    }
}
