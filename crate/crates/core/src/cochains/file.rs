//! JSON form of a cochain; exact round trip.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Cochain, Expr, Flags, Op, Slot, Term};
use crate::correlators::RationalSection;
use crate::error::{Error, Result};
use crate::rational::{fmt_q, parse_q};
use crate::voa::{FockState, ModuleVector};

#[derive(Serialize, Deserialize)]
struct OpFile {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    input: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    fixed: Option<ModuleVector>,
    point: Vec<i64>,
}

#[derive(Serialize, Deserialize)]
struct TermFile {
    coef: String,
    ops: Vec<OpFile>,
    w: FockState,
}

#[derive(Serialize, Deserialize)]
struct EntryFile {
    tuple: Vec<FockState>,
    section: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
struct CochainFile {
    degree: usize,
    /// An integer, or "1/2" for the half slot.
    m: serde_json::Value,
    cutoff: u32,
    dual_cutoff: u32,
    #[serde(default)]
    nparams: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    terms: Option<Vec<TermFile>>,
    entries: Vec<EntryFile>,
    #[serde(default)]
    bounds: Vec<(FockState, FockState, u32)>,
    #[serde(default)]
    flags: Flags,
}

impl Cochain {
    pub fn to_json(&self) -> serde_json::Value {
        let terms = self.terms().map(|ts| {
            ts.iter()
                .map(|t| TermFile {
                    coef: fmt_q(&t.coef),
                    w: t.w.clone(),
                    ops: t
                        .ops
                        .iter()
                        .map(|o| match &o.slot {
                            Slot::Input(i) => OpFile { input: Some(*i), fixed: None, point: o.point.clone() },
                            Slot::Fixed(v) => OpFile { input: None, fixed: Some(v.clone()), point: o.point.clone() },
                        })
                        .collect(),
                })
                .collect()
        });
        let file = CochainFile {
            degree: self.n,
            m: match self.m {
                Some(m) => serde_json::json!(m),
                None => serde_json::json!("1/2"),
            },
            cutoff: self.cutoff,
            dual_cutoff: self.dual_cutoff,
            nparams: self.nparams,
            terms,
            entries: self.table.iter().map(|(t, s)| EntryFile { tuple: t.clone(), section: s.to_json() }).collect(),
            bounds: self.bounds.iter().map(|((a, b), n)| (a.clone(), b.clone(), *n)).collect(),
            flags: self.flags,
        };
        serde_json::to_value(file).expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let f: CochainFile = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let m = match &f.m {
            serde_json::Value::Number(n) => Some(n.as_u64().ok_or_else(|| Error::Parse("bad m".into()))? as u32),
            serde_json::Value::String(s) if s == "1/2" => None,
            other => return Err(Error::Parse(format!("bad m: {other}"))),
        };
        let expr = match f.terms {
            Some(ts) => {
                let mut terms = Vec::new();
                for t in ts {
                    let mut ops = Vec::new();
                    for o in t.ops {
                        let slot = match (o.input, o.fixed) {
                            (Some(i), None) => Slot::Input(i),
                            (None, Some(v)) => Slot::Fixed(v),
                            _ => return Err(Error::Parse("operator needs exactly one of input/fixed".into())),
                        };
                        if o.point.len() != f.degree + f.nparams {
                            return Err(Error::VariableCountMismatch(f.degree + f.nparams, o.point.len()));
                        }
                        ops.push(Op { slot, point: o.point });
                    }
                    let coef = parse_q(&t.coef).ok_or_else(|| Error::Parse(format!("bad coefficient `{}`", t.coef)))?;
                    terms.push(Term { coef, ops, w: t.w });
                }
                Expr::Terms(terms)
            }
            None => Expr::Table,
        };
        let mut table = BTreeMap::new();
        for e in f.entries {
            if e.tuple.len() != f.degree {
                return Err(Error::VariableCountMismatch(f.degree, e.tuple.len()));
            }
            table.insert(e.tuple, RationalSection::from_json(&e.section)?);
        }
        Ok(Cochain {
            n: f.degree,
            m,
            cutoff: f.cutoff,
            dual_cutoff: f.dual_cutoff,
            nparams: f.nparams,
            expr,
            table,
            bounds: f.bounds.into_iter().map(|(a, b, n)| ((a, b), n)).collect(),
            flags: f.flags,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cochains::Generator;
    use crate::correlators::Context;
    use crate::voa::Heisenberg;

    #[test]
    fn round_trip() {
        let ctx = Context::new(Heisenberg::new(6), 2);
        let g = Generator::new(1, 2);
        let mut phi = g.random_valid(2, Some(1), 3).unwrap();
        phi.materialize(&ctx).unwrap();
        let back = Cochain::from_json(&phi.to_json()).unwrap();
        assert_eq!(back.expr, phi.expr);
        assert_eq!(back.table, phi.table);
        assert_eq!(back.to_json(), phi.to_json());
    }
}
