use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{make_finmod, Ambient, FinMod};
use crate::error::{Error, Result};
use crate::exactlin::MatrixZN;

/// JSON description of a module: `{ambient {p, a, t, s}, factors, operators}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleDoc {
    pub ambient: Ambient,
    pub factors: Vec<u64>,
    #[serde(default)]
    pub operators: BTreeMap<String, Vec<Vec<i64>>>,
}

impl ModuleDoc {
    pub fn from_module(m: &FinMod) -> Self {
        let operators = m
            .operators_by_name()
            .into_iter()
            .map(|(k, rows)| {
                (
                    k,
                    rows.into_iter()
                        .map(|r| r.into_iter().map(|x| x as i64).collect())
                        .collect(),
                )
            })
            .collect();
        Self {
            ambient: m.ambient(),
            factors: m.factors().to_vec(),
            operators,
        }
    }

    pub fn to_module(&self) -> Result<FinMod> {
        let amb = Ambient::new(self.ambient.p, self.ambient.a, self.ambient.t, self.ambient.s)?;
        let md = amb.modulus();
        let k = self.factors.len();
        for name in self.operators.keys() {
            if amb.op_index(name).is_none() {
                return Err(Error::Parse(format!(
                    "operators.{name}: not an operator of the ambient ring"
                )));
            }
        }
        let mut ops = Vec::new();
        for i in 0..amb.n_ops() {
            let name = amb.op_name(i);
            let rows = self
                .operators
                .get(&name)
                .ok_or_else(|| Error::Parse(format!("operators.{name}: missing")))?;
            if rows.len() != k {
                return Err(Error::Parse(format!(
                    "operators.{name}: expected {k} rows, found {}",
                    rows.len()
                )));
            }
            let m = MatrixZN::from_rows(md, k, rows).map_err(|e| Error::Parse(format!("operators.{name}: {e}")))?;
            ops.push(m);
        }
        make_finmod(amb, self.factors.clone(), ops)
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))
    }

    /// Canonical pretty JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}
