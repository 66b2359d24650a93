use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::finmod::{iso_fingerprint, FinMod};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// An explicit map was checked to be an isomorphism or a chain map.
    Map,
    /// Isomorphism fingerprints were compared.
    Fingerprint,
    /// Numbers or invariant factors were compared directly.
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub instance: usize,
    pub degree: i64,
    pub mode: Mode,
    pub lhs: String,
    pub rhs: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub instance: usize,
    pub degree: i64,
    pub detail: String,
    pub input: Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub theorem_id: String,
    pub seed: u64,
    pub params: Value,
    /// Serialized inputs, indexed by `Comparison::instance`.
    pub instances: Vec<Value>,
    pub comparisons: Vec<Comparison>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// One line per report plus the witness on failure.
    pub fn summary(&self) -> String {
        let verdict = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
        };
        let failed = self.comparisons.iter().filter(|c| !c.pass).count();
        let fp = self.comparisons.iter().filter(|c| c.mode == Mode::Fingerprint).count();
        let mut s = format!(
            "{verdict} {} seed={} instances={} comparisons={} failed={failed} fingerprint-level={fp}",
            self.theorem_id,
            self.seed,
            self.instances.len(),
            self.comparisons.len()
        );
        if let Some(w) = &self.witness {
            s.push_str(&format!(
                "\n  witness: instance {} degree {}: {}",
                w.instance, w.degree, w.detail
            ));
        }
        s
    }
}

/// Accumulates instances and comparisons; the verdict is derived at the end.
pub struct ReportBuilder {
    id: String,
    seed: u64,
    params: Value,
    instances: Vec<Value>,
    sizes: Vec<u64>,
    comparisons: Vec<Comparison>,
    notes: Vec<String>,
}

impl ReportBuilder {
    pub fn new(id: &str, seed: u64, params: Value) -> Self {
        Self {
            id: id.to_string(),
            seed,
            params,
            instances: Vec::new(),
            sizes: Vec::new(),
            comparisons: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Registers an input; `size` orders failing instances when picking the witness.
    pub fn instance(&mut self, input: Value, size: u64) -> usize {
        self.instances.push(input);
        self.sizes.push(size);
        self.instances.len() - 1
    }

    /// Adds a key to the params object.
    pub fn param(&mut self, key: &str, value: Value) {
        if let Value::Object(map) = &mut self.params {
            map.insert(key.to_string(), value);
        }
    }

    pub fn note(&mut self, s: impl Into<String>) {
        let s = s.into();
        if !self.notes.contains(&s) {
            self.notes.push(s);
        }
    }

    pub fn compare(&mut self, instance: usize, degree: i64, mode: Mode, lhs: String, rhs: String, pass: bool) {
        self.comparisons.push(Comparison {
            instance,
            degree,
            mode,
            lhs,
            rhs,
            pass,
        });
    }

    pub fn exact<T: std::fmt::Debug + PartialEq>(&mut self, instance: usize, degree: i64, lhs: &T, rhs: &T) -> bool {
        let pass = lhs == rhs;
        self.compare(
            instance,
            degree,
            Mode::Exact,
            format!("{lhs:?}"),
            format!("{rhs:?}"),
            pass,
        );
        pass
    }

    pub fn fingerprints(&mut self, instance: usize, degree: i64, lhs: &FinMod, rhs: &FinMod, l: usize) -> bool {
        let (a, b) = (iso_fingerprint(lhs, l), iso_fingerprint(rhs, l));
        let pass = a == b;
        self.compare(instance, degree, Mode::Fingerprint, a.summary(), b.summary(), pass);
        pass
    }

    /// Records a failed computation (an error where a value was expected).
    pub fn error(&mut self, instance: usize, degree: i64, err: &crate::Error) {
        self.compare(
            instance,
            degree,
            Mode::Exact,
            format!("error: {err}"),
            "a value".into(),
            false,
        );
    }

    pub fn finish(self) -> VerificationReport {
        let pass = self.comparisons.iter().all(|c| c.pass) && !self.comparisons.is_empty();
        let witness = if pass {
            None
        } else {
            self.comparisons
                .iter()
                .filter(|c| !c.pass)
                .min_by_key(|c| (self.sizes.get(c.instance).copied().unwrap_or(0), c.instance))
                .map(|c| Witness {
                    instance: c.instance,
                    degree: c.degree,
                    detail: format!("{} vs {}", c.lhs, c.rhs),
                    input: self.instances.get(c.instance).cloned().unwrap_or(Value::Null),
                })
        };
        let mut notes = self.notes;
        if self.comparisons.is_empty() {
            notes.push("no comparisons were made".into());
        }
        VerificationReport {
            theorem_id: self.id,
            seed: self.seed,
            params: self.params,
            instances: self.instances,
            comparisons: self.comparisons,
            verdict: if pass { Verdict::Pass } else { Verdict::Fail },
            witness,
            notes,
        }
    }
}
