//! Machine-readable results printed on standard output.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use pdp_core::{Rational, StateSet};

/// Digits after the decimal point in the human-friendly rendering.
pub const DECIMAL_DIGITS: u32 = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Value {
    pub exact: String,
    pub decimal: String,
}

impl From<&Rational> for Value {
    fn from(r: &Rational) -> Self {
        Value { exact: r.to_string(), decimal: r.to_decimal(DECIMAL_DIGITS) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub solver: String,
    /// Petal sets (numbered from 1) or platform ids, keyed by who chose them.
    pub chosen: BTreeMap<String, Vec<usize>>,
    pub values: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "serde_json::Value::is_null")]
    pub trace: serde_json::Value,
    pub wall_clock_seconds: f64,
}

impl ResultDocument {
    pub fn new(solver: &str) -> Self {
        ResultDocument {
            solver: solver.to_string(),
            chosen: BTreeMap::new(),
            values: BTreeMap::new(),
            trace: serde_json::Value::Null,
            wall_clock_seconds: 0.0,
        }
    }

    pub fn set(&mut self, who: impl Into<String>, set: &StateSet) -> &mut Self {
        self.chosen.insert(who.into(), petals(set));
        self
    }

    pub fn ids(&mut self, who: impl Into<String>, ids: Vec<usize>) -> &mut Self {
        self.chosen.insert(who.into(), ids);
        self
    }

    pub fn value(&mut self, name: impl Into<String>, v: &Rational) -> &mut Self {
        self.values.insert(name.into(), Value::from(v));
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    /// Reads back an exact value, for consumers re-checking a report.
    pub fn exact(&self, name: &str) -> Option<Rational> {
        self.values.get(name).and_then(|v| v.exact.parse().ok())
    }

    /// Reads back a petal set written by [`ResultDocument::set`].
    pub fn petal_set(&self, who: &str) -> Option<StateSet> {
        self.chosen.get(who).map(|v| v.iter().map(|&p| p - 1).collect())
    }
}

/// 1-based petal labels.
pub fn petals(set: &StateSet) -> Vec<usize> {
    set.iter().map(|j| j + 1).collect()
}

pub fn profile_json(profile: &[StateSet]) -> serde_json::Value {
    serde_json::Value::Array(profile.iter().map(|s| serde_json::json!(petals(s))).collect())
}
