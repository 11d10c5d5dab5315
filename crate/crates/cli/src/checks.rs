//! Declarative pass/fail checks on report quantities.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// A named number or flag computed by a verb.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Quantity {
    Number(f64),
    Flag(bool),
}

pub type Quantities = BTreeMap<String, Quantity>;

#[derive(Debug, Clone, Deserialize, Serialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    pub name: String,
    /// Acceptance criterion the check belongs to, for suite aggregation.
    pub criterion: Option<u32>,
    pub quantity: String,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub target: Option<f64>,
    /// Absolute tolerance around `target`.
    pub tolerance: Option<f64>,
    /// Expected value of a flag.
    pub equals: Option<bool>,
}

impl CheckConfig {
    pub fn validate(&self) -> Result<()> {
        let numeric = self.min.is_some() || self.max.is_some() || self.target.is_some();
        if numeric == self.equals.is_some() {
            return Err(CliError::config(format!(
                "check `{}`: give either bounds/target or `equals`",
                self.name
            )));
        }
        if self.target.is_some() != self.tolerance.is_some() {
            return Err(CliError::config(format!("check `{}`: target and tolerance go together", self.name)));
        }
        if let (Some(lo), Some(hi)) = (self.min, self.max) {
            if lo > hi {
                return Err(CliError::config(format!("check `{}`: min exceeds max", self.name)));
            }
        }
        if self.tolerance.is_some_and(|t| !(t >= 0.0)) {
            return Err(CliError::config(format!("check `{}`: negative tolerance", self.name)));
        }
        Ok(())
    }

    pub fn evaluate(&self, quantities: &Quantities) -> CheckOutcome {
        let value = quantities.get(&self.quantity).copied();
        let (passed, detail) = match value {
            None => (false, format!("quantity `{}` was not computed", self.quantity)),
            Some(Quantity::Flag(b)) => match self.equals {
                Some(want) => (b == want, format!("{b}, expected {want}")),
                None => (false, "flag compared against numeric bounds".into()),
            },
            Some(Quantity::Number(v)) => {
                if self.equals.is_some() {
                    (false, "number compared against a flag".into())
                } else if !v.is_finite() {
                    (false, format!("{v} is not finite"))
                } else {
                    let mut ok = true;
                    let mut parts = Vec::new();
                    if let Some(lo) = self.min {
                        ok &= v >= lo;
                        parts.push(format!(">= {lo:e}"));
                    }
                    if let Some(hi) = self.max {
                        ok &= v <= hi;
                        parts.push(format!("<= {hi:e}"));
                    }
                    if let (Some(t), Some(tol)) = (self.target, self.tolerance) {
                        ok &= (v - t).abs() <= tol;
                        parts.push(format!("within {tol:e} of {t}"));
                    }
                    (ok, format!("{v:e}, required {}", parts.join(" and ")))
                }
            }
        };
        CheckOutcome {
            name: self.name.clone(),
            criterion: self.criterion,
            quantity: self.quantity.clone(),
            value,
            passed,
            detail,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub criterion: Option<u32>,
    pub quantity: String,
    pub value: Option<Quantity>,
    pub passed: bool,
    pub detail: String,
}

pub fn evaluate_all(checks: &[CheckConfig], quantities: &Quantities) -> Vec<CheckOutcome> {
    checks.iter().map(|c| c.evaluate(quantities)).collect()
}
