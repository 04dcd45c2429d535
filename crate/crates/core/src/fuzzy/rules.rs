use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::membership::{FuzzyPartition, DOMAIN_MAX};
use super::RULEBASE_SCHEMA;
use crate::error::FuzzyError;

/// One training sample: crisp inputs and the desired crisp output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingPair {
    pub inputs: Vec<f64>,
    pub output: f64,
}

impl TrainingPair {
    pub fn new(inputs: Vec<f64>, output: f64) -> Self {
        Self { inputs, output }
    }
}

/// `IF x_i is antecedent[i] (for all i) THEN y is consequent`, with the
/// product of the generating memberships as its degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyRule {
    pub antecedent: Vec<usize>,
    pub consequent: usize,
    pub degree: f64,
}

fn check_finite(x: f64) -> Result<f64, FuzzyError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(FuzzyError::NonFiniteInput(x))
    }
}

/// One rule per pair: every coordinate goes to its region of maximal
/// membership (lower index on ties).
pub fn generate_rules(
    pairs: &[TrainingPair],
    inputs: &[FuzzyPartition],
    output: &FuzzyPartition,
) -> Result<Vec<FuzzyRule>, FuzzyError> {
    pairs
        .iter()
        .map(|pair| {
            if pair.inputs.len() != inputs.len() {
                return Err(FuzzyError::Arity {
                    expected: inputs.len(),
                    actual: pair.inputs.len(),
                });
            }
            let mut degree = 1.0;
            let mut antecedent = Vec::with_capacity(inputs.len());
            for (partition, &x) in inputs.iter().zip(&pair.inputs) {
                let (region, mu) = partition.best_region(check_finite(x)?);
                antecedent.push(region);
                degree *= mu;
            }
            let (consequent, mu) = output.best_region(check_finite(pair.output)?);
            Ok(FuzzyRule {
                antecedent,
                consequent,
                degree: degree * mu,
            })
        })
        .collect()
}

/// Conflict-free rule base: one `(consequent, degree)` per antecedent,
/// together with the partitions the rules index into.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RuleBaseRepr", into = "RuleBaseRepr")]
pub struct RuleBase {
    inputs: Vec<FuzzyPartition>,
    output: FuzzyPartition,
    rules: BTreeMap<Vec<usize>, (usize, f64)>,
    /// Output envelopes sampled at every integer level.
    envelopes: Vec<Vec<f64>>,
}

/// Keeps, per antecedent, the rule of maximal degree (lower consequent on
/// ties). The result does not depend on the order of `rules`.
pub fn combine(
    rules: &[FuzzyRule],
    inputs: Vec<FuzzyPartition>,
    output: FuzzyPartition,
) -> Result<RuleBase, FuzzyError> {
    let mut table: BTreeMap<Vec<usize>, (usize, f64)> = BTreeMap::new();
    for rule in rules {
        let candidate = (rule.consequent, rule.degree);
        table
            .entry(rule.antecedent.clone())
            .and_modify(|kept| {
                if candidate.1 > kept.1 || (candidate.1 == kept.1 && candidate.0 < kept.0) {
                    *kept = candidate;
                }
            })
            .or_insert(candidate);
    }
    RuleBase::new(inputs, output, table)
}

impl RuleBase {
    pub fn new(
        inputs: Vec<FuzzyPartition>,
        output: FuzzyPartition,
        rules: BTreeMap<Vec<usize>, (usize, f64)>,
    ) -> Result<Self, FuzzyError> {
        for (antecedent, &(consequent, degree)) in &rules {
            if antecedent.len() != inputs.len() {
                return Err(FuzzyError::Arity {
                    expected: inputs.len(),
                    actual: antecedent.len(),
                });
            }
            for (&index, partition) in antecedent.iter().zip(&inputs) {
                if index >= partition.region_count() {
                    return Err(FuzzyError::RegionIndex {
                        index,
                        count: partition.region_count(),
                    });
                }
            }
            if consequent >= output.region_count() {
                return Err(FuzzyError::RegionIndex {
                    index: consequent,
                    count: output.region_count(),
                });
            }
            if !(0.0..=1.0).contains(&degree) {
                return Err(FuzzyError::Format(format!(
                    "rule degree {degree} outside [0, 1]"
                )));
            }
        }
        let samples = DOMAIN_MAX as usize + 1;
        let envelopes = output
            .functions()
            .iter()
            .map(|f| (0..samples).map(|v| f.eval(v as f64)).collect())
            .collect();
        Ok(Self {
            inputs,
            output,
            rules,
            envelopes,
        })
    }

    pub fn inputs(&self) -> &[FuzzyPartition] {
        &self.inputs
    }

    pub fn output(&self) -> &FuzzyPartition {
        &self.output
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// `(consequent, degree)` stored for `antecedent`.
    pub fn get(&self, antecedent: &[usize]) -> Option<(usize, f64)> {
        self.rules.get(antecedent).copied()
    }

    /// Rules in antecedent order.
    pub fn rules(&self) -> impl Iterator<Item = FuzzyRule> + '_ {
        self.rules
            .iter()
            .map(|(a, &(consequent, degree))| FuzzyRule {
                antecedent: a.clone(),
                consequent,
                degree,
            })
    }

    pub(crate) fn envelope(&self, region: usize) -> &[f64] {
        &self.envelopes[region]
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("rule base serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, FuzzyError> {
        serde_json::from_str(text).map_err(|e| FuzzyError::Format(e.to_string()))
    }
}

#[derive(Serialize, Deserialize)]
struct RuleBaseRepr {
    schema: String,
    inputs: Vec<FuzzyPartition>,
    output: FuzzyPartition,
    rules: Vec<FuzzyRule>,
}

impl From<RuleBase> for RuleBaseRepr {
    fn from(base: RuleBase) -> Self {
        let rules = base.rules().collect();
        Self {
            schema: RULEBASE_SCHEMA.to_string(),
            inputs: base.inputs,
            output: base.output,
            rules,
        }
    }
}

impl TryFrom<RuleBaseRepr> for RuleBase {
    type Error = FuzzyError;

    fn try_from(repr: RuleBaseRepr) -> Result<Self, Self::Error> {
        if repr.schema != RULEBASE_SCHEMA {
            return Err(FuzzyError::Format(format!(
                "unsupported schema {:?}",
                repr.schema
            )));
        }
        let mut table = BTreeMap::new();
        for rule in repr.rules {
            if table
                .insert(rule.antecedent.clone(), (rule.consequent, rule.degree))
                .is_some()
            {
                return Err(FuzzyError::Format(format!(
                    "duplicate antecedent {:?}",
                    rule.antecedent
                )));
            }
        }
        RuleBase::new(repr.inputs, repr.output, table)
    }
}
