//! Ruspini membership partitions, data-driven rule generation, Mamdani
//! inference and centroid defuzzification.

mod inference;
mod membership;
mod rules;

pub use inference::{defuzzify, infer, Defuzzified, FuzzyOutput};
pub use membership::{
    build_consequent_partition, build_partition, build_partition_with_gap, FuzzyPartition,
    MembershipFunction, DEFAULT_CLUSTER_GAP, DOMAIN_MAX, DOMAIN_MIN,
};
pub use rules::{combine, generate_rules, FuzzyRule, RuleBase, TrainingPair};

/// Schema tag written into rule base JSON.
pub const RULEBASE_SCHEMA: &str = "grayfuzz.rulebase.v1";
