use serde::{Deserialize, Serialize};

use super::rules::RuleBase;
use crate::error::FuzzyError;
use crate::image::LEVELS;

/// Aggregated output membership sampled at the 256 intensity levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuzzyOutput {
    samples: Vec<f64>,
}

impl FuzzyOutput {
    pub fn zero() -> Self {
        Self {
            samples: vec![0.0; LEVELS],
        }
    }

    /// Curve from explicit samples; values are clamped to `[0, 1]`.
    pub fn from_samples(samples: [f64; LEVELS]) -> Self {
        Self {
            samples: samples
                .iter()
                .map(|&s| if s.is_nan() { 0.0 } else { s.clamp(0.0, 1.0) })
                .collect(),
        }
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn is_zero(&self) -> bool {
        self.samples.iter().all(|&s| s == 0.0)
    }
}

/// Mamdani max–min inference. A rule fires with the minimum of its
/// antecedent memberships times its degree, clips its consequent envelope at
/// that strength, and the clipped envelopes are merged by pointwise maximum.
pub fn infer(base: &RuleBase, input: &[f64]) -> Result<FuzzyOutput, FuzzyError> {
    if base.is_empty() {
        return Err(FuzzyError::EmptyRuleBase);
    }
    if input.len() != base.inputs().len() {
        return Err(FuzzyError::Arity {
            expected: base.inputs().len(),
            actual: input.len(),
        });
    }
    let mut active = Vec::with_capacity(input.len());
    for (partition, &x) in base.inputs().iter().zip(input) {
        if !x.is_finite() {
            return Err(FuzzyError::NonFiniteInput(x));
        }
        active.push(partition.active(x));
    }
    let mut out = FuzzyOutput::zero();
    if active.iter().any(Vec::is_empty) {
        return Ok(out);
    }
    // odometer over the active regions of every input; rules outside this
    // product have a zero antecedent membership and cannot fire
    let mut pick = vec![0usize; active.len()];
    let mut antecedent = vec![0usize; active.len()];
    loop {
        let mut strength = f64::INFINITY;
        for (k, regions) in active.iter().enumerate() {
            let (region, mu) = regions[pick[k]];
            antecedent[k] = region;
            strength = strength.min(mu);
        }
        if let Some((consequent, degree)) = base.get(&antecedent) {
            let firing = strength * degree;
            if firing > 0.0 {
                for (o, &e) in out.samples.iter_mut().zip(base.envelope(consequent)) {
                    *o = o.max(e.min(firing));
                }
            }
        }
        let mut k = 0;
        loop {
            if k == pick.len() {
                return Ok(out);
            }
            pick[k] += 1;
            if pick[k] < active[k].len() {
                break;
            }
            pick[k] = 0;
            k += 1;
        }
    }
}

/// Crisp result of [`defuzzify`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Defuzzified {
    pub level: u8,
    /// Set when the curve was identically zero; `level` is then 0.
    pub no_rule_fired: bool,
}

/// Centroid of the curve over levels 0..=255, rounded half up.
pub fn defuzzify(out: &FuzzyOutput) -> Defuzzified {
    let (mut mass, mut moment) = (0.0, 0.0);
    for (v, &s) in out.samples.iter().enumerate() {
        mass += s;
        moment += v as f64 * s;
    }
    if mass <= 0.0 {
        return Defuzzified {
            level: 0,
            no_rule_fired: true,
        };
    }
    let centroid = moment / mass;
    Defuzzified {
        level: (centroid + 0.5).floor().clamp(0.0, 255.0) as u8,
        no_rule_fired: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fuzzy::{combine, FuzzyPartition, FuzzyRule};

    fn spikes(levels: &[(usize, f64)]) -> FuzzyOutput {
        let mut s = [0.0; LEVELS];
        for &(v, w) in levels {
            s[v] = w;
        }
        FuzzyOutput::from_samples(s)
    }

    #[test]
    fn centroid_examples() {
        assert_eq!(defuzzify(&spikes(&[(77, 1.0)])).level, 77);
        assert_eq!(defuzzify(&spikes(&[(50, 1.0), (150, 1.0)])).level, 100);
        let mut tri = [0.0; LEVELS];
        for (v, s) in tri.iter_mut().enumerate() {
            *s = (1.0 - (v as f64 - 128.0).abs() / 40.0).max(0.0);
        }
        assert_eq!(defuzzify(&FuzzyOutput::from_samples(tri)).level, 128);
        assert_eq!(
            defuzzify(&FuzzyOutput::zero()),
            Defuzzified {
                level: 0,
                no_rule_fired: true
            }
        );
        // 100.5 rounds up
        assert_eq!(defuzzify(&spikes(&[(100, 1.0), (101, 1.0)])).level, 101);
    }

    fn base(rules: &[FuzzyRule]) -> crate::fuzzy::RuleBase {
        let p = FuzzyPartition::from_peaks(vec![0.0, 100.0, 200.0, 255.0]).unwrap();
        combine(rules, vec![p.clone()], p).unwrap()
    }

    #[test]
    fn singleton_rule_reproduces_envelope() {
        let b = base(&[FuzzyRule {
            antecedent: vec![1],
            consequent: 2,
            degree: 1.0,
        }]);
        let out = infer(&b, &[100.0]).unwrap();
        assert_eq!(out.samples(), b.envelope(2));
        // no active antecedent has a rule
        assert!(infer(&b, &[230.0]).unwrap().is_zero());
    }

    #[test]
    fn equal_firing_aggregates_by_max() {
        let b = base(&[
            FuzzyRule {
                antecedent: vec![1],
                consequent: 1,
                degree: 1.0,
            },
            FuzzyRule {
                antecedent: vec![2],
                consequent: 2,
                degree: 1.0,
            },
        ]);
        let out = infer(&b, &[150.0]).unwrap();
        for v in 0..LEVELS {
            let expected = b.envelope(1)[v].min(0.5).max(b.envelope(2)[v].min(0.5));
            assert_eq!(out.samples()[v], expected);
        }
    }

    #[test]
    fn empty_base_is_an_error() {
        let b = base(&[]);
        assert_eq!(infer(&b, &[1.0]), Err(FuzzyError::EmptyRuleBase));
    }
}
