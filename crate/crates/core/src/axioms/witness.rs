use serde::{Deserialize, Serialize};

use crate::aggregators::Fcaf;
use crate::classification::{ClassPoint, Profile};
use crate::error::{Error, Result};

/// What a witness asserts about the aggregator's answers on its profiles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum WitnessCheck {
    /// Column `ty` of the answer on profile 0 sums to `expected`.
    ColumnSum { ty: usize, expected: f64 },
    /// Entry `(object, ty)` of the answer on profile 0 equals `expected`.
    Entry { object: usize, ty: usize, expected: f64 },
    /// Entry `(object, ty)` of the answer on profile 0 lies within the essential
    /// range of the corresponding entry function.
    Bounds { object: usize, ty: usize },
    /// Row `left` of the answer on profile 0 equals row `right` of the answer
    /// on profile 1.
    Rows { left: usize, right: usize },
    /// The answers on profiles 0 and 1 coincide.
    Whole,
    /// On every profile the answer equals the classification held by the
    /// individuals of cell `[lo, hi)`. Here the axiom is violated when the
    /// deviation is *within* tolerance.
    Dictator { cell: usize, lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub observed: Vec<f64>,
    pub expected: Vec<f64>,
    pub deviation: f64,
}

/// A re-runnable counterexample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub profiles: Vec<Profile>,
    #[serde(flatten)]
    pub check: WitnessCheck,
    pub observed: Vec<f64>,
    pub expected: Vec<f64>,
    pub deviation: f64,
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn flat(c: &ClassPoint) -> Vec<f64> {
    c.rows().iter().flatten().copied().collect()
}

impl WitnessCheck {
    fn profile_count(&self) -> usize {
        match self {
            Self::Rows { .. } | Self::Whole => 2,
            _ => 1,
        }
    }

    /// Evaluates the check on `profiles` through `alpha`.
    pub fn evaluate(&self, alpha: &dyn Fcaf, profiles: &[Profile]) -> Result<Outcome> {
        if profiles.len() < self.profile_count() {
            return Err(Error::argument(format!(
                "check needs {} profiles, got {}",
                self.profile_count(),
                profiles.len()
            )));
        }
        let out0 = alpha.aggregate(&profiles[0])?;
        let single = |observed: f64, expected: f64| Outcome {
            observed: vec![observed],
            expected: vec![expected],
            deviation: (observed - expected).abs(),
        };
        Ok(match *self {
            Self::ColumnSum { ty, expected } => single(out0.column_sum(ty), expected),
            Self::Entry { object, ty, expected } => single(out0.get(object, ty), expected),
            Self::Bounds { object, ty } => {
                let (lo, hi) = profiles[0].entry(object, ty).ess_bounds();
                let v = out0.get(object, ty);
                Outcome {
                    observed: vec![v],
                    expected: vec![lo, hi],
                    deviation: (lo - v).max(v - hi).max(0.0),
                }
            }
            Self::Rows { left, right } => {
                let out1 = alpha.aggregate(&profiles[1])?;
                let (a, b) = (out0.row(left).to_vec(), out1.row(right).to_vec());
                let deviation = max_abs_diff(&a, &b);
                Outcome { observed: a, expected: b, deviation }
            }
            Self::Whole => {
                let out1 = alpha.aggregate(&profiles[1])?;
                let (a, b) = (flat(&out0), flat(&out1));
                let deviation = max_abs_diff(&a, &b);
                Outcome { observed: a, expected: b, deviation }
            }
            Self::Dictator { lo, hi, .. } => {
                let mid = 0.5 * (lo + hi);
                let mut observed = flat(&out0);
                let mut expected = flat(&profiles[0].at(mid)?);
                for c in &profiles[1..] {
                    observed.extend(flat(&alpha.aggregate(c)?));
                    expected.extend(flat(&c.at(mid)?));
                }
                let deviation = max_abs_diff(&observed, &expected);
                Outcome { observed, expected, deviation }
            }
        })
    }

    /// Whether `deviation` is a violation of the axiom at tolerance `tol`.
    pub fn violated(&self, deviation: f64, tol: f64) -> bool {
        match self {
            Self::Dictator { .. } => deviation <= tol,
            _ => !(deviation <= tol),
        }
    }
}

impl Witness {
    pub(crate) fn new(profiles: Vec<Profile>, check: WitnessCheck, outcome: Outcome) -> Self {
        Witness {
            profiles,
            check,
            observed: outcome.observed,
            expected: outcome.expected,
            deviation: outcome.deviation,
        }
    }

    /// Re-evaluates the witness and returns the fresh deviation.
    pub fn reproduce(&self, alpha: &dyn Fcaf) -> Result<f64> {
        Ok(self.check.evaluate(alpha, &self.profiles)?.deviation)
    }

    /// True when re-evaluation still violates the axiom at tolerance `tol`.
    pub fn still_violates(&self, alpha: &dyn Fcaf, tol: f64) -> Result<bool> {
        Ok(self.check.violated(self.reproduce(alpha)?, tol))
    }
}
