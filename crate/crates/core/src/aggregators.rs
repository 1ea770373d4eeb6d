//! Aggregators: maps from a continuum profile to one fuzzy classification.
//!
//! The well-behaved family is the weighted arithmetic mean `α_μ`, which integrates
//! every entry function against a probability measure `μ`; a dictator is the
//! weighted mean of a point mass. The rest of the module is a gallery of
//! aggregators that each break one axiom on purpose, plus two black boxes used to
//! exercise the extraction harness: the odd-`h` means of the two-object,
//! two-type world and a type-inconsistent mean.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::axioms::Axiom;
use crate::classification::{ClassPoint, Profile, Shape};
use crate::error::{Error, Result};
use crate::function_space::PiecewiseFn;
use crate::measure::Measure;

/// A fuzzy classification aggregation function.
///
/// `aggregate` may return a matrix that is not a valid classification; callers
/// that treat the aggregator as a black box validate the answer themselves.
pub trait Fcaf: Send + Sync {
    fn name(&self) -> String;

    fn aggregate(&self, c: &Profile) -> Result<ClassPoint>;

    /// Axioms the implementation asserts it satisfies under the default suites.
    fn claimed_axioms(&self) -> BTreeSet<Axiom>;

    /// The profile shape the aggregator is meant to be probed at, if it only
    /// behaves as advertised at particular shapes.
    fn shape_hint(&self) -> Option<Shape> {
        None
    }
}

impl fmt::Debug for dyn Fcaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fcaf({})", self.name())
    }
}

fn map_matrix(c: &Profile, mut f: impl FnMut(usize, usize, &PiecewiseFn) -> f64) -> Result<ClassPoint> {
    let values = c
        .entries()
        .iter()
        .enumerate()
        .map(|(j, row)| row.iter().enumerate().map(|(t, e)| f(j, t, e)).collect())
        .collect();
    ClassPoint::from_rows(values)
}

fn axioms(list: &[Axiom]) -> BTreeSet<Axiom> {
    list.iter().copied().collect()
}

/// `α_μ(c)(x)_t = ∫ c_i(x)_t μ(di)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedMean {
    measure: Measure,
}

impl WeightedMean {
    pub fn new(measure: Measure) -> Self {
        WeightedMean { measure }
    }

    pub fn measure(&self) -> &Measure {
        &self.measure
    }
}

/// The weighted mean of the point mass at `i`: every profile is answered with
/// the classification of individual `i`.
pub fn dictator(i: f64) -> Result<WeightedMean> {
    Ok(WeightedMean::new(Measure::dirac(i)?))
}

impl Fcaf for WeightedMean {
    fn name(&self) -> String {
        match self.measure.point_mass_location() {
            Some(i) => format!("dictator({i})"),
            None if self.measure.is_lebesgue() => "weighted_mean(lebesgue)".into(),
            None => "weighted_mean".into(),
        }
    }

    fn aggregate(&self, c: &Profile) -> Result<ClassPoint> {
        map_matrix(c, |_, _, f| self.measure.integrate(f))
    }

    fn claimed_axioms(&self) -> BTreeSet<Axiom> {
        let mut set = axioms(&[
            Axiom::Optimality,
            Axiom::Independence,
            Axiom::Symmetry,
            Axiom::ZeroUnanimity,
            Axiom::Unanimity,
            Axiom::Coherence,
        ]);
        if self.measure.point_mass_location().is_none() {
            set.insert(Axiom::NonDictatorship);
        }
        if self.measure.is_lebesgue() {
            set.insert(Axiom::Anonymity);
        }
        set
    }
}

fn vertex_index(row: &[f64]) -> Option<usize> {
    let k = row.iter().position(|&v| (v - 1.0).abs() <= 1e-12)?;
    row.iter()
        .enumerate()
        .all(|(s, &v)| s == k || v.abs() <= 1e-12)
        .then_some(k)
}

/// Copies the classification of individual 0 for every object it classifies
/// crisply and answers `(1/p, …, 1/p)` for every other object.
///
/// Breaks optimality. With two types it keeps independence, zero unanimity and
/// non-dictatorship; with three or more types a row such as `(0, 1/2, 1/2)` at
/// individual 0 is answered uniformly and zero unanimity breaks too, so the
/// aggregator advertises the `4x2` shape.
#[derive(Debug, Clone, Copy, Default)]
pub struct VertexOrUniform;

impl Fcaf for VertexOrUniform {
    fn name(&self) -> String {
        "vertex_or_uniform".into()
    }

    fn aggregate(&self, c: &Profile) -> Result<ClassPoint> {
        let c0 = c.at(0.0)?;
        let p = c.p();
        let rows = c0
            .rows()
            .iter()
            .map(|r| match vertex_index(r) {
                Some(_) => r.clone(),
                None => vec![1.0 / p as f64; p],
            })
            .collect();
        ClassPoint::from_rows(rows)
    }

    fn claimed_axioms(&self) -> BTreeSet<Axiom> {
        axioms(&[
            Axiom::Independence,
            Axiom::Symmetry,
            Axiom::ZeroUnanimity,
            Axiom::NonDictatorship,
        ])
    }

    fn shape_hint(&self) -> Option<Shape> {
        Some(Shape { m: 4, p: 2 })
    }
}

/// Answers with individual 0 on profiles where object 0 puts at least as much
/// Lebesgue mass on type 0 as object 1 does, and with individual 1 otherwise.
///
/// The partition couples two objects, so the answer for object 0 can change when
/// only object 1 changes: independence breaks.
#[derive(Debug, Clone, Copy, Default)]
pub struct SplitDictator;

impl SplitDictator {
    /// The individual whose classification is returned for `c`.
    pub fn reference_individual(c: &Profile) -> f64 {
        let lambda = Measure::lebesgue();
        let a = lambda.integrate(c.entry(0, 0));
        let b = lambda.integrate(c.entry(1, 0));
        if a >= b {
            0.0
        } else {
            1.0
        }
    }
}

impl Fcaf for SplitDictator {
    fn name(&self) -> String {
        "split_dictator".into()
    }

    fn aggregate(&self, c: &Profile) -> Result<ClassPoint> {
        c.at(Self::reference_individual(c))
    }

    fn claimed_axioms(&self) -> BTreeSet<Axiom> {
        axioms(&[
            Axiom::Optimality,
            Axiom::ZeroUnanimity,
            Axiom::Unanimity,
            Axiom::Coherence,
            Axiom::NonDictatorship,
        ])
    }
}

/// Individual 0's classification with the rows of objects 0 and 1 exchanged.
///
/// Breaks zero unanimity. The answer for object 0 is read from object 1's row,
/// so independence and symmetry break as well.
#[derive(Debug, Clone, Copy, Default)]
pub struct SwappedDictator;

impl Fcaf for SwappedDictator {
    fn name(&self) -> String {
        "swapped_dictator".into()
    }

    fn aggregate(&self, c: &Profile) -> Result<ClassPoint> {
        let mut rows = c.at(0.0)?.rows().to_vec();
        rows.swap(0, 1);
        ClassPoint::from_rows(rows)
    }

    fn claimed_axioms(&self) -> BTreeSet<Axiom> {
        axioms(&[Axiom::Optimality, Axiom::NonDictatorship])
    }
}

/// The scalar odd map `h` applied to centred entry means.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OddVariant {
    /// `h(u) = u`: the weighted mean itself.
    Linear,
    /// `h(u) = (2u)^3 / 2`.
    Cube,
}

impl OddVariant {
    pub fn h(self, u: f64) -> f64 {
        match self {
            OddVariant::Linear => u,
            OddVariant::Cube => 0.5 * (2.0 * u).powi(3),
        }
    }
}

/// Two objects, two types: `α(c)(x)_t = h(∫ c(x)_t dμ − 1/2) + 1/2` with `h` odd.
///
/// Oddness keeps rows summing to one and `h(±1/2) = ±1/2` keeps zero unanimity;
/// the cube variant is not additive, so it is not a weighted mean.
#[derive(Debug, Clone, PartialEq)]
pub struct OddHMean {
    variant: OddVariant,
    measure: Measure,
}

impl OddHMean {
    pub fn new(variant: OddVariant, measure: Measure) -> Self {
        OddHMean { variant, measure }
    }

    pub fn variant(&self) -> OddVariant {
        self.variant
    }
}

impl Fcaf for OddHMean {
    fn name(&self) -> String {
        match self.variant {
            OddVariant::Linear => "odd_h_mean(linear)".into(),
            OddVariant::Cube => "odd_h_mean(cube)".into(),
        }
    }

    fn aggregate(&self, c: &Profile) -> Result<ClassPoint> {
        if c.m() != 2 || c.p() != 2 {
            return Err(Error::argument(format!(
                "odd-h means take 2x2 profiles, got {}",
                c.shape()
            )));
        }
        map_matrix(c, |_, _, f| self.variant.h(self.measure.integrate(f) - 0.5) + 0.5)
    }

    fn claimed_axioms(&self) -> BTreeSet<Axiom> {
        let mut set = match self.variant {
            OddVariant::Linear => WeightedMean::new(self.measure.clone()).claimed_axioms(),
            OddVariant::Cube => axioms(&[
                Axiom::Optimality,
                Axiom::Independence,
                Axiom::Symmetry,
                Axiom::ZeroUnanimity,
            ]),
        };
        if self.measure.point_mass_location().is_none() {
            set.insert(Axiom::NonDictatorship);
        }
        if self.measure.is_lebesgue() {
            set.insert(Axiom::Anonymity);
        }
        set
    }

    fn shape_hint(&self) -> Option<Shape> {
        Some(Shape { m: 2, p: 2 })
    }
}

/// `κ α_μ(c) + (1 − κ) (1/p, …, 1/p)`.
///
/// Never answers an exact zero, so zero unanimity breaks. With `m = p` every
/// column sum of a profile is identically one and optimality survives, which
/// makes this a counterexample for zero unanimity that keeps the other three
/// axioms; the aggregator advertises the `3x3` shape.
#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkToUniform {
    kappa: f64,
    measure: Measure,
}

impl ShrinkToUniform {
    pub fn new(kappa: f64, measure: Measure) -> Result<Self> {
        if !(0.0..1.0).contains(&kappa) {
            return Err(Error::argument(format!("shrink weight {kappa} must lie in [0, 1)")));
        }
        Ok(ShrinkToUniform { kappa, measure })
    }
}

impl Fcaf for ShrinkToUniform {
    fn name(&self) -> String {
        format!("shrink_to_uniform({})", self.kappa)
    }

    fn aggregate(&self, c: &Profile) -> Result<ClassPoint> {
        let u = (1.0 - self.kappa) / c.p() as f64;
        map_matrix(c, |_, _, f| self.kappa * self.measure.integrate(f) + u)
    }

    fn claimed_axioms(&self) -> BTreeSet<Axiom> {
        let mut set = axioms(&[Axiom::Optimality, Axiom::Independence, Axiom::Symmetry]);
        if self.measure.point_mass_location().is_none() {
            set.insert(Axiom::NonDictatorship);
        }
        if self.measure.is_lebesgue() {
            set.insert(Axiom::Anonymity);
        }
        set
    }

    fn shape_hint(&self) -> Option<Shape> {
        Some(Shape { m: 3, p: 3 })
    }
}

/// Type `t >= 1` is averaged against its own measure `μ^t` and type 0 takes
/// the remainder of each row.
///
/// On indicator probes the answers are valid classifications, but the interval
/// masses read through different types disagree whenever the measures differ.
/// Where the per-type answer is not a classification the aggregator falls back
/// to the weighted mean of `μ^1`, so every answer is valid.
#[derive(Debug, Clone, PartialEq)]
pub struct PerTypeMean {
    measures: Vec<Measure>,
}

impl PerTypeMean {
    /// `measures[k]` serves type `k + 1`.
    pub fn new(measures: Vec<Measure>) -> Result<Self> {
        if measures.is_empty() {
            return Err(Error::argument("need a measure for every type from 1 on"));
        }
        Ok(PerTypeMean { measures })
    }
}

impl Fcaf for PerTypeMean {
    fn name(&self) -> String {
        "per_type_mean".into()
    }

    fn aggregate(&self, c: &Profile) -> Result<ClassPoint> {
        if c.p() != self.measures.len() + 1 {
            return Err(Error::argument(format!(
                "{} type measures cannot serve {} types",
                self.measures.len(),
                c.p()
            )));
        }
        let rows = c
            .entries()
            .iter()
            .map(|row| {
                let mut out: Vec<f64> = row.iter().enumerate().map(|(t, f)| {
                    if t == 0 { 0.0 } else { self.measures[t - 1].integrate(f) }
                }).collect();
                out[0] = 1.0 - out[1..].iter().sum::<f64>();
                out
            })
            .collect();
        match ClassPoint::new(rows) {
            Ok(point) => Ok(point),
            Err(_) => WeightedMean::new(self.measures[0].clone()).aggregate(c),
        }
    }

    fn claimed_axioms(&self) -> BTreeSet<Axiom> {
        axioms(&[Axiom::NonDictatorship])
    }

    fn shape_hint(&self) -> Option<Shape> {
        Some(Shape { m: 6, p: self.measures.len() + 1 })
    }
}

/// JSON description of a shipped aggregator, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AggregatorSpec {
    WeightedMean {
        measure: Measure,
    },
    Dictator {
        i: f64,
    },
    VertexOrUniform,
    SplitDictator,
    SwappedDictator,
    OddHMean {
        variant: OddVariant,
        #[serde(default = "Measure::lebesgue")]
        measure: Measure,
    },
    ShrinkToUniform {
        kappa: f64,
        #[serde(default = "Measure::lebesgue")]
        measure: Measure,
    },
    PerTypeMean {
        measures: Vec<Measure>,
    },
}

impl AggregatorSpec {
    pub fn build(&self) -> Result<Box<dyn Fcaf>> {
        Ok(match self {
            Self::WeightedMean { measure } => Box::new(WeightedMean::new(measure.clone())),
            Self::Dictator { i } => Box::new(dictator(*i)?),
            Self::VertexOrUniform => Box::new(VertexOrUniform),
            Self::SplitDictator => Box::new(SplitDictator),
            Self::SwappedDictator => Box::new(SwappedDictator),
            Self::OddHMean { variant, measure } => Box::new(OddHMean::new(*variant, measure.clone())),
            Self::ShrinkToUniform { kappa, measure } => {
                Box::new(ShrinkToUniform::new(*kappa, measure.clone())?)
            }
            Self::PerTypeMean { measures } => Box::new(PerTypeMean::new(measures.clone())?),
        })
    }
}

/// One aggregator that breaks exactly one axiom of the characterization
/// (optimality, independence, zero unanimity, non-dictatorship), with the axiom
/// it is meant to break.
pub struct Counterexample {
    pub breaks: Axiom,
    pub spec: AggregatorSpec,
}

/// The four classical constructions, in the order optimality, independence,
/// zero unanimity, non-dictatorship.
pub fn counterexamples() -> Vec<Counterexample> {
    vec![
        Counterexample { breaks: Axiom::Optimality, spec: AggregatorSpec::VertexOrUniform },
        Counterexample { breaks: Axiom::Independence, spec: AggregatorSpec::SplitDictator },
        Counterexample { breaks: Axiom::ZeroUnanimity, spec: AggregatorSpec::SwappedDictator },
        Counterexample { breaks: Axiom::NonDictatorship, spec: AggregatorSpec::Dictator { i: 0.0 } },
    ]
}

/// `w(i) = 3 i^2`.
pub fn cubic_weight_measure() -> Measure {
    Measure::with_density(PiecewiseFn::polynomial(crate::Poly::new(vec![0.0, 0.0, 3.0])))
        .expect("3 i^2 integrates to one")
}

/// Every shipped aggregator, each with a representative parameter.
pub fn gallery() -> Vec<AggregatorSpec> {
    let lambda = Measure::lebesgue();
    let mixture = Measure::mixture(&lambda, &Measure::dirac(0.7).expect("0.7 in [0, 1]"), 0.5)
        .expect("valid mixture");
    vec![
        AggregatorSpec::WeightedMean { measure: lambda.clone() },
        AggregatorSpec::WeightedMean { measure: cubic_weight_measure() },
        AggregatorSpec::WeightedMean { measure: mixture },
        AggregatorSpec::Dictator { i: 0.3 },
        AggregatorSpec::Dictator { i: 0.0 },
        AggregatorSpec::VertexOrUniform,
        AggregatorSpec::SplitDictator,
        AggregatorSpec::SwappedDictator,
        AggregatorSpec::OddHMean { variant: OddVariant::Linear, measure: lambda.clone() },
        AggregatorSpec::OddHMean { variant: OddVariant::Cube, measure: lambda.clone() },
        AggregatorSpec::ShrinkToUniform { kappa: 0.5, measure: lambda.clone() },
        AggregatorSpec::PerTypeMean {
            measures: vec![lambda, Measure::dirac(0.0).expect("0 in [0, 1]")],
        },
    ]
}
