//! Black-box harness: treats an aggregator as an oracle and reads back the
//! measure that represents it (for `m >= 3`) or the odd map `h` (for the
//! two-object, two-type world).
//!
//! Extraction feeds indicator probes to the aggregator: object 0 is classified
//! as type `t` on `J = [0, x]` and as type 0 elsewhere, and the answer's entry
//! `(0, t)` is `μ^t([0, x])`. A weighted mean uses one measure for every type;
//! [`consistency_check`] compares the per-type answers.

mod reconstruct;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::aggregators::{cubic_weight_measure, Fcaf, WeightedMean};
use crate::axioms::{check_symmetry, check_zero_unanimity, SuiteConfig, DEFAULT_SEED, DEFAULT_SHAPE};
use crate::classification::{
    example1_profile, indicator_probe_profile, uniform_point, ClassPoint, IntervalSet, Locks, Profile,
    ProfileDraft, Shape,
};
use crate::error::{Error, Result};
use crate::function_space::{PiecewiseFn, Poly};
use crate::measure::{Measure, PointMass};
use crate::rng;

/// Atoms lighter than this are not listed in `detected_atoms` (they stay in
/// the reconstructed measure).
pub const ATOM_REPORT_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtractConfig {
    pub grid_n: usize,
    pub validation_n: usize,
    pub seed: u64,
    pub shape: Option<Shape>,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        ExtractConfig {
            grid_n: 21,
            validation_n: 100,
            seed: DEFAULT_SEED,
            shape: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TypeCdf {
    pub ty: usize,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionResult {
    pub aggregator: String,
    pub shape: Shape,
    /// `x_k = k / (grid_n - 1)`.
    pub grid: Vec<f64>,
    /// `μ^t([0, x_k])` for every probe type `t >= 1`.
    pub cdf_values: Vec<TypeCdf>,
    pub detected_atoms: Vec<PointMass>,
    /// Rebuilt from adaptive queries through type 1.
    pub reconstructed: Measure,
    pub max_type_deviation: f64,
    /// Grid point where the type CDFs disagree most.
    pub type_deviation_at: Option<f64>,
    /// With two types there is only one probe type and nothing to compare.
    pub single_type: bool,
    /// `max |α(c) - α_reconstructed(c)|` over the validation profiles.
    pub match_deviation: f64,
    pub validation_profiles: usize,
    /// Largest decrease between consecutive grid values of any type CDF.
    pub monotonicity_defect: f64,
    pub queries: usize,
}

impl ExtractionResult {
    /// `μ^t([0, x])` read at grid point `k` for type `t`.
    pub fn cdf(&self, ty: usize, k: usize) -> Option<f64> {
        self.cdf_values.iter().find(|c| c.ty == ty)?.values.get(k).copied()
    }
}

fn protocol(probe: String, reason: impl ToString) -> Error {
    Error::Protocol { probe, reason: reason.to_string() }
}

/// Aggregates an indicator probe and validates the answer.
fn probe_interval(alpha: &dyn Fcaf, shape: Shape, t: usize, x: f64) -> Result<f64> {
    let j = IntervalSet::prefix(x)?;
    let c = indicator_probe_profile(shape.m, shape.p, t, &j)?;
    let name = || format!("type {t}, J = [0, {x}]");
    let out = alpha.aggregate(&c).map_err(|e| protocol(name(), e))?;
    if out.shape() != shape {
        return Err(protocol(name(), format!("answer has shape {}", out.shape())));
    }
    out.validate().map_err(|v| protocol(name(), v))?;
    Ok(out.get(0, t))
}

/// A random valid profile for comparing a black box with a reconstruction.
pub fn validation_profile(shape: Shape, seed: u64, k: usize) -> Profile {
    let mut rng = rng::stream(seed, "validation", k as u64);
    let mut draft = ProfileDraft::from_point(&uniform_point(shape));
    draft.randomize_base(&mut rng, &Locks::default());
    draft.perturb(&mut rng, 4, 0.25, shape.m + shape.p, &Locks::default());
    draft.finish()
}

/// Largest answer difference between `alpha` and `beta` over `n` validation profiles.
pub fn match_deviation(alpha: &dyn Fcaf, beta: &dyn Fcaf, shape: Shape, seed: u64, n: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let c = validation_profile(shape, seed, k);
        let d = alpha.aggregate(&c)?.max_abs_diff(&beta.aggregate(&c)?);
        worst = if d.is_nan() { f64::NAN } else { worst.max(d) };
    }
    Ok(worst)
}

/// Reads the per-type CDFs off `alpha`, rebuilds a measure and compares.
pub fn extract_measure(alpha: &dyn Fcaf, cfg: &ExtractConfig) -> Result<ExtractionResult> {
    let shape = cfg.shape.or_else(|| alpha.shape_hint()).unwrap_or(DEFAULT_SHAPE);
    if shape.m < 3 {
        return Err(Error::Precondition(format!(
            "measure extraction needs at least three objects, got {shape}"
        )));
    }
    if cfg.grid_n < 2 {
        return Err(Error::argument("grid_n must be at least 2"));
    }
    let grid: Vec<f64> = (0..cfg.grid_n).map(|k| k as f64 / (cfg.grid_n - 1) as f64).collect();
    let mut queries = 0;
    let mut cdf_values = Vec::new();
    for t in 1..shape.p {
        let values = grid
            .iter()
            .map(|&x| probe_interval(alpha, shape, t, x))
            .collect::<Result<Vec<_>>>()?;
        queries += values.len();
        cdf_values.push(TypeCdf { ty: t, values });
    }

    let mut max_type_deviation: f64 = 0.0;
    let mut type_deviation_at = None;
    for (a, ca) in cdf_values.iter().enumerate() {
        for cb in &cdf_values[a + 1..] {
            for (k, (&u, &v)) in ca.values.iter().zip(&cb.values).enumerate() {
                if (u - v).abs() > max_type_deviation {
                    max_type_deviation = (u - v).abs();
                    type_deviation_at = Some(grid[k]);
                }
            }
        }
    }
    let monotonicity_defect = cdf_values
        .iter()
        .flat_map(|c| c.values.windows(2).map(|w| w[0] - w[1]))
        .fold(0.0, f64::max);

    let mut cdf = |x: f64| probe_interval(alpha, shape, 1, x);
    let rec = reconstruct::reconstruct(&mut cdf)?;
    queries += rec.queries;
    let reconstructed = rec.measure;
    let detected_atoms = reconstructed
        .masses()
        .iter()
        .filter(|m| m.mass > ATOM_REPORT_THRESHOLD)
        .copied()
        .collect();
    let mean = WeightedMean::new(reconstructed.clone());
    let match_dev = match_deviation(alpha, &mean, shape, cfg.seed, cfg.validation_n)?;

    Ok(ExtractionResult {
        aggregator: alpha.name(),
        shape,
        grid,
        cdf_values,
        detected_atoms,
        reconstructed,
        max_type_deviation,
        type_deviation_at,
        single_type: shape.p == 2,
        match_deviation: match_dev,
        validation_profiles: cfg.validation_n,
        monotonicity_defect,
        queries,
    })
}

/// True iff the per-type measures agree within `tol` on the grid. Vacuously
/// true with a single probe type (see `single_type`).
pub fn consistency_check(result: &ExtractionResult, tol: f64) -> bool {
    result.max_type_deviation <= tol
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditivityWitness {
    pub object: usize,
    pub ty: usize,
    /// Object and type absorbing the compensating changes.
    pub partner: (usize, usize),
    pub f: PiecewiseFn,
    pub g: PiecewiseFn,
    pub resp_f: f64,
    pub resp_g: f64,
    pub resp_fg: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditivityReport {
    pub aggregator: String,
    pub shape: Shape,
    pub probes: usize,
    pub skipped: usize,
    pub epsilon: f64,
    pub max_deviation: f64,
    /// The probe with the largest deviation.
    pub witness: Option<AdditivityWitness>,
}

impl AdditivityReport {
    pub fn additive(&self, tol: f64) -> bool {
        self.max_deviation <= tol
    }
}

/// A random continuous piecewise-linear function with sup norm at most `amp`
/// and knots on the 1/64 grid. Linear pieces keep the coefficients small, so
/// rounding stays far below the additivity tolerance.
fn perturbation(rng: &mut ChaCha8Rng, amp: f64) -> PiecewiseFn {
    let n = rng.gen_range(1..=4);
    let mut knots: Vec<f64> = rand::seq::index::sample(rng, 63, n - 1)
        .into_iter()
        .map(|c| (c + 1) as f64 / 64.0)
        .collect();
    knots.sort_by(f64::total_cmp);
    knots.insert(0, 0.0);
    knots.push(1.0);
    let values: Vec<f64> = knots.iter().map(|_| amp * rng.gen_range(-1.0..=1.0)).collect();
    let pieces = knots
        .windows(2)
        .zip(values.windows(2))
        .map(|(x, v)| {
            let slope = (v[1] - v[0]) / (x[1] - x[0]);
            Poly::new(vec![v[0] - slope * x[0], slope])
        })
        .collect();
    PiecewiseFn::new(knots, pieces, Vec::new()).expect("knots are increasing")
}

/// Adds `f` to entry `(0, t)` of the uniform classification, balancing rows
/// and columns through the partner entries.
fn shifted_profile(shape: Shape, t: usize, (j2, t2): (usize, usize), f: &PiecewiseFn) -> Option<Profile> {
    let base = uniform_point(shape);
    let mut entries = Profile::constant(&base).entries().to_vec();
    let add = |e: &PiecewiseFn, a: f64| PiecewiseFn::linear_combine(1.0, e, a, f);
    entries[0][t] = add(&entries[0][t], 1.0);
    entries[j2][t2] = add(&entries[j2][t2], 1.0);
    entries[0][t2] = add(&entries[0][t2], -1.0);
    entries[j2][t] = add(&entries[j2][t], -1.0);
    let c = Profile::new(entries).ok()?;
    crate::classification::validate_profile(&c).ok().map(|_| c)
}

/// Checks that the response of entry `(0, t)` to perturbations of that entry
/// is additive: `resp(f + g) = resp(f) + resp(g)`, where `resp(f)` is the
/// change of the answer when `f` is added to the entry of the uniform
/// classification. Perturbations have sup norm at most `ε = 1/(2m)`. The first
/// probe uses the constants `f = g = ε`.
pub fn additivity_probe(alpha: &dyn Fcaf, seed: u64, n: usize, shape: Option<Shape>) -> Result<AdditivityReport> {
    let shape = shape.or_else(|| alpha.shape_hint()).unwrap_or(DEFAULT_SHAPE);
    let eps = 1.0 / (2.0 * shape.m as f64);
    let base = alpha.aggregate(&Profile::constant(&uniform_point(shape)))?;
    let mut report = AdditivityReport {
        aggregator: alpha.name(),
        shape,
        probes: 0,
        skipped: 0,
        epsilon: eps,
        max_deviation: 0.0,
        witness: None,
    };
    for k in 0..n {
        let t = k % shape.p;
        let partner = (1, (t + 1) % shape.p);
        let (f, g) = if k == 0 {
            (PiecewiseFn::constant(eps), PiecewiseFn::constant(eps))
        } else {
            let mut rng = rng::stream(seed, "additivity", k as u64);
            (perturbation(&mut rng, eps), perturbation(&mut rng, eps))
        };
        let fg = PiecewiseFn::linear_combine(1.0, &f, 1.0, &g);
        let profiles: Option<Vec<Profile>> = [&f, &g, &fg]
            .iter()
            .map(|h| shifted_profile(shape, t, partner, h))
            .collect();
        let Some(profiles) = profiles else {
            report.skipped += 1;
            continue;
        };
        report.probes += 1;
        let resp = |c: &Profile| -> Result<f64> { Ok(alpha.aggregate(c)?.get(0, t) - base.get(0, t)) };
        let (rf, rg, rfg) = (resp(&profiles[0])?, resp(&profiles[1])?, resp(&profiles[2])?);
        let deviation = (rfg - rf - rg).abs();
        if report.witness.is_none() || deviation > report.max_deviation {
            report.max_deviation = deviation;
            report.witness = Some(AdditivityWitness {
                object: 0,
                ty: t,
                partner,
                f,
                g,
                resp_f: rf,
                resp_g: rg,
                resp_fg: rfg,
                deviation,
            });
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HTable {
    pub aggregator: String,
    /// `u_k = a_k - 1/2` with `a_k = k / (grid_n - 1)`.
    pub u: Vec<f64>,
    pub h: Vec<f64>,
    /// `max |ĥ(u) + ĥ(-u)|` over the grid.
    pub odd_deviation: f64,
    /// `max(|ĥ(1/2) - 1/2|, |ĥ(-1/2) + 1/2|)`.
    pub endpoint_deviation: f64,
}

impl HTable {
    pub fn is_odd(&self, tol: f64) -> bool {
        self.odd_deviation <= tol && self.endpoint_deviation <= tol
    }
}

/// Tabulates `ĥ(a - 1/2) = α(c_a)(x_0)_0 - 1/2` on constant 2x2 profiles
/// `c_a = [[a, 1 - a], [1 - a, a]]`. Refuses aggregators failing the symmetry
/// or zero-unanimity suite, since `h` exists only for those.
pub fn extract_h(alpha: &dyn Fcaf, grid_n: usize, suite: &SuiteConfig) -> Result<HTable> {
    let shape = Shape { m: 2, p: 2 };
    if grid_n < 2 {
        return Err(Error::argument("grid_n must be at least 2"));
    }
    let cfg = SuiteConfig { shape: Some(shape), ..*suite };
    for report in [check_symmetry(alpha, &cfg)?, check_zero_unanimity(alpha, &cfg)?] {
        if !report.passed() {
            return Err(Error::Precondition(format!(
                "{} fails {} after {} probes; h is only defined for aggregators with symmetry and zero unanimity",
                alpha.name(),
                report.axiom,
                report.probes
            )));
        }
    }
    let n = grid_n;
    let mut u = Vec::with_capacity(n);
    let mut h = Vec::with_capacity(n);
    for k in 0..n {
        let a = k as f64 / (n - 1) as f64;
        let c = ClassPoint::from_rows(vec![vec![a, 1.0 - a], vec![1.0 - a, a]])?;
        u.push(a - 0.5);
        h.push(alpha.aggregate(&Profile::constant(&c))?.get(0, 0) - 0.5);
    }
    let odd_deviation = (0..n).map(|k| (h[k] + h[n - 1 - k]).abs()).fold(0.0, f64::max);
    let endpoint_deviation = (h[n - 1] - 0.5).abs().max((h[0] + 0.5).abs());
    Ok(HTable {
        aggregator: alpha.name(),
        u,
        h,
        odd_deviation,
        endpoint_deviation,
    })
}

/// Exact answer of the `3 i^2` weighted mean on the worked example.
pub const EXAMPLE1_EXPECTED: [[f64; 3]; 6] = [
    [1.0 / 2.0, 1.0 / 3.0, 1.0 / 6.0],
    [1.0 / 20.0, 9.0 / 20.0, 1.0 / 2.0],
    [0.0, 1.0, 0.0],
    [1.0, 0.0, 0.0],
    [0.0, 1.0, 0.0],
    [0.0, 0.0, 1.0],
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveSample {
    pub i: f64,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub object: usize,
    pub samples: Vec<CurveSample>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example1Report {
    pub aggregator: String,
    pub table: ClassPoint,
    pub deviations: Vec<Vec<f64>>,
    pub max_deviation: f64,
    /// Entry functions of objects 0 and 1 sampled on `[0, 1]`.
    pub curves: Vec<Curve>,
}

/// Samples every entry of object `j` at `n` evenly spaced individuals.
pub fn curve(c: &Profile, j: usize, n: usize) -> Curve {
    let samples = (0..n)
        .map(|k| {
            let i = k as f64 / (n - 1).max(1) as f64;
            CurveSample { i, values: c.row(j).iter().map(|f| f.value_at(i)).collect() }
        })
        .collect();
    Curve { object: j, samples }
}

/// The worked example aggregated by `alpha`, compared with the exact table of
/// the `3 i^2` weighted mean.
pub fn example1_report_with(alpha: &dyn Fcaf, curve_samples: usize) -> Result<Example1Report> {
    let c = example1_profile();
    let table = alpha.aggregate(&c)?;
    let deviations: Vec<Vec<f64>> = EXAMPLE1_EXPECTED
        .iter()
        .zip(table.rows())
        .map(|(e, r)| e.iter().zip(r).map(|(x, y)| (y - x).abs()).collect())
        .collect();
    let max_deviation = deviations.iter().flatten().copied().fold(0.0, f64::max);
    Ok(Example1Report {
        aggregator: alpha.name(),
        table,
        deviations,
        max_deviation,
        curves: vec![curve(&c, 0, curve_samples), curve(&c, 1, curve_samples)],
    })
}

pub fn example1_report() -> Example1Report {
    example1_report_with(&WeightedMean::new(cubic_weight_measure()), 101)
        .expect("weighted means accept every 6x3 profile")
}
