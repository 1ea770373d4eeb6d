//! Seeded falsifiers for the aggregation axioms.
//!
//! A checker draws a fixed family of probes, evaluates the aggregator on them
//! and reports `Pass` when no probe violates the axiom, or `Fail` with a
//! re-runnable [`Witness`]. A pass only means "no counterexample among the
//! probes"; reports carry the probe count.
//!
//! The axioms quantify over almost-everywhere agreement, which atom-sensitive
//! aggregators (dictators, measures with point masses) can tell apart from
//! pointwise agreement. Default suites use pointwise probes; the
//! [`ProbeKind::AlmostEverywhere`] suites plant function atoms at a few points
//! and are reported separately.

mod probes;
mod witness;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::aggregators::Fcaf;
use crate::classification::{Profile, Shape};
use crate::error::{Error, Result};
use probes::{Families, Probe};
pub(crate) use probes::separating_profile;
pub use witness::{Outcome, Witness, WitnessCheck};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Optimality,
    Independence,
    Symmetry,
    ZeroUnanimity,
    Unanimity,
    Coherence,
    NonDictatorship,
    Anonymity,
}

impl Axiom {
    pub const ALL: [Axiom; 8] = [
        Axiom::Optimality,
        Axiom::Independence,
        Axiom::Symmetry,
        Axiom::ZeroUnanimity,
        Axiom::Unanimity,
        Axiom::Coherence,
        Axiom::NonDictatorship,
        Axiom::Anonymity,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Axiom::Optimality => "optimality",
            Axiom::Independence => "independence",
            Axiom::Symmetry => "symmetry",
            Axiom::ZeroUnanimity => "zero_unanimity",
            Axiom::Unanimity => "unanimity",
            Axiom::Coherence => "coherence",
            Axiom::NonDictatorship => "non_dictatorship",
            Axiom::Anonymity => "anonymity",
        }
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// `(stronger, weaker)`: every aggregator satisfying the first satisfies the second.
pub const IMPLICATIONS: [(Axiom, Axiom); 4] = [
    (Axiom::Symmetry, Axiom::Independence),
    (Axiom::Coherence, Axiom::Unanimity),
    (Axiom::Unanimity, Axiom::ZeroUnanimity),
    (Axiom::Anonymity, Axiom::NonDictatorship),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    /// Probe profiles agree (or are constant) at every individual.
    #[default]
    Pointwise,
    /// Probe profiles agree only up to atoms planted at a few individuals.
    AlmostEverywhere,
}

/// Shape used when neither the configuration nor the aggregator names one.
pub const DEFAULT_SHAPE: Shape = Shape { m: 6, p: 3 };
pub const DEFAULT_SEED: u64 = 20_190_715;
pub const DEFAULT_PROBES: usize = 50;
pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_GRID_N: usize = 64;

/// Separating profiles evaluated by the non-dictatorship checker.
const SEPARATING_PROBES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub probes: usize,
    pub tol: f64,
    pub grid_n: usize,
    pub shape: Option<Shape>,
    pub kind: ProbeKind,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: DEFAULT_SEED,
            probes: DEFAULT_PROBES,
            tol: DEFAULT_TOL,
            grid_n: DEFAULT_GRID_N,
            shape: None,
            kind: ProbeKind::Pointwise,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.probes == 0 || !(self.tol > 0.0) || self.grid_n < 2 {
            return Err(Error::argument(format!(
                "need probes >= 1, tol > 0 and grid_n >= 2, got {}, {}, {}",
                self.probes, self.tol, self.grid_n
            )));
        }
        if let Some(s) = self.shape {
            Shape::new(s.m, s.p)?;
        }
        Ok(())
    }

    /// The configured shape, else the aggregator's preferred one, else 6x3.
    pub fn shape_for(&self, alpha: &dyn Fcaf) -> Shape {
        self.shape.or_else(|| alpha.shape_hint()).unwrap_or(DEFAULT_SHAPE)
    }

    fn families(&self, alpha: &dyn Fcaf) -> Families {
        Families {
            shape: self.shape_for(alpha),
            seed: self.seed,
            kind: self.kind,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub axiom: Axiom,
    pub verdict: Verdict,
    /// Probes evaluated; a failing suite stops at its first witness.
    pub probes: usize,
    pub kind: ProbeKind,
    pub shape: Shape,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub witness: Option<Witness>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

fn report(axiom: Axiom, cfg: &SuiteConfig, shape: Shape, probes: usize, witness: Option<Witness>) -> AxiomReport {
    AxiomReport {
        axiom,
        verdict: if witness.is_some() { Verdict::Fail } else { Verdict::Pass },
        probes,
        kind: cfg.kind,
        shape,
        note: None,
        witness,
    }
}

fn run_probes(
    axiom: Axiom,
    alpha: &dyn Fcaf,
    cfg: &SuiteConfig,
    probes: impl IntoIterator<Item = Probe>,
) -> Result<AxiomReport> {
    let shape = cfg.shape_for(alpha);
    let mut count = 0;
    for probe in probes {
        count += 1;
        let outcome = probe.check.evaluate(alpha, &probe.profiles)?;
        if probe.check.violated(outcome.deviation, cfg.tol) {
            let w = Witness::new(probe.profiles, probe.check, outcome);
            return Ok(report(axiom, cfg, shape, count, Some(w)));
        }
    }
    Ok(report(axiom, cfg, shape, count, None))
}

/// Constant column sums `h` must be preserved.
pub fn check_optimality(alpha: &dyn Fcaf, cfg: &SuiteConfig) -> Result<AxiomReport> {
    let fam = cfg.families(alpha);
    run_probes(Axiom::Optimality, alpha, cfg, (0..cfg.probes).map(|k| fam.optimality(k)))
}

/// Profiles agreeing on one object's row must get the same answer there.
pub fn check_independence(alpha: &dyn Fcaf, cfg: &SuiteConfig) -> Result<AxiomReport> {
    let fam = cfg.families(alpha);
    run_probes(Axiom::Independence, alpha, cfg, (0..cfg.probes).map(|k| fam.independence(k)))
}

/// Row `x` of one profile equal to row `y` of another forces equal answers.
/// Starts with the independence probes (`x = y`).
pub fn check_symmetry(alpha: &dyn Fcaf, cfg: &SuiteConfig) -> Result<AxiomReport> {
    let fam = cfg.families(alpha);
    let probes = (0..cfg.probes)
        .map(|k| fam.independence(k))
        .chain((0..cfg.probes).map(|k| fam.relabelling(k)));
    run_probes(Axiom::Symmetry, alpha, cfg, probes)
}

/// An entry that is zero almost everywhere must aggregate to zero.
pub fn check_zero_unanimity(alpha: &dyn Fcaf, cfg: &SuiteConfig) -> Result<AxiomReport> {
    let fam = cfg.families(alpha);
    run_probes(Axiom::ZeroUnanimity, alpha, cfg, (0..cfg.probes).map(|k| fam.zero_unanimity(k)))
}

fn unanimity_probes(fam: Families, n: usize) -> impl Iterator<Item = Probe> {
    (0..n)
        .map(move |k| fam.zero_unanimity(k))
        .chain((0..n).map(move |k| fam.unanimity_extra(k)))
}

/// An entry constant `h` almost everywhere must aggregate to `h`. Starts with
/// the zero-unanimity probes.
pub fn check_unanimity(alpha: &dyn Fcaf, cfg: &SuiteConfig) -> Result<AxiomReport> {
    let fam = cfg.families(alpha);
    run_probes(Axiom::Unanimity, alpha, cfg, unanimity_probes(fam, cfg.probes))
}

/// Every answer entry lies within the essential range of its entry function.
/// Starts with the unanimity probes, where that range is a single value.
pub fn check_coherence(alpha: &dyn Fcaf, cfg: &SuiteConfig) -> Result<AxiomReport> {
    let fam = cfg.families(alpha);
    let shape = fam.shape;
    let profiles = unanimity_probes(fam, cfg.probes)
        .map(|p| p.profiles.into_iter().next().expect("one profile per probe"))
        .chain((0..cfg.probes).map(|k| fam.coherence_extra(k)));
    let mut count = 0;
    for c in profiles {
        count += 1;
        let out = alpha.aggregate(&c)?;
        let mut worst = (0.0, 0, 0);
        for j in 0..shape.m {
            for t in 0..shape.p {
                let (lo, hi) = c.entry(j, t).ess_bounds();
                let v = out.get(j, t);
                let d = (lo - v).max(v - hi).max(0.0);
                if d > worst.0 || d.is_nan() {
                    worst = (d, j, t);
                }
            }
        }
        if !(worst.0 <= cfg.tol) {
            let check = WitnessCheck::Bounds { object: worst.1, ty: worst.2 };
            let profiles = vec![c];
            let outcome = check.evaluate(alpha, &profiles)?;
            let w = Witness::new(profiles, check, outcome);
            return Ok(report(Axiom::Coherence, cfg, shape, count, Some(w)));
        }
    }
    Ok(report(Axiom::Coherence, cfg, shape, count, None))
}

/// Grid-relative: the individuals are split into `grid_n` cells and four
/// profiles that are constant on cells, with distinct classifications in
/// distinct cells, are aggregated. A cell whose classification matches the
/// answer on every profile is a dictator candidate; the check passes when no
/// cell is.
pub fn check_non_dictatorship(alpha: &dyn Fcaf, cfg: &SuiteConfig) -> Result<AxiomReport> {
    let shape = cfg.shape_for(alpha);
    let n = cfg.grid_n;
    let profiles: Vec<Profile> = (0..SEPARATING_PROBES)
        .map(|k| separating_profile(shape, cfg.seed, k, n))
        .collect();
    let outputs = profiles
        .iter()
        .map(|c| alpha.aggregate(c))
        .collect::<Result<Vec<_>>>()?;
    let mut best: Option<(f64, usize)> = None;
    for cell in 0..n {
        let mid = (cell as f64 + 0.5) / n as f64;
        let mut dev: f64 = 0.0;
        for (c, out) in profiles.iter().zip(&outputs) {
            dev = dev.max(out.max_abs_diff(&c.at(mid)?));
        }
        if dev <= cfg.tol && best.is_none_or(|(d, _)| dev < d) {
            best = Some((dev, cell));
        }
    }
    let witness = match best {
        Some((_, cell)) => {
            let check = WitnessCheck::Dictator {
                cell,
                lo: cell as f64 / n as f64,
                hi: (cell + 1) as f64 / n as f64,
            };
            let outcome = check.evaluate(alpha, &profiles)?;
            Some(Witness::new(profiles, check, outcome))
        }
        None => None,
    };
    let mut r = report(Axiom::NonDictatorship, cfg, shape, SEPARATING_PROBES, witness);
    r.note = Some(format!("grid-relative: {n} cells"));
    Ok(r)
}

/// Exchanging two disjoint blocks of individuals must not change the answer.
pub fn check_anonymity(alpha: &dyn Fcaf, cfg: &SuiteConfig) -> Result<AxiomReport> {
    let fam = cfg.families(alpha);
    let probes = (0..cfg.probes).map(|k| {
        let (c, start, len, shift) = fam.anonymity(k, cfg.grid_n);
        let swapped = c
            .swap_blocks(start, len, shift)
            .expect("probe blocks are disjoint and inside [0, 1]");
        Probe {
            profiles: vec![c, swapped],
            check: WitnessCheck::Whole,
        }
    });
    run_probes(Axiom::Anonymity, alpha, cfg, probes)
}

pub fn check(axiom: Axiom, alpha: &dyn Fcaf, cfg: &SuiteConfig) -> Result<AxiomReport> {
    match axiom {
        Axiom::Optimality => check_optimality(alpha, cfg),
        Axiom::Independence => check_independence(alpha, cfg),
        Axiom::Symmetry => check_symmetry(alpha, cfg),
        Axiom::ZeroUnanimity => check_zero_unanimity(alpha, cfg),
        Axiom::Unanimity => check_unanimity(alpha, cfg),
        Axiom::Coherence => check_coherence(alpha, cfg),
        Axiom::NonDictatorship => check_non_dictatorship(alpha, cfg),
        Axiom::Anonymity => check_anonymity(alpha, cfg),
    }
}

/// All eight checkers on one aggregator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub aggregator: String,
    pub shape: Shape,
    pub kind: ProbeKind,
    pub reports: Vec<AxiomReport>,
}

impl SuiteReport {
    pub fn get(&self, axiom: Axiom) -> Option<&AxiomReport> {
        self.reports.iter().find(|r| r.axiom == axiom)
    }

    pub fn passed(&self) -> BTreeSet<Axiom> {
        self.reports.iter().filter(|r| r.passed()).map(|r| r.axiom).collect()
    }

    pub fn total_probes(&self) -> usize {
        self.reports.iter().map(|r| r.probes).sum()
    }

    /// Implications `(stronger, weaker)` with the stronger axiom passing and
    /// the weaker one failing.
    pub fn implication_violations(&self) -> Vec<(Axiom, Axiom)> {
        let passed = self.passed();
        IMPLICATIONS
            .iter()
            .copied()
            .filter(|(s, w)| passed.contains(s) && !passed.contains(w))
            .collect()
    }
}

/// Runs the eight checkers; they share nothing and run on separate threads.
pub fn run_suite(alpha: &dyn Fcaf, cfg: &SuiteConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let reports = std::thread::scope(|s| {
        let handles: Vec<_> = Axiom::ALL
            .iter()
            .map(|&a| s.spawn(move || check(a, alpha, cfg)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("checker thread panicked"))
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(SuiteReport {
        aggregator: alpha.name(),
        shape: cfg.shape_for(alpha),
        kind: cfg.kind,
        reports,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImplicationRow {
    pub aggregator: String,
    pub passed: BTreeSet<Axiom>,
    pub violations: Vec<(Axiom, Axiom)>,
    pub probes: usize,
}

/// Runs every suite on every aggregator and lists implication violations.
pub fn implication_matrix(alphas: &[&dyn Fcaf], cfg: &SuiteConfig) -> Result<Vec<ImplicationRow>> {
    alphas
        .iter()
        .map(|&a| {
            let suite = run_suite(a, cfg)?;
            Ok(ImplicationRow {
                aggregator: suite.aggregator.clone(),
                passed: suite.passed(),
                violations: suite.implication_violations(),
                probes: suite.total_probes(),
            })
        })
        .collect()
}
