//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the verdict lines are always printed; exits non-zero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use fuzzy_agg::aggregators::{gallery, AggregatorSpec, Fcaf, OddHMean, OddVariant, WeightedMean};
use fuzzy_agg::axioms::{check_symmetry, check_zero_unanimity, implication_matrix, ProbeKind, SuiteConfig};
use fuzzy_agg::cli::{cmd_example1, counterexample_rows, RunConfig};
use fuzzy_agg::harness::{additivity_probe, consistency_check, extract_h, extract_measure, ExtractConfig};
use fuzzy_agg::{Measure, PiecewiseFn, Poly, Shape};

const TOL: f64 = 1e-9;

type Criterion = (&'static str, fn() -> Verdict);
type Hidden = (&'static str, Measure, fn(f64) -> f64);

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn worked_example() -> Verdict {
    let expected = [
        [1.0 / 2.0, 1.0 / 3.0, 1.0 / 6.0],
        [1.0 / 20.0, 9.0 / 20.0, 1.0 / 2.0],
        [0.0, 1.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
    ];
    let start = Instant::now();
    let out = cmd_example1(&RunConfig::default()).expect("example runs");
    let elapsed = start.elapsed();
    let report: serde_json::Value = serde_json::from_str(&out.report).unwrap();
    let mut dev: f64 = 0.0;
    for (j, row) in expected.iter().enumerate() {
        for (t, want) in row.iter().enumerate() {
            let got = report["table"]["values"][j][t].as_f64().unwrap();
            dev = dev.max((got - want).abs());
        }
    }
    verdict(
        out.code == 0 && dev <= TOL && elapsed < Duration::from_secs(1),
        format!("max deviation {dev:.1e}, exit {}, {:.3}s", out.code, elapsed.as_secs_f64()),
    )
}

fn counterexample_matrix() -> Verdict {
    let start = Instant::now();
    let rows = counterexample_rows(&SuiteConfig::default()).expect("suites run");
    let elapsed = start.elapsed();
    let summary: Vec<String> = rows
        .iter()
        .map(|r| {
            let failed: Vec<String> = r.failed.iter().map(|a| a.to_string()).collect();
            format!("{} breaks {} [fails {}]", r.aggregator, r.breaks, failed.join("+"))
        })
        .collect();
    verdict(
        rows.iter().all(|r| r.matches) && elapsed < Duration::from_secs(30),
        format!("{}; {:.2}s", summary.join("; "), elapsed.as_secs_f64()),
    )
}

fn implications() -> Verdict {
    let boxes: Vec<Box<dyn Fcaf>> = gallery().iter().map(|s| s.build().unwrap()).collect();
    let refs: Vec<&dyn Fcaf> = boxes.iter().map(|b| b.as_ref()).collect();
    let mut probes = 0;
    let mut violations = Vec::new();
    for kind in [ProbeKind::Pointwise, ProbeKind::AlmostEverywhere] {
        let cfg = SuiteConfig { kind, ..SuiteConfig::default() };
        for row in implication_matrix(&refs, &cfg).expect("suites run") {
            probes += row.probes;
            for (s, w) in row.violations {
                violations.push(format!("{} ({kind:?}): {s} without {w}", row.aggregator));
            }
        }
    }
    verdict(
        probes >= 1000 && violations.is_empty(),
        format!("{} aggregators, {probes} probes, violations: {violations:?}", refs.len()),
    )
}

fn hidden_measures() -> Vec<Hidden> {
    let lambda = Measure::lebesgue();
    let cubic = Measure::with_density(PiecewiseFn::polynomial(Poly::new(vec![0.0, 0.0, 3.0]))).unwrap();
    let two_piece = PiecewiseFn::step(vec![0.0, 0.25, 1.0], &[2.0, 2.0 / 3.0]).unwrap();
    vec![
        ("lebesgue", lambda.clone(), |x| x),
        ("3i^2", cubic, |x| x * x * x),
        ("dirac(0.3)", Measure::dirac(0.3).unwrap(), |x| if x >= 0.3 { 1.0 } else { 0.0 }),
        (
            "mixture",
            Measure::mixture(&lambda, &Measure::dirac(0.7).unwrap(), 0.5).unwrap(),
            |x| 0.5 * x + if x >= 0.7 { 0.5 } else { 0.0 },
        ),
        ("two-piece", Measure::with_density(two_piece).unwrap(), |x| {
            if x < 0.25 {
                2.0 * x
            } else {
                0.5 + (x - 0.25) * 2.0 / 3.0
            }
        }),
    ]
}

fn round_trip() -> Verdict {
    let cfg = ExtractConfig {
        grid_n: 21,
        validation_n: 100,
        shape: Some(Shape::new(6, 3).unwrap()),
        ..ExtractConfig::default()
    };
    let start = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for (label, mu, cdf) in hidden_measures() {
        let r = extract_measure(&WeightedMean::new(mu), &cfg).expect("extraction runs");
        let cdf_err = r
            .cdf_values
            .iter()
            .flat_map(|c| c.values.iter().zip(&r.grid).map(|(v, &x)| (v - cdf(x)).abs()))
            .fold(0.0, f64::max);
        let ok = cdf_err <= TOL && consistency_check(&r, TOL) && r.match_deviation <= TOL;
        pass &= ok;
        parts.push(format!(
            "{label}: cdf {cdf_err:.1e}, types {:.1e}, match {:.1e}",
            r.max_type_deviation, r.match_deviation
        ));
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(60);
    verdict(pass, format!("{}; {:.2}s", parts.join("; "), elapsed.as_secs_f64()))
}

fn boundary() -> Verdict {
    let mut means: Vec<WeightedMean> = hidden_measures().into_iter().map(|(_, mu, _)| WeightedMean::new(mu)).collect();
    for spec in gallery() {
        if let AggregatorSpec::WeightedMean { measure } = spec {
            means.push(WeightedMean::new(measure));
        }
    }
    let worst_mean = means
        .iter()
        .map(|a| additivity_probe(a, 20_190_715, 50, None).unwrap().max_deviation)
        .fold(0.0, f64::max);
    let cube = OddHMean::new(OddVariant::Cube, Measure::lebesgue());
    let cube_dev = additivity_probe(&cube, 20_190_715, 50, None).unwrap().max_deviation;
    let cfg = SuiteConfig::default();
    let sym = check_symmetry(&cube, &cfg).unwrap().passed();
    let zero = check_zero_unanimity(&cube, &cfg).unwrap().passed();
    verdict(
        worst_mean <= TOL && cube_dev >= 0.05 && sym && zero,
        format!(
            "{} weighted means: max {worst_mean:.1e}; cube: {cube_dev:.3}, symmetry {sym}, zero unanimity {zero}",
            means.len()
        ),
    )
}

fn odd_h() -> Verdict {
    let cube = OddHMean::new(OddVariant::Cube, Measure::lebesgue());
    let t = extract_h(&cube, 21, &SuiteConfig::default()).expect("cube qualifies");
    let n = t.h.len();
    let odd = (0..n).map(|k| (t.h[k] + t.h[n - 1 - k]).abs()).fold(0.0, f64::max);
    let closed = t
        .u
        .iter()
        .zip(&t.h)
        .map(|(u, h)| (h - 0.5 * (2.0 * u).powi(3)).abs())
        .fold(0.0, f64::max);
    let top = (t.h[n - 1] - 0.5).abs().max((t.h[0] + 0.5).abs());
    verdict(
        n == 21 && odd <= TOL && top <= TOL && closed <= TOL,
        format!("{n} points, oddness {odd:.1e}, endpoints {top:.1e}, closed form {closed:.1e}"),
    )
}

fn determinism() -> Verdict {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_fuzzy-agg");
    let runs: [&[&str]; 6] = [
        &["example1"],
        &["example1", "--output", "csv"],
        &["axioms", "--aggregator", r#"{"kind":"vertex_or_uniform"}"#, "--mode", "almost-everywhere"],
        &["extract", "--aggregator", r#"{"kind":"dictator","i":0.3}"#],
        &["extract", "--mode", "h", "--aggregator", r#"{"kind":"odd_h_mean","variant":"cube"}"#],
        &["counterexamples"],
    ];
    let mut differing = Vec::new();
    for (k, args) in runs.iter().enumerate() {
        let mut bodies = Vec::new();
        for rep in 0..2 {
            let path = dir.path().join(format!("run{k}-{rep}.out"));
            Command::new(bin)
                .args(*args)
                .args(["--seed", "7", "--out-path", path.to_str().unwrap()])
                .status()
                .expect("binary runs");
            bodies.push(std::fs::read(&path).expect("report written"));
        }
        if bodies[0] != bodies[1] || bodies[0].is_empty() {
            differing.push(args.join(" "));
        }
    }
    verdict(differing.is_empty(), format!("{} commands twice each; differing: {differing:?}", runs.len()))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("worked example golden table", worked_example),
        ("counterexample matrix", counterexample_matrix),
        ("axiom implications over the gallery", implications),
        ("measure round trip", round_trip),
        ("additivity boundary between m >= 3 and m = 2", boundary),
        ("odd h of the cube aggregator", odd_h),
        ("byte-identical reports", determinism),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        failed += usize::from(!v.pass);
        println!("criterion {} {name}: {} - {}", k + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
