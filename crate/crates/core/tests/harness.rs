use fuzzy_agg::aggregators::{
    cubic_weight_measure, dictator, gallery, OddHMean, OddVariant, PerTypeMean, SplitDictator, SwappedDictator,
    WeightedMean,
};
use fuzzy_agg::axioms::{check_independence, check_optimality, check_zero_unanimity, SuiteConfig};
use fuzzy_agg::harness::{
    additivity_probe, consistency_check, example1_report, extract_h, extract_measure, match_deviation, ExtractConfig,
};
use fuzzy_agg::classification::indicator_probe_profile;
use fuzzy_agg::measure::PointMass;
use fuzzy_agg::{ClassPoint, Error, Fcaf, IntervalSet, Measure, Profile, Shape};

fn grid_index(r: &fuzzy_agg::harness::ExtractionResult, x: f64) -> usize {
    r.grid.iter().position(|&g| (g - x).abs() < 1e-15).expect("grid point")
}

fn malicious() -> PerTypeMean {
    PerTypeMean::new(vec![Measure::lebesgue(), Measure::dirac(0.0).unwrap()]).unwrap()
}

#[test]
fn cubic_weight_cdf_at_one_half() {
    let r = extract_measure(&WeightedMean::new(cubic_weight_measure()), &ExtractConfig::default()).unwrap();
    assert_eq!(r.grid.len(), 21);
    let k = grid_index(&r, 0.5);
    // ∫_0^x 3i^2 di = x^3
    for t in [1, 2] {
        assert!((r.cdf(t, k).unwrap() - 0.5f64.powi(3)).abs() <= 1e-12);
    }
    for (k, &x) in r.grid.iter().enumerate() {
        assert!((r.cdf(1, k).unwrap() - x.powi(3)).abs() <= 1e-12, "x = {x}");
    }
    assert!(r.detected_atoms.is_empty());
}

#[test]
fn dictator_extraction_finds_a_unit_atom_at_its_individual() {
    let r = extract_measure(&dictator(0.3).unwrap(), &ExtractConfig::default()).unwrap();
    assert_eq!(r.detected_atoms, vec![PointMass { point: 0.3, mass: 1.0 }]);
    let k = grid_index(&r, 0.3);
    assert_eq!(r.cdf(1, k - 1), Some(0.0));
    assert_eq!(r.cdf(1, k), Some(1.0));
}

#[test]
fn mixture_cdf_at_the_atom() {
    let mu = Measure::mixture(&Measure::lebesgue(), &Measure::dirac(0.7).unwrap(), 0.5).unwrap();
    let r = extract_measure(&WeightedMean::new(mu), &ExtractConfig::default()).unwrap();
    let k = grid_index(&r, 0.7);
    assert!((r.cdf(1, k).unwrap() - (0.5 * 0.7 + 0.5)).abs() <= 1e-12);
    assert_eq!(r.detected_atoms.len(), 1);
    assert_eq!(r.detected_atoms[0].point, 0.7);
    assert!((r.detected_atoms[0].mass - 0.5).abs() <= 1e-12);
}

#[test]
fn weighted_means_are_type_consistent() {
    for mu in [Measure::lebesgue(), cubic_weight_measure(), Measure::dirac(0.3).unwrap()] {
        let r = extract_measure(&WeightedMean::new(mu), &ExtractConfig::default()).unwrap();
        assert!(consistency_check(&r, 1e-9));
        assert!(!r.single_type);
    }
}

#[test]
fn lebesgue_against_dirac_types_disagree() {
    let r = extract_measure(&malicious(), &ExtractConfig::default()).unwrap();
    assert!(!consistency_check(&r, 1e-9));
    // |λ([0, 1/2]) - δ_0([0, 1/2])|
    let k = grid_index(&r, 0.5);
    assert!(((r.cdf(1, k).unwrap() - r.cdf(2, k).unwrap()).abs() - 0.5).abs() <= 1e-12);
    // the largest gap sits at x = 0, where δ_0 already has all its mass
    assert_eq!(r.max_type_deviation, 1.0);
    assert_eq!(r.type_deviation_at, Some(0.0));
}

#[test]
fn two_types_give_a_single_probe_type() {
    let cfg = ExtractConfig { shape: Some(Shape::new(4, 2).unwrap()), ..ExtractConfig::default() };
    let r = extract_measure(&WeightedMean::new(cubic_weight_measure()), &cfg).unwrap();
    assert!(r.single_type);
    assert_eq!(r.cdf_values.len(), 1);
    assert!(consistency_check(&r, 1e-9));
    assert!(r.match_deviation <= 1e-9);
}

#[test]
fn extraction_needs_three_objects() {
    let cfg = ExtractConfig { shape: Some(Shape::new(2, 2).unwrap()), ..ExtractConfig::default() };
    let err = extract_measure(&WeightedMean::new(Measure::lebesgue()), &cfg).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)), "{err}");
}

struct OffByAQuarter;

impl Fcaf for OffByAQuarter {
    fn name(&self) -> String {
        "off_by_a_quarter".into()
    }

    fn aggregate(&self, c: &Profile) -> fuzzy_agg::Result<ClassPoint> {
        let mut rows = c.at(0.0)?.rows().to_vec();
        rows[0][0] += 0.25;
        ClassPoint::from_rows(rows)
    }

    fn claimed_axioms(&self) -> std::collections::BTreeSet<fuzzy_agg::Axiom> {
        Default::default()
    }
}

#[test]
fn invalid_answers_are_protocol_errors_naming_the_probe() {
    match extract_measure(&OffByAQuarter, &ExtractConfig::default()) {
        Err(Error::Protocol { probe, .. }) => assert_eq!(probe, "type 1, J = [0, 0]"),
        other => panic!("expected a protocol error, got {other:?}"),
    }
}

#[test]
fn weighted_means_and_dictators_are_additive() {
    let lambda = Measure::lebesgue();
    let mixture = Measure::mixture(&lambda, &Measure::dirac(0.7).unwrap(), 0.5).unwrap();
    let alphas = [
        WeightedMean::new(lambda),
        WeightedMean::new(cubic_weight_measure()),
        WeightedMean::new(mixture),
        dictator(0.0).unwrap(),
        dictator(0.3).unwrap(),
    ];
    for alpha in &alphas {
        let r = additivity_probe(alpha, 11, 50, None).unwrap();
        assert_eq!(r.probes + r.skipped, 50);
        assert!(r.max_deviation <= 1e-12, "{}: {}", alpha.name(), r.max_deviation);
    }
}

#[test]
fn cube_response_is_not_additive() {
    let r = additivity_probe(&OddHMean::new(OddVariant::Cube, Measure::lebesgue()), 11, 50, None).unwrap();
    assert_eq!(r.shape, Shape::new(2, 2).unwrap());
    assert_eq!(r.epsilon, 0.25);
    // constant shifts ε and 2ε of a centred entry: (1/2)(2ε)^3 twice against (1/2)(4ε)^3
    let e: f64 = 0.25;
    let expected = 0.5 * (4.0 * e).powi(3) - 2.0 * 0.5 * (2.0 * e).powi(3);
    assert!((r.max_deviation - expected).abs() <= 1e-12, "{}", r.max_deviation);
    let w = r.witness.unwrap();
    assert!(w.deviation >= 0.05);
    assert!((w.resp_fg - w.resp_f - w.resp_g).abs() >= 0.05);
}

#[test]
fn h_tables() {
    let cfg = SuiteConfig::default();
    let linear = extract_h(&OddHMean::new(OddVariant::Linear, Measure::lebesgue()), 21, &cfg).unwrap();
    for (u, h) in linear.u.iter().zip(&linear.h) {
        assert!((h - u).abs() <= 1e-12);
    }
    let cube = extract_h(&OddHMean::new(OddVariant::Cube, Measure::lebesgue()), 21, &cfg).unwrap();
    let at = |u: f64| cube.u.iter().position(|&v| (v - u).abs() < 1e-12).map(|k| cube.h[k]).unwrap();
    assert!((at(0.25) - 0.5 * 0.5f64.powi(3)).abs() <= 1e-12);
    assert_eq!(at(0.0), 0.0);
    assert_eq!(linear.h[10], 0.0);
}

#[test]
fn h_extraction_refuses_asymmetric_aggregators() {
    let err = extract_h(&SwappedDictator, 21, &SuiteConfig::default()).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)), "{err}");
}

#[test]
fn worked_example_rows() {
    let r = example1_report();
    let row = |j: usize| r.table.row(j).to_vec();
    let close = |a: Vec<f64>, b: [f64; 3]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12);
    assert!(close(row(1), [1.0 / 20.0, 9.0 / 20.0, 1.0 / 2.0]));
    assert!(close(row(5), [0.0, 0.0, 1.0]));
    for j in 0..6 {
        assert!((row(j).iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }
    assert_eq!(r.curves.len(), 2);
    assert_eq!(r.curves[0].object, 0);
}

/// Aggregators passing optimality, independence and zero unanimity yield
/// monotone CDFs ending at one.
#[test]
fn recovered_cdfs_of_conforming_boxes() {
    let cfg = SuiteConfig::default();
    let mut checked = 0;
    for spec in gallery() {
        let alpha = spec.build().unwrap();
        let shape = cfg.shape_for(alpha.as_ref());
        if shape.m < 3
            || !check_optimality(alpha.as_ref(), &cfg).unwrap().passed()
            || !check_independence(alpha.as_ref(), &cfg).unwrap().passed()
            || !check_zero_unanimity(alpha.as_ref(), &cfg).unwrap().passed()
        {
            continue;
        }
        checked += 1;
        let r = extract_measure(alpha.as_ref(), &ExtractConfig::default()).unwrap();
        assert!(r.monotonicity_defect <= 1e-9, "{}", alpha.name());
        for c in &r.cdf_values {
            assert!((c.values.last().unwrap() - 1.0).abs() <= 1e-9, "{}", alpha.name());
        }
    }
    assert_eq!(checked, 5);
}

/// Without independence, optimality and zero unanimity do not make the
/// indicator readings a CDF: the split dictator reads individual 0 on `[0, 0]`
/// and individual 1 on every longer prefix.
#[test]
fn split_dictator_readings_are_not_a_cdf() {
    let cfg = SuiteConfig::default();
    let alpha = SplitDictator;
    assert!(check_optimality(&alpha, &cfg).unwrap().passed());
    assert!(check_zero_unanimity(&alpha, &cfg).unwrap().passed());
    let err = extract_measure(&alpha, &ExtractConfig::default()).unwrap_err();
    assert!(matches!(err, Error::Protocol { .. }), "{err}");
    let reading = |x: f64| {
        let c = indicator_probe_profile(6, 3, 1, &IntervalSet::prefix(x).unwrap()).unwrap();
        alpha.aggregate(&c).unwrap().get(0, 1)
    };
    assert_eq!((reading(0.0), reading(0.05), reading(0.95), reading(1.0)), (1.0, 0.0, 0.0, 1.0));
}

/// Whoever passes optimality, independence, zero unanimity and the additivity
/// probe is reproduced by its extracted weighted mean; whoever is not fails
/// one of those checks.
#[test]
fn passing_boxes_are_their_extracted_means() {
    let cfg = SuiteConfig::default();
    let mut reproduced = 0;
    for spec in gallery() {
        let alpha = spec.build().unwrap();
        let shape = cfg.shape_for(alpha.as_ref());
        if shape.m < 3 {
            continue;
        }
        let passes = check_optimality(alpha.as_ref(), &cfg).unwrap().passed()
            && check_independence(alpha.as_ref(), &cfg).unwrap().passed()
            && check_zero_unanimity(alpha.as_ref(), &cfg).unwrap().passed()
            && additivity_probe(alpha.as_ref(), cfg.seed, 50, None).unwrap().additive(1e-9);
        let matched = extract_measure(alpha.as_ref(), &ExtractConfig::default())
            .ok()
            .map(|r| {
                let mean = WeightedMean::new(r.reconstructed);
                match_deviation(alpha.as_ref(), &mean, shape, 99, 100).unwrap() <= 1e-6
            })
            .unwrap_or(false);
        if passes {
            assert!(matched, "{} passes every check but is not reproduced", alpha.name());
            reproduced += 1;
        }
        if !matched {
            assert!(!passes, "{}", alpha.name());
        }
    }
    assert_eq!(reproduced, 5);
}
