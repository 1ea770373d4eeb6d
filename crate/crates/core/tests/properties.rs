use fuzzy_agg::aggregators::{dictator, gallery, WeightedMean};
use fuzzy_agg::axioms::{run_suite, SuiteConfig};
use fuzzy_agg::classification::{indicator_probe_profile, random_profile, validate_profile};
use fuzzy_agg::harness::{extract_measure, ExtractConfig};
use fuzzy_agg::measure::PointMass;
use fuzzy_agg::{Fcaf, IntervalSet, Measure, PiecewiseFn, Poly, Shape};
use proptest::prelude::*;

/// Cut points on the 1/32 grid, strictly inside (0, 1).
fn arb_cuts() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::btree_set(1u32..32, 0..4)
        .prop_map(|s| s.into_iter().map(|k| k as f64 / 32.0).collect())
}

fn arb_fn() -> impl Strategy<Value = PiecewiseFn> {
    (arb_cuts(), proptest::collection::vec(proptest::collection::vec(-1.0..1.0f64, 1..4), 5))
        .prop_flat_map(|(cuts, coeffs)| {
            let n = cuts.len() + 1;
            let mut bp = vec![0.0];
            bp.extend(cuts);
            bp.push(1.0);
            let pieces: Vec<Poly> = coeffs.into_iter().take(n).map(Poly::new).collect();
            let f = PiecewiseFn::new(bp, pieces, Vec::new()).unwrap();
            proptest::collection::vec((0u32..=64, -2.0..2.0f64), 0..3).prop_map(move |atoms| {
                atoms.into_iter().fold(f.clone(), |g, (k, v)| g.with_atom(k as f64 / 64.0, v).unwrap())
            })
        })
}

fn arb_measure() -> impl Strategy<Value = Measure> {
    (
        arb_cuts(),
        proptest::collection::vec(0.1..2.0f64, 5),
        proptest::collection::btree_map(0u32..=64, 0.05..1.0f64, 0..3),
        0.0..1.0f64,
    )
        .prop_map(|(cuts, heights, atoms, atom_share)| {
            let mut bp = vec![0.0];
            bp.extend(cuts);
            bp.push(1.0);
            let heights = &heights[..bp.len() - 1];
            let share = if atoms.is_empty() { 0.0 } else { atom_share };
            let area: f64 = bp.windows(2).zip(heights).map(|(w, h)| (w[1] - w[0]) * h).sum();
            let values: Vec<f64> = heights.iter().map(|h| h * (1.0 - share) / area).collect();
            let weight: f64 = atoms.values().sum();
            let masses = atoms
                .iter()
                .map(|(&k, &w)| PointMass { point: k as f64 / 64.0, mass: share * w / weight })
                .collect();
            Measure::new(PiecewiseFn::step(bp, &values).unwrap(), masses).unwrap()
        })
}

fn arb_shape() -> impl Strategy<Value = Shape> {
    (2usize..=4).prop_flat_map(|p| (p..=p + 3).prop_map(move |m| Shape::new(m, p).unwrap()))
}

fn sample_points(f: &PiecewiseFn) -> Vec<f64> {
    let mut xs: Vec<f64> = (0..=40).map(|k| k as f64 / 40.0 + 0.003 * (k % 3) as f64).filter(|x| *x <= 1.0).collect();
    xs.extend(f.atoms().iter().map(|a| a.point));
    xs.extend(f.breakpoints());
    xs
}

proptest! {
    #[test]
    fn linear_combine_is_pointwise(f in arb_fn(), g in arb_fn(), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let h = PiecewiseFn::linear_combine(a, &f, b, &g);
        let mut xs = sample_points(&f);
        xs.extend(sample_points(&g));
        for x in xs {
            let want = a * f.eval(x).unwrap() + b * g.eval(x).unwrap();
            prop_assert!((h.eval(x).unwrap() - want).abs() <= 1e-12, "at {x}");
        }
    }

    #[test]
    fn ae_equal_is_an_equivalence(f in arb_fn(), k in 0u32..=64, v in -5.0..5.0f64, w in -5.0..5.0f64) {
        let g = f.clone().with_atom(k as f64 / 64.0, v).unwrap();
        let h = f.without_atoms().with_atom(0.5, w).unwrap();
        prop_assert!(f.ae_equal(&f, 0.0));
        prop_assert_eq!(f.ae_equal(&g, 0.0), g.ae_equal(&f, 0.0));
        prop_assert!(f.ae_equal(&g, 0.0) && g.ae_equal(&h, 0.0) && f.ae_equal(&h, 0.0));
    }

    #[test]
    fn atoms_leave_essential_bounds_alone(f in arb_fn(), atoms in proptest::collection::vec((0u32..=64, -9.0..9.0f64), 1..4)) {
        let g = atoms.iter().fold(f.clone(), |g, &(k, v)| g.with_atom(k as f64 / 64.0, v).unwrap());
        prop_assert_eq!(f.ess_bounds(), g.ess_bounds());
    }

    #[test]
    fn swap_blocks_preserves_the_lebesgue_integral(f in arb_fn(), start in 0u32..16, len in 1u32..8, gap in 1u32..8) {
        let (start, len) = (start as f64 / 32.0, len as f64 / 32.0);
        let shift = len + gap as f64 / 32.0;
        prop_assume!(start + shift + len <= 1.0);
        let lambda = Measure::lebesgue();
        let g = f.swap_blocks(start, len, shift).unwrap();
        prop_assert!((lambda.integrate(&f) - lambda.integrate(&g)).abs() <= 1e-9);
    }

    #[test]
    fn integrate_is_linear_and_normalized(mu in arb_measure(), f in arb_fn(), g in arb_fn(), a in -2.0..2.0f64, b in -2.0..2.0f64) {
        let lhs = mu.integrate(&PiecewiseFn::linear_combine(a, &f, b, &g));
        let rhs = a * mu.integrate(&f) + b * mu.integrate(&g);
        prop_assert!((lhs - rhs).abs() <= 1e-12, "{lhs} vs {rhs}");
        prop_assert!((mu.integrate(&PiecewiseFn::constant(1.0)) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn integrate_is_monotone(mu in arb_measure(), f in arb_fn(), g in arb_fn()) {
        // f + g^2 >= f everywhere, atoms included
        let sq = {
            let mut pieces = Vec::new();
            for p in g.without_atoms().pieces() {
                pieces.push(p.mul(p));
            }
            PiecewiseFn::new(g.breakpoints().to_vec(), pieces, Vec::new()).unwrap()
        };
        let upper = PiecewiseFn::linear_combine(1.0, &f, 1.0, &sq);
        prop_assert!(mu.integrate(&f) <= mu.integrate(&upper) + 1e-12);
    }

    #[test]
    fn cdf_is_monotone_and_starts_at_the_mass_at_zero(mu in arb_measure()) {
        let values: Vec<f64> = (0..=64).map(|k| mu.cdf(k as f64 / 64.0).unwrap()).collect();
        prop_assert!(values.windows(2).all(|w| w[1] >= w[0] - 1e-15));
        let at_zero = mu.masses().iter().filter(|m| m.point == 0.0).map(|m| m.mass).sum::<f64>();
        prop_assert_eq!(values[0], at_zero);
        prop_assert!((values[64] - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn density_integrals_ignore_null_sets(mu in arb_measure(), f in arb_fn(), k in 0u32..=64, v in -3.0..3.0f64) {
        let density_only = Measure::with_density(mu.density().clone()).ok();
        prop_assume!(density_only.is_some());
        let nu = density_only.unwrap();
        let g = f.clone().with_atom(k as f64 / 64.0, v).unwrap();
        prop_assert!((nu.integrate(&f) - nu.integrate(&g)).abs() <= 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn random_profiles_are_valid(seed in any::<u64>(), shape in arb_shape(), pieces in 1usize..5, amp in 0.0..1.0f64) {
        let c = random_profile(seed, shape.m, shape.p, pieces, amp).unwrap();
        prop_assert!(validate_profile(&c).is_ok());
        if shape.m == shape.p {
            for t in 0..shape.p {
                prop_assert!(c.column_sum(t).ae_equal(&PiecewiseFn::constant(1.0), 1e-9));
            }
        }
    }

    #[test]
    fn indicator_probes_split_the_unit_rows(shape in arb_shape(), t in 1usize..4, k in 0u32..=32) {
        prop_assume!(t < shape.p);
        let x = k as f64 / 32.0;
        let j = IntervalSet::prefix(x).unwrap();
        let rest = IntervalSet::new(if x < 1.0 { vec![(x, 1.0)] } else { vec![] }).unwrap();
        let a = indicator_probe_profile(shape.m, shape.p, t, &j).unwrap();
        let b = indicator_probe_profile(shape.m, shape.p, t, &rest).unwrap();
        prop_assert!(validate_profile(&a).is_ok() && validate_profile(&b).is_ok());
        // a.e.: the shared endpoint x sits in both sets
        for s in 0..shape.p {
            let sum = PiecewiseFn::linear_combine(1.0, a.entry(0, s), 1.0, b.entry(0, s));
            let want = (s == 0) as u8 as f64 + (s == t) as u8 as f64;
            prop_assert!(sum.ae_equal(&PiecewiseFn::constant(want), 1e-12), "type {s}");
        }
    }

    #[test]
    fn weighted_means_answer_with_classifications(mu in arb_measure(), seed in any::<u64>(), shape in arb_shape()) {
        let c = random_profile(seed, shape.m, shape.p, 3, 0.5).unwrap();
        let out = WeightedMean::new(mu).aggregate(&c).unwrap();
        prop_assert!(out.validate().is_ok());
        for j in 0..shape.m {
            prop_assert!((out.row(j).iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        }
        for t in 0..shape.p {
            prop_assert!(out.column_sum(t) >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn dictators_are_dirac_means(k in 0u32..=64, seed in any::<u64>(), shape in arb_shape()) {
        let i = k as f64 / 64.0;
        let c = random_profile(seed, shape.m, shape.p, 3, 0.5).unwrap();
        let a = dictator(i).unwrap().aggregate(&c).unwrap();
        let b = WeightedMean::new(Measure::dirac(i).unwrap()).aggregate(&c).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn shipped_aggregators_answer_with_classifications(seed in any::<u64>()) {
        for spec in gallery() {
            let alpha = spec.build().unwrap();
            let shape = alpha.shape_hint().unwrap_or(Shape { m: 6, p: 3 });
            let c = random_profile(seed, shape.m, shape.p, 3, 0.6).unwrap();
            let out = alpha.aggregate(&c).unwrap();
            prop_assert!(out.validate().is_ok(), "{}", alpha.name());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn suites_are_deterministic_and_witnesses_replay(seed in any::<u64>(), which in 0usize..12) {
        let alpha = gallery()[which].build().unwrap();
        let cfg = SuiteConfig { seed, probes: 8, ..SuiteConfig::default() };
        let a = run_suite(alpha.as_ref(), &cfg).unwrap();
        let b = run_suite(alpha.as_ref(), &cfg).unwrap();
        prop_assert_eq!(&a, &b);
        for r in &a.reports {
            prop_assert!(r.probes >= 1);
            if let Some(w) = &r.witness {
                prop_assert!(w.still_violates(alpha.as_ref(), cfg.tol).unwrap(), "{} {}", a.aggregator, r.axiom);
            }
        }
    }

    #[test]
    fn extraction_round_trips(mu in arb_measure(), seed in any::<u64>()) {
        let cfg = ExtractConfig { seed, validation_n: 20, ..ExtractConfig::default() };
        let r = extract_measure(&WeightedMean::new(mu.clone()), &cfg).unwrap();
        for (k, &x) in r.grid.iter().enumerate() {
            for c in &r.cdf_values {
                prop_assert!((c.values[k] - mu.cdf(x).unwrap()).abs() <= 1e-9);
            }
        }
        prop_assert!(r.monotonicity_defect <= 1e-9);
        prop_assert!(r.max_type_deviation <= 1e-9);
        prop_assert!(r.match_deviation <= 1e-9, "{}", r.match_deviation);
    }
}
