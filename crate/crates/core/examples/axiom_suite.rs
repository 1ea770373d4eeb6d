//! Runs the eight axiom suites on a few aggregators, pointwise and with
//! probes that differ only on null sets.

use fuzzy_agg::aggregators::{cubic_weight_measure, dictator, Fcaf, OddHMean, OddVariant, WeightedMean};
use fuzzy_agg::axioms::{run_suite, ProbeKind, SuiteConfig};
use fuzzy_agg::Measure;

fn main() -> fuzzy_agg::Result<()> {
    let aggregators: Vec<Box<dyn Fcaf>> = vec![
        Box::new(WeightedMean::new(Measure::lebesgue())),
        Box::new(WeightedMean::new(cubic_weight_measure())),
        Box::new(dictator(0.3)?),
        Box::new(OddHMean::new(OddVariant::Cube, Measure::lebesgue())),
    ];
    for kind in [ProbeKind::Pointwise, ProbeKind::AlmostEverywhere] {
        println!("== {kind:?}");
        let cfg = SuiteConfig { kind, ..SuiteConfig::default() };
        for alpha in &aggregators {
            let suite = run_suite(alpha.as_ref(), &cfg)?;
            let verdicts: Vec<String> = suite
                .reports
                .iter()
                .map(|r| format!("{}={}", r.axiom, if r.passed() { "pass" } else { "FAIL" }))
                .collect();
            println!("{:<26} {}  {}", suite.aggregator, suite.shape, verdicts.join(" "));
        }
    }

    // a failing suite carries a witness that can be replayed
    let suite = run_suite(&dictator(0.3)?, &SuiteConfig::default())?;
    let nd = suite.get(fuzzy_agg::Axiom::NonDictatorship).expect("all eight run");
    let w = nd.witness.as_ref().expect("a dictator fails non-dictatorship");
    println!("dictator witness: {:?}, reproduces: {}", w.check, w.still_violates(&dictator(0.3)?, 1e-9)?);
    Ok(())
}
