//! The response of one entry to perturbations of that entry is additive for
//! weighted means and fails to be for the cube aggregator, which nevertheless
//! passes symmetry and zero unanimity: with two objects the class of
//! admissible aggregators is strictly larger.

use fuzzy_agg::aggregators::{cubic_weight_measure, Fcaf, OddHMean, OddVariant, WeightedMean};
use fuzzy_agg::axioms::{check_symmetry, check_zero_unanimity, SuiteConfig};
use fuzzy_agg::harness::additivity_probe;
use fuzzy_agg::Measure;

fn main() -> fuzzy_agg::Result<()> {
    let cube = OddHMean::new(OddVariant::Cube, Measure::lebesgue());
    let aggregators: [&dyn Fcaf; 3] = [
        &WeightedMean::new(Measure::lebesgue()),
        &WeightedMean::new(cubic_weight_measure()),
        &cube,
    ];
    for alpha in aggregators {
        let r = additivity_probe(alpha, 7, 50, None)?;
        println!("{:<26} {}  max deviation {:.3e} over {} probes", r.aggregator, r.shape, r.max_deviation, r.probes);
    }

    let cfg = SuiteConfig::default();
    println!(
        "cube: symmetry {}, zero unanimity {}",
        check_symmetry(&cube, &cfg)?.passed(),
        check_zero_unanimity(&cube, &cfg)?.passed()
    );
    let w = additivity_probe(&cube, 7, 1, None)?.witness.expect("one probe ran");
    println!("resp(f) = {}, resp(g) = {}, resp(f+g) = {}", w.resp_f, w.resp_g, w.resp_fg);
    Ok(())
}
