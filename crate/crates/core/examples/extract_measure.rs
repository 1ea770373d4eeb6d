//! Treats weighted means as black boxes and reads their measures back through
//! indicator probes.

use fuzzy_agg::aggregators::{cubic_weight_measure, WeightedMean};
use fuzzy_agg::harness::{consistency_check, extract_measure, ExtractConfig};
use fuzzy_agg::{Measure, PiecewiseFn};

fn main() -> fuzzy_agg::Result<()> {
    let lambda = Measure::lebesgue();
    let hidden = [
        ("lebesgue", lambda.clone()),
        ("3i^2", cubic_weight_measure()),
        ("dirac(0.3)", Measure::dirac(0.3)?),
        ("0.5 lebesgue + 0.5 dirac(0.7)", Measure::mixture(&lambda, &Measure::dirac(0.7)?, 0.5)?),
        ("two-piece", Measure::with_density(PiecewiseFn::step(vec![0.0, 0.25, 1.0], &[2.0, 2.0 / 3.0])?)?),
    ];
    let cfg = ExtractConfig::default();
    for (label, mu) in hidden {
        let r = extract_measure(&WeightedMean::new(mu.clone()), &cfg)?;
        let cdf_err = r
            .grid
            .iter()
            .enumerate()
            .map(|(k, &x)| (r.cdf(1, k).unwrap() - mu.cdf(x).unwrap()).abs())
            .fold(0.0, f64::max);
        println!(
            "{label:<30} cdf error {cdf_err:.1e}  consistent {}  match {:.1e}  atoms {:?}  ({} queries)",
            consistency_check(&r, 1e-9),
            r.match_deviation,
            r.detected_atoms,
            r.queries
        );
    }
    Ok(())
}
