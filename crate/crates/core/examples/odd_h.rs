//! With two objects and two types every aggregator satisfying symmetry and
//! zero unanimity is `h` applied to a weighted mean, for an odd `h`. The table
//! read back from the cube variant is (2u)^3 / 2, not u.

use fuzzy_agg::aggregators::{OddHMean, OddVariant};
use fuzzy_agg::axioms::SuiteConfig;
use fuzzy_agg::harness::extract_h;
use fuzzy_agg::Measure;

fn main() -> fuzzy_agg::Result<()> {
    for variant in [OddVariant::Linear, OddVariant::Cube] {
        let alpha = OddHMean::new(variant, Measure::lebesgue());
        let t = extract_h(&alpha, 11, &SuiteConfig::default())?;
        println!("{}: odd deviation {:e}, endpoints {:e}", t.aggregator, t.odd_deviation, t.endpoint_deviation);
        for (u, h) in t.u.iter().zip(&t.h) {
            println!("  h({u:+.1}) = {h:+.6}   closed form {:+.6}", variant.h(*u));
        }
    }
    Ok(())
}
