//! Plugging in an aggregator of your own: implement `Fcaf`, then run the suites
//! and the extraction harness on it.

use std::collections::BTreeSet;

use fuzzy_agg::aggregators::{Fcaf, WeightedMean};
use fuzzy_agg::axioms::{run_suite, SuiteConfig};
use fuzzy_agg::harness::{extract_measure, ExtractConfig};
use fuzzy_agg::{Axiom, ClassPoint, Measure, PiecewiseFn, Profile};

/// Averages the first half of the population and ignores the rest.
struct FirstHalf(WeightedMean);

impl FirstHalf {
    fn new() -> fuzzy_agg::Result<Self> {
        let density = PiecewiseFn::step(vec![0.0, 0.5, 1.0], &[2.0, 0.0])?;
        Ok(FirstHalf(WeightedMean::new(Measure::with_density(density)?)))
    }
}

impl Fcaf for FirstHalf {
    fn name(&self) -> String {
        "first_half".into()
    }

    fn aggregate(&self, c: &Profile) -> fuzzy_agg::Result<ClassPoint> {
        self.0.aggregate(c)
    }

    fn claimed_axioms(&self) -> BTreeSet<Axiom> {
        BTreeSet::new()
    }
}

/// Returns the row sums of object 0 wrong: not a classification at all.
struct Broken;

impl Fcaf for Broken {
    fn name(&self) -> String {
        "broken".into()
    }

    fn aggregate(&self, c: &Profile) -> fuzzy_agg::Result<ClassPoint> {
        let mut rows = c.at(0.5)?.rows().to_vec();
        rows[0][0] += 0.25;
        ClassPoint::from_rows(rows)
    }

    fn claimed_axioms(&self) -> BTreeSet<Axiom> {
        BTreeSet::new()
    }
}

fn main() -> fuzzy_agg::Result<()> {
    let alpha = FirstHalf::new()?;
    let suite = run_suite(&alpha, &SuiteConfig::default())?;
    println!("{} passes {:?}", suite.aggregator, suite.passed());

    let r = extract_measure(&alpha, &ExtractConfig::default())?;
    println!("recovered CDF on the grid: {:?}", r.cdf_values[0].values);
    println!("match deviation {:e}", r.match_deviation);

    match extract_measure(&Broken, &ExtractConfig::default()) {
        Err(e) => println!("broken black box: {e}"),
        Ok(_) => println!("broken black box slipped through"),
    }
    Ok(())
}
