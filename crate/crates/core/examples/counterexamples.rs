//! The four classical constructions, each meant to break one of optimality,
//! independence, zero unanimity and non-dictatorship while keeping the rest.

use fuzzy_agg::axioms::SuiteConfig;
use fuzzy_agg::cli::{counterexample_rows, CHARACTERIZATION};

fn main() -> fuzzy_agg::Result<()> {
    for row in counterexample_rows(&SuiteConfig::default())? {
        let cells: Vec<String> = CHARACTERIZATION
            .iter()
            .map(|a| format!("{a}={}", if row.passed.contains(a) { "P" } else { "F" }))
            .collect();
        println!(
            "{:<18} breaks {:<16} {}  {}",
            row.aggregator,
            row.breaks.to_string(),
            cells.join(" "),
            if row.matches { "as designed" } else { "DIFFERS" }
        );
    }
    Ok(())
}
