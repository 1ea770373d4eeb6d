//! The worked example: six objects, three types, a profile that changes at
//! i = 1/2 and i = 3/4, aggregated with the weight w(i) = 3i^2.

use fuzzy_agg::harness::{example1_report, EXAMPLE1_EXPECTED};

fn main() {
    let report = example1_report();
    println!("{}", report.aggregator);
    for (j, row) in report.table.rows().iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.6}")).collect();
        println!("x{}  ({})   expected {:?}", j + 1, cells.join(", "), EXAMPLE1_EXPECTED[j]);
    }
    println!("max deviation {:e}", report.max_deviation);

    // object 1 is classified smoothly; sample a few individuals
    for s in report.curves[1].samples.iter().step_by(25) {
        println!("c_{:.2}(x2) = {:?}", s.i, s.values);
    }
}
