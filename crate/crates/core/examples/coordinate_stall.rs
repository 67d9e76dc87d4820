//! On the diagonal of the Dennis-Woods pair coordinate polling makes no min-max
//! progress, while a rotated family does.
//!
//!     cargo run --release --example coordinate_stall

use dmsearch::directions::DirectionFamily;
use dmsearch::dms::{dms_run, DmsConfig};
use dmsearch::minmax::{minmax_run, MinMaxConfig};
use dmsearch::problems::dennis_woods_bi;
use dmsearch::trace::RunTrace;

fn successes(t: &RunTrace) -> usize {
    t.records.iter().filter(|r| r.status.is_success()).count()
}

fn main() -> dmsearch::Result<()> {
    let p = dennis_woods_bi();
    println!(
        "{:>5} {:>12} {:>12} {:>12}",
        "a", "minmax coord", "minmax rot", "dms coord"
    );
    for a in [0.1, 0.5, 0.9, -0.5] {
        let x0 = [a, a];
        let coord = MinMaxConfig {
            max_iterations: 500,
            alpha_min: 1e-300,
            ..MinMaxConfig::default()
        };
        let rot = MinMaxConfig {
            directions: DirectionFamily::Rotated { level: 2 },
            max_iterations: 500,
            ..coord
        };
        let dms = DmsConfig {
            max_iterations: 500,
            alpha_min: 1e-300,
            compute_hypervolume: false,
            ..DmsConfig::default()
        };
        println!(
            "{a:>5} {:>12} {:>12} {:>12}",
            successes(&minmax_run(&p, &x0, &coord)?),
            successes(&minmax_run(&p, &x0, &rot)?),
            successes(&dms_run(&p, &x0, &dms)?)
        );
    }
    // Pareto acceptance still takes trade-off steps along the axes, which is
    // why the DMS column is not zero
    Ok(())
}
