//! A user-defined objective with a search step that proposes random points.
//!
//!     cargo run --example custom_objective

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dmsearch::dms::{DmsConfig, DmsSolver};
use dmsearch::dominance::ParetoArchive;
use dmsearch::harness::summarize;
use dmsearch::objective::MultiObjective;

/// Schaffer's problem on R^1, stretched to R^2.
struct Schaffer;

impl MultiObjective for Schaffer {
    fn dim(&self) -> usize {
        2
    }
    fn num_objectives(&self) -> usize {
        2
    }
    fn eval(&self, x: &[f64]) -> Vec<f64> {
        vec![x[0] * x[0] + x[1] * x[1], (x[0] - 2.0).powi(2) + x[1] * x[1]]
    }
}

fn main() -> dmsearch::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let search = move |archive: &ParetoArchive, alpha: f64| {
        // one jittered copy of a random archive point
        let e = &archive.entries()[rng.random_range(0..archive.len())];
        vec![e
            .point
            .iter()
            .map(|x| x + alpha * rng.random_range(-1.0..1.0))
            .collect()]
    };
    let cfg = DmsConfig {
        max_iterations: 300,
        track_criticality: false,
        ..DmsConfig::default()
    };
    let trace = DmsSolver::new(cfg)
        .with_label("schaffer")
        .with_search(search)
        .run(&Schaffer, &[5.0, 5.0])?;
    print!("{}", summarize(&trace)?.to_text());
    let from_search = trace
        .records
        .iter()
        .filter(|r| r.status.as_str() == "successful-search")
        .count();
    println!("search step successes: {from_search}");
    Ok(())
}
