//! Successful and unsuccessful counts over the measured window, and the
//! chains of stepsize updates that link them.
//!
//!     cargo run --example linked_sequences

use dmsearch::directions::DirectionFamily;
use dmsearch::dms::{count_iteration_sets, linked_sequences, DmsConfig, DmsSolver};
use dmsearch::problems::dennis_woods_bi;

fn main() -> dmsearch::Result<()> {
    let p = dennis_woods_bi();
    let cfg = DmsConfig {
        directions: DirectionFamily::Rotated { level: 2 },
        epsilon: Some(0.1),
        max_iterations: 2000,
        ..DmsConfig::default()
    };
    let trace = DmsSolver::new(cfg).with_label("dennis_woods_bi").run(&p, &[2.0, 3.0])?;
    let Some((k0, j1)) = trace.measured_window() else {
        println!("no unsuccessful iteration before the stop");
        return Ok(());
    };
    let (s, u) = count_iteration_sets(&trace, k0, j1)?;
    let stats = linked_sequences(&trace, k0, j1)?;
    println!("stop: {}, window [{k0}, {j1}]", trace.stop.as_str());
    println!(
        "|S| = {s}, |U| = {u}, chains = {}, longest = {}",
        stats.chain_count, stats.max_chain_length
    );
    println!("unsuccessful per chain: {:?}", stats.per_chain_unsuccessful);
    if let Some(c) = stats.chains.iter().max_by_key(|c| c.len()) {
        println!("longest chain (entry ids): {c:?}");
    }
    Ok(())
}
