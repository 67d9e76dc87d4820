//! Direct multisearch on the Dennis-Woods pair, then a look at the front it found.
//!
//!     cargo run --example dms_dennis_woods

use dmsearch::directions::DirectionFamily;
use dmsearch::dms::{DmsConfig, DmsSolver};
use dmsearch::harness::summarize;
use dmsearch::problems::dennis_woods_bi;

fn main() -> dmsearch::Result<()> {
    let problem = dennis_woods_bi();
    let cfg = DmsConfig {
        directions: DirectionFamily::Rotated { level: 2 },
        max_iterations: 400,
        ..DmsConfig::default()
    };
    let trace = DmsSolver::new(cfg)
        .with_label("dennis_woods_bi")
        .run(&problem, &[2.0, 3.0])?;
    print!("{}", summarize(&trace)?.to_text());

    // the final list: entries never retired
    let mut front: Vec<_> = trace.entries.iter().filter(|e| e.retired_at.is_none()).collect();
    front.sort_by(|a, b| a.value[0].total_cmp(&b.value[0]));
    println!("\n{} nondominated points, every 10th shown", front.len());
    for e in front.iter().step_by(10) {
        println!(
            "  x = ({:+.4}, {:+.4})  f = ({:.4}, {:.4})  alpha = {:.2e}",
            e.point[0], e.point[1], e.value[0], e.value[1], e.stepsize
        );
    }
    Ok(())
}
