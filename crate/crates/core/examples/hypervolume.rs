//! Exact hypervolume and the increase a margin-accepted point must bring.
//!
//!     cargo run --example hypervolume

use dmsearch::dominance::{in_margin_dominated, Origin, ParetoArchive, ParetoEntry};
use dmsearch::hypervolume::{hypervolume, ReferencePoint};
use dmsearch::objective::{ObjectiveValue, Point};

fn entry(id: u64, v: &[f64]) -> ParetoEntry {
    ParetoEntry::new(
        id,
        Point::new(vec![0.0]).unwrap(),
        ObjectiveValue::new(v.to_vec()).unwrap(),
        1.0,
        None,
        0,
        Origin::Poll,
    )
    .unwrap()
}

fn main() -> dmsearch::Result<()> {
    let r = ReferencePoint::new(vec![4.0, 4.0])?;
    let mut archive = ParetoArchive::new();
    archive.filter_insert(
        vec![entry(0, &[1.0, 3.0]), entry(1, &[2.0, 2.0]), entry(2, &[3.0, 1.0])],
        0.0,
    )?;
    let before = hypervolume(&archive.values(), &r)?;
    println!("staircase of three points: HI = {before}");

    let rho = 0.25;
    for (id, cand) in [(3, [1.9, 1.9]), (4, [1.5, 1.5])] {
        let blocked = in_margin_dominated(&cand, &archive, rho)?;
        println!(
            "\ncandidate {cand:?} with margin {rho}: {}",
            if blocked { "rejected" } else { "accepted" }
        );
        if !blocked {
            archive.filter_insert(vec![entry(id, &cand)], rho)?;
            let after = hypervolume(&archive.values(), &r)?;
            // an accepted point adds at least the rho-box below its corner
            println!(
                "  HI {before} -> {after}, increase {} >= rho^2 = {}",
                after - before,
                rho * rho
            );
        }
    }

    let cube = ReferencePoint::new(vec![1.0; 3])?;
    let pts = [[0.0, 0.5, 0.5], [0.5, 0.0, 0.5], [0.5, 0.5, 0.0]];
    println!("\nthree objectives: HI = {}", hypervolume(&pts, &cube)?);
    Ok(())
}
