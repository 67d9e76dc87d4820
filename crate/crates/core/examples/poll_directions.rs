//! Positive spanning sets: coordinate, rotated and random families.
//!
//!     cargo run --example poll_directions

use dmsearch::directions::{
    angular_gap_2d, coordinate_set, positively_spans, random_dense_set, rotated_family, DirectionChoice,
    DirectionFamily, DirectionSchedule,
};

fn main() -> dmsearch::Result<()> {
    println!("coordinate set in R^3: {:?}", coordinate_set(3)?.directions());

    for level in 1..=4 {
        let family = rotated_family(level)?;
        let union: Vec<Vec<f64>> = family.iter().flat_map(|s| s.directions().to_vec()).collect();
        println!(
            "rotated level {level}: {} sets, largest gap of the union {:.4} rad",
            family.len(),
            angular_gap_2d(&union)
        );
    }

    let r = random_dense_set(4, 8, 7)?;
    println!(
        "random set of 8 in R^4 positively spans: {}",
        positively_spans(r.directions())
    );

    // what a solver sees, one set per iteration
    let mut sched = DirectionSchedule::new(2, DirectionFamily::Rotated { level: 2 }, DirectionChoice::Cycle, None)?;
    for _ in 0..3 {
        let s = sched.next_set()?;
        println!("{:<14} {:?}", s.tag, s.set.directions());
        sched.record_outcome(false);
    }
    Ok(())
}
