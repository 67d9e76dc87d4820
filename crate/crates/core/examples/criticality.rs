//! Pareto criticality mu, its poll-set counterpart mu_D, and their ratio.
//!
//!     cargo run --example criticality

use dmsearch::criticality::{c1_ratio, criticality, mu};
use dmsearch::directions::{coordinate_set, rotated_set};
use dmsearch::objective::MultiObjective;
use dmsearch::problems::dennis_woods_bi;

fn main() -> dmsearch::Result<()> {
    let p = dennis_woods_bi();
    let coord = coordinate_set(2)?;
    let rot = rotated_set(2, 1)?;
    println!(
        "{:>14} {:>9} {:>10} {:>10} {:>9}",
        "x", "mu", "mu_D coord", "mu_D rot", "C1 rot"
    );
    for x in [[3.0, 4.0], [0.5, 0.5], [-0.9, -0.9], [0.2, -0.3], [0.0, 0.0]] {
        let g = p.jacobian(&x).expect("analytic gradients");
        let c = criticality(&g, Some(&coord))?;
        let r = criticality(&g, Some(&rot))?;
        println!(
            "{:>14} {:>9.4} {:>10.4} {:>10.4} {:>9}",
            format!("({}, {})", x[0], x[1]),
            c.mu,
            c.mu_d.unwrap(),
            r.mu_d.unwrap(),
            c1_ratio(r.mu, r.mu_d.unwrap()).map_or("-".into(), |v| format!("{v:.3}"))
        );
    }
    // on the diagonal the coordinate set sees no common descent at all
    let g = p.jacobian(&[0.5, 0.5]).unwrap();
    let rep = mu(&g)?;
    println!("\nmin-norm direction at (0.5, 0.5): {:?}", rep.minimizing_direction);
    Ok(())
}
