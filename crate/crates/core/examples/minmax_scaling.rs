//! Min-max direct search over an epsilon grid: k_eps against the worst-case bound.
//!
//!     cargo run --release --example minmax_scaling

use dmsearch::harness::{run_experiment, ExperimentConfig};

const CONFIG: &str = r#"
problem = "dennis_woods_bi"
solver = "minmax"
directions = "rotated:2"
start = "box:2:5"
epsilon_grid = [0.2, 0.1, 0.05, 0.025]
seeds = [0, 1, 2, 3, 4, 5]
"#;

fn main() -> dmsearch::Result<()> {
    let cfg = ExperimentConfig::from_toml_str(CONFIG)?;
    let report = run_experiment(&cfg)?;
    print!("{}", report.to_text());

    println!("\n  eps     seed  k_eps   bound");
    for r in &report.rows {
        println!(
            "  {:<6}  {:<4}  {:<6} {}",
            r.epsilon,
            r.seed,
            r.k_epsilon.map_or("-".into(), |k| k.to_string()),
            r.bound.map_or("-".into(), |b| format!("{b:.3e}"))
        );
    }
    Ok(())
}
