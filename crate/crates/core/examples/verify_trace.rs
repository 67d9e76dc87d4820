//! Write a trace, read it back, check it, then tamper with it and check again.
//!
//!     cargo run --example verify_trace

use std::io::Cursor;

use dmsearch::directions::DirectionFamily;
use dmsearch::harness::verify_lemmas;
use dmsearch::minmax::{minmax_run, MinMaxConfig};
use dmsearch::problems::dennis_woods_bi;
use dmsearch::trace::{RunTrace, Status};

fn main() -> dmsearch::Result<()> {
    let p = dennis_woods_bi();
    let cfg = MinMaxConfig {
        directions: DirectionFamily::Rotated { level: 2 },
        epsilon: Some(0.05),
        ..MinMaxConfig::default()
    };
    let trace = minmax_run(&p, &[4.0, 2.5], &cfg)?;

    let mut buf = Vec::new();
    trace.write_csv(&mut buf)?;
    let back = RunTrace::read_csv(Cursor::new(&buf), None::<Cursor<&[u8]>>)?;
    assert_eq!(back.records, trace.records);
    print!("round trip ok\n{}", verify_lemmas(&back, Some(&p))?.to_text());

    // shrink the stepsize at one unsuccessful iteration
    let mut bad = back.clone();
    if let Some(r) = bad.records.iter_mut().rfind(|r| r.status == Status::Unsuccessful) {
        println!("\nshrinking alpha at k = {}", r.k);
        r.alpha *= 1e-3;
    }
    print!("{}", verify_lemmas(&bad, Some(&p))?.to_text());
    Ok(())
}
