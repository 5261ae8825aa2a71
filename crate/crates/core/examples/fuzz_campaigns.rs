//! Runs every campaign for a few trials in exact arithmetic.
//!
//! `cargo run --release --example fuzz_campaigns -- [trials] [seed]`

use curvtensor::campaign::{run_campaign, Campaign};
use curvtensor::Rational;

fn main() -> curvtensor::Result<()> {
    let mut args = std::env::args().skip(1);
    let trials: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(10);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    for campaign in Campaign::ALL {
        let start = std::time::Instant::now();
        let s = run_campaign::<Rational>(campaign, trials, seed)?;
        println!(
            "{:<14} {:>4} instances, {:>4} passed, {} failed, {} unmet  ({:.2?})",
            format!("{campaign:?}"),
            s.instances,
            s.passed,
            s.failed,
            s.hypothesis_unmet,
            start.elapsed()
        );
        for f in &s.failures {
            println!("    trial {}: {}", f.trial, f.detail);
        }
    }
    Ok(())
}
