//! Compares fewest-term counts with symmetric-only terms against mixed terms
//! on random targets.
//!
//! `cargo run --release --example conjecture -- [n] [trials]`

use curvtensor::decompose::conjecture_campaign;
use curvtensor::SpaceContext;

fn main() -> curvtensor::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(2);
    let trials: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(6);
    let ctx = SpaceContext::<f64>::euclidean(n)?;
    let rep = conjecture_campaign(&ctx, trials, 3, 4, 1)?;
    println!("n = {n}, {} trials", rep.trials);
    println!("gap ν̂ − μ̂: {:?}", rep.gap_distribution);
    println!("ν lower estimate {:?}, μ lower estimate {:?}", rep.nu_sup_lower_estimate, rep.mu_sup_lower_estimate);
    println!("exact witnesses with μ̂ < ν̂: {}", rep.witnesses.len());
    Ok(())
}
