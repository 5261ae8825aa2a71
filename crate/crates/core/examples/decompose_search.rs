//! Fewest-term search on random curvature tensors at n = 3.
//!
//! `cargo run --example decompose_search -- [targets] [budget]`

use curvtensor::decompose::{minimal_search, random_act, Family};
use curvtensor::seed::rng_for;
use curvtensor::SpaceContext;

fn main() -> curvtensor::Result<()> {
    let mut args = std::env::args().skip(1);
    let targets: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(5);
    let budget: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(8);
    let ctx = SpaceContext::<f64>::euclidean(3)?;
    for t in 0..targets {
        let mut rng = rng_for(2024, &[t as u64]);
        let r = random_act(&ctx, 6, &mut rng)?;
        let start = std::time::Instant::now();
        let rep = minimal_search(&ctx, &r, Family::SymmetricOnly, 3, budget, t as u64)?;
        println!(
            "target {t}: k = {:?} ({:?}, verified {}), residual {:.2e}, {:.2?}",
            rep.k,
            rep.bound_kind,
            rep.exact_verified,
            rep.residual,
            start.elapsed()
        );
    }
    Ok(())
}
