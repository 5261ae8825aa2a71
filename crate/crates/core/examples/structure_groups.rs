//! Samples isometries, anti-isometries and generic maps of an antisymmetric
//! form and compares membership in the two groups.
//!
//! `cargo run --example structure_groups -- [trials]`

use curvtensor::campaign::jj;
use curvtensor::structure_group::{verify_structure_theorem, FormView};
use curvtensor::{Operator, OperatorKind, Rational, SpaceContext};

fn main() -> curvtensor::Result<()> {
    let trials: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(20);
    for n in [4, 5, 6] {
        let ctx = SpaceContext::<Rational>::euclidean(n)?;
        let tau = FormView::new(Operator::new(&ctx, jj(n), OperatorKind::SkewAdjoint)?)?;
        let report = verify_structure_theorem(&ctx, &tau, trials, n as u64)?;
        println!("n = {n}, rank τ = {}", report.rank);
        for c in &report.pools {
            println!(
                "  {:?}: {} samples, {} in G±, {} in G_R, {} agree",
                c.pool, c.samples, c.in_g_pm, c.in_g_r, c.agreements
            );
        }
        println!("  equivalence holds: {}", report.equivalence_holds);
    }
    Ok(())
}
