//! Numerical checks of the identities relating the two builds, on random
//! operators under a non-standard inner product.

use curvtensor::curvature::{
    adjoint_transfer, antisymmetric_build, correction_term_deviation, permuted_symmetric_sum, skew_identity_deviation,
};
use curvtensor::{Matrix, OperatorKind, Scalar, SpaceContext};

fn main() -> curvtensor::Result<()> {
    let n = 4;
    // diag(1, 2, 3, 4)
    let phi = Matrix::from_fn(n, n, |i, j| if i == j { (i + 1) as f64 } else { 0.0 });
    let ctx = SpaceContext::new(phi, 1e-10)?;

    for seed in 0..3 {
        let a = ctx.random_operator(OperatorKind::SelfAdjoint, None, seed)?;
        let x: Vec<f64> = (0..n).map(|i| (i as f64 + 1.0).sin()).collect();
        let y: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).cos()).collect();
        let t = adjoint_transfer(&ctx, &a, [&x, &y, &y, &x])?;
        println!(
            "seed {seed}: transfer {:.6} / {:.6} / {:.6}, agrees {}",
            t.tensor_entry,
            t.pushed_forward,
            t.pulled_back,
            t.agrees(1e-10)
        );
        println!("  correction term deviation {:.2e}", correction_term_deviation(&ctx, &a)?);

        let s = ctx.random_operator(OperatorKind::SkewAdjoint, None, seed)?;
        let diff = permuted_symmetric_sum(&ctx, &s)?.sub(&antisymmetric_build(&ctx, &s)?).max_abs();
        println!(
            "  skew identity: deviation {:.2e}, direct difference {:.2e}",
            skew_identity_deviation(&ctx, &s)?.to_f64(),
            diff
        );
    }
    Ok(())
}
