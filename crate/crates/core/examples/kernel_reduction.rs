//! Drops a term from a decomposition by precomposing with a map into the
//! pivot's kernel.

use curvtensor::campaign::{preserving_fixture, reduction_fixture};
use curvtensor::reduce::{reduce_by_kernel, reduce_preserving_target};
use curvtensor::seed::rng_for;
use curvtensor::Rational;

fn main() -> curvtensor::Result<()> {
    for t in 0..3u64 {
        let mut rng = rng_for(5, &[t]);
        let (ctx, f) = reduction_fixture::<Rational, _>(&mut rng)?;
        let red = reduce_by_kernel(&ctx, &f.decomposition, f.pivot, f.map.as_ref())?;
        println!(
            "n = {}: {} terms -> {}, verified {}, map rank {}",
            ctx.dim(),
            f.decomposition.len(),
            red.decomposition.len(),
            red.verified,
            ctx.rank(&red.map)
        );

        let (ctx, f) = preserving_fixture::<Rational, _>(&mut rng)?;
        let red = reduce_preserving_target(&ctx, &f.decomposition, &f.c, f.pivot, Some(&f.map))?;
        println!("  target kept: {} terms -> {}, verified {}", f.decomposition.len(), red.decomposition.len(), red.verified);
    }
    Ok(())
}
