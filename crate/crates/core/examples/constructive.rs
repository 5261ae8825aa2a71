//! Exact decompositions of random curvature tensors into canonical terms, by
//! solving against a spanning sample.

use curvtensor::curvature::act_space_dimension;
use curvtensor::decompose::{constructive_decomposition, random_act, Family};
use curvtensor::seed::rng_for;
use curvtensor::{Rational, SpaceContext};

fn main() -> curvtensor::Result<()> {
    for n in 2..=4 {
        let ctx = SpaceContext::<Rational>::euclidean(n)?;
        let r = random_act(&ctx, 3, &mut rng_for(3, &[n as u64]))?;
        for family in [Family::SymmetricOnly, Family::SkewOnly, Family::Mixed] {
            let d = constructive_decomposition(&ctx, &r, family, 7)?;
            println!(
                "n = {n} {family:?}: {} terms (space dimension {}), residual {}",
                d.len(),
                act_space_dimension(n),
                d.residual(&ctx)?
            );
        }
    }
    Ok(())
}
