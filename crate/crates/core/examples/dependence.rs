//! The dependent configuration at n = 3 and its necessary conditions, then a
//! random independent pair at n = 4.

use curvtensor::campaign::dependent_configuration;
use curvtensor::curvature::{antisymmetric_build, symmetric_build};
use curvtensor::dependence::{check_theorem_ssl, dependence, necessary_conditions_ssl};
use curvtensor::{Operator, OperatorKind, Rational, SpaceContext};

fn main() -> curvtensor::Result<()> {
    let (ctx, b, c) = dependent_configuration::<Rational>()?;
    let id = Operator::identity(3);
    let tensors = [symmetric_build(&ctx, &id)?, symmetric_build(&ctx, &b)?, antisymmetric_build(&ctx, &c)?];
    let v = dependence(&tensors)?;
    let coeffs: Vec<String> = v.coefficients.iter().flatten().map(|x| x.to_string()).collect();
    println!("n = 3: independent {}, rank {}, coefficients [{}], proper {:?}", v.independent, v.rank, coeffs.join(", "), v.proper);

    let nc = necessary_conditions_ssl(&ctx, &b, &c)?;
    println!("  rank C = {}, |[B, C]| = {}, passed {}", nc.rank_c, nc.commutator_norm, nc.passed);
    for c in &nc.conclusions {
        println!("  {}: {:?}", c.name, c.status);
    }

    let ctx4 = SpaceContext::<Rational>::euclidean(4)?;
    let b4 = ctx4.random_operator(OperatorKind::SelfAdjoint, None, 1)?;
    let c4 = ctx4.random_operator(OperatorKind::SkewAdjoint, None, 2)?;
    let r = check_theorem_ssl(&ctx4, &b4, &c4)?;
    println!("n = 4: operators independent {}, tensor rank {}, {:?}", r.operators_independent, r.tensors.rank, r.status);
    Ok(())
}
