//! Canonical builds of a self-adjoint and a skew-adjoint operator, and what the
//! axiom checker says about each of them and about the mismatched builds.

use curvtensor::curvature::{is_act, Build};
use curvtensor::{Matrix, Operator, OperatorKind, Rational, Scalar, SpaceContext};

fn int_matrix(rows: &[&[i64]]) -> Matrix<Rational> {
    Matrix::from_fn(rows.len(), rows.len(), |i, j| Rational::from_i64(rows[i][j]))
}

fn main() -> curvtensor::Result<()> {
    let ctx = SpaceContext::<Rational>::euclidean(3)?;
    let a = Operator::new(&ctx, int_matrix(&[&[1, 2, 0], &[2, 0, 1], &[0, 1, 3]]), OperatorKind::SelfAdjoint)?;
    let b = Operator::new(&ctx, int_matrix(&[&[0, -1, 2], &[1, 0, 0], &[-2, 0, 0]]), OperatorKind::SkewAdjoint)?;

    for (name, op) in [("A", &a), ("B", &b)] {
        for build in [Build::Symmetric, Build::Antisymmetric] {
            let r = build.tensor(&ctx, op)?;
            let report = is_act(&r);
            print!("{build:?} build of {name}: max entry {}, curvature tensor: {}", r.max_abs(), report.is_act);
            if let Some(w) = report.witnesses.first() {
                print!(" (first violation: {:?} at {:?})", w.axiom, w.indices);
            }
            println!();
        }
    }
    Ok(())
}
