//! Signed sums of canonical terms and their reduction by a map into the kernel
//! of one term's operator.
//!
//! Precomposing `R = Σ εᵢ R_{Bᵢ}` with `A: V → ker B_p` kills the pivot term
//! and turns every other term into `εᵢ R_{A* Bᵢ A}` of the same build.

use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};

use crate::curvature::{congruence, precompose, sum_terms, CanonicalTerm, CurvatureTensor};
use crate::error::{Error, Result};
use crate::linalg::{Operator, OperatorKind, SpaceContext};
use crate::scalar::Scalar;

/// `target = Σ termᵢ`, with the target optional.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition<S: Scalar> {
    pub target: Option<CurvatureTensor<S>>,
    pub terms: Vec<CanonicalTerm<S>>,
}

impl<S: Scalar> Serialize for Decomposition<S> {
    fn serialize<Z: Serializer>(&self, z: Z) -> std::result::Result<Z::Ok, Z::Error> {
        let mut m = z.serialize_map(None)?;
        if let Some(t) = &self.target {
            m.serialize_entry("target", t)?;
        }
        m.serialize_entry("terms", &self.terms)?;
        m.end()
    }
}

impl<S: Scalar> Decomposition<S> {
    pub fn new(target: Option<CurvatureTensor<S>>, terms: Vec<CanonicalTerm<S>>) -> Self {
        Decomposition { target, terms }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn sum(&self, ctx: &SpaceContext<S>) -> Result<CurvatureTensor<S>> {
        sum_terms(ctx, &self.terms)
    }

    /// The stated target, or the sum of the terms when none is stated.
    pub fn target_or_sum(&self, ctx: &SpaceContext<S>) -> Result<CurvatureTensor<S>> {
        match &self.target {
            Some(t) => Ok(t.clone()),
            None => self.sum(ctx),
        }
    }

    /// `‖target − Σ termᵢ‖∞` (zero without a target).
    pub fn residual(&self, ctx: &SpaceContext<S>) -> Result<f64> {
        Ok(match &self.target {
            Some(t) => t.sub(&self.sum(ctx)?).max_abs(),
            None => 0.0,
        })
    }

    /// Whether the target equals the sum entrywise (mode tolerance rule).
    pub fn holds(&self, ctx: &SpaceContext<S>) -> Result<bool> {
        Ok(match &self.target {
            Some(t) => t.approx_eq(&self.sum(ctx)?),
            None => true,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reduction<S: Scalar> {
    pub decomposition: Decomposition<S>,
    /// The map `A` that was used.
    pub map: Operator<S>,
    /// Whether the reduced target equals the reduced sum entrywise.
    pub verified: bool,
    pub residual: f64,
}

impl<S: Scalar> Serialize for Reduction<S> {
    fn serialize<Z: Serializer>(&self, z: Z) -> std::result::Result<Z::Ok, Z::Error> {
        let mut m = z.serialize_map(Some(4))?;
        m.serialize_entry("decomposition", &self.decomposition)?;
        m.serialize_entry("map", &self.map)?;
        m.serialize_entry("verified", &self.verified)?;
        m.serialize_entry("residual", &self.residual)?;
        m.end()
    }
}

/// The map used when none is supplied: φ-orthogonal projection onto `ker B`.
pub fn default_reduction_map<S: Scalar>(ctx: &SpaceContext<S>, b: &Operator<S>) -> Result<Operator<S>> {
    let basis = ctx.kernel_basis(b);
    if basis.is_empty() {
        return Err(Error::Kernel("the pivot operator is invertible".into()));
    }
    let p = ctx.orthogonal_projection(&basis)?;
    Operator::new(ctx, p, OperatorKind::SelfAdjoint)
}

fn pivot_term<'a, S: Scalar>(decomp: &'a Decomposition<S>, pivot: usize) -> Result<&'a CanonicalTerm<S>> {
    decomp
        .terms
        .get(pivot)
        .ok_or_else(|| Error::Domain(format!("pivot {pivot} out of range for {} terms", decomp.len())))
}

fn resolve_map<S: Scalar>(ctx: &SpaceContext<S>, b: &Operator<S>, map: Option<&Operator<S>>) -> Result<Operator<S>> {
    if ctx.kernel_basis(b).is_empty() {
        return Err(Error::Kernel("the pivot operator is invertible".into()));
    }
    match map {
        None => default_reduction_map(ctx, b),
        Some(a) => {
            ctx.check_dim(a.matrix())?;
            let scale = a.matrix().max_abs() * b.matrix().max_abs();
            if !b.matrix().matmul(a.matrix()).is_negligible(ctx.tolerance(), scale) {
                return Err(Error::Domain("Im A is not contained in ker B".into()));
            }
            Ok(a.clone())
        }
    }
}

/// Precomposes the decomposition with `A` (default: projection onto the
/// pivot's kernel), dropping the pivot. The new target is `A*R`; its equality
/// with the new sum is checked entrywise and reported.
pub fn reduce_by_kernel<S: Scalar>(
    ctx: &SpaceContext<S>,
    decomp: &Decomposition<S>,
    pivot: usize,
    map: Option<&Operator<S>>,
) -> Result<Reduction<S>> {
    let b = &pivot_term(decomp, pivot)?.op;
    let a = resolve_map(ctx, b, map)?;
    let terms: Vec<CanonicalTerm<S>> = decomp
        .terms
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != pivot)
        .map(|(_, t)| CanonicalTerm { op: congruence(ctx, &a, &t.op), ..t.clone() })
        .collect();
    let target = precompose(ctx, &a, &decomp.target_or_sum(ctx)?)?;
    let sum = sum_terms(ctx, &terms)?;
    let residual = target.sub(&sum).max_abs();
    let verified = target.approx_eq(&sum);
    Ok(Reduction { decomposition: Decomposition::new(Some(target), terms), map: a, verified, residual })
}

/// Reduction of `R_C = Σ εᵢ R_{Bᵢ}` by an `A` with `A*C = ±C`, which keeps the
/// target `R_C` itself. `C` is the operator of the target's canonical build.
pub fn reduce_preserving_target<S: Scalar>(
    ctx: &SpaceContext<S>,
    decomp: &Decomposition<S>,
    c: &Operator<S>,
    pivot: usize,
    map: Option<&Operator<S>>,
) -> Result<Reduction<S>> {
    let b = &pivot_term(decomp, pivot)?.op;
    let a = resolve_map(ctx, b, map)?;
    let pulled = congruence(ctx, &a, c);
    let tol = ctx.tolerance();
    if !(pulled.matrix().approx_eq(c.matrix(), tol) || pulled.matrix().approx_eq(&c.matrix().neg(), tol)) {
        return Err(Error::Hypothesis("A*C ≠ ±C".into()));
    }
    let r_c = crate::chain::canonical_tensor(ctx, c)?;
    if let Some(t) = &decomp.target {
        if !t.approx_eq(&r_c) {
            return Err(Error::Premise("the stated target is not R_C".into()));
        }
    }
    if !decomp.sum(ctx)?.approx_eq(&r_c) {
        return Err(Error::Premise("the terms do not sum to R_C".into()));
    }
    let reduced = reduce_by_kernel(ctx, &Decomposition::new(Some(r_c.clone()), decomp.terms.clone()), pivot, Some(&a))?;
    let sum = reduced.decomposition.sum(ctx)?;
    let residual = r_c.sub(&sum).max_abs();
    let verified = reduced.verified && r_c.approx_eq(&sum);
    Ok(Reduction {
        decomposition: Decomposition::new(Some(r_c), reduced.decomposition.terms),
        map: a,
        verified,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{is_act, symmetric_build, Build, Sign};
    use crate::matrix::Matrix;
    use crate::scalar::Rational;

    fn ctx(n: usize) -> SpaceContext<Rational> {
        SpaceContext::euclidean(n).unwrap()
    }

    fn diag(v: &[i64]) -> Operator<Rational> {
        let d: Vec<Rational> = v.iter().map(|&x| Rational::from_i64(x)).collect();
        Operator::new(&ctx(v.len()), Matrix::diagonal(&d), OperatorKind::SelfAdjoint).unwrap()
    }

    fn sym(sign: Sign, op: Operator<Rational>) -> CanonicalTerm<Rational> {
        CanonicalTerm::new(Build::Symmetric, sign, op).unwrap()
    }

    fn j34() -> Operator<Rational> {
        let mut m = Matrix::zeros(4, 4);
        m[(3, 2)] = Rational::from_i64(1);
        m[(2, 3)] = Rational::from_i64(-1);
        Operator::new(&ctx(4), m, OperatorKind::SkewAdjoint).unwrap()
    }

    #[test]
    fn default_projection_kills_the_pivot() {
        let c = ctx(4);
        let b = diag(&[1, 1, 0, 0]);
        let d = Decomposition::new(None, vec![sym(Sign::Plus, b), sym(Sign::Plus, Operator::identity(4))]);
        let r = reduce_by_kernel(&c, &d, 0, None).unwrap();
        assert!(r.verified);
        assert_eq!(r.map.matrix(), diag(&[0, 0, 1, 1]).matrix());
        assert_eq!(r.decomposition.len(), 1);
        assert_eq!(r.decomposition.terms[0].op.matrix(), diag(&[0, 0, 1, 1]).matrix());
        assert_eq!(r.decomposition.target.unwrap(), symmetric_build(&c, &diag(&[0, 0, 1, 1])).unwrap());
    }

    #[test]
    fn invertible_pivot_and_bad_map() {
        let c = ctx(4);
        let b = diag(&[1, 1, 0, 0]);
        let d = Decomposition::new(None, vec![sym(Sign::Plus, b), sym(Sign::Plus, Operator::identity(4))]);
        assert!(matches!(reduce_by_kernel(&c, &d, 1, None), Err(Error::Kernel(_))));
        assert!(matches!(reduce_by_kernel(&c, &d, 0, Some(&Operator::identity(4))), Err(Error::Domain(_))));
    }

    #[test]
    fn non_projection_map() {
        let c = ctx(4);
        let b = diag(&[1, 1, 0, 0]);
        let d = Decomposition::new(None, vec![sym(Sign::Plus, b), sym(Sign::Plus, Operator::identity(4))]);
        let mut m = Matrix::zeros(4, 4);
        m[(2, 0)] = Rational::from_i64(1);
        let r = reduce_by_kernel(&c, &d, 0, Some(&Operator::general(m))).unwrap();
        assert!(r.verified);
        assert!(r.decomposition.target.as_ref().unwrap().is_zero());
        assert!(r.decomposition.terms.iter().all(|t| is_act(&t.tensor(&c).unwrap()).is_act));
    }

    #[test]
    fn preserving_target() {
        let c = ctx(4);
        let b = diag(&[1, 1, 0, 0]);
        let cc = j34();
        let terms = vec![
            sym(Sign::Plus, b.clone()),
            sym(Sign::Minus, b),
            CanonicalTerm::new(Build::Antisymmetric, Sign::Plus, cc.clone()).unwrap(),
        ];
        let d = Decomposition::new(None, terms);
        for a in [diag(&[0, 0, 1, 1]), diag(&[0, 0, 1, -1])] {
            let r = reduce_preserving_target(&c, &d, &cc, 0, Some(&a)).unwrap();
            assert!(r.verified);
            assert_eq!(r.decomposition.len(), 2);
            assert_eq!(r.residual, 0.0);
        }
        let bad = diag(&[0, 0, 2, 1]);
        assert!(matches!(reduce_preserving_target(&c, &d, &cc, 0, Some(&bad)), Err(Error::Hypothesis(_))));

        let zero = Operator::zero(4, OperatorKind::SelfAdjoint);
        let d = Decomposition::new(None, vec![sym(Sign::Plus, diag(&[1, 1, 0, 0])), sym(Sign::Minus, diag(&[1, 1, 0, 0]))]);
        let r = reduce_preserving_target(&c, &d, &zero, 0, None).unwrap();
        assert!(r.verified);
    }
}
