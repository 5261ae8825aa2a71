//! Inner-product spaces and operators on them.
//!
//! Convention: `matrix[(i, j)]` is the coefficient of `e_i` in `A(e_j)`.
//! The adjoint with respect to the inner product `φ` is `A* = φ⁻¹ Aᵀ φ`,
//! and an operator is self-adjoint exactly when `φ A` is symmetric
//! (skew-adjoint when it is antisymmetric).

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};
use crate::scalar::{Mode, Scalar};

/// Default relative tolerance for float-mode predicates.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Range of the integer entries drawn by the random generators.
const ENTRY_RANGE: i64 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorKind {
    SelfAdjoint,
    SkewAdjoint,
    General,
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperatorKind::SelfAdjoint => "self-adjoint",
            OperatorKind::SkewAdjoint => "skew-adjoint",
            OperatorKind::General => "general",
        })
    }
}

struct ContextInner<S> {
    dim: usize,
    phi: Matrix<S>,
    phi_inv: Matrix<S>,
    phi_is_identity: bool,
    tolerance: f64,
}

/// Dimension, positive definite inner product and tolerance.
///
/// Cheap to clone; tensors keep a handle to the context they were built in.
#[derive(Clone)]
pub struct SpaceContext<S: Scalar>(Arc<ContextInner<S>>);

impl<S: Scalar> fmt::Debug for SpaceContext<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpaceContext")
            .field("dim", &self.dim())
            .field("mode", &S::MODE)
            .field("tolerance", &self.tolerance())
            .field("phi_is_identity", &self.0.phi_is_identity)
            .finish()
    }
}

impl<S: Scalar> PartialEq for SpaceContext<S> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.dim == other.0.dim
                && self.0.tolerance == other.0.tolerance
                && self.0.phi == other.0.phi)
    }
}

impl<S: Scalar> SpaceContext<S> {
    /// Euclidean context (`φ = I`) with the default tolerance.
    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::new(Matrix::identity(dim), DEFAULT_TOLERANCE)
    }

    /// Validates that `phi` is symmetric and positive definite.
    pub fn new(phi: Matrix<S>, tolerance: f64) -> Result<Self> {
        let dim = phi.rows();
        if dim == 0 {
            return Err(Error::Context("dimension must be at least 1".into()));
        }
        if !phi.is_square() {
            return Err(Error::Context(format!("phi is {}x{}, not square", phi.rows(), phi.cols())));
        }
        if !(tolerance >= 0.0 && tolerance.is_finite()) {
            return Err(Error::Context(format!("tolerance {tolerance} must be a nonnegative real")));
        }
        if !phi.is_symmetric(tolerance) {
            return Err(Error::Context("phi is not symmetric".into()));
        }
        if !is_positive_definite(&phi) {
            return Err(Error::Context("phi is not positive definite".into()));
        }
        let phi_inv = phi
            .inverse(tolerance)
            .ok_or_else(|| Error::Context("phi is singular".into()))?;
        let phi_is_identity = phi == Matrix::identity(dim);
        Ok(SpaceContext(Arc::new(ContextInner { dim, phi, phi_inv, phi_is_identity, tolerance })))
    }

    /// Same inner product with a different tolerance.
    pub fn with_tolerance(&self, tolerance: f64) -> Result<Self> {
        Self::new(self.0.phi.clone(), tolerance)
    }

    pub fn dim(&self) -> usize {
        self.0.dim
    }

    pub fn phi(&self) -> &Matrix<S> {
        &self.0.phi
    }

    pub fn phi_inverse(&self) -> &Matrix<S> {
        &self.0.phi_inv
    }

    pub fn phi_is_identity(&self) -> bool {
        self.0.phi_is_identity
    }

    pub fn tolerance(&self) -> f64 {
        self.0.tolerance
    }

    pub fn mode(&self) -> Mode {
        S::MODE
    }

    /// `φ(u, v) = uᵀ φ v`.
    pub fn inner(&self, u: &[S], v: &[S]) -> S {
        if self.0.phi_is_identity {
            dot(u, v)
        } else {
            dot(u, &self.0.phi.mul_vec(v))
        }
    }

    /// Standard basis vector `e_i` (zero-based).
    pub fn basis_vector(&self, i: usize) -> Vec<S> {
        let mut v = vec![S::zero(); self.dim()];
        v[i] = S::one();
        v
    }

    pub(crate) fn check_dim(&self, m: &Matrix<S>) -> Result<()> {
        if m.rows() != self.dim() || m.cols() != self.dim() {
            return Err(Error::Context(format!(
                "operator is {}x{} but the space has dimension {}",
                m.rows(),
                m.cols(),
                self.dim()
            )));
        }
        Ok(())
    }

    /// Gram matrix of the operator: `G[a][b] = φ(A e_a, e_b)`, i.e. `Aᵀ φ`.
    pub fn gram(&self, a: &Matrix<S>) -> Matrix<S> {
        if self.0.phi_is_identity {
            a.transpose()
        } else {
            a.transpose().matmul(&self.0.phi)
        }
    }

    /// Operator whose Gram matrix is `g` (inverse of [`SpaceContext::gram`]).
    pub fn from_gram(&self, g: &Matrix<S>) -> Matrix<S> {
        if self.0.phi_is_identity {
            g.transpose()
        } else {
            self.0.phi_inv.matmul(&g.transpose())
        }
    }

    /// Does `m` have the declared kind (exactly, or to tolerance in float mode)?
    pub fn has_kind(&self, m: &Matrix<S>, kind: OperatorKind) -> bool {
        let g = self.gram(m);
        match kind {
            OperatorKind::General => true,
            OperatorKind::SelfAdjoint => g.approx_eq(&g.transpose(), self.tolerance()),
            OperatorKind::SkewAdjoint => g.approx_eq(&g.transpose().neg(), self.tolerance()),
        }
    }

    /// `A* = φ⁻¹ Aᵀ φ`.
    pub fn adjoint_matrix(&self, a: &Matrix<S>) -> Matrix<S> {
        if self.0.phi_is_identity {
            a.transpose()
        } else {
            self.0.phi_inv.matmul(&a.transpose()).matmul(&self.0.phi)
        }
    }

    pub fn adjoint(&self, a: &Operator<S>) -> Result<Operator<S>> {
        self.check_dim(a.matrix())?;
        Ok(Operator { matrix: self.adjoint_matrix(a.matrix()), kind: a.kind })
    }

    pub fn rank(&self, a: &Operator<S>) -> usize {
        a.matrix().rank(self.tolerance())
    }

    /// Basis of `ker A`; empty iff `A` is invertible.
    pub fn kernel_basis(&self, a: &Operator<S>) -> Vec<Vec<S>> {
        S::nullspace(a.matrix(), self.tolerance())
    }

    pub fn is_invertible(&self, a: &Operator<S>) -> bool {
        self.rank(a) == self.dim()
    }

    /// φ-orthogonal projection onto the span of `basis` (assumed independent).
    pub fn orthogonal_projection(&self, basis: &[Vec<S>]) -> Result<Matrix<S>> {
        let n = self.dim();
        if basis.is_empty() {
            return Ok(Matrix::zeros(n, n));
        }
        let k = Matrix::from_columns(basis);
        let kt_phi = k.transpose().matmul(&self.0.phi);
        let gram = kt_phi.matmul(&k);
        let inv = gram
            .inverse(self.tolerance())
            .ok_or_else(|| Error::Domain("projection basis is dependent".into()))?;
        Ok(k.matmul(&inv).matmul(&kt_phi))
    }

    /// Deterministic random operator of the requested kind.
    ///
    /// Without a rank constraint: `(M + M*)/2`, `(M − M*)/2` or `M` for a random
    /// integer matrix `M`. With a constraint `r` the Gram matrix is built as a
    /// rank-`r` product `P D Pᵀ` (or `P K Pᵀ` with `K` a sum of 2×2 rotation
    /// blocks for skew operators), resampling until the rank is exactly `r`.
    pub fn random_operator(
        &self,
        kind: OperatorKind,
        rank: Option<usize>,
        seed: u64,
    ) -> Result<Operator<S>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        self.random_operator_with(kind, rank, &mut rng)
    }

    pub fn random_operator_with<R: Rng>(
        &self,
        kind: OperatorKind,
        rank: Option<usize>,
        rng: &mut R,
    ) -> Result<Operator<S>> {
        let n = self.dim();
        let Some(r) = rank else {
            let m = random_int_matrix(n, n, rng);
            let matrix = match kind {
                OperatorKind::General => m,
                OperatorKind::SelfAdjoint => self.symmetrize(&m, S::one()),
                OperatorKind::SkewAdjoint => self.symmetrize(&m, -S::one()),
            };
            return Ok(Operator { matrix, kind });
        };
        if r > n {
            return Err(Error::Constraint(format!("rank {r} exceeds dimension {n}")));
        }
        if kind == OperatorKind::SkewAdjoint && r % 2 == 1 {
            return Err(Error::Constraint(format!("skew-adjoint operators have even rank, got {r}")));
        }
        for _ in 0..256 {
            let p = random_int_matrix::<S, _>(n, r, rng);
            let matrix = match kind {
                OperatorKind::General => {
                    let q = random_int_matrix::<S, _>(r, n, rng);
                    p.matmul(&q)
                }
                OperatorKind::SelfAdjoint => {
                    let d: Vec<S> = (0..r).map(|_| nonzero_small(rng)).collect();
                    let g = p.matmul(&Matrix::diagonal(&d)).matmul(&p.transpose());
                    self.from_gram(&g)
                }
                OperatorKind::SkewAdjoint => {
                    let mut k = Matrix::zeros(r, r);
                    for b in (0..r).step_by(2) {
                        let c: S = nonzero_small(rng);
                        k[(b, b + 1)] = c.clone();
                        k[(b + 1, b)] = -c;
                    }
                    let g = p.matmul(&k).matmul(&p.transpose());
                    self.from_gram(&g)
                }
            };
            if matrix.rank(self.tolerance()) == r {
                return Ok(Operator { matrix, kind });
            }
        }
        Err(Error::Constraint(format!("could not sample a {kind} operator of rank {r}")))
    }

    /// `(M + sign·M*) / 2`.
    fn symmetrize(&self, m: &Matrix<S>, sign: S) -> Matrix<S> {
        let half = S::from_ratio(1, 2);
        m.add(&self.adjoint_matrix(m).scale(&sign)).scale(&half)
    }

    /// Random invertible operator with small integer entries.
    pub fn random_invertible<R: Rng>(&self, rng: &mut R) -> Operator<S> {
        let n = self.dim();
        loop {
            let m = random_int_matrix(n, n, rng);
            if m.rank(self.tolerance()) == n {
                return Operator { matrix: m, kind: OperatorKind::General };
            }
        }
    }
}

fn random_int_matrix<S: Scalar, R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Matrix<S> {
    Matrix::from_fn(rows, cols, |_, _| S::from_i64(rng.gen_range(-ENTRY_RANGE..=ENTRY_RANGE)))
}

fn nonzero_small<S: Scalar, R: Rng>(rng: &mut R) -> S {
    let v = rng.gen_range(1..=2);
    S::from_i64(if rng.gen_bool(0.5) { v } else { -v })
}

fn is_positive_definite<S: Scalar>(phi: &Matrix<S>) -> bool {
    match S::MODE {
        // Sylvester's criterion.
        Mode::Exact => (1..=phi.rows()).all(|k| phi.leading(k).determinant() > S::zero()),
        Mode::Float64 => {
            let m = nalgebra::DMatrix::from_fn(phi.rows(), phi.cols(), |i, j| phi[(i, j)].to_f64());
            m.cholesky().is_some()
        }
    }
}

/// A linear endomorphism together with its declared adjoint kind.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator<S: Scalar> {
    matrix: Matrix<S>,
    kind: OperatorKind,
}

impl<S: Scalar> Operator<S> {
    /// Validates the shape and the declared kind against the context.
    pub fn new(ctx: &SpaceContext<S>, matrix: Matrix<S>, kind: OperatorKind) -> Result<Self> {
        ctx.check_dim(&matrix)?;
        if !ctx.has_kind(&matrix, kind) {
            return Err(Error::Context(format!("matrix is not {kind} with respect to phi")));
        }
        Ok(Operator { matrix, kind })
    }

    pub fn general(matrix: Matrix<S>) -> Self {
        Operator { matrix, kind: OperatorKind::General }
    }

    pub fn identity(n: usize) -> Self {
        Operator { matrix: Matrix::identity(n), kind: OperatorKind::SelfAdjoint }
    }

    pub fn zero(n: usize, kind: OperatorKind) -> Self {
        Operator { matrix: Matrix::zeros(n, n), kind }
    }

    /// Caller guarantees the kind (products like `A* C A` of a kinded `C`).
    pub(crate) fn with_kind_unchecked(matrix: Matrix<S>, kind: OperatorKind) -> Self {
        Operator { matrix, kind }
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.matrix
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `c·A`; the kind is preserved.
    pub fn scaled(&self, c: &S) -> Self {
        Operator { matrix: self.matrix.scale(c), kind: self.kind }
    }

    /// Relabels the operator as general (no kind claim).
    pub fn as_general(&self) -> Self {
        Operator { matrix: self.matrix.clone(), kind: OperatorKind::General }
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.matrix.is_negligible(tol, 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn diag(v: &[Rational]) -> Matrix<Rational> {
        Matrix::diagonal(v)
    }

    fn j_plus_zero(n: usize) -> Matrix<Rational> {
        let mut m = Matrix::zeros(n, n);
        m[(0, 1)] = q(1, 1);
        m[(1, 0)] = q(-1, 1);
        m
    }

    #[test]
    fn adjoint_under_identity_is_transpose() {
        let ctx = SpaceContext::<Rational>::euclidean(2).unwrap();
        let a = Operator::general(Matrix::from_rows(vec![vec![q(0, 1), q(1, 1)], vec![q(0, 1), q(0, 1)]]));
        let adj = ctx.adjoint(&a).unwrap();
        assert_eq!(adj.matrix(), &Matrix::from_rows(vec![vec![q(0, 1), q(0, 1)], vec![q(1, 1), q(0, 1)]]));
    }

    #[test]
    fn adjoint_under_weighted_form() {
        let ctx = SpaceContext::new(diag(&[q(1, 1), q(2, 1)]), 0.0).unwrap();
        let a = Operator::general(Matrix::from_rows(vec![vec![q(0, 1), q(1, 1)], vec![q(0, 1), q(0, 1)]]));
        let adj = ctx.adjoint(&a).unwrap();
        assert_eq!(adj.matrix(), &Matrix::from_rows(vec![vec![q(0, 1), q(0, 1)], vec![q(1, 2), q(0, 1)]]));
        // φ(A e_i, e_j) = φ(e_i, A* e_j) on every basis pair.
        for i in 0..2 {
            for j in 0..2 {
                let (ei, ej) = (ctx.basis_vector(i), ctx.basis_vector(j));
                let lhs = ctx.inner(&a.matrix().mul_vec(&ei), &ej);
                let rhs = ctx.inner(&ei, &adj.matrix().mul_vec(&ej));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn diagonal_is_self_adjoint() {
        let ctx = SpaceContext::<Rational>::euclidean(3).unwrap();
        let a = Operator::new(&ctx, diag(&[q(2, 1), q(2, 1), q(1, 2)]), OperatorKind::SelfAdjoint).unwrap();
        assert_eq!(ctx.adjoint(&a).unwrap(), a);
        assert_eq!(ctx.rank(&a), 3);
    }

    #[test]
    fn rank_examples() {
        let ctx = SpaceContext::<Rational>::euclidean(3).unwrap();
        let j = Operator::new(&ctx, j_plus_zero(3), OperatorKind::SkewAdjoint).unwrap();
        assert_eq!(ctx.rank(&j), 2);
        let sq = Operator::general(j.matrix().pow(2));
        assert_eq!(sq.matrix(), &diag(&[q(-1, 1), q(-1, 1), q(0, 1)]));
        assert_eq!(ctx.rank(&sq), 2);
    }

    #[test]
    fn kernel_examples() {
        let ctx = SpaceContext::<Rational>::euclidean(4).unwrap();
        let p = Operator::general(diag(&[q(1, 1), q(1, 1), q(0, 1), q(0, 1)]));
        let ker = ctx.kernel_basis(&p);
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(p.matrix().mul_vec(v).iter().all(|x| *x == q(0, 1)));
            assert!(v[0] == q(0, 1) && v[1] == q(0, 1));
        }
        assert!(ctx.kernel_basis(&Operator::identity(4)).is_empty());

        let ctx2 = SpaceContext::<Rational>::euclidean(2).unwrap();
        let ones = Operator::general(Matrix::from_rows(vec![vec![q(1, 1), q(1, 1)], vec![q(1, 1), q(1, 1)]]));
        let ker = ctx2.kernel_basis(&ones);
        assert_eq!(ker.len(), 1);
        assert_eq!(ker[0][0].clone(), -ker[0][1].clone());
    }

    #[test]
    fn random_operators_have_their_kind_and_rank() {
        let ctx = SpaceContext::<Rational>::euclidean(3).unwrap();
        let a = ctx.random_operator(OperatorKind::SelfAdjoint, None, 1).unwrap();
        assert_eq!(ctx.adjoint(&a).unwrap().matrix(), a.matrix());

        let ctx4 = SpaceContext::<Rational>::euclidean(4).unwrap();
        let b = ctx4.random_operator(OperatorKind::SkewAdjoint, Some(2), 7).unwrap();
        assert_eq!(ctx4.adjoint(&b).unwrap().matrix(), &b.matrix().neg());
        assert_eq!(ctx4.rank(&b), 2);

        let err = ctx4.random_operator(OperatorKind::SkewAdjoint, Some(3), 0).unwrap_err();
        assert!(matches!(err, Error::Constraint(_)));
        assert!(matches!(
            ctx4.random_operator(OperatorKind::General, Some(5), 0),
            Err(Error::Constraint(_))
        ));
    }

    #[test]
    fn random_generation_is_deterministic_per_seed() {
        let ctx = SpaceContext::<Rational>::euclidean(4).unwrap();
        let a = ctx.random_operator(OperatorKind::General, Some(3), 11).unwrap();
        let b = ctx.random_operator(OperatorKind::General, Some(3), 11).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn kinds_hold_under_non_identity_phi() {
        let phi = Matrix::from_rows(vec![
            vec![q(2, 1), q(1, 1), q(0, 1)],
            vec![q(1, 1), q(2, 1), q(0, 1)],
            vec![q(0, 1), q(0, 1), q(3, 1)],
        ]);
        let ctx = SpaceContext::new(phi, 0.0).unwrap();
        for seed in 0..10 {
            let s = ctx.random_operator(OperatorKind::SelfAdjoint, None, seed).unwrap();
            assert_eq!(ctx.adjoint(&s).unwrap().matrix(), s.matrix());
            let k = ctx.random_operator(OperatorKind::SkewAdjoint, Some(2), seed).unwrap();
            assert_eq!(ctx.adjoint(&k).unwrap().matrix(), &k.matrix().neg());
            assert_eq!(ctx.rank(&k), 2);
        }
    }

    #[test]
    fn rejects_bad_inner_products() {
        let not_sym = Matrix::from_rows(vec![vec![q(1, 1), q(1, 1)], vec![q(0, 1), q(1, 1)]]);
        assert!(SpaceContext::new(not_sym, 0.0).is_err());
        let indefinite = diag(&[q(1, 1), q(-1, 1)]);
        assert!(SpaceContext::new(indefinite, 0.0).is_err());
        let f_indefinite = Matrix::<f64>::diagonal(&[1.0, -1.0]);
        assert!(SpaceContext::new(f_indefinite, 1e-9).is_err());
        assert!(SpaceContext::<Rational>::new(Matrix::zeros(0, 0), 0.0).is_err());
    }

    #[test]
    fn dimension_one_skew_is_zero() {
        let ctx = SpaceContext::<Rational>::euclidean(1).unwrap();
        let b = ctx.random_operator(OperatorKind::SkewAdjoint, None, 3).unwrap();
        assert!(b.is_zero(0.0));
    }

    #[test]
    fn operator_kind_is_validated() {
        let ctx = SpaceContext::<Rational>::euclidean(2).unwrap();
        let m = Matrix::from_rows(vec![vec![q(0, 1), q(1, 1)], vec![q(0, 1), q(0, 1)]]);
        assert!(Operator::new(&ctx, m.clone(), OperatorKind::SelfAdjoint).is_err());
        assert!(Operator::new(&ctx, m, OperatorKind::General).is_ok());
        let wrong = Matrix::<Rational>::identity(3);
        assert!(matches!(Operator::new(&ctx, wrong, OperatorKind::General), Err(Error::Context(_))));
    }
}
