//! Curvature tensors and the canonical builds.
//!
//! A tensor is stored densely as `n⁴` entries indexed `(x, y, z, w)` over the
//! standard basis in lexicographic order. With `G[a][b] = φ(A e_a, e_b)`:
//!
//! ```text
//! R^S_A(a,b,c,d) = G[a][d] G[b][c] − G[a][c] G[b][d]
//! R^Λ_A(a,b,c,d) = R^S_A(a,b,c,d) − 2 G[a][b] G[c][d]
//! ```
//!
//! Both builds are antisymmetric in the first pair for every operator. Pair
//! symmetry needs a self- or skew-adjoint operator, and the Bianchi identity
//! needs the kind matching the build.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Operator, OperatorKind, SpaceContext};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Which canonical build a tensor or term uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Build {
    /// Symmetric build `R^S`.
    #[serde(rename = "S")]
    Symmetric,
    /// Anti-symmetric build `R^Λ`.
    #[serde(rename = "Lambda")]
    Antisymmetric,
}

impl Build {
    /// The operator kind for which this build is canonical.
    pub fn canonical_kind(self) -> OperatorKind {
        match self {
            Build::Symmetric => OperatorKind::SelfAdjoint,
            Build::Antisymmetric => OperatorKind::SkewAdjoint,
        }
    }

    /// Build selected by an operator's declared kind (general operators get `S`).
    pub fn for_kind(kind: OperatorKind) -> Build {
        match kind {
            OperatorKind::SkewAdjoint => Build::Antisymmetric,
            _ => Build::Symmetric,
        }
    }

    pub fn tensor<S: Scalar>(self, ctx: &SpaceContext<S>, op: &Operator<S>) -> Result<CurvatureTensor<S>> {
        match self {
            Build::Symmetric => symmetric_build(ctx, op),
            Build::Antisymmetric => antisymmetric_build(ctx, op),
        }
    }
}

impl fmt::Display for Build {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Build::Symmetric => "S",
            Build::Antisymmetric => "Lambda",
        })
    }
}

/// Operator a tensor was built from, when known.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance<S: Scalar> {
    pub build: Build,
    pub operator: Operator<S>,
}

#[derive(Debug, Clone)]
pub struct CurvatureTensor<S: Scalar> {
    ctx: SpaceContext<S>,
    entries: Vec<S>,
    provenance: Option<Provenance<S>>,
}

impl<S: Scalar> PartialEq for CurvatureTensor<S> {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl<S: Scalar> CurvatureTensor<S> {
    pub fn zeros(ctx: &SpaceContext<S>) -> Self {
        let n = ctx.dim();
        CurvatureTensor { ctx: ctx.clone(), entries: vec![S::zero(); n.pow(4)], provenance: None }
    }

    /// Entries in lexicographic `(x, y, z, w)` order.
    pub fn from_entries(ctx: &SpaceContext<S>, entries: Vec<S>) -> Result<Self> {
        let n = ctx.dim();
        if entries.len() != n.pow(4) {
            return Err(Error::Context(format!(
                "tensor has {} entries, expected {} for dimension {n}",
                entries.len(),
                n.pow(4)
            )));
        }
        Ok(CurvatureTensor { ctx: ctx.clone(), entries, provenance: None })
    }

    pub fn from_fn(ctx: &SpaceContext<S>, mut f: impl FnMut([usize; 4]) -> S) -> Self {
        let n = ctx.dim();
        let mut entries = Vec::with_capacity(n.pow(4));
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        entries.push(f([a, b, c, d]));
                    }
                }
            }
        }
        CurvatureTensor { ctx: ctx.clone(), entries, provenance: None }
    }

    pub fn context(&self) -> &SpaceContext<S> {
        &self.ctx
    }

    pub fn dim(&self) -> usize {
        self.ctx.dim()
    }

    pub fn provenance(&self) -> Option<&Provenance<S>> {
        self.provenance.as_ref()
    }

    pub fn with_provenance(mut self, provenance: Provenance<S>) -> Self {
        self.provenance = Some(provenance);
        self
    }

    fn offset(&self, [a, b, c, d]: [usize; 4]) -> usize {
        let n = self.dim();
        ((a * n + b) * n + c) * n + d
    }

    pub fn get(&self, idx: [usize; 4]) -> &S {
        &self.entries[self.offset(idx)]
    }

    pub fn entries(&self) -> &[S] {
        &self.entries
    }

    /// Deterministic coordinate vector of all `n⁴` entries (lexicographic order).
    pub fn flatten(&self) -> Vec<S> {
        self.entries.clone()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.to_f64().abs()))
    }

    pub fn max_abs_exact(&self) -> S {
        max_magnitude(self.entries.iter())
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|v| v.is_negligible(self.ctx.tolerance(), 0.0))
    }

    /// Entrywise equality: exact, or within `tol · (1 + max |entry|)` in float mode.
    pub fn approx_eq(&self, other: &Self) -> bool {
        if self.entries.len() != other.entries.len() {
            return false;
        }
        let scale = self.max_abs().max(other.max_abs());
        let tol = self.ctx.tolerance();
        self.entries
            .iter()
            .zip(&other.entries)
            .all(|(a, b)| (a.clone() - b.clone()).is_negligible(tol, scale))
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.clone() + b.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a.clone() - b.clone())
    }

    pub fn scale(&self, c: &S) -> Self {
        CurvatureTensor {
            ctx: self.ctx.clone(),
            entries: self.entries.iter().map(|v| v.clone() * c.clone()).collect(),
            provenance: None,
        }
    }

    fn zip(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        assert_eq!(self.entries.len(), other.entries.len(), "dimension mismatch");
        CurvatureTensor {
            ctx: self.ctx.clone(),
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect(),
            provenance: None,
        }
    }

    /// Multilinear evaluation `R(x, y, z, w)` on arbitrary vectors.
    pub fn evaluate(&self, [x, y, z, w]: [&[S]; 4]) -> S {
        let n = self.dim();
        let mut total = S::zero();
        for a in (0..n).filter(|&a| !x[a].is_zero()) {
            for b in (0..n).filter(|&b| !y[b].is_zero()) {
                let xy = x[a].clone() * y[b].clone();
                for c in (0..n).filter(|&c| !z[c].is_zero()) {
                    let xyz = xy.clone() * z[c].clone();
                    for d in (0..n).filter(|&d| !w[d].is_zero()) {
                        let e = self.get([a, b, c, d]);
                        if !e.is_zero() {
                            total = total + xyz.clone() * w[d].clone() * e.clone();
                        }
                    }
                }
            }
        }
        total
    }
}

pub(crate) fn max_magnitude<'a, S: Scalar>(it: impl Iterator<Item = &'a S>) -> S {
    it.fold(S::zero(), |m, v| {
        let a = v.magnitude();
        if a > m {
            a
        } else {
            m
        }
    })
}

/// Tensor of the given build from a Gram matrix `G[a][b] = φ(A e_a, e_b)`.
pub fn tensor_from_gram<S: Scalar>(ctx: &SpaceContext<S>, g: &Matrix<S>, build: Build) -> CurvatureTensor<S> {
    let lambda = build == Build::Antisymmetric;
    let two = S::from_i64(2);
    CurvatureTensor::from_fn(ctx, |[a, b, c, d]| {
        let mut v = g[(a, d)].clone() * g[(b, c)].clone() - g[(a, c)].clone() * g[(b, d)].clone();
        if lambda {
            v = v - two.clone() * g[(a, b)].clone() * g[(c, d)].clone();
        }
        v
    })
}

/// `R^S_A(x,y,z,w) = φ(Ax,w)φ(Ay,z) − φ(Ax,z)φ(Ay,w)`.
pub fn symmetric_build<S: Scalar>(ctx: &SpaceContext<S>, a: &Operator<S>) -> Result<CurvatureTensor<S>> {
    ctx.check_dim(a.matrix())?;
    Ok(tensor_from_gram(ctx, &ctx.gram(a.matrix()), Build::Symmetric)
        .with_provenance(Provenance { build: Build::Symmetric, operator: a.clone() }))
}

/// `R^Λ_B(x,y,z,w) = φ(Bx,w)φ(By,z) − φ(Bx,z)φ(By,w) − 2φ(Bx,y)φ(Bz,w)`.
pub fn antisymmetric_build<S: Scalar>(ctx: &SpaceContext<S>, b: &Operator<S>) -> Result<CurvatureTensor<S>> {
    ctx.check_dim(b.matrix())?;
    Ok(tensor_from_gram(ctx, &ctx.gram(b.matrix()), Build::Antisymmetric)
        .with_provenance(Provenance { build: Build::Antisymmetric, operator: b.clone() }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Antisymmetry,
    PairSymmetry,
    Bianchi,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub axiom: Axiom,
    pub indices: [usize; 4],
    pub violation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActReport {
    pub is_act: bool,
    /// First violating quadruple per axiom family.
    pub witnesses: Vec<Witness>,
}

/// Checks antisymmetry, pair symmetry and the Bianchi identity.
pub fn is_act<S: Scalar>(r: &CurvatureTensor<S>) -> ActReport {
    let n = r.dim();
    let tol = r.ctx.tolerance();
    let scale = r.max_abs();
    let mut found: [Option<Witness>; 3] = [None, None, None];
    let mut record = |slot: usize, axiom: Axiom, idx: [usize; 4], v: S| {
        if found[slot].is_none() && !v.is_negligible(tol, scale) {
            found[slot] = Some(Witness { axiom, indices: idx, violation: v.to_f64().abs() });
        }
    };
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for w in 0..n {
                    let e = r.get([x, y, z, w]).clone();
                    record(0, Axiom::Antisymmetry, [x, y, z, w], e.clone() + r.get([y, x, z, w]).clone());
                    record(1, Axiom::PairSymmetry, [x, y, z, w], e.clone() - r.get([z, w, x, y]).clone());
                    let bianchi = e + r.get([z, x, y, w]).clone() + r.get([y, z, x, w]).clone();
                    record(2, Axiom::Bianchi, [x, y, z, w], bianchi);
                }
            }
        }
    }
    let witnesses: Vec<Witness> = found.into_iter().flatten().collect();
    ActReport { is_act: witnesses.is_empty(), witnesses }
}

/// The three evaluations `R^S_A(x,y,z,w)`, `R^S_φ(Ax,Ay,z,w)` and
/// `R^S_φ(x,y,A*z,A*w)`, computed along independent routes.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferTriple<S> {
    pub tensor_entry: S,
    pub pushed_forward: S,
    pub pulled_back: S,
}

impl<S: Scalar> TransferTriple<S> {
    pub fn agrees(&self, tol: f64) -> bool {
        let scale = [&self.tensor_entry, &self.pushed_forward, &self.pulled_back]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.to_f64().abs()));
        (self.tensor_entry.clone() - self.pushed_forward.clone()).is_negligible(tol, scale)
            && (self.tensor_entry.clone() - self.pulled_back.clone()).is_negligible(tol, scale)
    }
}

/// `R^S_φ(x,y,z,w) = φ(x,w)φ(y,z) − φ(x,z)φ(y,w)`.
fn metric_symmetric<S: Scalar>(ctx: &SpaceContext<S>, [x, y, z, w]: [&[S]; 4]) -> S {
    ctx.inner(x, w) * ctx.inner(y, z) - ctx.inner(x, z) * ctx.inner(y, w)
}

/// Moves `A` between the first and last slot pairs of the metric build.
pub fn adjoint_transfer<S: Scalar>(
    ctx: &SpaceContext<S>,
    a: &Operator<S>,
    [x, y, z, w]: [&[S]; 4],
) -> Result<TransferTriple<S>> {
    let tensor_entry = symmetric_build(ctx, a)?.evaluate([x, y, z, w]);
    let m = a.matrix();
    let (ax, ay) = (m.mul_vec(x), m.mul_vec(y));
    let pushed_forward = metric_symmetric(ctx, [&ax, &ay, z, w]);
    let adj = ctx.adjoint_matrix(m);
    let (az, aw) = (adj.mul_vec(z), adj.mul_vec(w));
    let pulled_back = metric_symmetric(ctx, [x, y, &az, &aw]);
    Ok(TransferTriple { tensor_entry, pushed_forward, pulled_back })
}

/// `max |R^Λ_A − (R^S_A − 2φ(A·,·)φ(A·,·))|` over all basis quadruples; holds for every operator.
pub fn correction_term_deviation<S: Scalar>(ctx: &SpaceContext<S>, a: &Operator<S>) -> Result<S> {
    let lambda = antisymmetric_build(ctx, a)?;
    let sym = symmetric_build(ctx, a)?;
    let g = ctx.gram(a.matrix());
    let two = S::from_i64(2);
    let n = ctx.dim();
    let mut worst = S::zero();
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                for w in 0..n {
                    let rhs = sym.get([x, y, z, w]).clone()
                        - two.clone() * g[(x, y)].clone() * g[(z, w)].clone();
                    let dev = (lambda.get([x, y, z, w]).clone() - rhs).magnitude();
                    if dev > worst {
                        worst = dev;
                    }
                }
            }
        }
    }
    Ok(worst)
}

/// The three permuted symmetric builds whose sum should equal `R^Λ_A`.
pub fn permuted_symmetric_sum<S: Scalar>(ctx: &SpaceContext<S>, a: &Operator<S>) -> Result<CurvatureTensor<S>> {
    let sym = symmetric_build(ctx, a)?;
    let two = S::from_i64(2);
    Ok(CurvatureTensor::from_fn(ctx, |[x, y, z, w]| {
        two.clone() * sym.get([x, y, z, w]).clone()
            + sym.get([x, z, y, w]).clone()
            + sym.get([x, w, z, y]).clone()
    }))
}

/// `max |R^Λ_A − [2R^S_A(x,y,z,w) + R^S_A(x,z,y,w) + R^S_A(x,w,z,y)]|`.
///
/// Only claimed for skew-adjoint `A`; other kinds are rejected.
pub fn skew_identity_deviation<S: Scalar>(ctx: &SpaceContext<S>, a: &Operator<S>) -> Result<S> {
    if a.kind() != OperatorKind::SkewAdjoint || !ctx.has_kind(a.matrix(), OperatorKind::SkewAdjoint) {
        return Err(Error::Hypothesis("the identity requires a skew-adjoint operator".into()));
    }
    let lambda = antisymmetric_build(ctx, a)?;
    let rhs = permuted_symmetric_sum(ctx, a)?;
    Ok(max_magnitude(lambda.sub(&rhs).entries.iter()))
}

/// Contracts one slot with `A`: `T'(…, a, …) = Σ_i T(…, i, …) A[i][a]`.
fn contract_slot<S: Scalar>(entries: &[S], n: usize, slot: usize, a: &Matrix<S>) -> Vec<S> {
    let stride = n.pow(3 - slot as u32);
    (0..entries.len())
        .map(|idx| {
            let p = (idx / stride) % n;
            let base = idx - p * stride;
            (0..n).fold(S::zero(), |acc, i| {
                let coeff = &a[(i, p)];
                let e = &entries[base + i * stride];
                if coeff.is_zero() || e.is_zero() {
                    acc
                } else {
                    acc + e.clone() * coeff.clone()
                }
            })
        })
        .collect()
}

/// Precomposition `(A*R)(x,y,z,w) = R(Ax, Ay, Az, Aw)`.
pub fn precompose<S: Scalar>(
    ctx: &SpaceContext<S>,
    a: &Operator<S>,
    r: &CurvatureTensor<S>,
) -> Result<CurvatureTensor<S>> {
    ctx.check_dim(a.matrix())?;
    if r.dim() != ctx.dim() {
        return Err(Error::Context("tensor and operator dimensions differ".into()));
    }
    let n = ctx.dim();
    let mut entries = r.entries.clone();
    for slot in 0..4 {
        entries = contract_slot(&entries, n, slot, a.matrix());
    }
    CurvatureTensor::from_entries(ctx, entries)
}

/// `A* C A`, keeping the kind of `C` (both kinds are preserved by congruence).
pub fn congruence<S: Scalar>(ctx: &SpaceContext<S>, a: &Operator<S>, c: &Operator<S>) -> Operator<S> {
    let m = ctx.adjoint_matrix(a.matrix()).matmul(c.matrix()).matmul(a.matrix());
    Operator::with_kind_unchecked(m, c.kind())
}

/// Sign of a canonical term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub enum Sign {
    Minus,
    Plus,
}

impl Sign {
    pub fn value<S: Scalar>(self) -> S {
        match self {
            Sign::Plus => S::one(),
            Sign::Minus => -S::one(),
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn of<S: Scalar>(v: &S) -> Self {
        if *v < S::zero() {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }
}

impl TryFrom<i8> for Sign {
    type Error = String;

    fn try_from(v: i8) -> Result<Self, String> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(format!("sign must be +1 or -1, got {other}")),
        }
    }
}

impl From<Sign> for i8 {
    fn from(s: Sign) -> i8 {
        match s {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// One signed summand `sign · weight · R_op` of a decomposition.
///
/// `weight` carries a positive factor that could not be absorbed into the
/// operator as a square root (exact mode only); the term equals the build of
/// `√weight · op`. It is `1` whenever absorption succeeded.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalTerm<S: Scalar> {
    pub build: Build,
    pub sign: Sign,
    pub op: Operator<S>,
    pub weight: S,
}

impl<S: Scalar> CanonicalTerm<S> {
    /// Requires the operator kind to match the build.
    pub fn new(build: Build, sign: Sign, op: Operator<S>) -> Result<Self> {
        if op.kind() != build.canonical_kind() {
            return Err(Error::Context(format!(
                "{build} build requires a {} operator, got {}",
                build.canonical_kind(),
                op.kind()
            )));
        }
        Ok(CanonicalTerm { build, sign, op, weight: S::one() })
    }

    /// Skips the kind check, for probing non-canonical builds.
    pub fn raw(build: Build, sign: Sign, op: Operator<S>) -> Self {
        CanonicalTerm { build, sign, op, weight: S::one() }
    }

    /// Term from a signed coefficient `c·R_op`: the magnitude is absorbed into
    /// the operator when it has a square root in the scalar field.
    pub fn from_coefficient(build: Build, op: Operator<S>, c: &S) -> Self {
        let sign = Sign::of(c);
        let mag = c.magnitude();
        match mag.sqrt_exact() {
            Some(root) => CanonicalTerm { build, sign, op: op.scaled(&root), weight: S::one() },
            None => CanonicalTerm { build, sign, op, weight: mag },
        }
    }

    pub fn with_weight(mut self, weight: S) -> Self {
        self.weight = weight;
        self
    }

    /// `sign · weight · R_op`.
    pub fn tensor(&self, ctx: &SpaceContext<S>) -> Result<CurvatureTensor<S>> {
        let r = self.build.tensor(ctx, &self.op)?;
        let factor = self.sign.value::<S>() * self.weight.clone();
        Ok(if factor.is_one() { r } else { r.scale(&factor) })
    }
}

/// `Σ` of term tensors.
pub fn sum_terms<S: Scalar>(ctx: &SpaceContext<S>, terms: &[CanonicalTerm<S>]) -> Result<CurvatureTensor<S>> {
    terms
        .iter()
        .try_fold(CurvatureTensor::zeros(ctx), |acc, t| Ok(acc.add(&t.tensor(ctx)?)))
}

/// Dimension of the space of algebraic curvature tensors, `n²(n²−1)/12`.
pub fn act_space_dimension(n: usize) -> usize {
    n * n * (n * n - 1) / 12
}

#[cfg(test)]
mod tests {
    use num_traits::Zero;

    use super::*;
    use crate::scalar::Rational;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn ctx(n: usize) -> SpaceContext<Rational> {
        SpaceContext::euclidean(n).unwrap()
    }

    fn diag(v: &[Rational]) -> Operator<Rational> {
        Operator::new(&ctx(v.len()), Matrix::diagonal(v), OperatorKind::SelfAdjoint).unwrap()
    }

    fn j(n: usize) -> Operator<Rational> {
        let mut m = Matrix::zeros(n, n);
        m[(0, 1)] = q(1, 1);
        m[(1, 0)] = q(-1, 1);
        Operator::new(&ctx(n), m, OperatorKind::SkewAdjoint).unwrap()
    }

    #[test]
    fn identity_build_in_two_dimensions() {
        let c = ctx(2);
        let r = symmetric_build(&c, &Operator::identity(2)).unwrap();
        assert_eq!(r.get([0, 1, 1, 0]), &q(1, 1));
        assert_eq!(r.get([0, 0, 1, 1]), &q(0, 1));
        assert_eq!(r.get([1, 1, 0, 1]), &q(0, 1));
        assert_eq!(r.flatten().iter().filter(|v| !v.is_zero()).count(), 4);
    }

    #[test]
    fn diagonal_build_values() {
        let c = ctx(3);
        let r = symmetric_build(&c, &diag(&[q(2, 1), q(2, 1), q(1, 2)])).unwrap();
        assert_eq!(r.get([0, 2, 2, 0]), &q(1, 1));
        assert_eq!(r.get([0, 1, 1, 0]), &q(4, 1));
    }

    #[test]
    fn symmetric_build_is_quadratic() {
        let c = ctx(3);
        let one = symmetric_build(&c, &Operator::identity(3)).unwrap();
        let two = symmetric_build(&c, &Operator::identity(3).scaled(&q(2, 1))).unwrap();
        assert_eq!(two, one.scale(&q(4, 1)));
    }

    #[test]
    fn antisymmetric_build_examples() {
        let c2 = ctx(2);
        assert!(antisymmetric_build(&c2, &Operator::zero(2, OperatorKind::SkewAdjoint)).unwrap().is_zero());
        let r = antisymmetric_build(&c2, &j(2)).unwrap();
        assert_eq!(r.get([0, 1, 1, 0]), &q(3, 1));
        let c3 = ctx(3);
        let r3 = antisymmetric_build(&c3, &j(3)).unwrap();
        assert_eq!(r3.get([0, 2, 2, 0]), &q(0, 1));
    }

    #[test]
    fn act_check_accepts_canonical_and_rejects_non_self_adjoint() {
        let c = ctx(3);
        assert!(is_act(&symmetric_build(&c, &diag(&[q(1, 1), q(2, 1), q(3, 1)])).unwrap()).is_act);
        assert!(is_act(&antisymmetric_build(&c, &j(3)).unwrap()).is_act);

        let mut m = Matrix::identity(3);
        m[(0, 1)] = q(1, 1);
        let report = is_act(&symmetric_build(&c, &Operator::general(m)).unwrap());
        assert!(!report.is_act);
        assert!(report.witnesses.iter().any(|w| w.axiom == Axiom::Bianchi));
        assert!(report.witnesses.iter().all(|w| w.axiom != Axiom::Antisymmetry));
    }

    #[test]
    fn transfer_triple_examples() {
        let c = ctx(2);
        let (e1, e2) = (c.basis_vector(0), c.basis_vector(1));
        let t = adjoint_transfer(&c, &diag(&[q(1, 1), q(2, 1)]), [&e1, &e2, &e2, &e1]).unwrap();
        assert_eq!(t, TransferTriple { tensor_entry: q(2, 1), pushed_forward: q(2, 1), pulled_back: q(2, 1) });
        let id = adjoint_transfer(&c, &Operator::identity(2), [&e1, &e2, &e2, &e1]).unwrap();
        assert_eq!(id.tensor_entry, q(1, 1));
        assert!(id.agrees(0.0));
    }

    #[test]
    fn correction_term_example() {
        let c = ctx(2);
        assert!(correction_term_deviation(&c, &Operator::zero(2, OperatorKind::General)).unwrap().is_zero());
        assert!(correction_term_deviation(&c, &j(2)).unwrap().is_zero());
        // −2 φ(J e1, e2) φ(J e2, e1) = +2 at (e1, e2, e2, e1).
        let g = c.gram(j(2).matrix());
        assert_eq!(q(-2, 1) * g[(0, 1)].clone() * g[(1, 0)].clone(), q(2, 1));
    }

    #[test]
    fn skew_identity_examples() {
        let c = ctx(2);
        assert!(skew_identity_deviation(&c, &Operator::zero(2, OperatorKind::SkewAdjoint)).unwrap().is_zero());
        assert!(skew_identity_deviation(&c, &j(2)).unwrap().is_zero());
        let sum = permuted_symmetric_sum(&c, &j(2)).unwrap();
        assert_eq!(sum.get([0, 1, 1, 0]), &q(3, 1));
        assert!(matches!(
            skew_identity_deviation(&c, &Operator::identity(2)),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn precompose_examples() {
        let c = ctx(2);
        let r = symmetric_build(&c, &Operator::identity(2)).unwrap();
        assert_eq!(precompose(&c, &Operator::identity(2), &r).unwrap(), r);
        let a = diag(&[q(1, 1), q(2, 1)]);
        let pulled = precompose(&c, &a, &r).unwrap();
        assert_eq!(pulled, symmetric_build(&c, &diag(&[q(1, 1), q(4, 1)])).unwrap());
        assert_eq!(pulled.get([0, 1, 1, 0]), &q(4, 1));

        // Image of A inside ker B kills R^Λ_B.
        let c4 = ctx(4);
        let mut b = Matrix::zeros(4, 4);
        b[(0, 1)] = q(1, 1);
        b[(1, 0)] = q(-1, 1);
        let b = Operator::new(&c4, b, OperatorKind::SkewAdjoint).unwrap();
        let a = Operator::general(Matrix::diagonal(&[q(0, 1), q(0, 1), q(1, 1), q(3, 1)]));
        assert!(precompose(&c4, &a, &antisymmetric_build(&c4, &b).unwrap()).unwrap().is_zero());
    }

    #[test]
    fn flatten_is_linear_and_sized() {
        let c = ctx(3);
        assert_eq!(CurvatureTensor::zeros(&c).flatten(), vec![q(0, 1); 81]);
        let r1 = symmetric_build(&c, &diag(&[q(1, 1), q(2, 1), q(3, 1)])).unwrap();
        let r2 = antisymmetric_build(&c, &j(3)).unwrap();
        let (a, b) = (q(3, 1), q(-1, 2));
        let lhs = r1.scale(&a).add(&r2.scale(&b)).flatten();
        let rhs: Vec<_> = r1.flatten().iter().zip(r2.flatten()).map(|(x, y)| a.clone() * x.clone() + b.clone() * y).collect();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn term_from_coefficient_absorbs_squares() {
        let c = ctx(2);
        let t = CanonicalTerm::from_coefficient(Build::Symmetric, Operator::identity(2), &q(-9, 4));
        assert_eq!(t.sign, Sign::Minus);
        assert_eq!(t.weight, q(1, 1));
        assert_eq!(t.op.matrix()[(0, 0)], q(3, 2));
        let u = CanonicalTerm::from_coefficient(Build::Symmetric, Operator::identity(2), &q(5, 1));
        assert_eq!(u.weight, q(5, 1));
        assert_eq!(u.tensor(&c).unwrap().get([0, 1, 1, 0]), &q(5, 1));
    }

    #[test]
    fn canonical_term_checks_kind() {
        assert!(CanonicalTerm::new(Build::Antisymmetric, Sign::Plus, Operator::<Rational>::identity(2)).is_err());
        assert!(CanonicalTerm::new(Build::Symmetric, Sign::Plus, Operator::<Rational>::identity(2)).is_ok());
    }

    #[test]
    fn act_dimension_formula() {
        assert_eq!(act_space_dimension(2), 1);
        assert_eq!(act_space_dimension(3), 6);
        assert_eq!(act_space_dimension(4), 20);
    }
}
