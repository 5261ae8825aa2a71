//! Linear (in)dependence of curvature tensors and operators, and checkers for
//! the independence theorems and their necessary conditions.

use serde::Serialize;

use crate::curvature::{antisymmetric_build, symmetric_build, CurvatureTensor};
use crate::error::{Error, Result};
use crate::linalg::{Operator, OperatorKind, SpaceContext};
use crate::matrix::Matrix;
use crate::report::{no_failures, Conclusion};
use crate::scalar::{rationalize, Mode, Rational, Scalar};

/// Largest set whose proper subsets are enumerated.
pub const PROPER_CHECK_LIMIT: usize = 5;
/// Denominator bound used when handing float inputs to the exact referee.
pub const REFEREE_DENOMINATOR: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct DependenceVerdict<S: Scalar> {
    pub independent: bool,
    pub rank: usize,
    /// A null vector, normalized so its first nonzero entry is 1.
    #[serde(serialize_with = "crate::io::opt_scalars")]
    pub coefficients: Option<Vec<S>>,
    /// Whether no proper subset is dependent (sets of at most five).
    pub proper: Option<bool>,
    /// `‖Σ cᵢ flatten(Rᵢ)‖∞` for the reported coefficients.
    pub residual: f64,
    /// `σ_min / σ_max` of the flattened system (float mode).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub singular_ratio: Option<f64>,
    /// Whether the verdict came from the exact referee.
    pub refereed: bool,
}

fn column_matrix<S: Scalar>(columns: &[Vec<S>]) -> Matrix<S> {
    Matrix::from_columns(columns)
}

/// Rational images of float columns, if every entry has a short expansion.
fn rational_columns<S: Scalar>(columns: &[Vec<S>]) -> Option<Vec<Vec<Rational>>> {
    columns
        .iter()
        .map(|col| {
            col.iter()
                .map(|x| {
                    let f = x.to_f64();
                    let r = rationalize(f, REFEREE_DENOMINATOR)?;
                    ((r.to_f64() - f).abs() <= 1e-12 * (1.0 + f.abs())).then_some(r)
                })
                .collect()
        })
        .collect()
}

fn normalize<S: Scalar>(v: Vec<S>, tol: f64) -> Vec<S> {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.to_f64().abs()));
    match v.iter().find(|x| !x.is_negligible(tol, scale)) {
        Some(p) => {
            let p = p.clone();
            v.into_iter().map(|x| x / p.clone()).collect()
        }
        None => v,
    }
}

fn combination_residual<S: Scalar>(columns: &[Vec<S>], c: &[S]) -> f64 {
    let len = columns.first().map_or(0, Vec::len);
    (0..len)
        .map(|i| columns.iter().zip(c).fold(S::zero(), |acc, (col, ci)| acc + ci.clone() * col[i].clone()).to_f64().abs())
        .fold(0.0, f64::max)
}

/// Rank, a null vector and provenance of the verdict for a set of vectors.
struct Core<S> {
    rank: usize,
    null: Option<Vec<S>>,
    singular_ratio: Option<f64>,
    refereed: bool,
}

fn analyze<S: Scalar>(columns: &[Vec<S>], tol: f64) -> Core<S> {
    let m = column_matrix(columns);
    let k = columns.len();
    let mut singular_ratio = None;
    if S::MODE == Mode::Float64 {
        let f = m.convert(|x| x.to_f64());
        let sv = crate::scalar::singular_values(&f);
        let max = sv.iter().copied().fold(0.0, f64::max);
        let min = if sv.len() < k { 0.0 } else { sv.iter().copied().fold(f64::INFINITY, f64::min) };
        let ratio = if max == 0.0 { 0.0 } else { min / max };
        singular_ratio = Some(ratio);
        if ratio > 0.1 * tol && ratio < 10.0 * tol {
            if let Some(exact) = rational_columns(columns) {
                let em = column_matrix(&exact);
                let rank = Rational::rank(&em, 0.0);
                let null = Rational::nullspace(&em, 0.0)
                    .into_iter()
                    .next()
                    .map(|v| v.iter().map(|x| S::approximate(x.to_f64(), 1)).collect());
                return Core { rank, null, singular_ratio, refereed: true };
            }
        }
    }
    let rank = S::rank(&m, tol);
    let null = if rank < k { S::nullspace(&m, tol).into_iter().next() } else { None };
    Core { rank, null, singular_ratio, refereed: false }
}

fn same_context<S: Scalar>(tensors: &[CurvatureTensor<S>]) -> Result<&SpaceContext<S>> {
    let first = tensors.first().ok_or_else(|| Error::Context("dependence of an empty set".into()))?;
    if tensors.iter().any(|t| t.context() != first.context()) {
        return Err(Error::Context("tensors live in different contexts".into()));
    }
    Ok(first.context())
}

/// Decides whether the tensors are linearly dependent.
pub fn dependence<S: Scalar>(tensors: &[CurvatureTensor<S>]) -> Result<DependenceVerdict<S>> {
    let ctx = same_context(tensors)?;
    let columns: Vec<Vec<S>> = tensors.iter().map(CurvatureTensor::flatten).collect();
    Ok(verdict(&columns, ctx.tolerance()))
}

fn verdict<S: Scalar>(columns: &[Vec<S>], tol: f64) -> DependenceVerdict<S> {
    let k = columns.len();
    let core = analyze(columns, tol);
    let independent = core.rank == k;
    let coefficients = core.null.map(|v| normalize(v, tol));
    let residual = coefficients.as_ref().map_or(0.0, |c| combination_residual(columns, c));
    let proper = if independent || k > PROPER_CHECK_LIMIT {
        None
    } else {
        Some((0..k).all(|skip| {
            let sub: Vec<Vec<S>> =
                columns.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, c)| c.clone()).collect();
            sub.is_empty() || analyze(&sub, tol).rank == sub.len()
        }))
    };
    DependenceVerdict {
        independent,
        rank: core.rank,
        coefficients,
        proper,
        residual,
        singular_ratio: core.singular_ratio,
        refereed: core.refereed,
    }
}

/// Independence of operators as vectors of their `n²` entries.
pub fn operators_independent<S: Scalar>(ctx: &SpaceContext<S>, ops: &[&Operator<S>]) -> bool {
    let columns: Vec<Vec<S>> = ops.iter().map(|o| o.matrix().as_slice().to_vec()).collect();
    analyze(&columns, ctx.tolerance()).rank == ops.len()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremStatus {
    Pass,
    Falsified,
    HypothesisUnmet,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct IndependenceReport<S: Scalar> {
    pub dim: usize,
    pub operators_independent: bool,
    pub tensors: DependenceVerdict<S>,
    pub status: TheoremStatus,
}

fn require_kind<S: Scalar>(op: &Operator<S>, kind: OperatorKind, name: &str) -> Result<()> {
    if op.kind() != kind {
        return Err(Error::Hypothesis(format!("{name} must be {kind}, got {}", op.kind())));
    }
    Ok(())
}

fn independence_report<S: Scalar>(
    ctx: &SpaceContext<S>,
    ops: [&Operator<S>; 3],
    tensors: Vec<CurvatureTensor<S>>,
) -> Result<IndependenceReport<S>> {
    let operators_independent = operators_independent(ctx, &ops);
    let tensors = dependence(&tensors)?;
    let status = match (operators_independent, tensors.independent) {
        (false, _) => TheoremStatus::HypothesisUnmet,
        (true, true) => TheoremStatus::Pass,
        (true, false) => TheoremStatus::Falsified,
    };
    Ok(IndependenceReport { dim: ctx.dim(), operators_independent, tensors, status })
}

/// `{I, B, C}` independent implies `{R^S_I, R^S_B, R^Λ_C}` independent, for
/// `B` self-adjoint, `C` skew-adjoint and `dim > 3`.
pub fn check_theorem_ssl<S: Scalar>(
    ctx: &SpaceContext<S>,
    b: &Operator<S>,
    c: &Operator<S>,
) -> Result<IndependenceReport<S>> {
    require_kind(b, OperatorKind::SelfAdjoint, "B")?;
    require_kind(c, OperatorKind::SkewAdjoint, "C")?;
    if ctx.dim() <= 3 {
        return Err(Error::Hypothesis(format!("dimension {} ≤ 3", ctx.dim())));
    }
    let id = Operator::identity(ctx.dim());
    let tensors = vec![symmetric_build(ctx, &id)?, symmetric_build(ctx, b)?, antisymmetric_build(ctx, c)?];
    independence_report(ctx, [&id, b, c], tensors)
}

/// `{I, C, D}` independent implies `{R^S_I, R^Λ_C, R^Λ_D}` independent, for
/// `C`, `D` skew-adjoint and `dim ≥ 3`.
pub fn check_theorem_sll<S: Scalar>(
    ctx: &SpaceContext<S>,
    c: &Operator<S>,
    d: &Operator<S>,
) -> Result<IndependenceReport<S>> {
    require_kind(c, OperatorKind::SkewAdjoint, "C")?;
    require_kind(d, OperatorKind::SkewAdjoint, "D")?;
    if ctx.dim() < 3 {
        return Err(Error::Hypothesis(format!("dimension {} < 3", ctx.dim())));
    }
    let id = Operator::identity(ctx.dim());
    let tensors = vec![symmetric_build(ctx, &id)?, antisymmetric_build(ctx, c)?, antisymmetric_build(ctx, d)?];
    independence_report(ctx, [&id, c, d], tensors)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct NecessaryConditionsReport<S: Scalar> {
    pub verdict: DependenceVerdict<S>,
    pub commutator_norm: f64,
    pub rank_c: usize,
    pub conclusions: Vec<Conclusion>,
    pub passed: bool,
}

/// When `{R^S_I, R^S_B, R^Λ_C}` is properly dependent: `BC = CB` and
/// `rank C = 2`. Dependence through a proper subset (for example `C = 0` or
/// `B = λI`) does not engage the conclusions and is reported as such.
pub fn necessary_conditions_ssl<S: Scalar>(
    ctx: &SpaceContext<S>,
    b: &Operator<S>,
    c: &Operator<S>,
) -> Result<NecessaryConditionsReport<S>> {
    require_kind(b, OperatorKind::SelfAdjoint, "B")?;
    require_kind(c, OperatorKind::SkewAdjoint, "C")?;
    if ctx.dim() < 3 {
        return Err(Error::Hypothesis(format!("dimension {} < 3", ctx.dim())));
    }
    let id = Operator::identity(ctx.dim());
    let verdict = dependence(&[symmetric_build(ctx, &id)?, symmetric_build(ctx, b)?, antisymmetric_build(ctx, c)?])?;
    let commutator = b.matrix().matmul(c.matrix()).sub(&c.matrix().matmul(b.matrix()));
    let commutator_norm = commutator.max_abs();
    let commute = commutator.is_negligible(ctx.tolerance(), b.matrix().max_abs() * c.matrix().max_abs());
    let rank_c = ctx.rank(c);
    let conclusions = if verdict.independent {
        vec![
            Conclusion::not_applicable("BC = CB", "tensors independent"),
            Conclusion::not_applicable("rank C = 2", "tensors independent"),
        ]
    } else if verdict.proper == Some(true) {
        vec![
            Conclusion::check("BC = CB", commute).with_detail(format!("‖BC − CB‖∞ = {commutator_norm}")),
            Conclusion::check("rank C = 2", rank_c == 2).with_detail(format!("rank C = {rank_c}")),
        ]
    } else {
        vec![
            Conclusion::not_applicable("BC = CB", "dependence is not proper"),
            Conclusion::not_applicable("rank C = 2", "dependence is not proper"),
        ]
    };
    let passed = no_failures(&conclusions);
    Ok(NecessaryConditionsReport { verdict, commutator_norm, rank_c, conclusions, passed })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExclusionCase {
    /// `R^Λ_A ≠ ±R^S_B` for skew `A ≠ 0`, self-adjoint `B` of rank ≥ 3.
    LambdaVersusSymmetric,
    /// `R^S_A ≠ −R^S_B` for self-adjoint `A`, `B` with rank `A` ≥ 4.
    SymmetricPair,
    /// `R^Λ_C ≠ −R^Λ_D` for nonzero skew `C`, `D`.
    LambdaPair,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExclusionReport {
    pub case: ExclusionCase,
    pub conclusions: Vec<Conclusion>,
    pub passed: bool,
}

/// Checks the pairwise non-equalities, choosing the case by the operator kinds.
pub fn pairwise_exclusions<S: Scalar>(ctx: &SpaceContext<S>, a: &Operator<S>, b: &Operator<S>) -> Result<ExclusionReport> {
    use OperatorKind::*;
    let tol = ctx.tolerance();
    let (case, conclusions) = match (a.kind(), b.kind()) {
        (SkewAdjoint, SelfAdjoint) | (SelfAdjoint, SkewAdjoint) => {
            let (skew, sym) = if a.kind() == SkewAdjoint { (a, b) } else { (b, a) };
            if skew.is_zero(tol) {
                return Err(Error::Hypothesis("the skew-adjoint operator is zero".into()));
            }
            let rank = ctx.rank(sym);
            if rank < 3 {
                return Err(Error::Hypothesis(format!("self-adjoint operator has rank {rank} < 3")));
            }
            let l = antisymmetric_build(ctx, skew)?;
            let s = symmetric_build(ctx, sym)?;
            (
                ExclusionCase::LambdaVersusSymmetric,
                vec![
                    Conclusion::check("R^Λ_A ≠ R^S_B", !l.approx_eq(&s)),
                    Conclusion::check("R^Λ_A ≠ −R^S_B", !l.approx_eq(&s.scale(&-S::one()))),
                ],
            )
        }
        (SelfAdjoint, SelfAdjoint) => {
            let rank = ctx.rank(a);
            if rank < 4 {
                return Err(Error::Hypothesis(format!("rank A = {rank} < 4")));
            }
            let ra = symmetric_build(ctx, a)?;
            let rb = symmetric_build(ctx, b)?;
            (ExclusionCase::SymmetricPair, vec![Conclusion::check("R^S_A ≠ −R^S_B", !ra.approx_eq(&rb.scale(&-S::one())))])
        }
        (SkewAdjoint, SkewAdjoint) => {
            if a.is_zero(tol) || b.is_zero(tol) {
                return Err(Error::Hypothesis("both skew-adjoint operators must be nonzero".into()));
            }
            let ra = antisymmetric_build(ctx, a)?;
            let rb = antisymmetric_build(ctx, b)?;
            (ExclusionCase::LambdaPair, vec![Conclusion::check("R^Λ_C ≠ −R^Λ_D", !ra.approx_eq(&rb.scale(&-S::one())))])
        }
        _ => return Err(Error::Hypothesis("operators must be self- or skew-adjoint".into())),
    };
    let passed = no_failures(&conclusions);
    Ok(ExclusionReport { case, conclusions, passed })
}
