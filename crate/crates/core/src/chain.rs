//! Chain complexes of self- and skew-adjoint operators and the theorems on
//! signed sums of their curvature tensors.
//!
//! Every checker verifies the premise sum before evaluating any conclusion;
//! conclusions whose gate is closed are reported as not applicable.

use serde::Serialize;

use crate::curvature::{Build, CurvatureTensor, Sign};
use crate::error::{Error, Result};
use crate::linalg::{Operator, OperatorKind, SpaceContext};
use crate::matrix::Matrix;
use crate::report::{no_failures, Conclusion};
use crate::scalar::Scalar;

/// Outcome of a chain test: the first pair `(i, i+1)` (1-based) with
/// `A_{i+1} A_i ≠ 0`, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ChainCheck {
    pub is_chain: bool,
    pub failing_pair: Option<(usize, usize)>,
}

fn vanishes<S: Scalar>(ctx: &SpaceContext<S>, m: &Matrix<S>, scale: f64) -> bool {
    m.is_negligible(ctx.tolerance(), scale)
}

fn product_vanishes<S: Scalar>(ctx: &SpaceContext<S>, after: &Operator<S>, before: &Operator<S>) -> bool {
    let scale = after.matrix().max_abs() * before.matrix().max_abs();
    vanishes(ctx, &after.matrix().matmul(before.matrix()), scale)
}

pub fn is_chain<S: Scalar>(ctx: &SpaceContext<S>, ops: &[Operator<S>]) -> Result<ChainCheck> {
    for op in ops {
        ctx.check_dim(op.matrix())?;
    }
    let failing_pair = ops.windows(2).position(|w| !product_vanishes(ctx, &w[1], &w[0])).map(|i| (i + 1, i + 2));
    Ok(ChainCheck { is_chain: failing_pair.is_none(), failing_pair })
}

/// `Im A = ker B` for a chain `A → B`, by `rank A = n − rank B`.
pub fn exact_at<S: Scalar>(ctx: &SpaceContext<S>, a: &Operator<S>, b: &Operator<S>) -> bool {
    ctx.rank(a) + ctx.rank(b) == ctx.dim()
}

/// `rank(A^k) = rank(A)` for self- or skew-adjoint `A`.
pub fn rank_of_powers_holds<S: Scalar>(ctx: &SpaceContext<S>, a: &Operator<S>, k: u32) -> bool {
    ctx.rank(a) == a.matrix().pow(k).rank(ctx.tolerance())
}

/// `R_A`: the build matching the operator kind.
pub fn canonical_tensor<S: Scalar>(ctx: &SpaceContext<S>, a: &Operator<S>) -> Result<CurvatureTensor<S>> {
    Build::for_kind(a.kind()).tensor(ctx, a)
}

fn require_canonical<S: Scalar>(ops: &[&Operator<S>]) -> Result<()> {
    if ops.iter().any(|o| o.kind() == OperatorKind::General) {
        return Err(Error::Hypothesis("each operator must be self- or skew-adjoint".into()));
    }
    Ok(())
}

fn require_chain<S: Scalar>(ctx: &SpaceContext<S>, ops: &[Operator<S>]) -> Result<()> {
    let check = is_chain(ctx, ops)?;
    match check.failing_pair {
        Some((i, j)) => Err(Error::NotAChain(format!("A{j}·A{i} ≠ 0"))),
        None => Ok(()),
    }
}

/// Verifies `Σ sᵢ R_{Aᵢ} = 0` entrywise.
fn require_premise<S: Scalar>(ctx: &SpaceContext<S>, terms: &[(Sign, &Operator<S>)]) -> Result<()> {
    let mut sum = CurvatureTensor::zeros(ctx);
    let mut scale = 0.0f64;
    for (s, op) in terms {
        let r = canonical_tensor(ctx, op)?;
        scale = scale.max(r.max_abs());
        sum = sum.add(&r.scale(&s.value::<S>()));
    }
    if sum.entries().iter().all(|v| v.is_negligible(ctx.tolerance(), scale)) {
        Ok(())
    } else {
        Err(Error::Premise(format!("the signed sum is not zero (max entry {})", sum.max_abs())))
    }
}

fn equal_up_to_sign<S: Scalar>(ctx: &SpaceContext<S>, a: &Matrix<S>, b: &Matrix<S>) -> bool {
    let tol = ctx.tolerance();
    a.approx_eq(b, tol) || a.approx_eq(&b.neg(), tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChainTheorem {
    ThreeChain,
    Star,
    FourChain,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub theorem: ChainTheorem,
    pub ranks: Vec<usize>,
    /// Exactness at each interior position of the chain (per leg for stars).
    pub exact: Vec<bool>,
    /// `{A, B, C}` linearly dependent as operators. Recorded, not asserted:
    /// it fails on premise-satisfying chains whose tensors all vanish.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub operators_dependent: Option<bool>,
    pub conclusions: Vec<Conclusion>,
    pub passed: bool,
}

impl ChainReport {
    fn new(
        theorem: ChainTheorem,
        ranks: Vec<usize>,
        exact: Vec<bool>,
        operators_dependent: Option<bool>,
        conclusions: Vec<Conclusion>,
    ) -> Self {
        let passed = no_failures(&conclusions);
        ChainReport { theorem, ranks, exact, operators_dependent, conclusions, passed }
    }
}

/// Chain `A → B → C` with `R_A + εR_B + δR_C = 0`.
pub fn analyze_three_chain<S: Scalar>(
    ctx: &SpaceContext<S>,
    a: &Operator<S>,
    b: &Operator<S>,
    c: &Operator<S>,
    eps: Sign,
    delta: Sign,
) -> Result<ChainReport> {
    require_canonical(&[a, b, c])?;
    require_chain(ctx, &[a.clone(), b.clone(), c.clone()])?;
    require_premise(ctx, &[(Sign::Plus, a), (eps, b), (delta, c)])?;

    let ranks = vec![ctx.rank(a), ctx.rank(b), ctx.rank(c)];
    let exact = vec![exact_at(ctx, a, b), exact_at(ctx, b, c)];
    let operators_dependent = !crate::dependence::operators_independent(ctx, &[a, b, c]);
    let mut conclusions = vec![Conclusion::check("R_B = 0", canonical_tensor(ctx, b)?.is_zero())];
    if ranks[0] >= 4 && ranks[2] >= 4 {
        conclusions.push(Conclusion::check("R_A, R_C same build", a.kind() == c.kind()));
        conclusions.push(Conclusion::check("C = ±A", equal_up_to_sign(ctx, c.matrix(), a.matrix())));
        conclusions.push(Conclusion::check("δ = −1", delta == Sign::Minus));
    } else {
        for name in ["R_A, R_C same build", "C = ±A", "δ = −1"] {
            conclusions.push(Conclusion::not_applicable(name, "rank A < 4 or rank C < 4"));
        }
    }
    if exact.iter().all(|&e| e) && b.kind() == OperatorKind::SkewAdjoint {
        conclusions.push(Conclusion::check("A invertible", ctx.is_invertible(a)));
        conclusions.push(Conclusion::check("C invertible", ctx.is_invertible(c)));
    } else {
        let why = "chain not exact or B not skew-adjoint";
        conclusions.push(Conclusion::not_applicable("A invertible", why));
        conclusions.push(Conclusion::not_applicable("C invertible", why));
    }
    Ok(ChainReport::new(ChainTheorem::ThreeChain, ranks, exact, Some(operators_dependent), conclusions))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StarArrangement {
    /// `Im A ⊆ ker Bᵢ` for every leg.
    Outgoing,
    /// `Im Bᵢ ⊆ ker A` for every leg.
    Incoming,
}

/// Detects the star arrangement, preferring `Outgoing` when both hold.
pub fn star_arrangement<S: Scalar>(ctx: &SpaceContext<S>, a: &Operator<S>, bs: &[Operator<S>]) -> Option<StarArrangement> {
    if bs.iter().all(|b| product_vanishes(ctx, b, a)) {
        Some(StarArrangement::Outgoing)
    } else if bs.iter().all(|b| product_vanishes(ctx, a, b)) {
        Some(StarArrangement::Incoming)
    } else {
        None
    }
}

/// Star around `A` with `R_A + Σ εᵢ R_{Bᵢ} = 0`.
pub fn analyze_star<S: Scalar>(
    ctx: &SpaceContext<S>,
    a: &Operator<S>,
    bs: &[Operator<S>],
    eps: &[Sign],
) -> Result<ChainReport> {
    if bs.len() != eps.len() {
        return Err(Error::Parse(format!("{} legs but {} signs", bs.len(), eps.len())));
    }
    for op in std::iter::once(a).chain(bs) {
        ctx.check_dim(op.matrix())?;
    }
    let mut all: Vec<&Operator<S>> = vec![a];
    all.extend(bs);
    require_canonical(&all)?;
    let arrangement = star_arrangement(ctx, a, bs)
        .ok_or_else(|| Error::NotAChain("neither Im A ⊆ ker Bᵢ for all i nor Im Bᵢ ⊆ ker A for all i".into()))?;
    let mut terms = vec![(Sign::Plus, a)];
    terms.extend(eps.iter().copied().zip(bs));
    require_premise(ctx, &terms)?;

    let ranks: Vec<usize> = all.iter().map(|o| ctx.rank(o)).collect();
    let exact: Vec<bool> = bs
        .iter()
        .map(|b| match arrangement {
            StarArrangement::Outgoing => exact_at(ctx, a, b),
            StarArrangement::Incoming => exact_at(ctx, b, a),
        })
        .collect();
    let mut conclusions = vec![Conclusion::check("R_A = 0", canonical_tensor(ctx, a)?.is_zero())];
    if a.kind() == OperatorKind::SkewAdjoint {
        conclusions.push(Conclusion::check("A = 0", a.is_zero(ctx.tolerance())));
        for (i, (b, &e)) in bs.iter().zip(&exact).enumerate() {
            let name = format!("B{} invertible", i + 1);
            conclusions.push(if e {
                Conclusion::check(name, ctx.is_invertible(b))
            } else {
                Conclusion::not_applicable(name, "leg not exact")
            });
        }
    } else {
        conclusions.push(Conclusion::not_applicable("A = 0", "A is self-adjoint"));
    }
    Ok(ChainReport::new(ChainTheorem::Star, ranks, exact, None, conclusions))
}

/// Chain `A → B → C → D` with `R_A + ε₁R_B + ε₂R_C + ε₃R_D = 0`, rank `B`, `C` ≥ 4.
#[allow(clippy::too_many_arguments)]
pub fn analyze_four_chain<S: Scalar>(
    ctx: &SpaceContext<S>,
    a: &Operator<S>,
    b: &Operator<S>,
    c: &Operator<S>,
    d: &Operator<S>,
    eps1: Sign,
    eps2: Sign,
    eps3: Sign,
) -> Result<ChainReport> {
    require_canonical(&[a, b, c, d])?;
    require_chain(ctx, &[a.clone(), b.clone(), c.clone(), d.clone()])?;
    let ranks = vec![ctx.rank(a), ctx.rank(b), ctx.rank(c), ctx.rank(d)];
    if ranks[1] < 4 || ranks[2] < 4 {
        return Err(Error::Hypothesis(format!("rank B = {}, rank C = {}; both must be ≥ 4", ranks[1], ranks[2])));
    }
    require_premise(ctx, &[(Sign::Plus, a), (eps1, b), (eps2, c), (eps3, d)])?;

    let exact = vec![exact_at(ctx, a, b), exact_at(ctx, b, c), exact_at(ctx, c, d)];
    let (am, bm, cm, dm) = (a.matrix(), b.matrix(), c.matrix(), d.matrix());
    let b3 = bm.pow(3);
    let bdb = bm.matmul(dm).matmul(bm);
    let c3 = cm.pow(3);
    let cac = cm.matmul(am).matmul(cm);
    let conclusions = vec![
        Conclusion::check("R_A, R_C same build", a.kind() == c.kind()),
        Conclusion::check("R_B, R_D same build", b.kind() == d.kind()),
        Conclusion::check("ε₂ = −1", eps2 == Sign::Minus),
        Conclusion::check("ε₁ = −ε₃", eps1 == eps3.flip()),
        Conclusion::check("B³ = ±BDB", equal_up_to_sign(ctx, &b3, &bdb)),
        Conclusion::check("C³ = ±CAC", equal_up_to_sign(ctx, &c3, &cac)),
    ];
    Ok(ChainReport::new(ChainTheorem::FourChain, ranks, exact, None, conclusions))
}
