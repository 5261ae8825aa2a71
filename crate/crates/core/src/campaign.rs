//! Seeded fixture generators and falsification campaigns.
//!
//! Every generator works on a euclidean context and hides its block layout
//! behind a random rational orthogonal change of basis, which preserves
//! operator kinds, chain relations and every sign relation between tensors.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chain::{analyze_four_chain, analyze_star, analyze_three_chain, rank_of_powers_holds, ChainReport};
use crate::curvature::{
    act_space_dimension, antisymmetric_build, congruence, is_act, precompose, skew_identity_deviation,
    symmetric_build, Build, CanonicalTerm, Sign,
};
use crate::dependence::{
    check_theorem_sll, check_theorem_ssl, necessary_conditions_ssl, operators_independent, pairwise_exclusions,
    TheoremStatus,
};
use crate::error::{Error, Result};
use crate::linalg::{Operator, OperatorKind, SpaceContext};
use crate::matrix::Matrix;
use crate::reduce::{reduce_by_kernel, reduce_preserving_target, Decomposition};
use crate::scalar::{Mode, Scalar};
use crate::seed::rng_for;
use crate::structure_group::{verify_structure_theorem, FormView, IsometrySampler};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Campaign {
    /// Builds of the matching kind are curvature tensors; others fail at rank ≥ 3.
    Axioms,
    /// `R^Λ_A = 2R^S_A(x,y,z,w) + R^S_A(x,z,y,w) + R^S_A(x,w,z,y)` for skew `A`.
    Identity,
    /// `A*R_C = R_{A*CA}` for both builds.
    Precompose,
    /// Symmetric builds span a space of dimension `n²(n²−1)/12` at n = 3, 4.
    Dimension,
    /// `G_{R^Λ_τ} = G^±_τ` on isometry, anti-isometry and generic samples.
    Structure,
    /// The two independence theorems on hypothesis-satisfying random pairs.
    Independence,
    /// Proper dependences `R^S_I + ε R^S_B = δ R^Λ_C` satisfy `BC = CB`, rank `C` = 2.
    Necessary,
    /// Pairwise non-equalities between canonical tensors.
    Exclusions,
    ThreeChain,
    Star,
    FourChain,
    /// `rank A^k = rank A` for self- and skew-adjoint `A`.
    RankPowers,
    /// Kernel reduction drops the pivot and maps the target by precomposition.
    Reduce,
    /// Reduction by a map with `A*CA = ±C` keeps the target `R_C`.
    Preserve,
}

impl Campaign {
    pub const ALL: [Campaign; 14] = [
        Campaign::Axioms,
        Campaign::Identity,
        Campaign::Precompose,
        Campaign::Dimension,
        Campaign::Structure,
        Campaign::Independence,
        Campaign::Necessary,
        Campaign::Exclusions,
        Campaign::ThreeChain,
        Campaign::Star,
        Campaign::FourChain,
        Campaign::RankPowers,
        Campaign::Reduce,
        Campaign::Preserve,
    ];
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(String),
    /// The sampled instance did not meet the theorem's hypothesis.
    Unmet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FailureRecord {
    pub trial: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CampaignSummary {
    pub campaign: Campaign,
    pub seed: u64,
    pub instances: usize,
    pub passed: usize,
    pub failed: usize,
    pub hypothesis_unmet: usize,
    /// Up to `MAX_FAILURE_RECORDS` failing trials, lowest index first.
    pub failures: Vec<FailureRecord>,
}

impl CampaignSummary {
    pub fn clean(&self) -> bool {
        self.failed == 0
    }
}

pub const MAX_FAILURE_RECORDS: usize = 5;

fn summarize(campaign: Campaign, seed: u64, outcomes: Vec<Result<Outcome>>) -> CampaignSummary {
    let mut s = CampaignSummary {
        campaign,
        seed,
        instances: outcomes.len(),
        passed: 0,
        failed: 0,
        hypothesis_unmet: 0,
        failures: Vec::new(),
    };
    for (trial, o) in outcomes.into_iter().enumerate() {
        let detail = match o {
            Ok(Outcome::Pass) => {
                s.passed += 1;
                continue;
            }
            Ok(Outcome::Unmet) => {
                s.hypothesis_unmet += 1;
                continue;
            }
            Ok(Outcome::Fail(d)) => d,
            Err(e) => format!("{}: {e}", e.code()),
        };
        s.failed += 1;
        if s.failures.len() < MAX_FAILURE_RECORDS {
            s.failures.push(FailureRecord { trial, detail });
        }
    }
    s
}

/// Runs `trial` for `0..trials` in parallel with per-trial seeds; results keep trial order.
fn run_trials<F>(campaign: Campaign, trials: usize, seed: u64, trial: F) -> CampaignSummary
where
    F: Fn(usize, &mut ChaCha8Rng) -> Result<Outcome> + Sync,
{
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| trial(t, &mut rng_for(seed, &[campaign as u64, t as u64])))
        .collect();
    summarize(campaign, seed, outcomes)
}

fn verdict(ok: bool, detail: impl FnOnce() -> String) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::Fail(detail())
    }
}

fn from_report(r: &ChainReport) -> Outcome {
    verdict(r.passed, || {
        let failing: Vec<&str> = r
            .conclusions
            .iter()
            .filter(|c| c.status == crate::report::Status::Fail)
            .map(|c| c.name.as_str())
            .collect();
        format!("failed conclusions: {}", failing.join(", "))
    })
}

/// Runs `campaign` with `trials` instances (per pool for `Structure`, samples per
/// dimension for `Dimension`).
pub fn run_campaign<S: Scalar>(campaign: Campaign, trials: usize, seed: u64) -> Result<CampaignSummary> {
    Ok(match campaign {
        Campaign::Axioms => run_trials(campaign, trials, seed, |_, rng| axioms_trial::<S>(rng)),
        Campaign::Identity => run_trials(campaign, trials, seed, |t, rng| identity_trial::<S>(2 + t % 5, rng)),
        Campaign::Precompose => run_trials(campaign, trials, seed, |t, rng| precompose_trial::<S>(2 + t % 4, rng)),
        Campaign::Dimension => dimension_campaign::<S>(trials, seed)?,
        Campaign::Structure => structure_campaign::<S>(trials, seed)?,
        Campaign::Independence => run_trials(campaign, trials, seed, |t, rng| independence_trial::<S>(t, rng)),
        Campaign::Necessary => run_trials(campaign, trials, seed, |_, rng| necessary_trial::<S>(rng)),
        Campaign::Exclusions => run_trials(campaign, trials, seed, |t, rng| exclusions_trial::<S>(t, rng)),
        Campaign::ThreeChain => run_trials(campaign, trials, seed, |_, rng| {
            let (ctx, f) = three_chain_fixture::<S, _>(rng)?;
            Ok(from_report(&analyze_three_chain(&ctx, &f.a, &f.b, &f.c, f.eps, f.delta)?))
        }),
        Campaign::Star => run_trials(campaign, trials, seed, |_, rng| {
            let (ctx, f) = star_fixture::<S, _>(rng)?;
            Ok(from_report(&analyze_star(&ctx, &f.a, &f.legs, &f.eps)?))
        }),
        Campaign::FourChain => run_trials(campaign, trials, seed, |_, rng| {
            let (ctx, f) = four_chain_fixture::<S, _>(rng)?;
            Ok(from_report(&analyze_four_chain(&ctx, &f.a, &f.b, &f.c, &f.d, f.eps[0], f.eps[1], f.eps[2])?))
        }),
        Campaign::RankPowers => run_trials(campaign, trials, seed, |t, rng| rank_powers_trial::<S>(t, rng)),
        Campaign::Reduce => run_trials(campaign, trials, seed, |_, rng| reduce_trial::<S>(rng)),
        Campaign::Preserve => run_trials(campaign, trials, seed, |_, rng| preserve_trial::<S>(rng)),
    })
}

fn euclidean<S: Scalar>(n: usize) -> Result<SpaceContext<S>> {
    SpaceContext::euclidean(n)
}

fn random_sign<R: Rng>(rng: &mut R) -> Sign {
    if rng.gen_bool(0.5) {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

fn random_kind<R: Rng>(rng: &mut R) -> OperatorKind {
    if rng.gen_bool(0.5) {
        OperatorKind::SelfAdjoint
    } else {
        OperatorKind::SkewAdjoint
    }
}

/// A rank for `kind` in `lo..=hi` (even for skew), or `None` when there is none.
fn random_rank<R: Rng>(kind: OperatorKind, lo: usize, hi: usize, rng: &mut R) -> Option<usize> {
    let options: Vec<usize> =
        (lo..=hi).filter(|r| kind != OperatorKind::SkewAdjoint || r % 2 == 0).collect();
    options.choose(rng).copied()
}

/// Rational orthogonal matrix: a Cayley transform `(I − K)(I + K)⁻¹` of a random skew `K`.
pub fn rational_orthogonal<S: Scalar, R: Rng>(n: usize, rng: &mut R) -> Matrix<S> {
    let mut k = Matrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let v = S::from_ratio(rng.gen_range(-2..=2), 2);
            k[(i, j)] = v.clone();
            k[(j, i)] = -v;
        }
    }
    let id = Matrix::identity(n);
    let inv = id.add(&k).inverse(0.0).expect("I + K is invertible for skew K");
    id.sub(&k).matmul(&inv)
}

/// Sparse rational orthogonal matrix: a signed permutation followed by
/// `rotations` Givens rotations through Pythagorean angles. Keeps denominators
/// small in large dimensions.
pub fn givens_orthogonal<S: Scalar, R: Rng>(n: usize, rotations: usize, rng: &mut R) -> Matrix<S> {
    const TRIPLES: [(i64, i64, i64); 3] = [(3, 4, 5), (5, 12, 13), (8, 15, 17)];
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut q = Matrix::from_fn(n, n, |i, j| {
        if perm[j] == i {
            if rng.gen_bool(0.5) {
                S::one()
            } else {
                -S::one()
            }
        } else {
            S::zero()
        }
    });
    for _ in 0..rotations.min(n * n) {
        if n < 2 {
            break;
        }
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let (a, b, c) = TRIPLES[rng.gen_range(0..TRIPLES.len())];
        let mut g = Matrix::identity(n);
        g[(i, i)] = S::from_ratio(a, c);
        g[(j, j)] = S::from_ratio(a, c);
        g[(i, j)] = S::from_ratio(-b, c);
        g[(j, i)] = S::from_ratio(b, c);
        q = g.matmul(&q);
    }
    q
}

/// `Q A Qᵀ`; keeps the kind under the euclidean form.
fn conjugate<S: Scalar>(ctx: &SpaceContext<S>, q: &Matrix<S>, a: &Operator<S>) -> Result<Operator<S>> {
    Operator::new(ctx, q.matmul(a.matrix()).matmul(&q.transpose()), a.kind())
}

/// Places `block` at rows and columns `offset..` of an `n × n` operator.
fn embed<S: Scalar>(n: usize, offset: usize, block: &Operator<S>) -> Operator<S> {
    let b = block.matrix();
    let m = Matrix::from_fn(n, n, |i, j| {
        if (offset..offset + b.rows()).contains(&i) && (offset..offset + b.cols()).contains(&j) {
            b[(i - offset, j - offset)].clone()
        } else {
            S::zero()
        }
    });
    Operator::with_kind_unchecked(m, block.kind())
}

/// Random operator of `kind` on a `size`-dimensional block with rank in `lo..=hi`.
fn block_op<S: Scalar, R: Rng>(kind: OperatorKind, size: usize, lo: usize, hi: usize, rng: &mut R) -> Result<Operator<S>> {
    let hi = hi.min(size);
    let Some(rank) = random_rank(kind, lo, hi, rng) else {
        return Err(Error::Constraint(format!("no {kind} rank in {lo}..={hi}")));
    };
    if rank == 0 {
        return Ok(Operator::zero(size, kind));
    }
    euclidean::<S>(size)?.random_operator_with(kind, Some(rank), rng)
}

/// Self-adjoint operator of rank at most one, so that `R^S` vanishes.
fn flat_op<S: Scalar, R: Rng>(size: usize, rng: &mut R) -> Result<Operator<S>> {
    if size == 0 || rng.gen_bool(0.25) {
        return Ok(Operator::zero(size, OperatorKind::SelfAdjoint));
    }
    euclidean::<S>(size)?.random_operator_with(OperatorKind::SelfAdjoint, Some(1), rng)
}

fn negated<S: Scalar>(a: &Operator<S>, sign: Sign) -> Operator<S> {
    a.scaled(&sign.value())
}

#[derive(Debug, Clone)]
pub struct ThreeChainFixture<S: Scalar> {
    pub a: Operator<S>,
    pub b: Operator<S>,
    pub c: Operator<S>,
    pub eps: Sign,
    pub delta: Sign,
}

/// Premise-satisfying `A → B → C` chains.
///
/// Patterns: `C = ±A` on one block with `R_B = 0` on another (`δ = −1`);
/// `C = ±A` invertible with `B = 0` skew, which is exact at both positions;
/// and `A`, `C` of rank one with arbitrary signs.
pub fn three_chain_fixture<S: Scalar, R: Rng>(rng: &mut R) -> Result<(SpaceContext<S>, ThreeChainFixture<S>)> {
    let pattern = rng.gen_range(0..3);
    let (n, a, b, c, eps, delta) = match pattern {
        0 => {
            let (u, w) = (rng.gen_range(1..=5), rng.gen_range(1..=2));
            let n = u + w;
            let kind = if u >= 2 { random_kind(rng) } else { OperatorKind::SelfAdjoint };
            let a_blk = block_op::<S, _>(kind, u, 1, u, rng)?;
            let a = embed(n, 0, &a_blk);
            let b = embed(n, u, &flat_op::<S, _>(w, rng)?);
            let c = negated(&a, random_sign(rng));
            (n, a, b, c, random_sign(rng), Sign::Minus)
        }
        1 => {
            let kind = random_kind(rng);
            let n = if kind == OperatorKind::SkewAdjoint { 2 * rng.gen_range(1..=2) } else { rng.gen_range(2..=5) };
            let a = block_op::<S, _>(kind, n, n, n, rng)?;
            let c = negated(&a, random_sign(rng));
            (n, a, Operator::zero(n, OperatorKind::SkewAdjoint), c, random_sign(rng), Sign::Minus)
        }
        _ => {
            let (u, w) = (rng.gen_range(1..=4), rng.gen_range(1..=2));
            let n = u + w;
            let a = embed(n, 0, &flat_op::<S, _>(u, rng)?);
            let c = embed(n, 0, &flat_op::<S, _>(u, rng)?);
            let b = embed(n, u, &flat_op::<S, _>(w, rng)?);
            (n, a, b, c, random_sign(rng), random_sign(rng))
        }
    };
    let ctx = euclidean::<S>(n)?;
    let q = rational_orthogonal::<S, _>(n, rng);
    let f = ThreeChainFixture { a: conjugate(&ctx, &q, &a)?, b: conjugate(&ctx, &q, &b)?, c: conjugate(&ctx, &q, &c)?, eps, delta };
    Ok((ctx, f))
}

#[derive(Debug, Clone)]
pub struct StarFixture<S: Scalar> {
    pub a: Operator<S>,
    pub legs: Vec<Operator<S>>,
    pub eps: Vec<Sign>,
}

/// Premise-satisfying stars: `A` with `R_A = 0` on one block, legs on the
/// complementary block in cancelling pairs `(B, ±B)` with opposite signs, plus
/// optional legs of rank one.
pub fn star_fixture<S: Scalar, R: Rng>(rng: &mut R) -> Result<(SpaceContext<S>, StarFixture<S>)> {
    let skew_center = rng.gen_bool(0.5);
    let u = rng.gen_range(1..=4);
    let w = if skew_center { rng.gen_range(0..=2) } else { rng.gen_range(1..=2) };
    let n = u + w;
    let a = if skew_center {
        Operator::zero(n, OperatorKind::SkewAdjoint)
    } else {
        embed(n, u, &flat_op::<S, _>(w, rng)?)
    };
    let mut legs = Vec::new();
    let mut eps = Vec::new();
    for _ in 0..rng.gen_range(1..=2) {
        let kind = if u >= 2 { random_kind(rng) } else { OperatorKind::SelfAdjoint };
        let b = embed(n, 0, &block_op::<S, _>(kind, u, 0, u, rng)?);
        let s = random_sign(rng);
        legs.push(b.clone());
        eps.push(s);
        legs.push(negated(&b, random_sign(rng)));
        eps.push(s.flip());
    }
    if rng.gen_bool(0.5) {
        legs.push(embed(n, 0, &flat_op::<S, _>(u, rng)?));
        eps.push(random_sign(rng));
    }
    let ctx = euclidean::<S>(n)?;
    let q = rational_orthogonal::<S, _>(n, rng);
    let legs = legs.iter().map(|b| conjugate(&ctx, &q, b)).collect::<Result<_>>()?;
    Ok((ctx.clone(), StarFixture { a: conjugate(&ctx, &q, &a)?, legs, eps }))
}

#[derive(Debug, Clone)]
pub struct FourChainFixture<S: Scalar> {
    pub a: Operator<S>,
    pub b: Operator<S>,
    pub c: Operator<S>,
    pub d: Operator<S>,
    pub eps: [Sign; 3],
}

/// Premise-satisfying `A → B → C → D` chains: `A = ±C` on one block and
/// `D = ±B` on another, block sizes 4 or 5, with `ε₂ = −1` and `ε₃ = −ε₁`.
pub fn four_chain_fixture<S: Scalar, R: Rng>(rng: &mut R) -> Result<(SpaceContext<S>, FourChainFixture<S>)> {
    let (u, w) = (rng.gen_range(4..=5), rng.gen_range(4..=5));
    let n = u + w;
    let c = embed(n, 0, &block_op::<S, _>(random_kind(rng), u, 4, u, rng)?);
    let b = embed(n, u, &block_op::<S, _>(random_kind(rng), w, 4, w, rng)?);
    let a = negated(&c, random_sign(rng));
    let d = negated(&b, random_sign(rng));
    let e1 = random_sign(rng);
    let ctx = euclidean::<S>(n)?;
    let q = givens_orthogonal::<S, _>(n, 3, rng);
    let f = FourChainFixture {
        a: conjugate(&ctx, &q, &a)?,
        b: conjugate(&ctx, &q, &b)?,
        c: conjugate(&ctx, &q, &c)?,
        d: conjugate(&ctx, &q, &d)?,
        eps: [e1, Sign::Minus, e1.flip()],
    };
    Ok((ctx, f))
}

#[derive(Debug, Clone)]
pub struct ReductionFixture<S: Scalar> {
    pub decomposition: Decomposition<S>,
    pub pivot: usize,
    /// Explicit map into the pivot's kernel; `None` uses the default projection.
    pub map: Option<Operator<S>>,
}

/// Random decompositions of 2 to 4 terms at n ∈ 3..=5 whose pivot has a kernel.
pub fn reduction_fixture<S: Scalar, R: Rng>(rng: &mut R) -> Result<(SpaceContext<S>, ReductionFixture<S>)> {
    let n = rng.gen_range(3..=5);
    let ctx = euclidean::<S>(n)?;
    let k = rng.gen_range(2..=4);
    let pivot = rng.gen_range(0..k);
    let mut terms = Vec::new();
    for i in 0..k {
        let kind = random_kind(rng);
        let op = if i == pivot {
            block_op::<S, _>(kind, n, 1, n - 1, rng)?
        } else {
            block_op::<S, _>(kind, n, 0, n, rng)?
        };
        terms.push(CanonicalTerm::new(Build::for_kind(kind), random_sign(rng), op)?);
    }
    let map = if rng.gen_bool(0.5) {
        let p = crate::reduce::default_reduction_map(&ctx, &terms[pivot].op)?;
        let m = ctx.random_invertible(rng);
        Some(Operator::general(p.matrix().matmul(m.matrix())))
    } else {
        None
    };
    let target = crate::curvature::sum_terms(&ctx, &terms)?;
    Ok((ctx, ReductionFixture { decomposition: Decomposition::new(Some(target), terms), pivot, map }))
}

#[derive(Debug, Clone)]
pub struct PreservingFixture<S: Scalar> {
    pub decomposition: Decomposition<S>,
    pub c: Operator<S>,
    pub pivot: usize,
    pub map: Operator<S>,
}

/// `R_C = R_C + εR_B − εR_B (+ cancelling pairs)` with `C` on one block, `B`
/// on the other, and a map that is `±` an isometry of `C` on `C`'s block and
/// zero on `B`'s.
pub fn preserving_fixture<S: Scalar, R: Rng>(rng: &mut R) -> Result<(SpaceContext<S>, PreservingFixture<S>)> {
    let (u, w) = (rng.gen_range(2..=3), rng.gen_range(1..=2));
    let n = u + w;
    let kind = random_kind(rng);
    let c_blk = block_op::<S, _>(kind, u, 2, u, rng)?;
    let d = if rng.gen_bool(0.5) {
        Operator::identity(u)
    } else {
        let uctx = euclidean::<S>(u)?;
        IsometrySampler::new(&uctx, &FormView::new(c_blk.clone())?).sample(rng)
    };
    let d = negated(&d, random_sign(rng));
    let c = embed(n, 0, &c_blk);
    let map = embed(n, 0, &Operator::general(d.matrix().clone()));
    let mut ops = vec![(c.clone(), Sign::Plus)];
    for _ in 0..rng.gen_range(1..=2) {
        let bk = random_kind(rng);
        let b = embed(n, u, &block_op::<S, _>(bk, w, 0, w, rng)?);
        let s = random_sign(rng);
        ops.push((b.clone(), s));
        ops.push((b, s.flip()));
    }
    let ctx = euclidean::<S>(n)?;
    let q = rational_orthogonal::<S, _>(n, rng);
    let terms = ops
        .iter()
        .map(|(op, s)| {
            let op = conjugate(&ctx, &q, op)?;
            CanonicalTerm::new(Build::for_kind(op.kind()), *s, op)
        })
        .collect::<Result<Vec<_>>>()?;
    let c = conjugate(&ctx, &q, &c)?;
    let map = Operator::general(q.matmul(map.matrix()).matmul(&q.transpose()));
    let target = Build::for_kind(c.kind()).tensor(&ctx, &c)?;
    Ok((ctx, PreservingFixture { decomposition: Decomposition::new(Some(target), terms), c, pivot: 1, map }))
}

/// `B = diag(2, 2, 1/2)` and `C` with `Ce₂ = e₁`, `Ce₁ = −e₂`, `Ce₃ = 0`.
pub fn dependent_configuration<S: Scalar>() -> Result<(SpaceContext<S>, Operator<S>, Operator<S>)> {
    let ctx = euclidean::<S>(3)?;
    let b = Matrix::diagonal(&[S::from_i64(2), S::from_i64(2), S::from_ratio(1, 2)]);
    let mut c = Matrix::zeros(3, 3);
    c[(0, 1)] = S::one();
    c[(1, 0)] = -S::one();
    Ok((
        ctx.clone(),
        Operator::new(&ctx, b, OperatorKind::SelfAdjoint)?,
        Operator::new(&ctx, c, OperatorKind::SkewAdjoint)?,
    ))
}

/// Properly dependent `{R^S_I, R^S_B, R^Λ_C}` at n = 3: `B = diag(λ, λ, ∓1/λ)`,
/// `C = c·(J ⊕ 0)`, rotated by a rational orthogonal matrix. The three
/// sectional conditions force this shape once `C ≠ 0`, and no such triple
/// exists in higher dimensions.
pub fn dependent_ssl_fixture<S: Scalar, R: Rng>(rng: &mut R) -> Result<(SpaceContext<S>, Operator<S>, Operator<S>)> {
    let ctx = euclidean::<S>(3)?;
    let lambda = loop {
        let l = S::from_ratio(rng.gen_range(-6..=6), rng.gen_range(1..=3));
        if !l.is_zero() && l.clone() * l.clone() != S::one() {
            break l;
        }
    };
    // a = 1, b = ±1: a + b λ_i λ_j = 0 on the planes meeting e₃.
    let b_sign = S::from_i64(if rng.gen_bool(0.5) { 1 } else { -1 });
    let mu = -(S::one() / (b_sign.clone() * lambda.clone()));
    if (S::one() + b_sign * lambda.clone() * lambda.clone()).is_zero() {
        return dependent_ssl_fixture(rng);
    }
    let b = Matrix::diagonal(&[lambda.clone(), lambda, mu]);
    let cval = S::from_ratio(rng.gen_range(1..=3), rng.gen_range(1..=2));
    let mut c = Matrix::zeros(3, 3);
    c[(0, 1)] = cval.clone();
    c[(1, 0)] = -cval;
    let q = rational_orthogonal::<S, _>(3, rng);
    let b = conjugate(&ctx, &q, &Operator::new(&ctx, b, OperatorKind::SelfAdjoint)?)?;
    let c = conjugate(&ctx, &q, &Operator::new(&ctx, c, OperatorKind::SkewAdjoint)?)?;
    Ok((ctx, b, c))
}

fn axioms_trial<S: Scalar>(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    for n in 2..=6 {
        let ctx = euclidean::<S>(n)?;
        let a = ctx.random_operator_with(OperatorKind::SelfAdjoint, None, rng)?;
        if !is_act(&symmetric_build(&ctx, &a)?).is_act {
            return Ok(Outcome::Fail(format!("R^S of a self-adjoint operator fails at n = {n}")));
        }
        let b = ctx.random_operator_with(OperatorKind::SkewAdjoint, None, rng)?;
        if !is_act(&antisymmetric_build(&ctx, &b)?).is_act {
            return Ok(Outcome::Fail(format!("R^Λ of a skew-adjoint operator fails at n = {n}")));
        }
        if n >= 3 {
            let g = block_op::<S, _>(OperatorKind::General, n, 3, n, rng)?;
            let self_adj = ctx.has_kind(g.matrix(), OperatorKind::SelfAdjoint);
            let skew = ctx.has_kind(g.matrix(), OperatorKind::SkewAdjoint);
            if is_act(&symmetric_build(&ctx, &g)?).is_act != self_adj {
                return Ok(Outcome::Fail(format!("R^S characterization fails for a general operator at n = {n}")));
            }
            if is_act(&antisymmetric_build(&ctx, &g)?).is_act != skew {
                return Ok(Outcome::Fail(format!("R^Λ characterization fails for a general operator at n = {n}")));
            }
        }
    }
    Ok(Outcome::Pass)
}

/// Relative tolerance for the float identity check.
pub const IDENTITY_FLOAT_TOLERANCE: f64 = 1e-10;

fn identity_trial<S: Scalar>(n: usize, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let ctx = euclidean::<S>(n)?;
    let a = ctx.random_operator_with(OperatorKind::SkewAdjoint, None, rng)?;
    let dev = skew_identity_deviation(&ctx, &a)?;
    let ok = match S::MODE {
        Mode::Exact => dev.is_zero(),
        Mode::Float64 => dev.to_f64() <= IDENTITY_FLOAT_TOLERANCE * (1.0 + antisymmetric_build(&ctx, &a)?.max_abs()),
    };
    Ok(verdict(ok, || format!("deviation {} at n = {n}", dev.to_f64())))
}

fn precompose_trial<S: Scalar>(n: usize, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let ctx = euclidean::<S>(n)?;
    for build in [Build::Symmetric, Build::Antisymmetric] {
        let a = ctx.random_operator_with(OperatorKind::General, None, rng)?;
        let c = ctx.random_operator_with(build.canonical_kind(), None, rng)?;
        let lhs = precompose(&ctx, &a, &build.tensor(&ctx, &c)?)?;
        let rhs = build.tensor(&ctx, &congruence(&ctx, &a, &c))?;
        let same = match S::MODE {
            Mode::Exact => lhs.entries() == rhs.entries(),
            Mode::Float64 => lhs.approx_eq(&rhs),
        };
        if !same {
            return Ok(Outcome::Fail(format!("{build:?} build at n = {n}")));
        }
    }
    Ok(Outcome::Pass)
}

/// Rank of `samples` flattened random `R^S` at n = 3 and n = 4, one instance per dimension.
fn dimension_campaign<S: Scalar>(samples: usize, seed: u64) -> Result<CampaignSummary> {
    let outcomes = [3usize, 4]
        .into_par_iter()
        .map(|n| {
            let ctx = euclidean::<S>(n)?;
            let mut rng = rng_for(seed, &[Campaign::Dimension as u64, n as u64]);
            let columns: Vec<Vec<S>> = (0..samples)
                .map(|_| Ok(symmetric_build(&ctx, &ctx.random_operator_with(OperatorKind::SelfAdjoint, None, &mut rng)?)?.flatten()))
                .collect::<Result<_>>()?;
            let expected = act_space_dimension(n);
            // Too few samples to span the space.
            if columns.len() < expected {
                return Ok(Outcome::Unmet);
            }
            let rank = Matrix::from_columns(&columns).rank(ctx.tolerance());
            Ok(verdict(rank == expected, || format!("rank {rank} ≠ {expected} at n = {n}")))
        })
        .collect();
    Ok(summarize(Campaign::Dimension, seed, outcomes))
}

/// `τ = J ⊕ J` at n = 4 and `J ⊕ J ⊕ 0` at n = 6, `trials` samples per pool.
fn structure_campaign<S: Scalar>(trials: usize, seed: u64) -> Result<CampaignSummary> {
    let mut outcomes = Vec::new();
    for n in [4, 6] {
        let ctx = euclidean::<S>(n)?;
        let tau = FormView::new(Operator::new(&ctx, jj(n), OperatorKind::SkewAdjoint)?)?;
        let report = verify_structure_theorem(&ctx, &tau, trials, derive(seed, n))?;
        for pool in &report.pools {
            for i in 0..pool.samples {
                outcomes.push(Ok(if i < pool.agreements {
                    Outcome::Pass
                } else {
                    Outcome::Fail(format!("{:?} pool at n = {n}", pool.pool))
                }));
            }
        }
    }
    Ok(summarize(Campaign::Structure, seed, outcomes))
}

fn derive(seed: u64, n: usize) -> u64 {
    crate::seed::derive_seed(seed, &[Campaign::Structure as u64, n as u64])
}

/// `J ⊕ J ⊕ 0…` with `J e₂ = e₁`, `J e₁ = −e₂`.
pub fn jj<S: Scalar>(n: usize) -> Matrix<S> {
    let mut m = Matrix::zeros(n, n);
    for b in [0, 2] {
        if b + 1 < n {
            m[(b, b + 1)] = S::one();
            m[(b + 1, b)] = -S::one();
        }
    }
    m
}

/// Attempts per trial to draw operators meeting a theorem's hypothesis.
const HYPOTHESIS_ATTEMPTS: usize = 10;

fn independence_trial<S: Scalar>(t: usize, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let ssl = t % 2 == 0;
    let n = if ssl { 4 + (t / 2) % 2 } else { 3 + (t / 2) % 3 };
    let ctx = euclidean::<S>(n)?;
    let id = Operator::identity(n);
    for _ in 0..HYPOTHESIS_ATTEMPTS {
        let first_kind = if ssl { OperatorKind::SelfAdjoint } else { OperatorKind::SkewAdjoint };
        let x = ctx.random_operator_with(first_kind, None, rng)?;
        let y = ctx.random_operator_with(OperatorKind::SkewAdjoint, None, rng)?;
        if !operators_independent(&ctx, &[&id, &x, &y]) {
            continue;
        }
        let report = if ssl { check_theorem_ssl(&ctx, &x, &y)? } else { check_theorem_sll(&ctx, &x, &y)? };
        return Ok(match report.status {
            TheoremStatus::Pass => Outcome::Pass,
            TheoremStatus::HypothesisUnmet => Outcome::Unmet,
            TheoremStatus::Falsified => {
                Outcome::Fail(format!("{} falsified at n = {n}", if ssl { "SSL" } else { "SLL" }))
            }
        });
    }
    Ok(Outcome::Unmet)
}

fn necessary_trial<S: Scalar>(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let (ctx, b, c) = dependent_ssl_fixture::<S, _>(rng)?;
    let report = necessary_conditions_ssl(&ctx, &b, &c)?;
    if report.verdict.independent || report.verdict.proper != Some(true) {
        return Ok(Outcome::Fail("fixture is not properly dependent".into()));
    }
    Ok(verdict(report.passed, || format!("commutator {}, rank C = {}", report.commutator_norm, report.rank_c)))
}

fn exclusions_trial<S: Scalar>(t: usize, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let case = t % 3;
    let n = if case == 1 { 4 + (t / 3) % 2 } else { 3 + (t / 3) % 3 };
    let ctx = euclidean::<S>(n)?;
    let (a, b) = match case {
        0 => (
            block_op::<S, _>(OperatorKind::SkewAdjoint, n, 2, n, rng)?,
            block_op::<S, _>(OperatorKind::SelfAdjoint, n, 3, n, rng)?,
        ),
        1 => (
            block_op::<S, _>(OperatorKind::SelfAdjoint, n, 4, n, rng)?,
            block_op::<S, _>(OperatorKind::SelfAdjoint, n, 0, n, rng)?,
        ),
        _ => (
            block_op::<S, _>(OperatorKind::SkewAdjoint, n, 2, n, rng)?,
            block_op::<S, _>(OperatorKind::SkewAdjoint, n, 2, n, rng)?,
        ),
    };
    let report = pairwise_exclusions(&ctx, &a, &b)?;
    Ok(verdict(report.passed, || format!("{:?} at n = {n}", report.case)))
}

fn rank_powers_trial<S: Scalar>(t: usize, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let n = 2 + t % 5;
    let kind = if t % 2 == 0 { OperatorKind::SelfAdjoint } else { OperatorKind::SkewAdjoint };
    let ctx = euclidean::<S>(n)?;
    let a = block_op::<S, _>(kind, n, 0, n, rng)?;
    for k in 2..=4 {
        if !rank_of_powers_holds(&ctx, &a, k) {
            return Ok(Outcome::Fail(format!("{kind} operator at n = {n}, k = {k}")));
        }
    }
    Ok(Outcome::Pass)
}

fn reduce_trial<S: Scalar>(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let (ctx, f) = reduction_fixture::<S, _>(rng)?;
    let before = f.decomposition.len();
    let old_target = f.decomposition.target_or_sum(&ctx)?;
    let red = reduce_by_kernel(&ctx, &f.decomposition, f.pivot, f.map.as_ref())?;
    let expected = precompose(&ctx, &red.map, &old_target)?;
    let sum = red.decomposition.sum(&ctx)?;
    if red.decomposition.len() + 1 != before {
        return Ok(Outcome::Fail(format!("{} terms after reducing {before}", red.decomposition.len())));
    }
    let exact_match = match S::MODE {
        Mode::Exact => sum.entries() == expected.entries(),
        Mode::Float64 => sum.approx_eq(&expected),
    };
    if !exact_match || !red.verified {
        return Ok(Outcome::Fail(format!("residual {}", sum.sub(&expected).max_abs())));
    }
    for term in &red.decomposition.terms {
        if !is_act(&term.tensor(&ctx)?).is_act {
            return Ok(Outcome::Fail("a reduced term is not a curvature tensor".into()));
        }
    }
    Ok(Outcome::Pass)
}

fn preserve_trial<S: Scalar>(rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let (ctx, f) = preserving_fixture::<S, _>(rng)?;
    let target = f.decomposition.target.clone().expect("fixture carries its target");
    let red = reduce_preserving_target(&ctx, &f.decomposition, &f.c, f.pivot, Some(&f.map))?;
    let kept = red.decomposition.target.as_ref().is_some_and(|t| match S::MODE {
        Mode::Exact => t.entries() == target.entries(),
        Mode::Float64 => t.approx_eq(&target),
    });
    Ok(verdict(kept && red.verified && red.decomposition.len() + 1 == f.decomposition.len(), || {
        format!("target kept: {kept}, verified: {}", red.verified)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn rational_orthogonal_is_orthogonal() {
        let mut rng = rng_for(1, &[]);
        let q = rational_orthogonal::<Rational, _>(4, &mut rng);
        assert_eq!(q.matmul(&q.transpose()), Matrix::identity(4));
    }

    #[test]
    fn givens_orthogonal_is_orthogonal() {
        let mut rng = rng_for(2, &[]);
        let q = givens_orthogonal::<Rational, _>(6, 4, &mut rng);
        assert_eq!(q.matmul(&q.transpose()), Matrix::identity(6));
    }

    #[test]
    fn small_campaigns_are_clean() {
        for c in Campaign::ALL {
            let trials = if c == Campaign::Dimension { 30 } else { 4 };
            let s = run_campaign::<Rational>(c, trials, 17).unwrap();
            assert!(s.clean(), "{c:?}: {:?}", s.failures);
            assert!(s.passed > 0, "{c:?} passed nothing");
        }
    }

    #[test]
    fn campaigns_are_deterministic() {
        let a = run_campaign::<f64>(Campaign::Star, 6, 3).unwrap();
        let b = run_campaign::<f64>(Campaign::Star, 6, 3).unwrap();
        assert_eq!(a, b);
    }
}
