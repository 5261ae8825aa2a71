//! Writing a curvature tensor as a signed sum of canonical terms.
//!
//! `constructive_decomposition` solves a linear system in a sampled spanning
//! set. `minimal_search` looks for short sums with multi-start
//! Levenberg–Marquardt over Gram-matrix parameters; this search strategy is a
//! heuristic of this crate, and its hits are re-verified in exact arithmetic
//! before any bound is called exact.

use levenberg_marquardt::{LeastSquaresProblem, LevenbergMarquardt};
use nalgebra::storage::Owned;
use nalgebra::{DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{
    act_space_dimension, is_act, tensor_from_gram, Build, CanonicalTerm, CurvatureTensor, Sign,
};
use crate::error::{Error, Result};
use crate::linalg::{Operator, OperatorKind, SpaceContext};
use crate::matrix::Matrix;
use crate::reduce::Decomposition;
use crate::scalar::{rationalize, Rational, Scalar};
use crate::seed::rng_for;

/// Which canonical builds a decomposition may use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Symmetric builds only (`ν`).
    SymmetricOnly,
    /// Anti-symmetric builds only (`η`).
    SkewOnly,
    /// Either build (`μ`).
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Exact,
    Heuristic,
}

/// Residual below which a float search result counts as a hit.
pub fn hit_threshold(target_max: f64) -> f64 {
    1e-7 * (1.0 + target_max)
}

/// Largest denominator tried when rationalizing search results.
pub const VERIFY_DENOMINATOR: u64 = 1000;

fn require_act<S: Scalar>(r: &CurvatureTensor<S>) -> Result<()> {
    if !is_act(r).is_act {
        return Err(Error::Domain("the target is not an algebraic curvature tensor".into()));
    }
    Ok(())
}

/// `Σ cᵢ R^S_{Aᵢ}` for `terms` random self-adjoint `Aᵢ` and nonzero integer `cᵢ ∈ [−2, 2]`.
pub fn random_act<S: Scalar, R: Rng>(ctx: &SpaceContext<S>, terms: usize, rng: &mut R) -> Result<CurvatureTensor<S>> {
    let mut r = CurvatureTensor::zeros(ctx);
    for _ in 0..terms {
        let a = ctx.random_operator_with(OperatorKind::SelfAdjoint, None, rng)?;
        let c = rng.gen_range(1..=2) * if rng.gen_bool(0.5) { 1 } else { -1 };
        r = r.add(&crate::curvature::symmetric_build(ctx, &a)?.scale(&S::from_i64(c)));
    }
    Ok(r)
}

/// Solves `R = Σ cᵢ R_{Aᵢ}` over `n²(n²−1)/12` sampled operators, resampling
/// when the sample does not span. Coefficient magnitudes are absorbed into the
/// operators where a square root exists.
pub fn constructive_decomposition<S: Scalar>(
    ctx: &SpaceContext<S>,
    r: &CurvatureTensor<S>,
    family: Family,
    seed: u64,
) -> Result<Decomposition<S>> {
    require_act(r)?;
    if r.is_zero() {
        return Ok(Decomposition::new(Some(r.clone()), Vec::new()));
    }
    let d = act_space_dimension(ctx.dim());
    const RETRIES: u64 = 16;
    for attempt in 0..RETRIES {
        let mut rng = rng_for(seed, &[attempt]);
        let ops: Vec<Operator<S>> = (0..d)
            .map(|i| {
                let kind = match family {
                    Family::SymmetricOnly => OperatorKind::SelfAdjoint,
                    Family::SkewOnly => OperatorKind::SkewAdjoint,
                    Family::Mixed if i % 2 == 0 => OperatorKind::SelfAdjoint,
                    Family::Mixed => OperatorKind::SkewAdjoint,
                };
                ctx.random_operator_with(kind, None, &mut rng)
            })
            .collect::<Result<_>>()?;
        let columns: Vec<Vec<S>> = ops
            .iter()
            .map(|op| Ok(Build::for_kind(op.kind()).tensor(ctx, op)?.flatten()))
            .collect::<Result<_>>()?;
        let m = Matrix::from_columns(&columns);
        if m.rank(ctx.tolerance()) < d {
            continue;
        }
        let Some(c) = S::solve(&m, &r.flatten(), ctx.tolerance()) else { continue };
        let scale = c.iter().fold(0.0f64, |acc, x| acc.max(x.to_f64().abs()));
        let terms = ops
            .into_iter()
            .zip(&c)
            .filter(|(_, ci)| !ci.is_negligible(ctx.tolerance(), scale))
            .map(|(op, ci)| CanonicalTerm::from_coefficient(Build::for_kind(op.kind()), op, ci))
            .collect();
        return Ok(Decomposition::new(Some(r.clone()), terms));
    }
    Err(Error::Sampling(format!("no spanning sample of {d} operators in {RETRIES} attempts")))
}

/// Term groups in parameter order: the build and sign of each.
const GROUPS: [(Build, Sign); 4] = [
    (Build::Symmetric, Sign::Plus),
    (Build::Symmetric, Sign::Minus),
    (Build::Antisymmetric, Sign::Plus),
    (Build::Antisymmetric, Sign::Minus),
];

/// Number of terms in each group.
type Pattern = [usize; 4];

fn params_per_term(n: usize, build: Build) -> usize {
    match build {
        Build::Symmetric => n * (n + 1) / 2,
        Build::Antisymmetric => n * (n - 1) / 2,
    }
}

/// Parameter layout of one sign/build pattern.
#[derive(Clone)]
struct Layout {
    n: usize,
    /// `(build, sign, offset)` per term.
    slots: Vec<(Build, f64, usize)>,
    len: usize,
}

impl Layout {
    fn new(n: usize, pattern: &Pattern) -> Self {
        let mut slots = Vec::new();
        let mut len = 0;
        for (g, &count) in pattern.iter().enumerate() {
            let (build, sign) = GROUPS[g];
            for _ in 0..count {
                slots.push((build, sign.value::<f64>(), len));
                len += params_per_term(n, build);
            }
        }
        Layout { n, slots, len }
    }

    /// Gram matrix of one term, row-major.
    fn gram(&self, theta: &[f64], slot: usize) -> Vec<f64> {
        let n = self.n;
        let (build, _, offset) = self.slots[slot];
        let mut g = vec![0.0; n * n];
        let mut j = offset;
        for p in 0..n {
            let start = if build == Build::Symmetric { p } else { p + 1 };
            for q in start..n {
                g[p * n + q] = theta[j];
                g[q * n + p] = if build == Build::Symmetric { theta[j] } else { -theta[j] };
                j += 1;
            }
        }
        g
    }

    /// Parameter index and coefficient of `G[p][q]` within a term.
    fn param_of(&self, build: Build, p: usize, q: usize) -> Option<(usize, f64)> {
        let n = self.n;
        let (lo, hi) = (p.min(q), p.max(q));
        match build {
            Build::Symmetric => Some((lo * n - lo * (lo + 1) / 2 + hi, 1.0)),
            Build::Antisymmetric if p == q => None,
            Build::Antisymmetric => Some((lo * n - lo * (lo + 1) / 2 + hi - lo - 1, if p < q { 1.0 } else { -1.0 })),
        }
    }
}

/// `Σ sᵢ T(Gᵢ) − R` over the flattened tensor entries.
struct Fit<'a> {
    layout: &'a Layout,
    target: &'a [f64],
    theta: DVector<f64>,
}

impl Fit<'_> {
    fn residual_vec(&self) -> Vec<f64> {
        let n = self.layout.n;
        let mut out: Vec<f64> = self.target.iter().map(|t| -t).collect();
        for slot in 0..self.layout.slots.len() {
            let (build, sign, _) = self.layout.slots[slot];
            let g = self.layout.gram(self.theta.as_slice(), slot);
            let at = |i: usize, j: usize| g[i * n + j];
            let mut idx = 0;
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            let mut v = at(a, d) * at(b, c) - at(a, c) * at(b, d);
                            if build == Build::Antisymmetric {
                                v -= 2.0 * at(a, b) * at(c, d);
                            }
                            out[idx] += sign * v;
                            idx += 1;
                        }
                    }
                }
            }
        }
        out
    }
}

impl LeastSquaresProblem<f64, Dyn, Dyn> for Fit<'_> {
    type ResidualStorage = Owned<f64, Dyn>;
    type JacobianStorage = Owned<f64, Dyn, Dyn>;
    type ParameterStorage = Owned<f64, Dyn>;

    fn set_params(&mut self, x: &DVector<f64>) {
        self.theta.copy_from(x);
    }

    fn params(&self) -> DVector<f64> {
        self.theta.clone()
    }

    fn residuals(&self) -> Option<DVector<f64>> {
        Some(DVector::from_vec(self.residual_vec()))
    }

    fn jacobian(&self) -> Option<DMatrix<f64>> {
        let layout = self.layout;
        let n = layout.n;
        let mut jac = DMatrix::zeros(n.pow(4), layout.len);
        for slot in 0..layout.slots.len() {
            let (build, sign, offset) = layout.slots[slot];
            let g = layout.gram(self.theta.as_slice(), slot);
            let at = |i: usize, j: usize| g[i * n + j];
            let mut row = 0;
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        for d in 0..n {
                            // ∂T/∂G[p][q] for each Gram entry the entry depends on.
                            let mut parts = vec![
                                (a, d, at(b, c)),
                                (b, c, at(a, d)),
                                (a, c, -at(b, d)),
                                (b, d, -at(a, c)),
                            ];
                            if build == Build::Antisymmetric {
                                parts.push((a, b, -2.0 * at(c, d)));
                                parts.push((c, d, -2.0 * at(a, b)));
                            }
                            for (p, q, v) in parts {
                                if let Some((j, coef)) = layout.param_of(build, p, q) {
                                    jac[(row, offset + j)] += sign * coef * v;
                                }
                            }
                            row += 1;
                        }
                    }
                }
            }
        }
        Some(jac)
    }
}

fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Runs LM from `start`; keeps whichever of start and end has the smaller sup-norm residual.
fn descend(layout: &Layout, target: &[f64], start: Vec<f64>) -> (Vec<f64>, f64) {
    let fit = Fit { layout, target, theta: DVector::from_vec(start) };
    let start_score = sup_norm(&fit.residual_vec());
    let start_theta = fit.theta.clone();
    let (fit, _) = LevenbergMarquardt::new().with_patience(200).minimize(fit);
    let end = fit.residual_vec();
    let end_score = sup_norm(&end);
    if end_score.is_finite() && end_score <= start_score {
        (fit.theta.as_slice().to_vec(), end_score)
    } else {
        (start_theta.as_slice().to_vec(), start_score)
    }
}

#[derive(Clone)]
struct Candidate {
    pattern: Pattern,
    theta: Vec<f64>,
    /// Sup-norm residual against the normalized target.
    score: f64,
}

fn patterns(k: usize, chain: Family) -> Vec<Pattern> {
    let mut out = Vec::new();
    for a in 0..=k {
        for b in 0..=k - a {
            for c in 0..=k - a - b {
                let p = [a, b, c, k - a - b - c];
                let sym = p[0] + p[1] > 0;
                let skew = p[2] + p[3] > 0;
                let keep = match chain {
                    Family::SymmetricOnly => !skew,
                    Family::SkewOnly => !sym,
                    Family::Mixed => true,
                };
                if keep {
                    out.push(p);
                }
            }
        }
    }
    out
}

/// Lays the parameters of `prev` into `pattern`, adding one term in group `g`.
fn pad(n: usize, prev: &Candidate, pattern: &Pattern, g: usize, extra: Vec<f64>) -> Vec<f64> {
    let mut theta = Vec::new();
    let mut cursor = 0;
    for (group, &count) in prev.pattern.iter().enumerate() {
        let size = params_per_term(n, GROUPS[group].0) * count;
        theta.extend_from_slice(&prev.theta[cursor..cursor + size]);
        cursor += size;
        if group == g {
            theta.extend_from_slice(&extra);
        }
    }
    debug_assert_eq!(theta.len(), Layout::new(n, pattern).len);
    theta
}

/// Per-level outcome of one search chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSummary {
    pub chain: Family,
    pub k: usize,
    /// Best sup-norm residual at this term count (original scale).
    pub best_residual: f64,
    pub hit: bool,
}

struct ChainOutcome {
    levels: Vec<LevelSummary>,
    hit: Option<(usize, Candidate)>,
}

/// One search chain: levels `k = 1..=k_max`, random starts on the chain's
/// patterns plus starts padded from the chain's own best at `k − 1`.
fn run_chain(
    n: usize,
    target: &[f64],
    magnitude: f64,
    chain: Family,
    k_max: usize,
    budget: usize,
    seed: u64,
) -> ChainOutcome {
    let threshold = hit_threshold(magnitude) / magnitude;
    let mut prev: Option<Candidate> = None;
    let mut levels = Vec::new();
    for k in 1..=k_max {
        let mut jobs: Vec<(Pattern, Vec<f64>)> = Vec::new();
        for pattern in patterns(k, chain) {
            let layout = Layout::new(n, &pattern);
            let both = pattern[0] + pattern[1] > 0 && pattern[2] + pattern[3] > 0;
            let random_starts = chain != Family::Mixed || both;
            if random_starts {
                for s in 0..budget {
                    let tag = [k as u64, pattern[0] as u64, pattern[1] as u64, pattern[2] as u64, pattern[3] as u64, s as u64];
                    let mut rng = rng_for(seed, &tag);
                    let start: Vec<f64> = (0..layout.len).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                    jobs.push((pattern, start));
                }
            }
            if let Some(p) = &prev {
                for g in 0..4 {
                    let mut grown = p.pattern;
                    grown[g] += 1;
                    if grown != pattern {
                        continue;
                    }
                    let size = params_per_term(n, GROUPS[g].0);
                    jobs.push((pattern, pad(n, p, &pattern, g, vec![0.0; size])));
                    let mut rng = rng_for(seed, &[k as u64, g as u64, u64::MAX]);
                    let nudge: Vec<f64> = (0..size).map(|_| 1e-2 * rng.sample::<f64, _>(StandardNormal)).collect();
                    jobs.push((pattern, pad(n, p, &pattern, g, nudge)));
                }
            }
        }
        let results: Vec<Candidate> = jobs
            .into_par_iter()
            .map(|(pattern, start)| {
                let layout = Layout::new(n, &pattern);
                let (theta, score) = descend(&layout, target, start);
                Candidate { pattern, theta, score }
            })
            .collect();
        // Lowest residual, then lowest job index.
        let best = results
            .into_iter()
            .reduce(|a, b| if b.score < a.score { b } else { a });
        let Some(best) = best else { break };
        let hit = best.score < threshold;
        levels.push(LevelSummary { chain, k, best_residual: best.score * magnitude, hit });
        if hit {
            return ChainOutcome { levels, hit: Some((k, best)) };
        }
        prev = Some(best);
    }
    ChainOutcome { levels, hit: None }
}

/// Exact check of a search result: rationalize each term's Gram direction and
/// solve for the weights in rational arithmetic.
fn verify_exactly<S: Scalar>(
    ctx: &SpaceContext<S>,
    target: &CurvatureTensor<S>,
    cand: &Candidate,
) -> Option<Vec<CanonicalTerm<S>>> {
    let n = ctx.dim();
    let layout = Layout::new(n, &cand.pattern);
    let exact_ctx = SpaceContext::<Rational>::euclidean(n).ok()?;
    let mut directions = Vec::new();
    let mut columns = Vec::new();
    for (slot, &(build, _, _)) in layout.slots.iter().enumerate() {
        let g = layout.gram(&cand.theta, slot);
        let top = sup_norm(&g);
        if top == 0.0 {
            return None;
        }
        let d: Vec<Rational> = g.iter().map(|x| rationalize(x / top, VERIFY_DENOMINATOR)).collect::<Option<_>>()?;
        let dm = Matrix::from_fn(n, n, |i, j| d[i * n + j].clone());
        columns.push(tensor_from_gram(&exact_ctx, &dm, build).flatten());
        directions.push((build, dm));
    }
    let rhs: Vec<Rational> = target.entries().iter().map(Scalar::to_rational).collect::<Option<_>>()?;
    let m = Matrix::from_columns(&columns);
    let w = Rational::solve(&m, &rhs, 0.0)?;
    if w.iter().any(num_traits::Zero::is_zero) {
        return None;
    }
    directions
        .into_iter()
        .zip(&w)
        .map(|((build, dm), wi)| {
            let g = dm.convert(S::from_rational);
            let op = Operator::new(ctx, ctx.from_gram(&g), build.canonical_kind()).ok()?;
            Some(CanonicalTerm::from_coefficient(build, op, &S::from_rational(wi)))
        })
        .collect()
}

/// Float search result as terms in the working scalar type.
fn float_terms<S: Scalar>(ctx: &SpaceContext<S>, cand: &Candidate, magnitude: f64) -> Result<Vec<CanonicalTerm<S>>> {
    let n = ctx.dim();
    let layout = Layout::new(n, &cand.pattern);
    let root = magnitude.sqrt();
    layout
        .slots
        .iter()
        .enumerate()
        .map(|(slot, &(build, sign, _))| {
            let g = layout.gram(&cand.theta, slot);
            let gm = Matrix::from_fn(n, n, |i, j| S::approximate(g[i * n + j] * root, 1_000_000_000_000));
            let op = Operator::new(ctx, ctx.from_gram(&gm), build.canonical_kind())?;
            Ok(CanonicalTerm::new(build, Sign::of(&sign), op)?)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceBounds {
    /// The published upper bound `ν(n) ≤ n(n+1)/2`.
    pub nu_upper_bound: usize,
    /// Term count guaranteed by the constructive method, `n²(n²−1)/12`.
    pub constructive_bound: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct DecompositionReport<S: Scalar> {
    pub family: Family,
    pub target: CurvatureTensor<S>,
    pub best: Decomposition<S>,
    /// Smallest term count found, `None` when no hit within `k_max`.
    pub k: Option<usize>,
    /// Term count of the constructive fallback used as `best` when `k` is `None`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fallback_k: Option<usize>,
    pub residual: f64,
    pub bound_kind: BoundKind,
    pub exact_verified: bool,
    pub levels: Vec<LevelSummary>,
    pub reference: ReferenceBounds,
    pub method: &'static str,
}

pub const SEARCH_METHOD: &str = "multi-start Levenberg-Marquardt over Gram parameters (heuristic search)";

/// Searches for the fewest terms of `family` summing to `r`.
///
/// Each family runs its own chain of levels; `Mixed` runs the symmetric and
/// skew chains with the same seeds and a chain over all patterns, and takes
/// the smallest hit, so `μ̂ ≤ min(ν̂, η̂)` holds by construction.
pub fn minimal_search<S: Scalar>(
    ctx: &SpaceContext<S>,
    r: &CurvatureTensor<S>,
    family: Family,
    k_max: usize,
    budget: usize,
    seed: u64,
) -> Result<DecompositionReport<S>> {
    require_act(r)?;
    let n = ctx.dim();
    let reference = ReferenceBounds { nu_upper_bound: n * (n + 1) / 2, constructive_bound: act_space_dimension(n) };
    let report = |best: Decomposition<S>, k, fallback_k, bound_kind, exact_verified, levels| -> Result<_> {
        let residual = r.sub(&best.sum(ctx)?).max_abs();
        Ok(DecompositionReport {
            family,
            target: r.clone(),
            best,
            k,
            fallback_k,
            residual,
            bound_kind,
            exact_verified,
            levels,
            reference: reference.clone(),
            method: SEARCH_METHOD,
        })
    };
    if r.is_zero() {
        return report(Decomposition::new(Some(r.clone()), Vec::new()), Some(0), None, BoundKind::Exact, true, Vec::new());
    }

    let magnitude = r.max_abs();
    let target: Vec<f64> = r.entries().iter().map(|x| x.to_f64() / magnitude).collect();
    let chains: &[Family] = match family {
        Family::Mixed => &[Family::SymmetricOnly, Family::SkewOnly, Family::Mixed],
        _ => std::slice::from_ref(match family {
            Family::SymmetricOnly => &Family::SymmetricOnly,
            _ => &Family::SkewOnly,
        }),
    };
    let outcomes: Vec<ChainOutcome> =
        chains.iter().map(|&c| run_chain(n, &target, magnitude, c, k_max, budget, seed)).collect();
    let levels: Vec<LevelSummary> = outcomes.iter().flat_map(|o| o.levels.clone()).collect();
    let hit = outcomes
        .iter()
        .filter_map(|o| o.hit.as_ref())
        .min_by(|a, b| a.0.cmp(&b.0).then(a.1.score.total_cmp(&b.1.score)));

    match hit {
        Some((k, cand)) => {
            if let Some(terms) = verify_exactly(ctx, r, cand) {
                let bound_kind = if *k == 1 { BoundKind::Exact } else { BoundKind::Heuristic };
                report(Decomposition::new(Some(r.clone()), terms), Some(*k), None, bound_kind, true, levels)
            } else {
                let terms = float_terms(ctx, cand, magnitude)?;
                report(Decomposition::new(Some(r.clone()), terms), Some(*k), None, BoundKind::Heuristic, false, levels)
            }
        }
        None => {
            let constructive = constructive_decomposition(ctx, r, family, seed)?;
            let fallback_k = constructive.len();
            report(constructive, None, Some(fallback_k), BoundKind::Heuristic, false, levels)
        }
    }
}

/// One sampled target of a conjecture campaign.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct CampaignInstance<S: Scalar> {
    pub trial: usize,
    pub seed: u64,
    pub nu_hat: Option<usize>,
    pub mu_hat: Option<usize>,
    pub nu_bound: BoundKind,
    pub mu_bound: BoundKind,
    pub target: CurvatureTensor<S>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct CampaignReport<S: Scalar> {
    pub n: usize,
    pub trials: usize,
    /// `(ν̂ − μ̂, count)` over trials where both were found.
    pub gap_distribution: Vec<(usize, usize)>,
    /// Instances with `μ̂ < ν̂` where `μ̂` carries an exact bound.
    pub witnesses: Vec<CampaignInstance<S>>,
    /// Maxima over sampled targets: lower-bound estimates for `ν(n)` and `μ(n)`.
    pub nu_sup_lower_estimate: Option<usize>,
    pub mu_sup_lower_estimate: Option<usize>,
    pub instances: Vec<CampaignInstance<S>>,
}

/// Compares `μ̂` and `ν̂` on random targets.
pub fn conjecture_campaign<S: Scalar>(
    ctx: &SpaceContext<S>,
    trials: usize,
    k_max: usize,
    budget: usize,
    seed: u64,
) -> Result<CampaignReport<S>> {
    let n = ctx.dim();
    if !(2..=3).contains(&n) {
        return Err(Error::Hypothesis(format!("campaigns run at n ∈ {{2, 3}}, got {n}")));
    }
    let instances: Vec<CampaignInstance<S>> = (0..trials)
        .map(|t| {
            let trial_seed = crate::seed::derive_seed(seed, &[t as u64]);
            let mut rng = rng_for(trial_seed, &[]);
            let target = random_act(ctx, act_space_dimension(n), &mut rng)?;
            let nu = minimal_search(ctx, &target, Family::SymmetricOnly, k_max, budget, trial_seed)?;
            let mu = minimal_search(ctx, &target, Family::Mixed, k_max, budget, trial_seed)?;
            Ok(CampaignInstance {
                trial: t,
                seed: trial_seed,
                nu_hat: nu.k,
                mu_hat: mu.k,
                nu_bound: nu.bound_kind,
                mu_bound: mu.bound_kind,
                target,
            })
        })
        .collect::<Result<_>>()?;
    let mut gaps = std::collections::BTreeMap::new();
    for i in &instances {
        if let (Some(nu), Some(mu)) = (i.nu_hat, i.mu_hat) {
            *gaps.entry(nu.saturating_sub(mu)).or_insert(0) += 1;
        }
    }
    let witnesses = instances
        .iter()
        .filter(|i| i.mu_bound == BoundKind::Exact && matches!((i.nu_hat, i.mu_hat), (Some(nu), Some(mu)) if mu < nu))
        .cloned()
        .collect();
    Ok(CampaignReport {
        n,
        trials,
        gap_distribution: gaps.into_iter().collect(),
        witnesses,
        nu_sup_lower_estimate: instances.iter().filter_map(|i| i.nu_hat).max(),
        mu_sup_lower_estimate: instances.iter().filter_map(|i| i.mu_hat).max(),
        instances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvature::{antisymmetric_build, symmetric_build};

    fn ctx(n: usize) -> SpaceContext<Rational> {
        SpaceContext::euclidean(n).unwrap()
    }

    #[test]
    fn jacobian_matches_finite_differences() {
        let n = 3;
        let pattern = [1, 1, 1, 0];
        let layout = Layout::new(n, &pattern);
        let target = vec![0.3; n.pow(4)];
        let mut rng = rng_for(3, &[]);
        let theta: Vec<f64> = (0..layout.len).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let fit = Fit { layout: &layout, target: &target, theta: DVector::from_vec(theta.clone()) };
        let jac = fit.jacobian().unwrap();
        let h = 1e-6;
        for j in 0..layout.len {
            let mut up = theta.clone();
            up[j] += h;
            let mut down = theta.clone();
            down[j] -= h;
            let ru = Fit { layout: &layout, target: &target, theta: DVector::from_vec(up) }.residual_vec();
            let rd = Fit { layout: &layout, target: &target, theta: DVector::from_vec(down) }.residual_vec();
            for i in 0..ru.len() {
                let fd = (ru[i] - rd[i]) / (2.0 * h);
                assert!((fd - jac[(i, j)]).abs() < 1e-6, "entry ({i},{j}): {fd} vs {}", jac[(i, j)]);
            }
        }
    }

    #[test]
    fn layout_gram_matches_builds() {
        let n = 3;
        let c = ctx(n);
        let layout = Layout::new(n, &[0, 0, 1, 0]);
        let theta = vec![1.0, 2.0, -1.0];
        let g = layout.gram(&theta, 0);
        let gm = Matrix::from_fn(n, n, |i, j| Rational::approximate(g[i * n + j], 10));
        let op = Operator::new(&c, c.from_gram(&gm), OperatorKind::SkewAdjoint).unwrap();
        let r = antisymmetric_build(&c, &op).unwrap();
        let fit = Fit { layout: &layout, target: &vec![0.0; 81], theta: DVector::from_vec(theta) };
        let res = fit.residual_vec();
        for (a, b) in res.iter().zip(r.entries()) {
            assert!((a - b.to_f64()).abs() < 1e-12);
        }
    }

    #[test]
    fn constructive_two_dimensional() {
        let c = ctx(2);
        let r = CurvatureTensor::from_fn(&c, |[a, b, cc, d]| {
            let v = Rational::from_i64(5);
            match (a, b, cc, d) {
                (0, 1, 1, 0) | (1, 0, 0, 1) => v,
                (0, 1, 0, 1) | (1, 0, 1, 0) => -v,
                _ => Rational::from_i64(0),
            }
        });
        let d = constructive_decomposition(&c, &r, Family::SymmetricOnly, 1).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d.sum(&c).unwrap(), r);
    }

    #[test]
    fn constructive_three_and_zero() {
        let c = ctx(3);
        let d3: Vec<Rational> = [1, 2, 3].iter().map(|&x| Rational::from_i64(x)).collect();
        let op = Operator::new(&c, Matrix::diagonal(&d3), OperatorKind::SelfAdjoint).unwrap();
        let r = symmetric_build(&c, &op).unwrap();
        for family in [Family::SymmetricOnly, Family::SkewOnly, Family::Mixed] {
            let d = constructive_decomposition(&c, &r, family, 7).unwrap();
            assert!(d.len() <= 6);
            assert_eq!(d.residual(&c).unwrap(), 0.0);
        }
        let z = constructive_decomposition(&c, &CurvatureTensor::zeros(&c), Family::Mixed, 1).unwrap();
        assert!(z.is_empty());
    }

    #[test]
    fn two_dimensional_search_certifies_one_term() {
        let c = ctx(2);
        let mut rng = rng_for(11, &[]);
        let r = random_act(&c, 2, &mut rng).unwrap();
        assert!(!r.is_zero());
        let rep = minimal_search(&c, &r, Family::SymmetricOnly, 2, 4, 1).unwrap();
        assert_eq!(rep.k, Some(1));
        assert_eq!(rep.bound_kind, BoundKind::Exact);
        assert_eq!(rep.residual, 0.0);
    }

    #[test]
    fn lambda_target_is_one_mixed_term() {
        let c = ctx(4);
        let mut m = Matrix::zeros(4, 4);
        for (i, j) in [(1, 0), (3, 2)] {
            m[(i, j)] = Rational::from_i64(1);
            m[(j, i)] = Rational::from_i64(-1);
        }
        let op = Operator::new(&c, m, OperatorKind::SkewAdjoint).unwrap();
        let r = antisymmetric_build(&c, &op).unwrap();
        let rep = minimal_search(&c, &r, Family::Mixed, 1, 3, 2).unwrap();
        assert_eq!(rep.k, Some(1));
    }

    #[test]
    fn search_is_deterministic() {
        let c = SpaceContext::<f64>::euclidean(3).unwrap();
        let mut rng = rng_for(5, &[]);
        let r = random_act(&c, 6, &mut rng).unwrap();
        let a = minimal_search(&c, &r, Family::SymmetricOnly, 2, 3, 9).unwrap();
        let b = minimal_search(&c, &r, Family::SymmetricOnly, 2, 3, 9).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
