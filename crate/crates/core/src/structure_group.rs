//! Bilinear forms `τ(x, y) = φ(Bx, y)`, their pullbacks, and the groups
//! `G_τ`, `G^±_τ` and `G_{R^Λ_τ}`.
//!
//! Membership in `G^±_τ` is decided on Gram matrices (`AᵀTA = ±T`), while
//! membership in `G_{R^Λ_τ}` is decided by precomposing the full tensor, so the
//! two predicates share no code beyond the operator itself.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curvature::{antisymmetric_build, congruence, precompose, Sign};
use crate::error::{Error, Result};
use crate::linalg::{Operator, OperatorKind, SpaceContext};
use crate::matrix::{dot, Matrix};
use crate::scalar::Scalar;
use crate::seed::rng_for;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormSymmetry {
    Symmetric,
    AntiSymmetric,
}

/// The form `τ(x, y) = φ(Bx, y)` of a self- or skew-adjoint `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct FormView<S: Scalar> {
    op: Operator<S>,
    symmetry: FormSymmetry,
}

impl<S: Scalar> FormView<S> {
    pub fn new(op: Operator<S>) -> Result<Self> {
        let symmetry = match op.kind() {
            OperatorKind::SelfAdjoint => FormSymmetry::Symmetric,
            OperatorKind::SkewAdjoint => FormSymmetry::AntiSymmetric,
            OperatorKind::General => {
                return Err(Error::Domain("a form needs a self- or skew-adjoint operator".into()))
            }
        };
        Ok(FormView { op, symmetry })
    }

    pub fn op(&self) -> &Operator<S> {
        &self.op
    }

    pub fn symmetry(&self) -> FormSymmetry {
        self.symmetry
    }

    /// `T[i][j] = τ(e_i, e_j)`.
    pub fn gram(&self, ctx: &SpaceContext<S>) -> Matrix<S> {
        ctx.gram(self.op.matrix())
    }

    pub fn evaluate(&self, ctx: &SpaceContext<S>, x: &[S], y: &[S]) -> S {
        ctx.inner(&self.op.matrix().mul_vec(x), y)
    }
}

/// `(A*τ)(x, y) = τ(Ax, Ay)`, carried by the operator `A* B A`.
pub fn pullback_form<S: Scalar>(ctx: &SpaceContext<S>, a: &Operator<S>, tau: &FormView<S>) -> Result<FormView<S>> {
    ctx.check_dim(a.matrix())?;
    Ok(FormView { op: congruence(ctx, a, &tau.op), symmetry: tau.symmetry })
}

fn require_invertible<S: Scalar>(ctx: &SpaceContext<S>, a: &Operator<S>) -> Result<()> {
    ctx.check_dim(a.matrix())?;
    if !ctx.is_invertible(a) {
        return Err(Error::Domain("structure groups contain invertible maps only".into()));
    }
    Ok(())
}

fn pulled_gram<S: Scalar>(a: &Matrix<S>, t: &Matrix<S>) -> Matrix<S> {
    a.transpose().matmul(t).matmul(a)
}

/// The sign `s` with `A*τ = s·τ`, if any. `+1` wins when `τ = 0`.
pub fn in_g_pm_tau<S: Scalar>(ctx: &SpaceContext<S>, a: &Operator<S>, tau: &FormView<S>) -> Result<Option<Sign>> {
    require_invertible(ctx, a)?;
    let t = tau.gram(ctx);
    let pulled = pulled_gram(a.matrix(), &t);
    let tol = ctx.tolerance();
    Ok(if pulled.approx_eq(&t, tol) {
        Some(Sign::Plus)
    } else if pulled.approx_eq(&t.neg(), tol) {
        Some(Sign::Minus)
    } else {
        None
    })
}

pub fn in_g_tau<S: Scalar>(ctx: &SpaceContext<S>, a: &Operator<S>, tau: &FormView<S>) -> Result<bool> {
    Ok(in_g_pm_tau(ctx, a, tau)? == Some(Sign::Plus))
}

/// `A*R^Λ_τ = R^Λ_τ`, compared entrywise on the precomposed tensor.
pub fn in_g_r_tau<S: Scalar>(ctx: &SpaceContext<S>, a: &Operator<S>, tau: &FormView<S>) -> Result<bool> {
    require_invertible(ctx, a)?;
    let r = antisymmetric_build(ctx, &tau.op)?;
    Ok(precompose(ctx, a, &r)?.approx_eq(&r))
}

fn require_antisymmetric<S: Scalar>(tau: &FormView<S>) -> Result<()> {
    if tau.symmetry != FormSymmetry::AntiSymmetric {
        return Err(Error::Hypothesis("τ must be anti-symmetric".into()));
    }
    Ok(())
}

/// Basis `u₁, v₁, …, u_k, v_k, r₁, …` with `τ(u_i, v_i) = 1`, all other pairs
/// pairing to zero; returned as the columns of a matrix together with `k`.
fn symplectic_basis<S: Scalar>(t: &Matrix<S>) -> (Matrix<S>, usize) {
    let n = t.rows();
    let form = |x: &[S], y: &[S]| dot(&t.mul_vec(y), x);
    let mut pool: Vec<Vec<S>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect())
        .collect();
    let mut pairs = Vec::new();
    loop {
        let hit = (0..pool.len())
            .flat_map(|i| (i + 1..pool.len()).map(move |j| (i, j)))
            .map(|(i, j)| (i, j, form(&pool[i], &pool[j])))
            .filter(|(_, _, v)| !v.is_zero())
            .max_by(|a, b| a.2.to_f64().abs().total_cmp(&b.2.to_f64().abs()));
        let Some((i, j, pairing)) = hit else { break };
        let v: Vec<S> = pool.remove(j).into_iter().map(|c| c / pairing.clone()).collect();
        let u = pool.remove(i);
        for w in pool.iter_mut() {
            let wv = form(w, &v);
            let wu = form(w, &u);
            for k in 0..n {
                w[k] = w[k].clone() - wv.clone() * u[k].clone() + wu.clone() * v[k].clone();
            }
        }
        pairs.push((u, v));
    }
    let k = pairs.len();
    let columns: Vec<Vec<S>> = pairs.into_iter().flat_map(|(u, v)| [u, v]).chain(pool).collect();
    (Matrix::from_columns(&columns), k)
}

/// An operator `F` with `F*τ = −τ`: fixes each `u_i` and the radical and
/// negates each `v_i` of a symplectic basis.
pub fn anti_isometry<S: Scalar>(ctx: &SpaceContext<S>, tau: &FormView<S>) -> Result<Operator<S>> {
    require_antisymmetric(tau)?;
    let (p, k) = symplectic_basis(&tau.gram(ctx));
    let n = ctx.dim();
    let d: Vec<S> = (0..n).map(|i| if i < 2 * k && i % 2 == 1 { -S::one() } else { S::one() }).collect();
    let p_inv = p
        .inverse(ctx.tolerance())
        .ok_or_else(|| Error::Domain("symplectic basis is degenerate".into()))?;
    Ok(Operator::general(p.matmul(&Matrix::diagonal(&d)).matmul(&p_inv)))
}

/// Draws `τ`-isometries as products of Cayley transforms `(I − S)(I + S)⁻¹`
/// with `SᵀT + TS = 0`, which keeps every sample rational in exact mode.
pub struct IsometrySampler<S: Scalar> {
    ctx: SpaceContext<S>,
    algebra: Vec<Matrix<S>>,
}

impl<S: Scalar> IsometrySampler<S> {
    pub fn new(ctx: &SpaceContext<S>, tau: &FormView<S>) -> Self {
        let t = tau.gram(ctx);
        let n = ctx.dim();
        let mut map: Matrix<S> = Matrix::zeros(n * n, n * n);
        for a in 0..n {
            for b in 0..n {
                for k in 0..n {
                    let row = a * n + b;
                    map[(row, k * n + a)] = map[(row, k * n + a)].clone() + t[(k, b)].clone();
                    map[(row, k * n + b)] = map[(row, k * n + b)].clone() + t[(a, k)].clone();
                }
            }
        }
        let algebra = S::nullspace(&map, ctx.tolerance())
            .into_iter()
            .map(|v| Matrix::from_fn(n, n, |i, j| v[i * n + j].clone()))
            .collect();
        IsometrySampler { ctx: ctx.clone(), algebra }
    }

    pub fn algebra_dimension(&self) -> usize {
        self.algebra.len()
    }

    fn cayley<R: Rng>(&self, rng: &mut R) -> Matrix<S> {
        let n = self.ctx.dim();
        let id = Matrix::identity(n);
        loop {
            let s = self.algebra.iter().fold(Matrix::zeros(n, n), |acc, l| {
                let c = S::from_ratio(rng.gen_range(-2..=2), 2);
                if c.is_zero() {
                    acc
                } else {
                    acc.add(&l.scale(&c))
                }
            });
            // With degenerate τ, I − S can be singular even when I + S is not.
            let minus = id.sub(&s);
            if minus.rank(self.ctx.tolerance()) < n {
                continue;
            }
            if let Some(inv) = id.add(&s).inverse(self.ctx.tolerance()) {
                return minus.matmul(&inv);
            }
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> Operator<S> {
        let factors = rng.gen_range(2..=3);
        let m = (0..factors).fold(Matrix::identity(self.ctx.dim()), |acc, _| acc.matmul(&self.cayley(rng)));
        Operator::general(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pool {
    Isometry,
    AntiIsometry,
    Generic,
}

impl Pool {
    pub const ALL: [Pool; 3] = [Pool::Isometry, Pool::AntiIsometry, Pool::Generic];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoolCounts {
    pub pool: Pool,
    pub samples: usize,
    pub in_g_pm: usize,
    pub in_g_r: usize,
    pub agreements: usize,
}

/// A sample on which the two predicates disagree.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct Counterexample<S: Scalar> {
    pub pool: Pool,
    pub trial: usize,
    pub operator: Operator<S>,
    pub in_g_pm: Option<Sign>,
    pub in_g_r: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "")]
pub struct StructureReport<S: Scalar> {
    pub rank: usize,
    pub trials: usize,
    pub seed: u64,
    pub pools: Vec<PoolCounts>,
    pub equivalence_holds: bool,
    pub counterexample: Option<Counterexample<S>>,
}

/// Draws one sample from `pool`.
pub fn sample_pool<S: Scalar, R: Rng>(
    ctx: &SpaceContext<S>,
    sampler: &IsometrySampler<S>,
    flip: &Operator<S>,
    pool: Pool,
    rng: &mut R,
) -> Operator<S> {
    match pool {
        Pool::Isometry => sampler.sample(rng),
        Pool::AntiIsometry => Operator::general(flip.matrix().matmul(sampler.sample(rng).matrix())),
        Pool::Generic => ctx.random_invertible(rng),
    }
}

/// Samples `trials` maps from each pool and compares `A ∈ G_{R^Λ_τ}` with
/// `A ∈ G^±_τ` on every one. Requires `rank τ ≥ 4`.
pub fn verify_structure_theorem<S: Scalar>(
    ctx: &SpaceContext<S>,
    tau: &FormView<S>,
    trials: usize,
    seed: u64,
) -> Result<StructureReport<S>> {
    require_antisymmetric(tau)?;
    let rank = ctx.rank(&tau.op);
    if rank < 4 {
        return Err(Error::Hypothesis(format!("rank τ = {rank}, the theorem needs rank ≥ 4")));
    }
    let sampler = IsometrySampler::new(ctx, tau);
    let flip = anti_isometry(ctx, tau)?;
    let jobs: Vec<(usize, Pool, usize)> = Pool::ALL
        .iter()
        .enumerate()
        .flat_map(|(p, &pool)| (0..trials).map(move |t| (p, pool, t)))
        .collect();
    let outcomes: Vec<(Pool, usize, Operator<S>, Option<Sign>, bool)> = jobs
        .into_par_iter()
        .map(|(p, pool, t)| {
            let mut rng = rng_for(seed, &[p as u64, t as u64]);
            let a = sample_pool(ctx, &sampler, &flip, pool, &mut rng);
            let pm = in_g_pm_tau(ctx, &a, tau)?;
            let r = in_g_r_tau(ctx, &a, tau)?;
            Ok((pool, t, a, pm, r))
        })
        .collect::<Result<_>>()?;

    let mut pools: Vec<PoolCounts> = Pool::ALL
        .iter()
        .map(|&pool| PoolCounts { pool, samples: 0, in_g_pm: 0, in_g_r: 0, agreements: 0 })
        .collect();
    let mut counterexample = None;
    for (pool, trial, a, pm, r) in outcomes {
        let c = pools.iter_mut().find(|c| c.pool == pool).expect("every pool is listed");
        c.samples += 1;
        c.in_g_pm += pm.is_some() as usize;
        c.in_g_r += r as usize;
        if pm.is_some() == r {
            c.agreements += 1;
        } else if counterexample.is_none() {
            counterexample = Some(Counterexample { pool, trial, operator: a, in_g_pm: pm, in_g_r: r });
        }
    }
    Ok(StructureReport {
        rank,
        trials,
        seed,
        pools,
        equivalence_holds: counterexample.is_none(),
        counterexample,
    })
}
