//! Property tests for the library invariants.

use num_traits::Zero;
use proptest::prelude::*;
use rand::Rng;

use curvtensor::curvature::{
    antisymmetric_build, is_act, precompose, symmetric_build, Axiom, Build, CurvatureTensor,
};
use curvtensor::decompose::{constructive_decomposition, minimal_search, random_act, Family};
use curvtensor::dependence::dependence;
use curvtensor::io::{parse_decomposition, parse_operator, parse_tensor, parse_term};
use curvtensor::reduce::Decomposition;
use curvtensor::seed::rng_for;
use curvtensor::structure_group::{anti_isometry, in_g_pm_tau, in_g_r_tau, FormView, IsometrySampler};
use curvtensor::{Matrix, Operator, OperatorKind, Rational, Scalar, SpaceContext};

const KINDS: [OperatorKind; 3] = [OperatorKind::SelfAdjoint, OperatorKind::SkewAdjoint, OperatorKind::General];

fn euclid(n: usize) -> SpaceContext<Rational> {
    SpaceContext::euclidean(n).unwrap()
}

/// A random positive definite form `MᵀM + I`.
fn random_form(n: usize, seed: u64) -> SpaceContext<Rational> {
    let mut rng = rng_for(seed, &[]);
    let m = Matrix::from_fn(n, n, |_, _| Rational::from_i64(rng.gen_range(-2..=2)));
    SpaceContext::new(m.transpose().matmul(&m).add(&Matrix::identity(n)), 1e-9).unwrap()
}

fn op(ctx: &SpaceContext<Rational>, kind: OperatorKind, seed: u64) -> Operator<Rational> {
    ctx.random_operator(kind, None, seed).unwrap()
}

fn proportional(a: &[Rational], b: &[Rational]) -> bool {
    let Some(i) = a.iter().position(|x| !x.is_zero()) else { return b.iter().all(|x| x.is_zero()) };
    if b[i].is_zero() {
        return false;
    }
    let r = b[i].clone() / a[i].clone();
    a.iter().zip(b).all(|(x, y)| x.clone() * r.clone() == *y)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn adjoint_is_an_involution_and_reverses_products(n in 1usize..5, seed in any::<u64>()) {
        let ctx = random_form(n, seed);
        let a = op(&ctx, OperatorKind::General, seed ^ 1);
        let b = op(&ctx, OperatorKind::General, seed ^ 2);
        let aa = ctx.adjoint(&ctx.adjoint(&a).unwrap()).unwrap();
        prop_assert_eq!(aa.matrix(), a.matrix());
        let ab = Operator::general(a.matrix().matmul(b.matrix()));
        let lhs = ctx.adjoint(&ab).unwrap();
        let rhs = ctx.adjoint(&b).unwrap().matrix().matmul(ctx.adjoint(&a).unwrap().matrix());
        prop_assert_eq!(lhs.matrix(), &rhs);
    }

    #[test]
    fn random_operators_have_their_kind(n in 1usize..6, k in 0usize..2, seed in any::<u64>()) {
        let ctx = random_form(n, seed);
        let a = op(&ctx, KINDS[k], seed);
        prop_assert!(ctx.has_kind(a.matrix(), KINDS[k]));
    }

    #[test]
    fn pullback_is_contravariant_and_linear(n in 2usize..5, seed in any::<u64>()) {
        let ctx = euclid(n);
        let a = op(&ctx, OperatorKind::General, seed);
        let b = op(&ctx, OperatorKind::General, seed ^ 7);
        let r1 = symmetric_build(&ctx, &op(&ctx, OperatorKind::SelfAdjoint, seed ^ 3)).unwrap();
        let r2 = antisymmetric_build(&ctx, &op(&ctx, OperatorKind::SkewAdjoint, seed ^ 4)).unwrap();
        // (AB)*R = B*(A*R)
        let ab = Operator::general(a.matrix().matmul(b.matrix()));
        let lhs = precompose(&ctx, &ab, &r1).unwrap();
        let rhs = precompose(&ctx, &b, &precompose(&ctx, &a, &r1).unwrap()).unwrap();
        prop_assert_eq!(lhs.entries(), rhs.entries());
        let c = Rational::from_ratio(-3, 2);
        let lin = precompose(&ctx, &a, &r1.add(&r2.scale(&c))).unwrap();
        let split = precompose(&ctx, &a, &r1).unwrap().add(&precompose(&ctx, &a, &r2).unwrap().scale(&c));
        prop_assert_eq!(lin.entries(), split.entries());
    }

    #[test]
    fn build_symmetries_by_kind(n in 2usize..5, k in 0usize..3, seed in any::<u64>()) {
        let ctx = random_form(n, seed);
        let a = op(&ctx, KINDS[k], seed);
        for build in [Build::Symmetric, Build::Antisymmetric] {
            let report = is_act(&build.tensor(&ctx, &a).unwrap());
            // The extra G_ab·G_cd term is antisymmetric in (a, b) only for skew G.
            if build == Build::Symmetric || KINDS[k] == OperatorKind::SkewAdjoint {
                prop_assert!(report.witnesses.iter().all(|w| w.axiom != Axiom::Antisymmetry));
            }
            let pair = report.witnesses.iter().any(|w| w.axiom == Axiom::PairSymmetry);
            if KINDS[k] != OperatorKind::General {
                prop_assert!(!pair, "pair symmetry broken for a {} operator", KINDS[k]);
            }
        }
    }

    #[test]
    fn matching_builds_are_curvature_tensors(n in 1usize..6, seed in any::<u64>()) {
        let ctx = random_form(n, seed);
        prop_assert!(is_act(&symmetric_build(&ctx, &op(&ctx, OperatorKind::SelfAdjoint, seed)).unwrap()).is_act);
        prop_assert!(is_act(&antisymmetric_build(&ctx, &op(&ctx, OperatorKind::SkewAdjoint, seed)).unwrap()).is_act);
    }

    #[test]
    fn rank_of_powers(n in 1usize..7, skew in any::<bool>(), seed in any::<u64>()) {
        let ctx = euclid(n);
        let kind = if skew { OperatorKind::SkewAdjoint } else { OperatorKind::SelfAdjoint };
        let mut rng = rng_for(seed, &[]);
        let rank = if skew { 2 * rng.gen_range(0..=n / 2) } else { rng.gen_range(0..=n) };
        let a = if rank == 0 { Operator::zero(n, kind) } else { ctx.random_operator_with(kind, Some(rank), &mut rng).unwrap() };
        prop_assert_eq!(ctx.rank(&a), rank);
        for k in 2..=4u32 {
            prop_assert_eq!(a.matrix().pow(k).rank(0.0), rank);
        }
    }

    #[test]
    fn dependence_ignores_order_and_scaling(n in 2usize..4, seed in any::<u64>(), scale in 1i64..5) {
        let ctx = euclid(n);
        let a = op(&ctx, OperatorKind::SelfAdjoint, seed);
        let mut ts = vec![
            symmetric_build(&ctx, &a).unwrap(),
            symmetric_build(&ctx, &a.scaled(&Rational::from_i64(2))).unwrap(),
            antisymmetric_build(&ctx, &op(&ctx, OperatorKind::SkewAdjoint, seed ^ 5)).unwrap(),
        ];
        if seed % 2 == 0 {
            ts.push(symmetric_build(&ctx, &op(&ctx, OperatorKind::SelfAdjoint, seed ^ 9)).unwrap());
        }
        let base = dependence(&ts).unwrap();

        let mut perm = ts.clone();
        perm.reverse();
        let p = dependence(&perm).unwrap();
        prop_assert_eq!(p.independent, base.independent);
        prop_assert_eq!(p.rank, base.rank);

        let s = Rational::from_i64(scale);
        let mut scaled = ts.clone();
        scaled[0] = scaled[0].scale(&s);
        let sc = dependence(&scaled).unwrap();
        prop_assert_eq!(sc.independent, base.independent);
        if let (Some(c0), Some(c1), true) = (&base.coefficients, &sc.coefficients, base.rank + 1 == ts.len()) {
            // Coefficients are only unique up to scale when the nullspace is a line.
            let mut adjusted = c0.clone();
            adjusted[0] = adjusted[0].clone() / s.clone();
            prop_assert!(proportional(&adjusted, c1));
            let mut reversed = c0.clone();
            reversed.reverse();
            prop_assert!(proportional(&reversed, p.coefficients.as_ref().unwrap()));
        }
    }

    #[test]
    fn exact_and_float_dependence_agree_outside_the_band(n in 2usize..4, seed in any::<u64>(), terms in 1usize..5) {
        let ctx = euclid(n);
        let fctx = SpaceContext::<f64>::euclidean(n).unwrap();
        let mut rng = rng_for(seed, &[]);
        let mut exact = Vec::new();
        let mut float = Vec::new();
        for _ in 0..terms {
            let kind = KINDS[rng.gen_range(0..2)];
            let a = ctx.random_operator_with(kind, None, &mut rng).unwrap();
            let t = Build::for_kind(kind).tensor(&ctx, &a).unwrap();
            float.push(CurvatureTensor::from_entries(&fctx, t.entries().iter().map(Scalar::to_f64).collect()).unwrap());
            exact.push(t);
        }
        let e = dependence(&exact).unwrap();
        let f = dependence(&float).unwrap();
        let tol = fctx.tolerance();
        let in_band = f.singular_ratio.is_some_and(|r| r > 0.1 * tol && r < 10.0 * tol);
        if !in_band {
            prop_assert_eq!(e.independent, f.independent);
            prop_assert_eq!(e.rank, f.rank);
        }
    }

    #[test]
    fn constructive_decompositions_are_exact(n in 2usize..4, fam in 0usize..3, seed in any::<u64>()) {
        let ctx = euclid(n);
        let family = [Family::SymmetricOnly, Family::SkewOnly, Family::Mixed][fam];
        let r = random_act(&ctx, 3, &mut rng_for(seed, &[])).unwrap();
        let d = constructive_decomposition(&ctx, &r, family, seed).unwrap();
        prop_assert_eq!(d.residual(&ctx).unwrap(), 0.0);
        prop_assert!(d.len() <= curvtensor::curvature::act_space_dimension(n));
    }

    #[test]
    fn json_round_trips(n in 1usize..4, k in 0usize..3, seed in any::<u64>()) {
        let ctx = random_form(n, seed);
        let a = op(&ctx, KINDS[k], seed);
        let v = serde_json::to_value(&a).unwrap();
        prop_assert_eq!(&parse_operator(&ctx, &v).unwrap(), &a);
        if KINDS[k] != OperatorKind::General {
            let term = curvtensor::curvature::CanonicalTerm::new(
                Build::for_kind(KINDS[k]),
                curvtensor::curvature::Sign::Minus,
                a.clone(),
            ).unwrap();
            let tv = serde_json::to_value(&term).unwrap();
            prop_assert_eq!(&parse_term(&ctx, &tv).unwrap(), &term);
            let t = term.tensor(&ctx).unwrap();
            let t2 = parse_tensor(&ctx, &serde_json::to_value(&t).unwrap()).unwrap();
            prop_assert_eq!(t2.entries(), t.entries());
            let d = Decomposition::new(Some(t), vec![term]);
            let d2 = parse_decomposition(&ctx, &serde_json::to_value(&d).unwrap()).unwrap();
            prop_assert_eq!(serde_json::to_value(&d2).unwrap(), serde_json::to_value(&d).unwrap());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 6, ..ProptestConfig::default() })]

    /// Per chain, the best residual never grows with the term count, and
    /// rescaling the target by `c²` leaves the reported `k` unchanged.
    #[test]
    fn search_is_monotone_and_scale_free(seed in any::<u64>(), c in 1i64..4) {
        let ctx = euclid(3);
        let r = random_act(&ctx, 6, &mut rng_for(seed, &[])).unwrap();
        for family in [Family::SkewOnly, Family::Mixed] {
            let rep = minimal_search(&ctx, &r, family, 3, 2, seed).unwrap();
            for w in rep.levels.windows(2) {
                if w[0].chain == w[1].chain {
                    prop_assert!(w[1].best_residual <= w[0].best_residual * (1.0 + 1e-12));
                }
            }
            prop_assert!(rep.k.unwrap_or(rep.fallback_k.unwrap_or(0)) <= 6);
        }
        let c2 = Rational::from_i64(c * c);
        let a = minimal_search(&ctx, &r, Family::SymmetricOnly, 3, 4, seed).unwrap();
        let b = minimal_search(&ctx, &r.scale(&c2), Family::SymmetricOnly, 3, 4, seed).unwrap();
        prop_assert_eq!(a.k, b.k);
    }

    /// At rank 2 the ± isometries of τ still fix `R^Λ_τ`.
    #[test]
    fn rank_two_forms_keep_the_containment(seed in any::<u64>()) {
        let ctx = euclid(4);
        let mut m = Matrix::zeros(4, 4);
        m[(0, 1)] = Rational::from_i64(1);
        m[(1, 0)] = Rational::from_i64(-1);
        let tau = FormView::new(Operator::new(&ctx, m, OperatorKind::SkewAdjoint).unwrap()).unwrap();
        let sampler = IsometrySampler::new(&ctx, &tau);
        let flip = anti_isometry(&ctx, &tau).unwrap();
        let mut rng = rng_for(seed, &[]);
        for _ in 0..4 {
            let iso = sampler.sample(&mut rng);
            let anti = Operator::general(flip.matrix().matmul(iso.matrix()));
            for g in [iso, anti] {
                prop_assert!(in_g_pm_tau(&ctx, &g, &tau).unwrap().is_some());
                prop_assert!(in_g_r_tau(&ctx, &g, &tau).unwrap());
            }
        }
    }
}
