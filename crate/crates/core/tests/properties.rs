use proptest::prelude::*;

use randfix_core::contraction::{fit_measured, measure_pairs};
use randfix_core::hammerstein::feasibility_from_parts;
use randfix_core::picard::picard_solve;
use randfix_core::randomfp::{sample_pairs, PairSampling};
use randfix_core::space::mix;
use randfix_core::{
    check_condition, Coefficients, ConditionKind, FnOperator, HRCoefficients, NormKind,
    OmegaSample, PicardConfig, QuadratureGrid, Vector,
};

fn norms(dim: usize) -> Vec<NormKind<f64>> {
    let w: Vec<f64> = (0..dim).map(|i| 0.5 + i as f64 / dim as f64).collect();
    vec![NormKind::Euclidean, NormKind::Sup, NormKind::WeightedL2(w)]
}

fn vec3() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0..100.0f64, 3)
}

fn affine(c: f64, b: f64) -> FnOperator<impl Fn(&OmegaSample, &Vector<f64>) -> Vector<f64> + Sync> {
    FnOperator::new(1, move |_: &OmegaSample, x: &Vector<f64>| {
        Vector::scalar(c * x[0] + b)
    })
}

fn scalar_pairs(xs: &[(f64, f64)]) -> Vec<(Vector<f64>, Vector<f64>)> {
    xs.iter()
        .map(|&(a, b)| (Vector::scalar(a), Vector::scalar(b)))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn norm_axioms(a in vec3(), b in vec3(), s in -10.0..10.0f64) {
        let zero = [0.0; 3];
        for n in norms(3) {
            let na = n.norm_unchecked(&a);
            prop_assert!(na >= 0.0);
            prop_assert!((n.distance_unchecked(&a, &zero) - na).abs() <= 1e-12 * (1.0 + na));
            let scaled: Vec<f64> = a.iter().map(|x| s * x).collect();
            prop_assert!((n.norm_unchecked(&scaled) - s.abs() * na).abs() <= 1e-9 * (1.0 + na));
            let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
            prop_assert!(n.norm_unchecked(&sum) <= na + n.norm_unchecked(&b) + 1e-9);
            prop_assert!((n.distance_unchecked(&a, &b) - n.distance_unchecked(&b, &a)).abs() <= 1e-12);
        }
    }

    #[test]
    fn mix_is_injective_in_index(m in any::<u64>(), i in any::<u64>(), j in any::<u64>()) {
        prop_assume!(i != j);
        prop_assert_ne!(mix(m, i), mix(m, j));
    }

    #[test]
    fn special_kinds_embed_with_same_margin(
        c in -0.9..0.9f64,
        b in -5.0..5.0f64,
        xs in prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 1..20),
    ) {
        let op = affine(c, b);
        let omega = OmegaSample::from_seed(0, 1);
        let pairs = scalar_pairs(&xs);
        let alpha = c.abs().max(0.01);
        let hr = HRCoefficients::banach(alpha);
        let special = check_condition(&op, &omega, ConditionKind::Banach, Coefficients::HardyRogers(hr), &pairs, &NormKind::Euclidean).unwrap();
        let general = check_condition(&op, &omega, ConditionKind::HardyRogers, Coefficients::HardyRogers(hr), &pairs, &NormKind::Euclidean).unwrap();
        prop_assert!(special.passes());
        prop_assert!(general.passes());
        prop_assert_eq!(special.margin, general.margin);
    }

    #[test]
    fn fitted_sum_grows_with_pairs(
        c in -0.9..0.9f64,
        b in -5.0..5.0f64,
        xs in prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 2..16),
        extra in prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 1..8),
    ) {
        let op = affine(c, b);
        let omega = OmegaSample::from_seed(0, 1);
        let norm = NormKind::Euclidean;
        let small = measure_pairs(&op, &omega, &scalar_pairs(&xs), &norm).unwrap();
        let mut all = xs.clone();
        all.extend(extra);
        let large = measure_pairs(&op, &omega, &scalar_pairs(&all), &norm).unwrap();
        for kind in [ConditionKind::HardyRogers, ConditionKind::Reich, ConditionKind::Kannan] {
            let a = fit_measured(kind, &small).unwrap();
            let bgr = fit_measured(kind, &large).unwrap();
            prop_assert!(a.sum() <= bgr.sum() + 1e-9, "{:?}: {} > {}", kind, a.sum(), bgr.sum());
        }
    }

    #[test]
    fn fitted_coefficients_satisfy_their_pairs(
        m in prop::collection::vec(-0.6..0.6f64, 4),
        b in prop::collection::vec(-5.0..5.0f64, 2),
        seed in any::<u64>(),
        radius in 0.1..50.0f64,
    ) {
        let op = FnOperator::new(2, move |_: &OmegaSample, x: &Vector<f64>| {
            Vector::new(vec![m[0] * x[0] + m[1] * x[1] + b[0], m[2] * x[0] + m[3] * x[1] + b[1]])
        });
        let omega = OmegaSample::from_seed(0, seed);
        let sampling = PairSampling { count: 64, radius, orbit_pairs: 32 };
        let pairs = sample_pairs(&op, &omega, &Vector::zeros(2), &sampling).unwrap();
        for norm in norms(2) {
            let measured = measure_pairs(&op, &omega, &pairs, &norm).unwrap();
            for kind in [ConditionKind::HardyRogers, ConditionKind::Reich, ConditionKind::Ciric] {
                let c = fit_measured(kind, &measured).unwrap();
                for p in &measured {
                    let scale = 1.0 + p.reference.iter().fold(p.image, |a, &d| a.max(d));
                    prop_assert!(c.bound(&p.reference) - p.image >= -1e-9 * scale, "{:?} {:?}", kind, c);
                }
            }
        }
    }

    #[test]
    fn symmetrized_fit_certifies_on_symmetric_sample(
        c in -0.9..0.9f64,
        b in -5.0..5.0f64,
        xs in prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 1..12),
    ) {
        let op = affine(c, b);
        let omega = OmegaSample::from_seed(0, 1);
        let mut sym = xs.clone();
        sym.extend(xs.iter().map(|&(x, y)| (y, x)));
        let pairs = scalar_pairs(&sym);
        let measured = measure_pairs(&op, &omega, &pairs, &NormKind::Euclidean).unwrap();
        let fit = fit_measured(ConditionKind::HardyRogers, &measured).unwrap();
        prop_assume!(fit.is_feasible());
        let s = fit.symmetrized();
        let cert = check_condition(&op, &omega, ConditionKind::HardyRogers, Coefficients::HardyRogers(s), &pairs, &NormKind::Euclidean).unwrap();
        prop_assert!(cert.passes(), "margin {}", cert.margin);
    }

    #[test]
    fn error_bounds_dominate_true_error(
        c in -0.95..0.95f64,
        b in -5.0..5.0f64,
        x0 in -50.0..50.0f64,
        tol_exp in 4..12i32,
    ) {
        let op = affine(c, b);
        let omega = OmegaSample::from_seed(0, 1);
        let exact = b / (1.0 - c);
        let pairs = scalar_pairs(&[(x0, exact), (x0, -x0), (1.0, 2.0)]);
        let alpha = c.abs().max(1e-3);
        let cert = check_condition(&op, &omega, ConditionKind::Banach, Coefficients::HardyRogers(HRCoefficients::banach(alpha)), &pairs, &NormKind::Euclidean).unwrap();
        let cfg = PicardConfig::new(10f64.powi(-tol_exp), 100_000, NormKind::Euclidean);
        let r = picard_solve(&op, &omega, &Vector::scalar(x0), Some(&cert), &cfg).unwrap();
        prop_assert!(r.converged());
        let err = (r.fixed_point[0] - exact).abs();
        let slack = 1e-12 * (1.0 + exact.abs() + x0.abs());
        prop_assert!(err <= r.apriori_at(r.iterations).unwrap() + slack);
        prop_assert!(err <= r.aposteriori_bound.unwrap() + slack);
        prop_assert!(err <= cfg.tol + slack);
        let k = r.k_bound.unwrap();
        for (i, &q) in r.ratio_estimates.iter().enumerate() {
            // Roundoff in tiny steps can inflate a ratio; only check well-resolved ones.
            if r.step_norms[i] > 1e-9 * (1.0 + exact.abs()) {
                prop_assert!(q <= k + 1e-6, "ratio {} > k {}", q, k);
            }
        }
    }

    #[test]
    fn stated_feasibility_implies_derived(
        raw in prop::collection::vec(0.0..1.0f64, 5),
        total in 0.0..0.999f64,
        h in 0.0..10.0f64,
        f0 in 0.0..10.0f64,
        l in 0.0..2.0f64,
        rho in 0.0..100.0f64,
    ) {
        let s: f64 = raw.iter().sum::<f64>().max(1e-12);
        let a: Vec<f64> = raw.iter().map(|x| x / s * total).collect();
        let c = HRCoefficients::new(a[0], a[1], a[2], a[3], a[4]);
        let r = feasibility_from_parts(h, f0, l, rho, &c).unwrap();
        prop_assert!(r.rhs_derived >= r.rhs_stated - 1e-12 * rho);
        if r.feasible_stated {
            prop_assert!(r.feasible_derived);
        }
    }

    #[test]
    fn quadrature_grids_are_well_formed(m in 2usize..200) {
        for g in [QuadratureGrid::<f64>::trapezoid(m).unwrap(), QuadratureGrid::<f64>::gauss_legendre(m).unwrap()] {
            prop_assert_eq!(g.nodes.len(), m);
            prop_assert!((g.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(g.weights.iter().all(|&w| w > 0.0));
            prop_assert!(g.nodes.windows(2).all(|w| w[0] < w[1]));
            prop_assert!(g.nodes.iter().all(|&t| (0.0..=1.0).contains(&t)));
            for i in 0..m {
                prop_assert!((g.nodes[i] + g.nodes[m - 1 - i] - 1.0).abs() < 1e-12);
                prop_assert!((g.weights[i] - g.weights[m - 1 - i]).abs() < 1e-12);
            }
        }
    }
}
