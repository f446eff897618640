mod common;

use proptest::prelude::*;

use common::*;
use sumhess::inequality_lab::{
    concavity_lhs, concavity_search_k, kappa_floor_scan, lemma22_ratio, liren_scan, theta_scan, ConcavityInstance,
    ConcavityOptions, SampleConfig,
};
use sumhess::symfun::{CurvatureVector, SumHessianParams};

fn sorted(mut x: Vec<f64>) -> CurvatureVector {
    x.sort_by(|a, b| b.partial_cmp(a).unwrap());
    CurvatureVector::new(x).unwrap()
}

fn lhs(lam: &CurvatureVector, xi: Vec<f64>, eps: f64, k: f64, p: &SumHessianParams) -> f64 {
    let inst = ConcavityInstance {
        lam: lam.clone(),
        xi,
        eps,
        k,
    };
    concavity_lhs(&inst, p).unwrap()
}

proptest! {
    #[test]
    fn lhs_is_quadratic_in_xi_and_affine_in_k(
        seed in 0u64..500,
        xi in prop::collection::vec(-1.0f64..1.0, 3),
        t in -3.0f64..3.0,
        eps in 0.01f64..5.0,
        k in 0.0f64..100.0,
    ) {
        let p = SumHessianParams::new(3, 1.0, 1.0).unwrap();
        let lam = sorted(cone_point(&mut rng(seed), 3, 1.0, -1.0, 4.0));
        let base = lhs(&lam, xi.clone(), eps, k, &p);
        let scale = lhs(&lam, xi.iter().map(|v| v.abs()).collect(), eps, k, &p).abs().max(1.0);
        let scaled = lhs(&lam, xi.iter().map(|v| t * v).collect(), eps, k, &p);
        prop_assert!((scaled - t * t * base).abs() < 1e-9 * (1.0 + t * t) * scale.max(base.abs()));
        prop_assert_eq!(lhs(&lam, vec![0.0; 3], eps, k, &p), 0.0);
        let (l0, l1, l2) = (
            lhs(&lam, xi.clone(), eps, 0.0, &p),
            lhs(&lam, xi.clone(), eps, 1.0, &p),
            lhs(&lam, xi.clone(), eps, 2.0, &p),
        );
        prop_assert!((l2 - 2.0 * l1 + l0).abs() < 1e-9 * scale.max(l2.abs()));
    }
}

#[test]
fn lhs_rejects_bad_input() {
    let p = SumHessianParams::new(3, 1.0, 1.0).unwrap();
    let lam = CurvatureVector::new(vec![3.0, 2.0, 1.0]).unwrap();
    let inst = |lam: &CurvatureVector, xi: Vec<f64>, eps, k| ConcavityInstance {
        lam: lam.clone(),
        xi,
        eps,
        k,
    };
    assert!(concavity_lhs(&inst(&lam, vec![1.0, 0.0], 0.1, 1.0), &p).is_err());
    assert!(concavity_lhs(&inst(&lam, vec![1.0, 0.0, 0.0], 0.0, 1.0), &p).is_err());
    assert!(concavity_lhs(&inst(&lam, vec![1.0, 0.0, 0.0], 0.1, -1.0), &p).is_err());
    let unsorted = CurvatureVector::new(vec![1.0, 2.0, 3.0]).unwrap();
    assert!(concavity_lhs(&inst(&unsorted, vec![1.0, 0.0, 0.0], 0.1, 1.0), &p).is_err());
}

#[test]
fn lemma22_ratio_contract() {
    let p = SumHessianParams::new(3, 1.0, 1.0).unwrap();
    let lam = CurvatureVector::new(vec![3.0, 2.0, 1.0]).unwrap();
    assert!(lemma22_ratio(&lam, &p, 0).is_err());
    assert!(lemma22_ratio(&lam, &p, 4).is_err());
    assert!(lemma22_ratio(&CurvatureVector::new(vec![1.0, 2.0, 3.0]).unwrap(), &p, 1).is_err());
    assert!(lemma22_ratio(&CurvatureVector::new(vec![1.0, -5.0, -5.0]).unwrap(), &p, 1).is_err());
    // S = σ_2 + σ_3 = 11 + 6, S^{11} λ_1 = (λ_2 + λ_3 + λ_2 λ_3) λ_1 = 15.
    assert!((lemma22_ratio(&lam, &p, 1).unwrap() - 15.0 / 17.0).abs() < 1e-14);
}

#[test]
fn scans_are_independent_of_worker_count() {
    let p = SumHessianParams::new(3, 1.0, 1.0).unwrap();
    let cfg = SampleConfig::new(400, 9);
    assert_eq!(theta_scan(&cfg, &p, 1).unwrap(), theta_scan(&cfg, &p, 4).unwrap());
    assert_eq!(kappa_floor_scan(&cfg, &p, 1).unwrap(), kappa_floor_scan(&cfg, &p, 3).unwrap());
    assert_eq!(liren_scan(&cfg, &p, 0.1, 1).unwrap(), liren_scan(&cfg, &p, 0.1, 4).unwrap());
    let opts = ConcavityOptions {
        adversarial_iters: 20,
        ..ConcavityOptions::default()
    };
    let cfg = SampleConfig::new(2000, 9);
    assert_eq!(
        concavity_search_k(1.0, &cfg, &p, &opts, 1).unwrap(),
        concavity_search_k(1.0, &cfg, &p, &opts, 4).unwrap()
    );
}
