mod common;

use common::*;
use pqp::linesearch::*;
use pqp::newton::subproblem_value;
use proptest::prelude::*;
use rand::Rng;

#[test]
fn ten_thousand_random_instances() {
    let mut r = rng(41);
    for _ in 0..10_000 {
        let pairs = r.random_range(0..40);
        let p = random_pwa(&mut r, pairs);
        let tau = exact_linesearch(&p);
        assert!(p.eval(tau).abs() <= 1e-10 * p.scale_at(tau), "ψ′(τ*) = {}", p.eval(tau));
        let b = bisection(&p);
        assert!((tau - b).abs() <= 1e-10 * (1.0 + tau.abs()), "{tau} vs {b}");
        for s in [tau - 1e-6, tau + 1e-6, 0.0, 1.0] {
            assert!(p.primitive(tau) <= p.primitive(s) + 1e-12 * (1.0 + p.primitive(s).abs()));
        }
    }
}

#[test]
fn derivative_matches_finite_differences_of_subproblem() {
    let mut r = rng(42);
    for _ in 0..50 {
        let s = random_subproblem(&mut r, 6, 8);
        let d = random_vec(&mut r, 6);
        let f = build_derivative(&s.problem, &s.x, &s.xhat, &d, &s.y, &s.sigma_y, &s.sigma_x_inv);
        let psi = |t: f64| {
            let xt: Vec<f64> = s.x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
            subproblem_value(&s.problem, &xt, &s.xhat, &s.y, &s.sigma_y, &s.sigma_x_inv)
        };
        let mut bps: Vec<f64> = f.delta.iter().zip(&f.alpha).filter(|(d, _)| **d != 0.0).map(|(d, a)| a / d).collect();
        bps.sort_by(f64::total_cmp);
        for t in [-0.7, -0.1, 0.0, 0.3, 1.0, 2.5] {
            if bps.iter().any(|b| (b - t).abs() < 1e-4) {
                continue;
            }
            let h = 1e-6;
            let fd = (psi(t + h) - psi(t - h)) / (2.0 * h);
            assert!((fd - f.eval(t)).abs() <= 1e-6 * (1.0 + f.scale_at(t) + psi(t).abs() * 1e-3), "t={t}: {fd} vs {}", f.eval(t));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn scale_equivariance(seed in any::<u64>(), s in 0.01f64..100.0) {
        let mut r = rng(seed);
        let sub = random_subproblem(&mut r, 5, 7);
        let d = random_vec(&mut r, 5);
        let ds: Vec<f64> = d.iter().map(|v| v * s).collect();
        let f1 = build_derivative(&sub.problem, &sub.x, &sub.xhat, &d, &sub.y, &sub.sigma_y, &sub.sigma_x_inv);
        let f2 = build_derivative(&sub.problem, &sub.x, &sub.xhat, &ds, &sub.y, &sub.sigma_y, &sub.sigma_x_inv);
        let t1 = exact_linesearch(&f1);
        let t2 = exact_linesearch(&f2);
        prop_assert!((t1 - s * t2).abs() <= 1e-10 * t1.abs().max(1e-12) + 1e-14);
    }

    #[test]
    fn permutation_invariance(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = random_pwa(&mut r, 20);
        let perm = random_perm(&mut r, 20);
        let q = PwaDerivative {
            eta: p.eta,
            beta: p.beta,
            delta: perm.iter().map(|&i| p.delta[i]).collect(),
            alpha: perm.iter().map(|&i| p.alpha[i]).collect(),
        };
        let (a, b) = (exact_linesearch(&p), exact_linesearch(&q));
        prop_assert!((a - b).abs() <= 1e-12 * (1.0 + a.abs()));
    }
}
