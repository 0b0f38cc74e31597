use num_complex::Complex64;
use proptest::prelude::*;

use dhs::deconv::{error_bound, factored_kernel_hat, peak_hat, sigma_of_beta, PeakModel, SigmaConvention};
use dhs::hardy::{hardy_norm, HardyFunction};
use dhs::index_fn::IndexFunction;
use dhs::scales::{dhs_norm, vhs_norm};
use dhs::spectral::{dft_forward, dft_inverse, spectral_density, GridSignal, SpectralDensity};

fn signal(n: usize) -> impl Strategy<Value = GridSignal> {
    (prop::collection::vec(-10.0..10.0f64, n), 0.01..1.0f64, -5.0..5.0f64)
        .prop_map(|(ys, dx, x0)| GridSignal::new(ys, dx, x0).unwrap())
}

fn density() -> impl Strategy<Value = SpectralDensity> {
    prop::collection::btree_map(0u32..10_000, 1e-3..1.0f64, 1..32).prop_map(|m| {
        let (l, w): (Vec<f64>, Vec<f64>) = m.into_iter().map(|(k, w)| (k as f64 * 1e-3, w)).unzip();
        SpectralDensity::new(l, w).unwrap()
    })
}

fn model() -> impl Strategy<Value = PeakModel> {
    prop::sample::select(PeakModel::ALL.to_vec())
}

proptest! {
    #[test]
    fn dft_roundtrip(f in signal(64)) {
        let back = dft_inverse(&dft_forward(&f)).unwrap();
        let scale = f.l2_norm().max(1e-300);
        prop_assert!(back.sub(&f).unwrap().l2_norm() <= 1e-12 * scale);
    }

    #[test]
    fn parseval(f in signal(128)) {
        let total = spectral_density(&f).total();
        let direct = f.l2_norm().powi(2);
        prop_assert!((total - direct).abs() <= 1e-10 * direct.max(1e-300));
    }

    #[test]
    fn dft_is_linear(f in signal(32), g_ys in prop::collection::vec(-10.0..10.0f64, 32), a in -3.0..3.0f64, b in -3.0..3.0f64) {
        let g = GridSignal::new(g_ys, f.dx(), f.x0()).unwrap();
        let lhs = dft_forward(&f.combine(a, &g, b).unwrap());
        let (ff, gg) = (dft_forward(&f), dft_forward(&g));
        let scale = f.l2_norm() + g.l2_norm();
        for ((l, x), y) in lhs.coeffs().iter().zip(ff.coeffs()).zip(gg.coeffs()) {
            prop_assert!((l - (x * a + y * b)).norm() <= 1e-12 * scale.max(1.0));
        }
    }

    #[test]
    fn density_weights_are_nonnegative(f in signal(64)) {
        let d = spectral_density(&f);
        prop_assert!(d.weights().iter().all(|&w| w >= 0.0));
        prop_assert!(d.lambdas().windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn dhs_norms_grow_with_s(d in density(), s in 0.0..3.0f64, ds in 0.0..2.0f64) {
        for a in [IndexFunction::Exp, IndexFunction::PowerPlusOne { gamma: 2.0 }, IndexFunction::ExpSqrt] {
            let lo = dhs_norm(&d, &a, s).unwrap();
            let hi = dhs_norm(&d, &a, s + ds).unwrap();
            prop_assert!(lo <= hi * (1.0 + 1e-14));
            prop_assert!(d.total().sqrt() <= lo * (1.0 + 1e-14));
        }
    }

    #[test]
    fn error_bound_grows_with_residual(m in model(), sigma in 0.0..1.0f64, r in 1e-6..0.3f64, k in 1.0..3.0f64, rs in 1.0..100.0f64) {
        let lo = error_bound(m, sigma, r, rs).unwrap();
        let hi = error_bound(m, sigma, (r * k).min(0.9), rs * k).unwrap();
        prop_assert!(lo <= hi * (1.0 + 1e-14));
        prop_assert!(lo >= r * (1.0 - 1e-14));
    }

    #[test]
    fn kernel_factorization(m in model(), gamma in 0.05..3.0f64, frac in 0.01..0.99f64, w in -8.0..8.0f64) {
        let beta = frac * gamma;
        let full = peak_hat(m, gamma, w).unwrap();
        let split = factored_kernel_hat(m, gamma, beta, w).unwrap() * peak_hat(m, beta, w).unwrap();
        prop_assert!((full - split).abs() <= 1e-12 * full.max(1e-300));
        prop_assert!(full > 0.0 && full <= 1.0);
    }

    #[test]
    fn sigma_lies_in_unit_interval(m in model(), gamma in 0.05..3.0f64, frac in 0.0..=1.0f64) {
        for conv in [SigmaConvention::LambdaDomain, SigmaConvention::PaperPrinted] {
            let s = sigma_of_beta(m, frac * gamma, gamma, conv).unwrap();
            prop_assert!((0.0..=1.0).contains(&s));
        }
    }

    #[test]
    fn hardy_norm_matches_weighted_norm(re in prop::collection::vec(-1.0..1.0f64, 1..40), r in 1.0..3.0f64, dr in 0.0..1.0f64) {
        let coeffs: Vec<Complex64> = re.iter().enumerate().map(|(k, &x)| Complex64::new(x, 0.5 * x * k as f64).scale(0.5f64.powi(k as i32))).collect();
        let g = HardyFunction::new(coeffs.clone()).unwrap();
        let h = hardy_norm(&g, r).unwrap();
        prop_assert!(h <= hardy_norm(&g, r + dr).unwrap() * (1.0 + 1e-14));
        let pts: Vec<(f64, f64)> = coeffs.iter().enumerate().map(|(i, b)| ((i + 1) as f64, b.norm_sqr())).filter(|p| p.1 > 0.0).collect();
        prop_assume!(!pts.is_empty());
        let d = SpectralDensity::new(pts.iter().map(|p| p.0).collect(), pts.iter().map(|p| p.1).collect()).unwrap();
        let phi = IndexFunction::Exp.dilated(2.0 * r.ln()).unwrap();
        let via_scale = if r == 1.0 { d.total().sqrt() } else { vhs_norm(&d, &phi).unwrap() };
        prop_assert!((h - via_scale).abs() <= 1e-12 * h);
    }
}
