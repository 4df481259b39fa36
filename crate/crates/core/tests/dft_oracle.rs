use proptest::prelude::*;
use wavelock::dft::{
    expected_profile, fit_gaussian, sample_histogram, tau_shift_to_wavelength_shift, Binned, DftChain, FitOptions,
};
use wavelock::rng::{stream_rng, Stream};

fn chain(half_width: f64, bin_width: f64) -> DftChain {
    let c = 335.17 * 1560.0 + 25_000.0;
    DftChain {
        gdd_ps_per_nm: 335.17,
        latency_ps: 25_000.0,
        bin_width_ps: bin_width,
        window: (c - half_width, c + half_width),
        pair_rate_hz: 1.0e4,
        accidental_rate_hz: 1.0e-2,
        integration_time_s: 10.0,
    }
}

/// Composite Simpson rule for the Gaussian density over `[a, b]`.
fn simpson_mass(a: f64, b: f64, mu: f64, sigma: f64, panels: usize) -> f64 {
    let pdf = |x: f64| {
        let z = (x - mu) / sigma;
        (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
    };
    let h = (b - a) / panels as f64;
    let mut s = pdf(a) + pdf(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * pdf(a + i as f64 * h);
    }
    s * h / 3.0
}

fn check_against_quadrature(c: &DftChain, lambda: f64, sigma_nm: f64) {
    let p = expected_profile(c, lambda, sigma_nm).unwrap();
    let mu = c.centroid_ps(lambda);
    let width = c.width_ps(sigma_nm);
    let signal = c.pair_rate_hz * c.integration_time_s;
    let bg = c.accidental_rate_hz * c.integration_time_s;
    let edges = p.bin_edges();
    let mut total_oracle = 0.0;
    for i in 0..p.len() {
        let m = signal * simpson_mass(edges[i], edges[i + 1], mu, width, 512) + bg;
        total_oracle += m;
        let tol = 1e-9 * m.max(1e-3);
        assert!((p.means[i] - m).abs() <= tol, "bin {i}: {} vs {m}", p.means[i]);
    }
    let expected_total = signal + p.len() as f64 * bg;
    assert!(((p.total() - expected_total) / expected_total).abs() < 1e-4);
    assert!(((total_oracle - expected_total) / expected_total).abs() < 1e-4);
}

#[test]
fn fine_bins_match_quadrature() {
    let c = chain(2000.0, 1.0);
    for lambda in [1559.2, 1560.0, 1560.77] {
        check_against_quadrature(&c, lambda, 1.5);
    }
}

#[test]
fn coarse_bins_match_quadrature() {
    // 40 ps bins on a 71 ps wide peak exercise the CDF-difference path.
    let c = chain(600.0, 40.0);
    check_against_quadrature(&c, 1560.1, 0.3);
}

#[test]
fn width_follows_dispersion_and_bandwidth() {
    let c = chain(2000.0, 1.0);
    assert!((c.width_ps(1.5) - 355.5).abs() < 0.05);
}

#[test]
fn flat_expectation_sample_mean() {
    let flat = wavelock::dft::ExpectedProfile {
        start_ps: 0.0,
        bin_width_ps: 1.0,
        means: vec![100.0; 10_000],
        integration_time_s: 10.0,
    };
    let h = sample_histogram(&flat, &mut stream_rng(5, Stream::Measurement, 0)).unwrap();
    let mean = h.total() / 1e4;
    // std of the mean is sqrt(100 / 1e4) = 0.1
    assert!((mean - 100.0).abs() < 0.3, "{mean}");
}

#[test]
fn estimator_is_unbiased_with_expected_scatter() {
    // Signal-to-background well above 10; 1e5 signal counts.
    let c = chain(2000.0, 1.0);
    let lambda = 1560.0;
    let truth = c.centroid_ps(lambda);
    let p = expected_profile(&c, lambda, 1.5).unwrap();
    let n = 200;
    let errs: Vec<f64> = (0..n)
        .map(|s| {
            let h = sample_histogram(&p, &mut stream_rng(s, Stream::Measurement, 7)).unwrap();
            fit_gaussian(&h, &FitOptions::default()).unwrap().tau0.value - truth
        })
        .collect();
    let mean = errs.iter().sum::<f64>() / n as f64;
    let sd = (errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
    let ideal = c.width_ps(1.5) / 1e5f64.sqrt();
    assert!(mean.abs() < 3.0 * sd / (n as f64).sqrt(), "bias {mean}");
    assert!((sd / ideal - 1.0).abs() < 0.2, "sd {sd} vs {ideal}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn noiseless_round_trip(lambda in 1559.0f64..1561.0) {
        let c = chain(2000.0, 1.0);
        let p = expected_profile(&c, lambda, 1.5).unwrap();
        let fit = fit_gaussian(&p, &FitOptions::default()).unwrap();
        let truth = c.centroid_ps(lambda);
        prop_assert!((fit.tau0.value - truth).abs() < 1e-6, "{} vs {}", fit.tau0.value, truth);
        let back = tau_shift_to_wavelength_shift(fit.tau0.value - c.centroid_ps(1560.0), &c).unwrap();
        prop_assert!((back - (lambda - 1560.0)).abs() < 1e-9);
    }

    #[test]
    fn counts_are_non_negative_and_seeded(seed in any::<u64>(), lambda in 1559.5f64..1560.5) {
        let c = DftChain { pair_rate_hz: 200.0, ..chain(2000.0, 1.0) };
        let p = expected_profile(&c, lambda, 1.5).unwrap();
        let a = sample_histogram(&p, &mut stream_rng(seed, Stream::Measurement, 0)).unwrap();
        let b = sample_histogram(&p, &mut stream_rng(seed, Stream::Measurement, 0)).unwrap();
        prop_assert_eq!(a.counts.len(), c.bins());
        prop_assert_eq!(a, b);
    }
}

#[test]
fn fitted_model_reproduces_noiseless_profile() {
    let c = chain(2000.0, 1.0);
    let p = expected_profile(&c, 1560.3, 1.5).unwrap();
    let fit = fit_gaussian(&p, &FitOptions::default()).unwrap();
    for (m, e) in fit.model(&p).iter().zip(&p.means) {
        assert!((m - e).abs() < 1e-6 * e.max(1.0), "{m} vs {e}");
    }
}
