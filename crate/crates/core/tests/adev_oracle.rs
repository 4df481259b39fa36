use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;
use wavelock::rng::{stream_rng, Stream};
use wavelock::stability::{allan_deviation, default_taus, summarize, WavelengthSeries};

/// Overlapping Allan deviation straight from the definition: every window
/// average is summed from scratch.
fn brute_adev(values: &[f64], reference: f64, m: usize) -> f64 {
    let y: Vec<f64> = values.iter().map(|v| (v - reference) / reference).collect();
    let n = y.len();
    let avg = |k: usize| y[k..k + m].iter().sum::<f64>() / m as f64;
    let terms = n - 2 * m + 1;
    let mut s = 0.0;
    for k in 0..terms {
        let d = avg(k + m) - avg(k);
        s += d * d;
    }
    (s / (2.0 * terms as f64)).sqrt()
}

fn noisy_series(seed: u64, n: usize, white: f64, walk: f64, drift: f64) -> Vec<f64> {
    let mut rng = stream_rng(seed, Stream::Measurement, 99);
    let mut x = 0.0;
    (0..n)
        .map(|i| {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            x += walk * b;
            1560.0 + white * a + x + drift * i as f64
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn matches_definition(seed in any::<u64>(), n in 10usize..3000, walk in 0.0f64..1e-4, drift in -1e-6f64..1e-6) {
        let values = noisy_series(seed, n, 1e-3, walk, drift);
        let s = WavelengthSeries::new(10.0, values.clone()).unwrap();
        let r = s.reference();
        let taus = default_taus(&s);
        let curve = allan_deviation(&s, &taus).unwrap();
        prop_assert_eq!(curve.taus.len(), taus.len());
        for (t, a) in curve.taus.iter().zip(&curve.adev) {
            let m = (t / 10.0).round() as usize;
            let b = brute_adev(&values, r, m);
            prop_assert!(((a - b) / b).abs() < 1e-12, "m={} {} vs {}", m, a, b);
        }
    }

    #[test]
    fn offset_changes_nothing_with_fixed_reference(seed in any::<u64>(), offset in -0.5f64..0.5) {
        let values = noisy_series(seed, 600, 1e-3, 1e-5, 0.0);
        let a = WavelengthSeries::new(10.0, values.clone()).unwrap().with_reference(1560.0);
        let b = WavelengthSeries::new(10.0, values.iter().map(|v| v + offset).collect()).unwrap().with_reference(1560.0);
        let taus = default_taus(&a);
        let ca = allan_deviation(&a, &taus).unwrap();
        let cb = allan_deviation(&b, &taus).unwrap();
        for (x, y) in ca.adev.iter().zip(&cb.adev) {
            prop_assert!(((x - y) / x).abs() < 1e-6, "{} vs {}", x, y);
        }
    }

    #[test]
    fn summary_is_shift_invariant(seed in any::<u64>(), offset in -1.0f64..1.0) {
        let values = noisy_series(seed, 200, 1e-2, 0.0, 0.0);
        let a = summarize(&WavelengthSeries::new(1.0, values.clone()).unwrap(), 25).unwrap();
        let b = summarize(&WavelengthSeries::new(1.0, values.iter().map(|v| v + offset).collect()).unwrap(), 25).unwrap();
        prop_assert!((a.sd_pm - b.sd_pm).abs() < 1e-6);
        prop_assert!((a.peak_to_peak_pm - b.peak_to_peak_pm).abs() < 1e-6);
        prop_assert_eq!(a.histogram.counts.iter().sum::<u64>(), 200);
    }
}

#[test]
fn white_noise_falls_as_inverse_root_tau() {
    let sigma = 1e-6;
    let n = 2000;
    let seeds = 200;
    let ms = [1usize, 2, 5, 10, 20, 50];
    let taus: Vec<f64> = ms.iter().map(|&m| m as f64).collect();
    let mut mean_var = vec![0.0; ms.len()];
    for seed in 0..seeds {
        let mut rng = stream_rng(seed, Stream::Measurement, 1);
        let values: Vec<f64> = (0..n).map(|_| 1560.0 * (1.0 + sigma * rng.sample::<f64, _>(StandardNormal))).collect();
        let s = WavelengthSeries::new(1.0, values).unwrap().with_reference(1560.0);
        let c = allan_deviation(&s, &taus).unwrap();
        for (acc, a) in mean_var.iter_mut().zip(&c.adev) {
            *acc += a * a / seeds as f64;
        }
    }
    for (&m, v) in ms.iter().zip(&mean_var) {
        let ratio = v.sqrt() / (sigma / (m as f64).sqrt());
        assert!((ratio - 1.0).abs() < 0.03, "m={m}: {ratio}");
    }
    let slope = {
        let xs: Vec<f64> = taus.iter().map(|t| t.log10()).collect();
        let ys: Vec<f64> = mean_var.iter().map(|v| 0.5 * v.log10()).collect();
        wavelock::calibration::linear_fit(&xs, &ys).unwrap().slope.value
    };
    assert!((slope + 0.5).abs() < 0.05, "{slope}");
}

#[test]
fn linear_drift_gives_a_tau_over_root_two() {
    let a = 3e-10;
    let r = 1560.0;
    let values: Vec<f64> = (0..3000).map(|i| r * (1.0 + a * i as f64)).collect();
    let s = WavelengthSeries::new(1.0, values).unwrap().with_reference(r);
    let c = allan_deviation(&s, &default_taus(&s)).unwrap();
    for (t, v) in c.taus.iter().zip(&c.adev) {
        let expect = a * t / std::f64::consts::SQRT_2;
        assert!(((v - expect) / expect).abs() < 1e-9, "tau {t}: {v} vs {expect}");
    }
}
