//! Drift statistics and Allan deviation of wavelength records.

use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::harness::io::fmt_sig;

pub const DEFAULT_HISTOGRAM_BINS: usize = 25;

#[derive(Debug, Clone, PartialEq)]
pub struct WavelengthSeries {
    pub sample_interval_s: f64,
    /// Wavelengths, nm.
    pub values: Vec<f64>,
    /// Normalization for the fractional series; the series mean when `None`.
    pub reference_nm: Option<f64>,
}

impl WavelengthSeries {
    pub fn new(sample_interval_s: f64, values: Vec<f64>) -> Result<Self> {
        let s = Self { sample_interval_s, values, reference_nm: None };
        s.validate()?;
        Ok(s)
    }

    pub fn with_reference(mut self, reference_nm: f64) -> Self {
        self.reference_nm = Some(reference_nm);
        self
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive(self.sample_interval_s, "sample_interval_s")?;
        if self.values.len() < 2 {
            return Err(Error::invalid("values", "need at least two samples"));
        }
        for &v in &self.values {
            ensure_finite(v, "wavelength sample")?;
        }
        if let Some(r) = self.reference_nm {
            if !r.is_finite() || r == 0.0 {
                return Err(Error::invalid("reference_nm", "must be finite and non-zero"));
            }
        }
        Ok(())
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    pub fn reference(&self) -> f64 {
        self.reference_nm.unwrap_or_else(|| self.mean())
    }

    /// `(lambda - ref) / ref` for every sample.
    pub fn fractional(&self) -> Vec<f64> {
        let r = self.reference();
        self.values.iter().map(|v| (v - r) / r).collect()
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.values.len()).map(|i| i as f64 * self.sample_interval_s)
    }
}

/// Histogram of deviations from the mean, pm.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviationHistogram {
    pub bin_centers_pm: Vec<f64>,
    pub counts: Vec<u64>,
}

impl DeviationHistogram {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_center_pm,count\n");
        for (c, n) in self.bin_centers_pm.iter().zip(&self.counts) {
            out.push_str(&format!("{},{}\n", fmt_sig(*c), n));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriftSummary {
    pub mean_nm: f64,
    pub peak_to_peak_pm: f64,
    /// Population standard deviation, pm.
    pub sd_pm: f64,
    pub histogram: DeviationHistogram,
}

pub fn summarize(series: &WavelengthSeries, bins: usize) -> Result<DriftSummary> {
    series.validate()?;
    if bins == 0 {
        return Err(Error::invalid("bins", "must be at least 1"));
    }
    let mean = series.mean();
    let dev: Vec<f64> = series.values.iter().map(|v| (v - mean) * 1e3).collect();
    let sd = (dev.iter().map(|d| d * d).sum::<f64>() / dev.len() as f64).sqrt();
    let lo = dev.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = dev.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let max = series.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = series.values.iter().copied().fold(f64::INFINITY, f64::min);

    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0u64; bins];
    for d in &dev {
        let i = (((d - lo) / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    let start = if hi > lo { lo } else { lo - 0.5 * bins as f64 * width };
    let bin_centers_pm = (0..bins).map(|i| start + (i as f64 + 0.5) * width).collect();
    Ok(DriftSummary {
        mean_nm: mean,
        peak_to_peak_pm: (max - min) * 1e3,
        sd_pm: sd,
        histogram: DeviationHistogram { bin_centers_pm, counts },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdevCurve {
    pub taus: Vec<f64>,
    pub adev: Vec<f64>,
    /// Number of overlapping difference terms behind each point.
    pub counts: Vec<usize>,
    /// Requested averaging times the record was too short for.
    pub omitted: Vec<f64>,
}

impl AdevCurve {
    pub fn at(&self, tau: f64) -> Option<f64> {
        self.taus.iter().position(|&t| (t - tau).abs() <= 1e-9 * tau.abs().max(1.0)).map(|i| self.adev[i])
    }

    /// Least-squares slope of log10(adev) against log10(tau) over points with
    /// `lo <= tau <= hi`.
    pub fn loglog_slope(&self, lo: f64, hi: f64) -> Option<f64> {
        let (xs, ys): (Vec<f64>, Vec<f64>) = self
            .taus
            .iter()
            .zip(&self.adev)
            .filter(|(&t, &a)| t >= lo && t <= hi && a > 0.0)
            .map(|(t, a)| (t.log10(), a.log10()))
            .unzip();
        crate::calibration::linear_fit(&xs, &ys).ok().map(|f| f.slope.value)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau_s,adev,n_samples\n");
        for ((t, a), n) in self.taus.iter().zip(&self.adev).zip(&self.counts) {
            out.push_str(&format!("{},{},{}\n", fmt_sig(*t), fmt_sig(*a), n));
        }
        out
    }
}

/// Averaging factors `m` on a logarithmic grid with `per_decade` points per
/// decade, from 1 up to `n / 3`. Rounding duplicates are removed.
pub fn log_tau_factors(n: usize, per_decade: usize) -> Vec<usize> {
    let max = n / 3;
    let mut out: Vec<usize> = Vec::new();
    if max == 0 || per_decade == 0 {
        return out;
    }
    for j in 0.. {
        let m = 10f64.powf(j as f64 / per_decade as f64).round() as usize;
        if m > max {
            break;
        }
        if out.last() != Some(&m) {
            out.push(m);
        }
    }
    out
}

/// Default averaging times for a series: 10 per decade up to a third of the
/// record.
pub fn default_taus(series: &WavelengthSeries) -> Vec<f64> {
    log_tau_factors(series.values.len(), 10).into_iter().map(|m| m as f64 * series.sample_interval_s).collect()
}

/// Running sum with Neumaier compensation.
#[derive(Default)]
struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Overlapping Allan deviation of the fractional series at averaging time
/// `tau = m * tau0`:
///
/// ```text
/// sigma^2(tau) = 1 / (2 (N - 2m + 1)) * sum_k (ybar_{k+m} - ybar_k)^2
/// ```
///
/// where `ybar_k` is the mean of `y_k .. y_{k+m-1}`. Averaging times needing
/// more than a third of the record are omitted.
pub fn allan_deviation(series: &WavelengthSeries, taus: &[f64]) -> Result<AdevCurve> {
    series.validate()?;
    let tau0 = series.sample_interval_s;
    let y = series.fractional();
    let n = y.len();

    // Subtracting the mean does not change any difference of averages but
    // keeps the prefix sums small.
    let ym = y.iter().sum::<f64>() / n as f64;
    let mut prefix = Vec::with_capacity(n + 1);
    let mut acc = KahanSum::default();
    prefix.push(0.0);
    for v in &y {
        acc.add(v - ym);
        prefix.push(acc.value());
    }

    let mut curve = AdevCurve { taus: Vec::new(), adev: Vec::new(), counts: Vec::new(), omitted: Vec::new() };
    for &tau in taus {
        ensure_positive(tau, "tau")?;
        let mf = (tau / tau0).round();
        if mf < 1.0 || (mf * tau0 - tau).abs() > 1e-9 * tau {
            return Err(Error::invalid("tau", format!("{tau} s is not a multiple of the {tau0} s sample interval")));
        }
        let m = mf as usize;
        if 3 * m > n {
            curve.omitted.push(tau);
            continue;
        }
        let terms = n - 2 * m + 1;
        let mut ss = KahanSum::default();
        for k in 0..terms {
            let d = prefix[k + 2 * m] - 2.0 * prefix[k + m] + prefix[k];
            ss.add(d * d);
        }
        let var = ss.value() / (2.0 * terms as f64 * mf * mf);
        curve.taus.push(tau);
        curve.adev.push(var.max(0.0).sqrt());
        curve.counts.push(terms);
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(values: Vec<f64>) -> WavelengthSeries {
        WavelengthSeries::new(10.0, values).unwrap()
    }

    #[test]
    fn constant_series_has_no_spread() {
        let s = series(vec![1560.0; 50]);
        let sum = summarize(&s, DEFAULT_HISTOGRAM_BINS).unwrap();
        assert_eq!((sum.peak_to_peak_pm, sum.sd_pm), (0.0, 0.0));
        assert_eq!(sum.histogram.counts.iter().sum::<u64>(), 50);
        let a = allan_deviation(&s, &default_taus(&s)).unwrap();
        assert!(a.adev.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn two_point_summary() {
        let s = series(vec![1560.0 - 1e-3, 1560.0 + 1e-3]);
        let sum = summarize(&s, 2).unwrap();
        assert!((sum.peak_to_peak_pm - 2.0).abs() < 1e-6);
        assert!((sum.sd_pm - 1.0).abs() < 1e-6);
        assert_eq!(sum.histogram.counts, vec![1, 1]);
    }

    #[test]
    fn tau_grid_is_log_spaced_and_unique() {
        let m = log_tau_factors(5040, 10);
        assert_eq!(&m[..8], &[1, 2, 3, 4, 5, 6, 8, 10]);
        assert!(m.windows(2).all(|w| w[0] < w[1]));
        assert!(*m.last().unwrap() <= 1680);
        assert_eq!(m.last(), Some(&1585));
    }

    #[test]
    fn short_record_omits_long_taus() {
        let s = series((0..9).map(|i| 1560.0 + i as f64 * 1e-3).collect());
        let a = allan_deviation(&s, &[10.0, 30.0, 40.0]).unwrap();
        assert_eq!(a.taus, vec![10.0, 30.0]);
        assert_eq!(a.omitted, vec![40.0]);
        assert_eq!(a.counts, vec![8, 4]);
        assert!(allan_deviation(&s, &[15.0]).is_err());
    }

    #[test]
    fn linear_drift_response() {
        // y = a t in fractional units gives a tau / sqrt(2).
        let r = 1560.0;
        let a = 1e-9;
        let s = series((0..1000).map(|i| r + r * a * 10.0 * i as f64).collect()).with_reference(r);
        let c = allan_deviation(&s, &[10.0, 100.0, 1000.0]).unwrap();
        for (t, v) in c.taus.iter().zip(&c.adev) {
            let expect = a * t / std::f64::consts::SQRT_2;
            assert!(((v - expect) / expect).abs() < 1e-9, "{t}: {v} vs {expect}");
        }
    }
}
