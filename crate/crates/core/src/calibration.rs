//! Pre-calibration of the measurement chain.
//!
//! Two sweeps establish the constants the controller needs: a filter-center
//! sweep gives the group-delay dispersion `D` (centroid vs. wavelength), and a
//! temperature sweep gives the centroid tuning slope (centroid vs. TEC
//! temperature). Their ratio is the idler tuning coefficient in nm/degC.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dft::{expected_profile, fit_gaussian, sample_histogram, DftChain, FitOptions, GaussianFit, ValueWithError};
use crate::error::{ensure_finite, ensure_positive, Error, Result};
use crate::plant::WaveguideModel;
use crate::rng::{stream_rng, Stream};

/// FWHM of a Gaussian over its RMS width, `2 sqrt(2 ln 2)`.
pub const FWHM_PER_SIGMA: f64 = 2.354_820_045_030_949_3;

const MIN_SURVIVORS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFitResult {
    pub slope: ValueWithError,
    pub intercept: ValueWithError,
    /// RMS of the (unweighted) residuals.
    pub residual_rms: f64,
    pub n: usize,
}

impl LinearFitResult {
    pub fn predict(&self, x: f64) -> f64 {
        self.slope.value * x + self.intercept.value
    }
}

fn check_inputs(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::invalid("ys", format!("length {} != {}", ys.len(), xs.len())));
    }
    for (&x, &y) in xs.iter().zip(ys) {
        ensure_finite(x, "regression x")?;
        ensure_finite(y, "regression y")?;
    }
    if xs.len() < 2 || xs.iter().all(|&x| x == xs[0]) {
        return Err(Error::DegenerateRegression);
    }
    Ok(())
}

fn residual_rms(xs: &[f64], ys: &[f64], slope: f64, intercept: f64) -> f64 {
    let ss: f64 = xs.iter().zip(ys).map(|(&x, &y)| (y - slope * x - intercept).powi(2)).sum();
    (ss / xs.len() as f64).sqrt()
}

/// Ordinary least squares. Standard errors come from the residual variance
/// with `n - 2` degrees of freedom; with exactly two points they are infinite.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> Result<LinearFitResult> {
    check_inputs(xs, ys)?;
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - xm) * (x - xm);
        sxy += (x - xm) * (y - ym);
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;

    let ss: f64 = xs.iter().zip(ys).map(|(&x, &y)| (y - slope * x - intercept).powi(2)).sum();
    let (se_slope, se_intercept) = if xs.len() > 2 {
        let s2 = ss / (n - 2.0);
        ((s2 / sxx).sqrt(), (s2 * (1.0 / n + xm * xm / sxx)).sqrt())
    } else {
        (f64::INFINITY, f64::INFINITY)
    };
    Ok(LinearFitResult {
        slope: ValueWithError { value: slope, stderr: se_slope },
        intercept: ValueWithError { value: intercept, stderr: se_intercept },
        residual_rms: (ss / n).sqrt(),
        n: xs.len(),
    })
}

/// Weighted least squares with known absolute uncertainties `sigmas` on `ys`.
/// Standard errors follow from the weights alone and are not rescaled by the
/// residual scatter.
pub fn weighted_linear_fit(xs: &[f64], ys: &[f64], sigmas: &[f64]) -> Result<LinearFitResult> {
    check_inputs(xs, ys)?;
    if sigmas.len() != xs.len() {
        return Err(Error::invalid("sigmas", "length must match the data"));
    }
    for &s in sigmas {
        ensure_positive(s, "sigmas")?;
    }
    let w: Vec<f64> = sigmas.iter().map(|s| 1.0 / (s * s)).collect();
    let sw: f64 = w.iter().sum();
    let xm = xs.iter().zip(&w).map(|(x, w)| x * w).sum::<f64>() / sw;
    let ym = ys.iter().zip(&w).map(|(y, w)| y * w).sum::<f64>() / sw;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for ((&x, &y), &w) in xs.iter().zip(ys).zip(&w) {
        sxx += w * (x - xm) * (x - xm);
        sxy += w * (x - xm) * (y - ym);
    }
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    Ok(LinearFitResult {
        slope: ValueWithError { value: slope, stderr: (1.0 / sxx).sqrt() },
        intercept: ValueWithError { value: intercept, stderr: (1.0 / sw + xm * xm / sxx).sqrt() },
        residual_rms: residual_rms(xs, ys, slope, intercept),
        n: xs.len(),
    })
}

/// Simulated bench used by the calibration sweeps. The plant is held still:
/// no gradient drift, no TEC noise, pump on its nominal line.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationSim {
    pub waveguide: WaveguideModel,
    /// Chain carrying the true dispersion and the acquisition window.
    pub chain: DftChain,
    /// FWHM of the Gaussian bandpass used in the dispersion sweep, nm.
    pub filter_fwhm_nm: f64,
    pub fit: FitOptions,
    /// Fit the expected profile directly instead of a Poisson draw.
    pub noiseless: bool,
    pub seed: u64,
}

impl CalibrationSim {
    fn measure(&self, lambda_nm: f64, sigma_nm: f64, rate_scale: f64, index: u64) -> Option<GaussianFit> {
        let chain = DftChain { pair_rate_hz: self.chain.pair_rate_hz * rate_scale, ..self.chain.clone() };
        // A point whose peak does not fit the window is dropped like a failed fit.
        let expected = expected_profile(&chain, lambda_nm, sigma_nm).ok()?;
        let fit = if self.noiseless {
            fit_gaussian(&expected, &self.fit)
        } else {
            let mut rng = stream_rng(self.seed, Stream::Calibration, index);
            let hist = sample_histogram(&expected, &mut rng).ok()?;
            fit_gaussian(&hist, &self.fit)
        };
        fit.ok().filter(|f| f.tau0.stderr.is_finite() && f.tau0.stderr > 0.0)
    }

    fn filter_sigma_nm(&self) -> f64 {
        self.filter_fwhm_nm / FWHM_PER_SIGMA
    }

    /// Fraction of the source pairs passed by a filter centered at `center_nm`.
    fn filter_transmission(&self, center_nm: f64) -> f64 {
        let si = self.waveguide.sigma_i_nm;
        let sf = self.filter_sigma_nm();
        let s2 = si * si + sf * sf;
        let d = center_nm - self.waveguide.lambda_deg_nm;
        sf / s2.sqrt() * (-d * d / (2.0 * s2)).exp()
    }
}

/// One point of a calibration sweep. `tau0` is `None` when the point was
/// dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub x: f64,
    pub tau0: Option<ValueWithError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    pub fit: LinearFitResult,
}

impl SweepResult {
    pub fn dropped(&self) -> usize {
        self.points.iter().filter(|p| p.tau0.is_none()).count()
    }

    pub fn to_csv(&self) -> String {
        use crate::harness::io::fmt_sig;
        let mut out = String::from("x,tau0_ps,tau0_stderr_ps\n");
        for p in &self.points {
            match p.tau0 {
                Some(t) => out.push_str(&format!("{},{},{}\n", fmt_sig(p.x), fmt_sig(t.value), fmt_sig(t.stderr))),
                None => out.push_str(&format!("{},,\n", fmt_sig(p.x))),
            }
        }
        out
    }
}

fn regress(points: Vec<SweepPoint>) -> Result<SweepResult> {
    let kept: Vec<(f64, ValueWithError)> = points.iter().filter_map(|p| p.tau0.map(|t| (p.x, t))).collect();
    if kept.len() < MIN_SURVIVORS {
        return Err(Error::CalibrationFailed { survivors: kept.len() });
    }
    let xs: Vec<f64> = kept.iter().map(|k| k.0).collect();
    let ys: Vec<f64> = kept.iter().map(|k| k.1.value).collect();
    let ss: Vec<f64> = kept.iter().map(|k| k.1.stderr).collect();
    let fit = weighted_linear_fit(&xs, &ys, &ss)?;
    Ok(SweepResult { points, fit })
}

fn check_sweep(xs: &[f64], name: &'static str) -> Result<()> {
    if xs.len() < MIN_SURVIVORS {
        return Err(Error::invalid(name, format!("need at least {MIN_SURVIVORS} sweep points")));
    }
    xs.iter().try_for_each(|&x| ensure_finite(x, name))
}

/// Sweeps a narrowband filter across the idler spectrum and regresses the
/// fitted centroid against the filter center. The slope is `D` in ps/nm.
pub fn calibrate_gdd(sim: &CalibrationSim, centers_nm: &[f64]) -> Result<SweepResult> {
    check_sweep(centers_nm, "calibration.filter_centers_nm")?;
    ensure_positive(sim.filter_fwhm_nm, "calibration.filter_fwhm_nm")?;
    sim.chain.validate()?;
    let sigma = sim.filter_sigma_nm();
    let points = centers_nm
        .iter()
        .enumerate()
        .map(|(i, &c)| SweepPoint {
            x: c,
            tau0: sim.measure(c, sigma, sim.filter_transmission(c), i as u64).map(|f| f.tau0),
        })
        .collect();
    regress(points)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TempCalibration {
    pub sweep: SweepResult,
    /// Centroid tuning slope, ps/degC.
    pub slope_t: ValueWithError,
    /// Idler tuning coefficient, nm/degC.
    pub dlambda_dt: ValueWithError,
}

/// Sweeps the TEC temperature, regresses the centroid against it and converts
/// the slope to nm/degC with the dispersion `d` (ps/nm).
pub fn calibrate_temp_coefficient(sim: &CalibrationSim, temps_c: &[f64], d: ValueWithError) -> Result<TempCalibration> {
    check_sweep(temps_c, "calibration.temperatures_c")?;
    sim.chain.validate()?;
    let wg = &sim.waveguide;
    let points = temps_c
        .iter()
        .enumerate()
        .map(|(i, &t)| SweepPoint {
            x: t,
            tau0: sim.measure(wg.wavelength_at(t, 0.0), wg.sigma_i_nm, 1.0, 1_000 + i as u64).map(|f| f.tau0),
        })
        .collect();
    let sweep = regress(points)?;
    let slope_t = sweep.fit.slope;
    let dlambda_dt = divide(slope_t, d)?;
    Ok(TempCalibration { sweep, slope_t, dlambda_dt })
}

/// `a / b` with first-order propagation of independent uncertainties.
pub fn divide(a: ValueWithError, b: ValueWithError) -> Result<ValueWithError> {
    if b.value == 0.0 || !b.value.is_finite() {
        return Err(Error::invalid("D", "must be finite and non-zero"));
    }
    let q = a.value / b.value;
    let rel = (a.stderr / a.value).hypot(b.stderr / b.value);
    let stderr = if a.value == 0.0 { a.stderr / b.value.abs() } else { q.abs() * rel };
    Ok(ValueWithError { value: q, stderr })
}

/// Constants handed to the controller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationRecord {
    #[serde(rename = "D_ps_per_nm")]
    pub d_ps_per_nm: f64,
    #[serde(rename = "D_stderr")]
    pub d_stderr: f64,
    #[serde(rename = "slopeT_ps_per_C")]
    pub slope_t_ps_per_c: f64,
    #[serde(rename = "slopeT_stderr")]
    pub slope_t_stderr: f64,
    #[serde(rename = "dlambda_dT_nm_per_C")]
    pub dlambda_dt_nm_per_c: f64,
    #[serde(rename = "dlambda_dT_stderr")]
    pub dlambda_dt_stderr: f64,
}

impl CalibrationRecord {
    /// Builds the record from the two sweep slopes; the tuning coefficient is
    /// derived from them.
    pub fn from_slopes(d: ValueWithError, slope_t: ValueWithError) -> Result<Self> {
        let q = divide(slope_t, d)?;
        Ok(Self {
            d_ps_per_nm: d.value,
            d_stderr: d.stderr,
            slope_t_ps_per_c: slope_t.value,
            slope_t_stderr: slope_t.stderr,
            dlambda_dt_nm_per_c: q.value,
            dlambda_dt_stderr: q.stderr,
        })
    }

    pub fn d(&self) -> ValueWithError {
        ValueWithError { value: self.d_ps_per_nm, stderr: self.d_stderr }
    }

    pub fn slope_t(&self) -> ValueWithError {
        ValueWithError { value: self.slope_t_ps_per_c, stderr: self.slope_t_stderr }
    }

    pub fn dlambda_dt(&self) -> ValueWithError {
        ValueWithError { value: self.dlambda_dt_nm_per_c, stderr: self.dlambda_dt_stderr }
    }

    pub fn validate(&self) -> Result<()> {
        for (v, name) in [
            (self.d_ps_per_nm, "D_ps_per_nm"),
            (self.slope_t_ps_per_c, "slopeT_ps_per_C"),
            (self.dlambda_dt_nm_per_c, "dlambda_dT_nm_per_C"),
        ] {
            if !v.is_finite() || v == 0.0 {
                return Err(Error::invalid(name, "must be finite and non-zero"));
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        // Plain f64 fields always serialize.
        toml::to_string(self).unwrap_or_default()
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let rec: Self = toml::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))?;
        rec.validate()?;
        Ok(rec)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_toml())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(vec![format!("{}: {e}", path.display())]))?;
        Self::from_toml(&text)
    }
}

/// Runs both sweeps and assembles the record.
pub fn calibrate(
    sim: &CalibrationSim,
    centers_nm: &[f64],
    temps_c: &[f64],
) -> Result<(CalibrationRecord, SweepResult, TempCalibration)> {
    let gdd = calibrate_gdd(sim, centers_nm)?;
    let temp = calibrate_temp_coefficient(sim, temps_c, gdd.fit.slope)?;
    let record = CalibrationRecord::from_slopes(gdd.fit.slope, temp.slope_t)?;
    Ok((record, gdd, temp))
}

/// Evenly spaced points from `start` to `end` inclusive.
pub fn linspace(start: f64, end: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..n).map(|i| start + (end - start) * i as f64 / (n - 1) as f64).collect(),
    }
}
