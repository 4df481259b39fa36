//! Gaussian-plus-baseline fit of a coincidence histogram.
//!
//! The model integrates the Gaussian over each bin, so a noiseless expected
//! profile is reproduced exactly. Parameters are estimated by maximizing the
//! Poisson likelihood with Levenberg-Marquardt damped Fisher scoring; the
//! reported standard errors come from the Fisher information at the optimum.

// Negated comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

use std::fmt;

use super::{Binned, GaussGrid};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueWithError {
    pub value: f64,
    pub stderr: f64,
}

impl fmt::Display for ValueWithError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ± {}", self.value, self.stderr)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianFit {
    /// Centroid, ps.
    pub tau0: ValueWithError,
    /// RMS width, ps.
    pub delta: ValueWithError,
    /// Integrated signal counts under the Gaussian.
    pub amplitude: ValueWithError,
    /// Flat background, counts per bin.
    pub baseline: ValueWithError,
    pub converged: bool,
    pub iterations: usize,
    /// Pearson chi-square per degree of freedom.
    pub reduced_residual: f64,
}

impl GaussianFit {
    /// Fitted expected counts on the bins of `hist`.
    pub fn model<H: Binned + ?Sized>(&self, hist: &H) -> Vec<f64> {
        let grid = GaussGrid::new(hist.start_ps(), hist.bin_width_ps(), self.tau0.value, self.delta.value);
        let mut lo = grid.edge(0);
        (0..hist.len())
            .map(|j| {
                let hi = grid.edge(j + 1);
                let m = self.amplitude.value * grid.mass(&lo, &hi) + self.baseline.value;
                lo = hi;
                m
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub min_counts: f64,
    pub max_iterations: usize,
    /// Minimum amplitude / stderr(amplitude) for a fit to count as a peak.
    pub min_significance: f64,
    /// Convergence threshold on the parameter step, relative to the width
    /// (centroid, width), the area (area) or the mean count per bin (baseline).
    pub tolerance: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self { min_counts: 1000.0, max_iterations: 60, min_significance: 5.0, tolerance: 1e-7 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum FitFailure {
    #[error("only {total} counts (need {min})")]
    TooFewCounts { total: f64, min: f64 },
    #[error("no significant peak above background")]
    NoSignal,
    #[error("no convergence after {0} iterations")]
    DidNotConverge(usize),
    #[error("fitted width is degenerate")]
    DegenerateWidth,
    #[error("fitted centroid lies outside the histogram")]
    OutsideWindow,
}

const N_PARAMS: usize = 4;
const MU: usize = 0;
const SIGMA: usize = 1;
const AREA: usize = 2;
const BASE: usize = 3;
const WEIGHT_FLOOR: f64 = 1e-12;

type Mat = [[f64; N_PARAMS]; N_PARAMS];
type Vec4 = [f64; N_PARAMS];

struct Data<'a, H: Binned + ?Sized> {
    hist: &'a H,
    y: Vec<f64>,
}

impl<H: Binned + ?Sized> Data<'_, H> {
    fn n(&self) -> usize {
        self.y.len()
    }

    /// Fisher information, score, Pearson chi2 and Poisson deviance at `p`
    /// in a single sweep over the bins.
    fn evaluate(&self, p: &Vec4) -> Eval {
        let c = p[MU] - self.hist.start_ps();
        let s = p[SIGMA];
        let a = p[AREA];
        let a_s = a / s;
        let mut h = [[0.0; N_PARAMS]; N_PARAMS];
        let mut g = [0.0; N_PARAMS];
        let mut chi2 = 0.0;
        let mut dev = 0.0;

        let grid = GaussGrid::new(0.0, self.hist.bin_width_ps(), c, s);
        let mut lo = grid.edge(0);
        for j in 0..self.n() {
            let hi = grid.edge(j + 1);
            let m = grid.mass(&lo, &hi);
            let model = a * m + p[BASE];
            let y = self.y[j];
            let w = 1.0 / model.max(WEIGHT_FLOOR);
            if model > 0.0 {
                dev += model - y;
                if y > 0.0 {
                    dev += y * libm::log(y * w);
                }
            } else if y > 0.0 {
                dev = f64::INFINITY;
            }
            let jac = [a_s * (lo.phi - hi.phi), a_s * (lo.u * lo.phi - hi.u * hi.phi), m, 1.0];
            let r = y - model;
            chi2 += r * r * w;
            for k in 0..N_PARAMS {
                let wk = w * jac[k];
                g[k] += wk * r;
                for l in k..N_PARAMS {
                    h[k][l] += wk * jac[l];
                }
            }
            lo = hi;
        }
        for k in 0..N_PARAMS {
            for l in 0..k {
                h[k][l] = h[l][k];
            }
        }
        Eval { h, g, chi2, dev }
    }
}

struct Eval {
    h: Mat,
    g: Vec4,
    chi2: f64,
    /// Poisson deviance up to a constant factor.
    dev: f64,
}

/// Solves `m x = b` by Jacobi-scaled Gaussian elimination with partial pivoting.
fn solve(m: &Mat, b: &Vec4) -> Option<Vec4> {
    let mut scale = [0.0; N_PARAMS];
    for i in 0..N_PARAMS {
        if !(m[i][i] > 0.0) || !m[i][i].is_finite() {
            return None;
        }
        scale[i] = 1.0 / m[i][i].sqrt();
    }
    let mut a = [[0.0; N_PARAMS + 1]; N_PARAMS];
    for i in 0..N_PARAMS {
        for j in 0..N_PARAMS {
            a[i][j] = m[i][j] * scale[i] * scale[j];
        }
        a[i][N_PARAMS] = b[i] * scale[i];
    }
    for col in 0..N_PARAMS {
        let pivot = (col..N_PARAMS).max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs())).unwrap_or(col);
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        for row in col + 1..N_PARAMS {
            let factor = a[row][col] / a[col][col];
            for k in col..=N_PARAMS {
                a[row][k] -= factor * a[col][k];
            }
        }
    }
    let mut x = [0.0; N_PARAMS];
    for i in (0..N_PARAMS).rev() {
        let mut acc = a[i][N_PARAMS];
        for k in i + 1..N_PARAMS {
            acc -= a[i][k] * x[k];
        }
        x[i] = acc / a[i][i];
    }
    for i in 0..N_PARAMS {
        x[i] *= scale[i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

fn covariance_diagonal(h: &Mat) -> Option<Vec4> {
    let mut diag = [0.0; N_PARAMS];
    for (i, d) in diag.iter_mut().enumerate() {
        let mut e = [0.0; N_PARAMS];
        e[i] = 1.0;
        *d = solve(h, &e)?[i];
    }
    Some(diag)
}

/// Moment-based starting point: background from the outer tenth of the
/// window on each side, centroid and RMS from the background-subtracted
/// excess.
fn initial_guess<H: Binned + ?Sized>(data: &Data<'_, H>) -> Option<Vec4> {
    let n = data.n();
    let k = (n / 10).max(1);
    let edges: f64 = data.y[..k].iter().chain(&data.y[n - k..]).sum();
    let base = edges / (2 * k) as f64;

    let (mut w, mut m1) = (0.0, 0.0);
    for (i, &y) in data.y.iter().enumerate() {
        let s = (y - base).max(0.0);
        w += s;
        m1 += s * data.hist.bin_center(i);
    }
    if w <= 0.0 {
        return None;
    }
    let mu = m1 / w;
    let m2: f64 =
        data.y.iter().enumerate().map(|(i, &y)| (y - base).max(0.0) * (data.hist.bin_center(i) - mu).powi(2)).sum();
    let sigma = (m2 / w).sqrt().max(data.hist.bin_width_ps());
    let area = data.y.iter().map(|&y| y - base).sum::<f64>().max(w * 0.5);
    Some([mu, sigma, area, base.max(0.0)])
}

/// Largest parameter change between `p` and `q`, relative to the width
/// (centroid, width), the area (area) or the mean count per bin (baseline).
fn scaled_norm(p: &Vec4, q: &Vec4, bins: usize) -> f64 {
    [
        (q[MU] - p[MU]) / q[SIGMA],
        (q[SIGMA] - p[SIGMA]) / q[SIGMA],
        (q[AREA] - p[AREA]) / q[AREA],
        (q[BASE] - p[BASE]) / (q[BASE] + q[AREA] / bins as f64),
    ]
    .iter()
    .fold(0.0, |m: f64, s| m.max(s.abs()))
}

/// Fits a bin-integrated Gaussian plus constant baseline to `hist`.
pub fn fit_gaussian<H: Binned + ?Sized>(hist: &H, opts: &FitOptions) -> Result<GaussianFit, FitFailure> {
    fit_gaussian_from(hist, opts, None)
}

/// As [`fit_gaussian`], starting the iteration from `start` (typically the
/// previous fit of a slowly drifting peak) instead of the moment estimate.
pub fn fit_gaussian_from<H: Binned + ?Sized>(
    hist: &H,
    opts: &FitOptions,
    start: Option<&GaussianFit>,
) -> Result<GaussianFit, FitFailure> {
    let data = Data { hist, y: (0..hist.len()).map(|i| hist.value(i)).collect() };
    let total: f64 = data.y.iter().sum();
    if data.n() < 8 || !(total >= opts.min_counts) {
        return Err(FitFailure::TooFewCounts { total, min: opts.min_counts });
    }

    let mut p = match start {
        Some(f) => [f.tau0.value, f.delta.value, f.amplitude.value, f.baseline.value],
        None => initial_guess(&data).ok_or(FitFailure::NoSignal)?,
    };
    let mut cur = data.evaluate(&p);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < opts.max_iterations {
        iterations += 1;
        let mut accepted = None;
        while lambda < 1e12 {
            let mut damped = cur.h;
            for (i, row) in damped.iter_mut().enumerate() {
                row[i] += lambda * cur.h[i][i];
            }
            let Some(step) = solve(&damped, &cur.g) else {
                lambda *= 10.0;
                continue;
            };
            let mut q = p;
            for i in 0..N_PARAMS {
                q[i] += step[i];
            }
            q[BASE] = q[BASE].max(0.0);
            if !(q[SIGMA] > 0.0 && q[AREA] > 0.0) || q.iter().any(|v| !v.is_finite()) {
                lambda *= 10.0;
                continue;
            }
            if lambda < 1.0 && scaled_norm(&p, &q, data.n()) < opts.tolerance {
                // The proposed correction is below tolerance: already at the optimum.
                converged = true;
                break;
            }
            let e = data.evaluate(&q);
            if e.dev <= cur.dev {
                accepted = Some((q, e));
                lambda = (lambda * 0.1).max(1e-12);
                break;
            }
            lambda *= 10.0;
        }

        if converged {
            break;
        }
        let Some((q, e)) = accepted else {
            // No downhill step at any damping: at the optimum to rounding.
            converged = true;
            break;
        };
        let small = scaled_norm(&p, &q, data.n()) < opts.tolerance;
        p = q;
        cur = e;
        if small {
            converged = true;
            break;
        }
    }

    if !converged {
        return Err(FitFailure::DidNotConverge(iterations));
    }

    let var = covariance_diagonal(&cur.h).ok_or(FitFailure::DegenerateWidth)?;
    let se = |i: usize| var[i].max(0.0).sqrt();
    let chi2 = cur.chi2;

    let span = hist.len() as f64 * hist.bin_width_ps();
    let start = hist.start_ps();
    if !(p[SIGMA] > 0.0 && p[SIGMA] < 0.5 * span) {
        return Err(FitFailure::DegenerateWidth);
    }
    if !(p[MU] >= start && p[MU] <= start + span) {
        return Err(FitFailure::OutsideWindow);
    }
    if !(p[AREA] >= opts.min_significance * se(AREA)) {
        return Err(FitFailure::NoSignal);
    }

    Ok(GaussianFit {
        tau0: ValueWithError { value: p[MU], stderr: se(MU) },
        delta: ValueWithError { value: p[SIGMA], stderr: se(SIGMA) },
        amplitude: ValueWithError { value: p[AREA], stderr: se(AREA) },
        baseline: ValueWithError { value: p[BASE], stderr: se(BASE) },
        converged,
        iterations,
        reduced_residual: chi2 / (data.n() - N_PARAMS) as f64,
    })
}
