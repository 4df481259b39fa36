//! Browser bindings for three interactive views of the simulator: a single
//! coincidence histogram with its fit, open- vs. closed-loop drift with ADEV,
//! and the controller's response to a gradient step.
//!
//! The plain functions are usable natively; the `#[wasm_bindgen]` wrappers
//! only convert errors.

use wasm_bindgen::prelude::*;
use wavelock::calibration::CalibrationRecord;
use wavelock::dft::{expected_profile, fit_gaussian, sample_histogram, FitOptions, ValueWithError};
use wavelock::harness::{run_loop, ExperimentConfig, LoopMode, LoopRunner, RunReport};
use wavelock::rng::{stream_rng, Stream};
use wavelock::Result;

/// Calibration matching the default simulator, so the demos skip the sweeps.
fn nominal_calibration(cfg: &ExperimentConfig) -> Result<CalibrationRecord> {
    let d = cfg.dft.gdd_ps_per_nm;
    CalibrationRecord::from_slopes(
        ValueWithError { value: d, stderr: 0.0 },
        ValueWithError { value: d * cfg.waveguide.dlambda_dt_nm_per_c, stderr: 0.0 },
    )
}

fn js(e: wavelock::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct HistogramView {
    start_ps: f64,
    bin_width_ps: f64,
    counts: Vec<f64>,
    model: Vec<f64>,
    true_tau0_ps: f64,
    tau0_ps: f64,
    tau0_stderr_ps: f64,
    width_ps: f64,
}

#[wasm_bindgen]
impl HistogramView {
    #[wasm_bindgen(getter)]
    pub fn start_ps(&self) -> f64 {
        self.start_ps
    }
    #[wasm_bindgen(getter)]
    pub fn bin_width_ps(&self) -> f64 {
        self.bin_width_ps
    }
    /// Counts per display bin.
    pub fn counts(&self) -> Vec<f64> {
        self.counts.clone()
    }
    /// Fitted model on the same display bins.
    pub fn model(&self) -> Vec<f64> {
        self.model.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn true_tau0_ps(&self) -> f64 {
        self.true_tau0_ps
    }
    #[wasm_bindgen(getter)]
    pub fn tau0_ps(&self) -> f64 {
        self.tau0_ps
    }
    #[wasm_bindgen(getter)]
    pub fn tau0_stderr_ps(&self) -> f64 {
        self.tau0_stderr_ps
    }
    #[wasm_bindgen(getter)]
    pub fn width_ps(&self) -> f64 {
        self.width_ps
    }
}

/// Simulates one acquisition at `lambda_nm` and fits it. Bins are merged by
/// `rebin` for display only; the fit sees the raw histogram.
pub fn histogram(
    lambda_nm: f64,
    pair_rate_hz: f64,
    integration_s: f64,
    seed: u64,
    rebin: usize,
) -> Result<HistogramView> {
    let cfg = ExperimentConfig::default();
    let mut chain = cfg.dft.chain_centered(cfg.waveguide.lambda_deg_nm, cfg.dft.window_half_width_ps, integration_s);
    chain.pair_rate_hz = pair_rate_hz;
    let expected = expected_profile(&chain, lambda_nm, cfg.waveguide.sigma_i_nm)?;
    let hist = sample_histogram(&expected, &mut stream_rng(seed, Stream::Measurement, 0))?;
    let fit = fit_gaussian(&hist, &FitOptions { min_counts: 10.0, ..cfg.dft.fit_options() })?;
    let model = fit.model(&hist);
    let rebin = rebin.max(1);
    let merge = |v: &[f64]| v.chunks(rebin).map(|c| c.iter().sum()).collect::<Vec<f64>>();
    Ok(HistogramView {
        start_ps: chain.window.0,
        bin_width_ps: chain.bin_width_ps * rebin as f64,
        counts: merge(&hist.counts.iter().map(|&c| c as f64).collect::<Vec<_>>()),
        model: merge(&model),
        true_tau0_ps: chain.centroid_ps(lambda_nm),
        tau0_ps: fit.tau0.value,
        tau0_stderr_ps: fit.tau0.stderr,
        width_ps: fit.delta.value,
    })
}

#[wasm_bindgen(js_name = histogram)]
pub fn histogram_js(
    lambda_nm: f64,
    pair_rate_hz: f64,
    integration_s: f64,
    seed: u32,
    rebin: u32,
) -> Result<HistogramView, JsError> {
    histogram(lambda_nm, pair_rate_hz, integration_s, seed.into(), rebin as usize).map_err(js)
}

#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct DriftView {
    times_h: Vec<f64>,
    open_pm: Vec<f64>,
    closed_pm: Vec<f64>,
    taus_s: Vec<f64>,
    open_adev: Vec<f64>,
    closed_adev: Vec<f64>,
    open_sd_pm: f64,
    closed_sd_pm: f64,
    open_p2p_pm: f64,
    closed_p2p_pm: f64,
}

#[wasm_bindgen]
impl DriftView {
    pub fn times_h(&self) -> Vec<f64> {
        self.times_h.clone()
    }
    /// Measured deviation from the degenerate wavelength, pm.
    pub fn open_pm(&self) -> Vec<f64> {
        self.open_pm.clone()
    }
    pub fn closed_pm(&self) -> Vec<f64> {
        self.closed_pm.clone()
    }
    pub fn taus_s(&self) -> Vec<f64> {
        self.taus_s.clone()
    }
    pub fn open_adev(&self) -> Vec<f64> {
        self.open_adev.clone()
    }
    pub fn closed_adev(&self) -> Vec<f64> {
        self.closed_adev.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn open_sd_pm(&self) -> f64 {
        self.open_sd_pm
    }
    #[wasm_bindgen(getter)]
    pub fn closed_sd_pm(&self) -> f64 {
        self.closed_sd_pm
    }
    #[wasm_bindgen(getter)]
    pub fn open_p2p_pm(&self) -> f64 {
        self.open_p2p_pm
    }
    #[wasm_bindgen(getter)]
    pub fn closed_p2p_pm(&self) -> f64 {
        self.closed_p2p_pm
    }
}

/// Paired open- and closed-loop runs of `hours` with shared disturbances.
pub fn drift(hours: f64, seed: u64, kp: f64, ki: f64, kd: f64, tau_th_ps: f64) -> Result<DriftView> {
    let mut cfg = ExperimentConfig { seed, duration_s: (hours * 360.0).round() * 10.0, ..Default::default() };
    cfg.pid.kp = kp;
    cfg.pid.ki = ki;
    cfg.pid.kd = kd;
    cfg.pid.tau_th_ps = tau_th_ps;
    let cal = nominal_calibration(&cfg)?;
    let open = run_loop(&cfg, LoopMode::OpenLoop, cal)?;
    let closed = run_loop(&cfg, LoopMode::ClosedLoop, cal)?;
    let lambda0 = cfg.waveguide.lambda_deg_nm;
    let pm = |r: &RunReport| r.series.values.iter().map(|v| (v - lambda0) * 1e3).collect();
    Ok(DriftView {
        times_h: open.log.iter().map(|c| c.time_s / 3600.0).collect(),
        open_pm: pm(&open),
        closed_pm: pm(&closed),
        taus_s: open.adev.taus.clone(),
        open_adev: open.adev.adev.clone(),
        closed_adev: closed.adev.adev.clone(),
        open_sd_pm: open.summary.sd_pm,
        closed_sd_pm: closed.summary.sd_pm,
        open_p2p_pm: open.summary.peak_to_peak_pm,
        closed_p2p_pm: closed.summary.peak_to_peak_pm,
    })
}

#[wasm_bindgen(js_name = drift)]
pub fn drift_js(hours: f64, seed: u32, kp: f64, ki: f64, kd: f64, tau_th_ps: f64) -> Result<DriftView, JsError> {
    drift(hours, seed.into(), kp, ki, kd, tau_th_ps).map_err(js)
}

#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct StepView {
    residual_c: Vec<f64>,
    setpoint_c: Vec<f64>,
    gated: Vec<u8>,
    deadband_c: f64,
}

#[wasm_bindgen]
impl StepView {
    /// Offset of the SPDC temperature from nominal after each cycle, degC.
    pub fn residual_c(&self) -> Vec<f64> {
        self.residual_c.clone()
    }
    pub fn setpoint_c(&self) -> Vec<f64> {
        self.setpoint_c.clone()
    }
    /// 1 where the cycle fell inside the deadband.
    pub fn gated(&self) -> Vec<u8> {
        self.gated.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn deadband_c(&self) -> f64 {
        self.deadband_c
    }
}

/// Closed-loop response of a noise-free plant to a persistent gradient step
/// of `step_c` applied after the first cycle.
pub fn step_response(step_c: f64, kp: f64, ki: f64, kd: f64, tau_th_ps: f64, cycles: usize) -> Result<StepView> {
    let mut cfg = ExperimentConfig { settle_time_s: 0.0, ..Default::default() };
    cfg.plant = cfg.plant.frozen();
    cfg.plant.relax_tau_s = 1e12;
    cfg.pump.walk_sigma_nm_per_sqrt_s = 0.0;
    cfg.dft.poisson_noise = false;
    cfg.pid.kp = kp;
    cfg.pid.ki = ki;
    cfg.pid.kd = kd;
    cfg.pid.tau_th_ps = tau_th_ps;
    let cal = nominal_calibration(&cfg)?;
    let t0 = cfg.waveguide.t0_c;
    let mut runner = LoopRunner::new(&cfg, LoopMode::ClosedLoop, cal)?;
    runner.step_cycle()?;
    *runner.plant_mut() = runner.plant().with_offset_step(step_c);
    let mut view = StepView {
        residual_c: vec![step_c],
        setpoint_c: vec![runner.setpoint()],
        gated: vec![1],
        deadband_c: tau_th_ps / (cal.d_ps_per_nm * cal.dlambda_dt_nm_per_c),
    };
    for _ in 0..cycles {
        let rec = runner.step_cycle()?;
        view.residual_c.push(runner.plant().t_spdc() - t0);
        view.setpoint_c.push(rec.setpoint_c);
        view.gated.push(u8::from(rec.gated));
    }
    Ok(view)
}

#[wasm_bindgen(js_name = stepResponse)]
pub fn step_response_js(
    step_c: f64,
    kp: f64,
    ki: f64,
    kd: f64,
    tau_th_ps: f64,
    cycles: u32,
) -> Result<StepView, JsError> {
    step_response(step_c, kp, ki, kd, tau_th_ps, cycles as usize).map_err(js)
}
