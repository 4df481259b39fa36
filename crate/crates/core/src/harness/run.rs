//! Timed measurement and control loop.

use crate::calibration::{calibrate, CalibrationRecord, SweepResult, TempCalibration};
use crate::controller::PidState;
use crate::dft::{expected_profile, fit_gaussian_from, sample_histogram, DftChain, FitOptions, GaussianFit};
use crate::error::{Error, Result};
use crate::plant::{idler_center_wavelength, step_plant, ThermalPlantParams, ThermalPlantState};
use crate::rng::{stream_rng, SimRng, Stream};
use crate::stability::{allan_deviation, log_tau_factors, summarize, AdevCurve, DriftSummary, WavelengthSeries};

use super::config::{ExperimentConfig, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LoopMode {
    OpenLoop,
    ClosedLoop,
    PumpFloor,
}

/// One row of the controller log.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleRecord {
    pub cycle: u64,
    pub time_s: f64,
    /// Fitted centroid; `None` when the fit failed.
    pub tau0_ps: Option<f64>,
    /// Shift against the reference centroid.
    pub dtau_ps: Option<f64>,
    pub gated: bool,
    pub delta_t_c: Option<f64>,
    pub epsilon_c: f64,
    pub correction_accum_c: f64,
    /// Setpoint commanded for the next cycle.
    pub setpoint_c: f64,
    /// Idler wavelength reported by the measurement, nm.
    pub measured_nm: f64,
    /// Mean true idler wavelength during the acquisition, nm.
    pub true_nm: f64,
}

/// Plant, pump, measurement chain and controller stepped one control period
/// at a time.
pub struct LoopRunner {
    cfg: ExperimentConfig,
    mode: LoopMode,
    calibration: CalibrationRecord,
    plant_params: ThermalPlantParams,
    fit: FitOptions,
    plant: ThermalPlantState,
    pump_offset_nm: f64,
    drift_rng: SimRng,
    tec_rng: SimRng,
    pump_rng: SimRng,
    chain: DftChain,
    setpoint: f64,
    controller: Option<PidState>,
    /// First converged centroid; origin of the measured series.
    tau_ref: Option<f64>,
    last_fit: Option<GaussianFit>,
    last_measured_nm: f64,
    cycle: u64,
    failed_fits: usize,
    gated_cycles: usize,
}

impl LoopRunner {
    /// Builds the loop and lets the plant evolve for the settle time.
    pub fn new(cfg: &ExperimentConfig, mode: LoopMode, calibration: CalibrationRecord) -> Result<Self> {
        cfg.validate()?;
        calibration.validate()?;
        let plant_params = match mode {
            LoopMode::PumpFloor => cfg.plant.frozen(),
            _ => cfg.plant.clone(),
        };
        let t0 = cfg.waveguide.t0_c;
        let mut runner = Self {
            mode,
            calibration,
            fit: cfg.dft.fit_options(),
            plant: ThermalPlantState::warm_start(t0, &plant_params),
            plant_params,
            pump_offset_nm: 0.0,
            drift_rng: stream_rng(cfg.seed, Stream::GradientDrift, 0),
            tec_rng: stream_rng(cfg.seed, Stream::TecNoise, 0),
            pump_rng: stream_rng(cfg.seed, Stream::Pump, 0),
            chain: cfg.dft_chain(),
            setpoint: t0,
            controller: None,
            tau_ref: None,
            last_fit: None,
            last_measured_nm: cfg.waveguide.lambda_deg_nm,
            cycle: 0,
            failed_fits: 0,
            gated_cycles: 0,
            cfg: cfg.clone(),
        };
        let settle = (cfg.settle_time_s / cfg.plant_substep_s).round() as usize;
        for _ in 0..settle {
            runner.substep()?;
        }
        Ok(runner)
    }

    fn substep(&mut self) -> Result<f64> {
        let dt = self.cfg.plant_substep_s;
        self.plant =
            step_plant(&self.plant, &self.plant_params, dt, self.setpoint, &mut self.drift_rng, &mut self.tec_rng)?;
        self.pump_offset_nm = self.cfg.pump.step(self.pump_offset_nm, dt, &mut self.pump_rng)?;
        idler_center_wavelength(&self.cfg.waveguide, &self.plant, &self.cfg.pump, self.pump_offset_nm)
    }

    pub fn plant(&self) -> &ThermalPlantState {
        &self.plant
    }

    /// Mutable plant access, e.g. to inject a disturbance between cycles.
    pub fn plant_mut(&mut self) -> &mut ThermalPlantState {
        &mut self.plant
    }

    pub fn controller(&self) -> Option<&PidState> {
        self.controller.as_ref()
    }

    pub fn setpoint(&self) -> f64 {
        self.setpoint
    }

    pub fn failed_fits(&self) -> usize {
        self.failed_fits
    }

    pub fn gated_cycles(&self) -> usize {
        self.gated_cycles
    }

    fn measure(&mut self, lambda_nm: f64) -> Option<GaussianFit> {
        let expected = expected_profile(&self.chain, lambda_nm, self.cfg.waveguide.sigma_i_nm).ok()?;
        let fit = if self.cfg.dft.poisson_noise {
            let mut rng = stream_rng(self.cfg.seed, Stream::Measurement, self.cycle);
            let hist = sample_histogram(&expected, &mut rng).ok()?;
            fit_gaussian_from(&hist, &self.fit, self.last_fit.as_ref())
        } else {
            fit_gaussian_from(&expected, &self.fit, self.last_fit.as_ref())
        };
        // A failed warm start is retried from the moment estimate.
        let fit = match (fit, self.last_fit.is_some()) {
            (Err(_), true) => {
                self.last_fit = None;
                return self.measure(lambda_nm);
            }
            (f, _) => f.ok(),
        };
        self.last_fit = fit.clone();
        fit
    }

    /// Runs one control period: plant evolution, acquisition, fit and (in
    /// closed loop) a controller update.
    pub fn step_cycle(&mut self) -> Result<CycleRecord> {
        let cfg = &self.cfg;
        let per_cycle = (cfg.control_period_s / cfg.plant_substep_s).round() as usize;
        let acquire = (cfg.dft.integration_time_s / cfg.plant_substep_s).round() as usize;
        let mut acc = 0.0;
        for i in 0..per_cycle {
            let lambda = self.substep()?;
            if i >= per_cycle - acquire {
                acc += lambda;
            }
        }
        let true_nm = acc / acquire as f64;
        let time_s = self.cycle as f64 * self.cfg.control_period_s;

        let fit = self.measure(true_nm);
        let t0 = self.cfg.waveguide.t0_c;
        let mut rec = CycleRecord {
            cycle: self.cycle,
            time_s,
            tau0_ps: None,
            dtau_ps: None,
            gated: false,
            delta_t_c: None,
            epsilon_c: 0.0,
            correction_accum_c: self.controller.map_or(0.0, |c| c.correction_accum),
            setpoint_c: self.setpoint,
            measured_nm: self.last_measured_nm,
            true_nm,
        };

        match fit {
            None => self.failed_fits += 1,
            Some(f) => {
                let tau0 = f.tau0.value;
                if self.cfg.dft.track_window {
                    self.chain = self.chain.recentered(tau0);
                }
                let tau_ref = *self.tau_ref.get_or_insert(tau0);
                let measured = self.cfg.waveguide.lambda_deg_nm + (tau0 - tau_ref) / self.calibration.d_ps_per_nm;
                self.last_measured_nm = measured;
                rec.measured_nm = measured;
                rec.tau0_ps = Some(tau0);
                rec.dtau_ps = Some(tau0 - tau_ref);

                if self.mode == LoopMode::ClosedLoop {
                    match self.controller.as_mut() {
                        None => {
                            self.controller = Some(PidState::from_config(tau0, &self.cfg.pid)?);
                            rec.gated = true;
                            rec.dtau_ps = Some(0.0);
                        }
                        Some(pid) => {
                            let dtau = pid.dtau(tau0);
                            let step =
                                pid.update(dtau, self.calibration.d_ps_per_nm, self.calibration.dlambda_dt_nm_per_c)?;
                            rec.dtau_ps = Some(dtau);
                            rec.gated = step.gated;
                            rec.delta_t_c = step.delta_t;
                            rec.epsilon_c = step.epsilon;
                            if step.gated {
                                self.gated_cycles += 1;
                            }
                            self.setpoint = pid.commanded_setpoint(t0);
                        }
                    }
                    rec.correction_accum_c = self.controller.map_or(0.0, |c| c.correction_accum);
                    rec.setpoint_c = self.setpoint;
                }
            }
        }
        self.cycle += 1;
        Ok(rec)
    }
}

/// Calibration record together with the sweeps that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationRun {
    pub record: CalibrationRecord,
    pub gdd: SweepResult,
    pub temperature: TempCalibration,
}

pub fn run_calibrations(cfg: &ExperimentConfig) -> Result<CalibrationRun> {
    cfg.validate()?;
    let c = &cfg.calibration;
    let (record, gdd, temperature) = calibrate(&cfg.calibration_sim(), &c.filter_centers_nm, &c.temperatures_c)?;
    Ok(CalibrationRun { record, gdd, temperature })
}

/// Calibration from the configured file, or a fresh in-run calibration.
pub fn obtain_calibration(cfg: &ExperimentConfig) -> Result<CalibrationRecord> {
    match &cfg.calibration_file {
        Some(path) => CalibrationRecord::load(std::path::Path::new(path)),
        None => Ok(run_calibrations(cfg)?.record),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub scenario: Scenario,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub calibration: CalibrationRecord,
    pub log: Vec<CycleRecord>,
    pub series: WavelengthSeries,
    pub summary: DriftSummary,
    pub adev: AdevCurve,
    pub failed_fits: usize,
    pub gated_cycles: usize,
}

/// Runs the loop for the configured duration with a given calibration.
pub fn run_loop(cfg: &ExperimentConfig, mode: LoopMode, calibration: CalibrationRecord) -> Result<RunReport> {
    let mut runner = LoopRunner::new(cfg, mode, calibration)?;
    let cycles = cfg.cycles();
    let mut log = Vec::with_capacity(cycles);
    for _ in 0..cycles {
        log.push(runner.step_cycle()?);
    }
    if 2 * runner.failed_fits() > cycles {
        return Err(Error::PersistentFitFailure { failed: runner.failed_fits(), cycles });
    }
    let series = WavelengthSeries::new(cfg.control_period_s, log.iter().map(|r| r.measured_nm).collect())?;
    let summary = summarize(&series, cfg.analysis.histogram_bins)?;
    let taus: Vec<f64> = log_tau_factors(series.values.len(), cfg.analysis.adev_points_per_decade)
        .into_iter()
        .map(|m| m as f64 * cfg.control_period_s)
        .collect();
    let adev = allan_deviation(&series, &taus)?;
    let scenario = match mode {
        LoopMode::OpenLoop => Scenario::OpenLoop,
        LoopMode::ClosedLoop => Scenario::ClosedLoop,
        LoopMode::PumpFloor => Scenario::PumpFloor,
    };
    Ok(RunReport {
        scenario,
        seed: cfg.seed,
        config: ExperimentConfig { scenario, ..cfg.clone() },
        calibration,
        log,
        series,
        summary,
        adev,
        failed_fits: runner.failed_fits(),
        gated_cycles: runner.gated_cycles(),
    })
}

pub fn run_open_loop(cfg: &ExperimentConfig) -> Result<RunReport> {
    run_loop(cfg, LoopMode::OpenLoop, obtain_calibration(cfg)?)
}

pub fn run_closed_loop(cfg: &ExperimentConfig) -> Result<RunReport> {
    run_loop(cfg, LoopMode::ClosedLoop, obtain_calibration(cfg)?)
}

pub fn run_pump_floor(cfg: &ExperimentConfig) -> Result<RunReport> {
    run_loop(cfg, LoopMode::PumpFloor, obtain_calibration(cfg)?)
}
