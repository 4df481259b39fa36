//! Experiment configuration (TOML).

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::calibration::{linspace, CalibrationSim};
use crate::controller::PidConfig;
use crate::dft::{DftChain, FitOptions};
use crate::error::{Error, Result};
use crate::plant::{PumpModel, ThermalPlantParams, WaveguideModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    Calibration,
    OpenLoop,
    ClosedLoop,
    PumpFloor,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::Calibration => "calibration",
            Scenario::OpenLoop => "open-loop",
            Scenario::ClosedLoop => "closed-loop",
            Scenario::PumpFloor => "pump-floor",
        }
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DftConfig {
    /// True group-delay dispersion of the simulated element, ps/nm.
    pub gdd_ps_per_nm: f64,
    pub latency_ps: f64,
    pub bin_width_ps: f64,
    /// Half-width of the histogram window, ps.
    pub window_half_width_ps: f64,
    /// Re-center the window on the previous fitted centroid each cycle.
    pub track_window: bool,
    pub pair_rate_hz: f64,
    /// Accidental coincidences per bin per second.
    pub accidental_rate_hz: f64,
    pub integration_time_s: f64,
    /// Draw Poisson counts; when false the expected profile is fitted as is.
    pub poisson_noise: bool,
    pub min_counts: f64,
    pub max_iterations: usize,
}

impl Default for DftConfig {
    fn default() -> Self {
        Self {
            gdd_ps_per_nm: 335.17,
            latency_ps: 25_000.0,
            bin_width_ps: 1.0,
            window_half_width_ps: 2000.0,
            track_window: true,
            pair_rate_hz: 2000.0,
            accidental_rate_hz: 0.01,
            integration_time_s: 10.0,
            poisson_noise: true,
            min_counts: 1000.0,
            max_iterations: 60,
        }
    }
}

impl DftConfig {
    /// Chain centered on the centroid of `lambda_nm`.
    pub fn chain_centered(&self, lambda_nm: f64, half_width_ps: f64, integration_time_s: f64) -> DftChain {
        let c = self.gdd_ps_per_nm * lambda_nm + self.latency_ps;
        let start = ((c - half_width_ps) / self.bin_width_ps).round() * self.bin_width_ps;
        DftChain {
            gdd_ps_per_nm: self.gdd_ps_per_nm,
            latency_ps: self.latency_ps,
            bin_width_ps: self.bin_width_ps,
            window: (start, start + 2.0 * half_width_ps),
            pair_rate_hz: self.pair_rate_hz,
            accidental_rate_hz: self.accidental_rate_hz,
            integration_time_s,
        }
    }

    pub fn fit_options(&self) -> FitOptions {
        FitOptions { min_counts: self.min_counts, max_iterations: self.max_iterations, ..FitOptions::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CalibrationConfig {
    pub filter_fwhm_nm: f64,
    pub filter_centers_nm: Vec<f64>,
    pub temperatures_c: Vec<f64>,
    /// Half-width of the acquisition window during the sweeps, ps.
    pub window_half_width_ps: f64,
    pub integration_time_s: f64,
    pub poisson_noise: bool,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            filter_fwhm_nm: 0.8,
            filter_centers_nm: linspace(1559.79, 1563.05, 5),
            temperatures_c: linspace(21.5, 41.5, 11),
            window_half_width_ps: 4000.0,
            integration_time_s: 10.0,
            poisson_noise: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    pub histogram_bins: usize,
    pub adev_points_per_decade: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        Self { histogram_bins: 25, adev_points_per_decade: 10 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub seed: u64,
    /// Length of the recorded run, s.
    pub duration_s: f64,
    pub control_period_s: f64,
    /// Free evolution of the plant before recording starts, s.
    pub settle_time_s: f64,
    /// Integration step of the plant and pump models, s.
    pub plant_substep_s: f64,
    pub output_dir: String,
    /// Calibration record to use instead of calibrating in-run.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration_file: Option<String>,
    pub waveguide: WaveguideModel,
    pub plant: ThermalPlantParams,
    pub pump: PumpModel,
    pub dft: DftConfig,
    pub pid: PidConfig,
    pub calibration: CalibrationConfig,
    pub analysis: AnalysisConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: Scenario::ClosedLoop,
            seed: 1,
            duration_s: 50_400.0,
            control_period_s: 10.0,
            settle_time_s: 4800.0,
            plant_substep_s: 1.0,
            output_dir: "runs".into(),
            calibration_file: None,
            waveguide: WaveguideModel::default(),
            plant: ThermalPlantParams::default(),
            pump: PumpModel::default(),
            dft: DftConfig::default(),
            pid: PidConfig::default(),
            calibration: CalibrationConfig::default(),
            analysis: AnalysisConfig::default(),
        }
    }
}

fn is_multiple(x: f64, step: f64) -> bool {
    let r = x / step;
    (r - r.round()).abs() < 1e-9 * r.abs().max(1.0)
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(vec![format!("{}: {e}", path.display())]))?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(v) => Error::Config(v.into_iter().map(|m| format!("{}: {m}", path.display())).collect()),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).unwrap_or_default()
    }

    /// Number of recorded control cycles.
    pub fn cycles(&self) -> usize {
        (self.duration_s / self.control_period_s).round() as usize
    }

    /// Checks every block and reports all problems at once, each prefixed
    /// with its key path.
    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        let mut check = |r: Result<()>| {
            if let Err(e) = r {
                problems.push(e.to_string());
            }
        };
        check(self.waveguide.validate());
        check(self.plant.validate());
        check(self.pump.validate());
        check(self.pid.validate());
        check(self.dft_chain().validate());
        check(self.calibration_sim().chain.validate());

        let mut bad = |key: &str, msg: &str| problems.push(format!("invalid parameter `{key}`: {msg}"));
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.control_period_s) {
            bad("control_period_s", "must be finite and > 0");
        }
        if !positive(self.duration_s) {
            bad("duration_s", "must be finite and > 0");
        }
        if !positive(self.plant_substep_s) {
            bad("plant_substep_s", "must be finite and > 0");
        }
        if !(self.settle_time_s.is_finite() && self.settle_time_s >= 0.0) {
            bad("settle_time_s", "must be finite and >= 0");
        }
        if self.control_period_s < self.dft.integration_time_s {
            bad("control_period_s", "must be >= dft.integration_time_s");
        }
        if self.duration_s < 10.0 * self.control_period_s {
            bad("duration_s", "must be >= 10 * control_period_s");
        }
        if positive(self.plant_substep_s) {
            for (key, v) in [
                ("control_period_s", self.control_period_s),
                ("dft.integration_time_s", self.dft.integration_time_s),
                ("settle_time_s", self.settle_time_s),
            ] {
                if v.is_finite() && !is_multiple(v, self.plant_substep_s) {
                    bad(key, "must be a multiple of plant_substep_s");
                }
            }
        }
        if positive(self.control_period_s) && !is_multiple(self.duration_s, self.control_period_s) {
            bad("duration_s", "must be a multiple of control_period_s");
        }
        if !positive(self.dft.window_half_width_ps) {
            bad("dft.window_half_width_ps", "must be finite and > 0");
        }
        if !positive(self.dft.min_counts) {
            bad("dft.min_counts", "must be finite and > 0");
        }
        if self.dft.max_iterations == 0 {
            bad("dft.max_iterations", "must be >= 1");
        }
        let cal = &self.calibration;
        if !positive(cal.filter_fwhm_nm) {
            bad("calibration.filter_fwhm_nm", "must be finite and > 0");
        }
        if cal.filter_centers_nm.len() < 3 || cal.filter_centers_nm.iter().any(|x| !x.is_finite()) {
            bad("calibration.filter_centers_nm", "need at least 3 finite points");
        }
        if cal.temperatures_c.len() < 3 || cal.temperatures_c.iter().any(|x| !x.is_finite()) {
            bad("calibration.temperatures_c", "need at least 3 finite points");
        }
        if self.analysis.histogram_bins == 0 {
            bad("analysis.histogram_bins", "must be >= 1");
        }
        if self.analysis.adev_points_per_decade == 0 {
            bad("analysis.adev_points_per_decade", "must be >= 1");
        }

        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems))
        }
    }

    /// Measurement chain of the run, centered on the nominal idler.
    pub fn dft_chain(&self) -> DftChain {
        self.dft.chain_centered(
            self.waveguide.lambda_deg_nm,
            self.dft.window_half_width_ps,
            self.dft.integration_time_s,
        )
    }

    pub fn calibration_sim(&self) -> CalibrationSim {
        CalibrationSim {
            waveguide: self.waveguide.clone(),
            chain: self.dft.chain_centered(
                self.waveguide.lambda_deg_nm,
                self.calibration.window_half_width_ps,
                self.calibration.integration_time_s,
            ),
            filter_fwhm_nm: self.calibration.filter_fwhm_nm,
            fit: self.dft.fit_options(),
            noiseless: !self.calibration.poisson_noise,
            seed: self.seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips() {
        let cfg = ExperimentConfig::default();
        cfg.validate().unwrap();
        let text = cfg.to_toml();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), cfg);
        assert_eq!(cfg.cycles(), 5040);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let e = ExperimentConfig::from_toml("[pid]\nkp = 1.0\nkq = 2.0\n").unwrap_err();
        assert!(e.is_validation());
        assert!(e.to_string().contains("kq"), "{e}");
    }

    #[test]
    fn problems_are_listed_with_paths() {
        let e = ExperimentConfig::from_toml("duration_s = 50.0\n[pid]\ntau_th_ps = 0.0\n[plant]\nou_tau_s = -1.0\n")
            .unwrap_err();
        let Error::Config(list) = e else { panic!("{e:?}") };
        let text = list.join("\n");
        for key in ["duration_s", "pid.tau_th_ps", "plant.ou_tau_s"] {
            assert!(text.contains(key), "{key} not in {text}");
        }
    }

    #[test]
    fn partial_file_fills_defaults() {
        let cfg = ExperimentConfig::from_toml("scenario = \"open-loop\"\nseed = 9\n").unwrap();
        assert_eq!(cfg.scenario, Scenario::OpenLoop);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.pid, PidConfig::default());
    }
}
