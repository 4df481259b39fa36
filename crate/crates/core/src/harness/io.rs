//! File formats of run outputs.
//!
//! Every float is rendered in scientific notation with 9 significant digits,
//! so outputs are byte-identical for identical inputs.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::run::{CalibrationRun, CycleRecord, RunReport};
use crate::error::{Error, Result};
use crate::stability::WavelengthSeries;

pub fn fmt_sig(x: f64) -> String {
    format!("{x:.8e}")
}

fn opt(x: Option<f64>) -> String {
    x.map(fmt_sig).unwrap_or_default()
}

pub const LOG_HEADER: &str = "cycle,time_s,tau0_ps,dtau_ps,gated,deltaT_C,epsilon_C,correction_accum_C,setpoint_C";

pub fn controller_log_csv(log: &[CycleRecord]) -> String {
    let mut out = String::with_capacity(120 * (log.len() + 1));
    out.push_str(LOG_HEADER);
    out.push('\n');
    for r in log {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.cycle,
            fmt_sig(r.time_s),
            opt(r.tau0_ps),
            opt(r.dtau_ps),
            u8::from(r.gated),
            opt(r.delta_t_c),
            fmt_sig(r.epsilon_c),
            fmt_sig(r.correction_accum_c),
            fmt_sig(r.setpoint_c),
        );
    }
    out
}

pub const SERIES_HEADER: &str = "time_s,wavelength_nm,true_wavelength_nm";

pub fn series_csv(log: &[CycleRecord]) -> String {
    let mut out = String::with_capacity(60 * (log.len() + 1));
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for r in log {
        let _ = writeln!(out, "{},{},{}", fmt_sig(r.time_s), fmt_sig(r.measured_nm), fmt_sig(r.true_nm));
    }
    out
}

/// Reads a series CSV whose first two columns are time (s) and wavelength
/// (nm). The sample interval must be uniform.
pub fn parse_series_csv(text: &str) -> Result<WavelengthSeries> {
    let bad = |line: usize, msg: &str| Error::Io(format!("series line {line}: {msg}"));
    let mut times = Vec::new();
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let mut cols = line.split(',');
        let mut next = || -> Result<f64> {
            cols.next()
                .and_then(|c| c.trim().parse::<f64>().ok())
                .ok_or_else(|| bad(i + 1, "expected two numeric columns"))
        };
        times.push(next()?);
        values.push(next()?);
    }
    if times.len() < 2 {
        return Err(Error::Io("series needs at least two rows".into()));
    }
    let dt = times[1] - times[0];
    for (k, w) in times.windows(2).enumerate() {
        if ((w[1] - w[0]) - dt).abs() > 1e-6 * dt.abs().max(1.0) {
            return Err(bad(k + 3, "non-uniform sampling"));
        }
    }
    WavelengthSeries::new(dt, values)
}

/// Scalar results of a run, persisted as `summary.toml`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub scenario: String,
    pub seed: u64,
    pub cycles: usize,
    pub failed_fits: usize,
    pub gated_cycles: usize,
    pub mean_nm: f64,
    pub peak_to_peak_pm: f64,
    pub sd_pm: f64,
    pub adev_tau_s: Vec<f64>,
    pub adev: Vec<f64>,
}

impl RunSummary {
    pub fn from_report(r: &RunReport) -> Self {
        Self {
            scenario: r.scenario.name().into(),
            seed: r.seed,
            cycles: r.log.len(),
            failed_fits: r.failed_fits,
            gated_cycles: r.gated_cycles,
            mean_nm: r.summary.mean_nm,
            peak_to_peak_pm: r.summary.peak_to_peak_pm,
            sd_pm: r.summary.sd_pm,
            adev_tau_s: r.adev.taus.clone(),
            adev: r.adev.adev.clone(),
        }
    }

    /// ADEV at the grid point closest to `tau` in log space.
    pub fn adev_near(&self, tau: f64) -> Option<(f64, f64)> {
        self.adev_tau_s
            .iter()
            .zip(&self.adev)
            .min_by(|a, b| {
                let da = (a.0.ln() - tau.ln()).abs();
                let db = (b.0.ln() - tau.ln()).abs();
                da.total_cmp(&db)
            })
            .map(|(t, a)| (*t, *a))
    }
}

fn write(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))
}

/// Directory name of a run below the output root.
pub fn run_dir(root: &Path, scenario: &str, seed: u64) -> PathBuf {
    root.join(format!("{scenario}-seed{seed}"))
}

/// Writes every output of a loop run into `dir`.
pub fn write_report(r: &RunReport, dir: &Path) -> Result<()> {
    ensure_dir(dir)?;
    write(dir, "config.toml", &r.config.to_toml())?;
    write(dir, "calibration.toml", &r.calibration.to_toml())?;
    write(dir, "controller_log.csv", &controller_log_csv(&r.log))?;
    write(dir, "series.csv", &series_csv(&r.log))?;
    write(dir, "adev.csv", &r.adev.to_csv())?;
    write(dir, "histogram.csv", &r.summary.histogram.to_csv())?;
    let summary = toml::to_string(&RunSummary::from_report(r)).unwrap_or_default();
    write(dir, "summary.toml", &summary)?;
    Ok(())
}

pub fn write_calibration(c: &CalibrationRun, dir: &Path) -> Result<()> {
    ensure_dir(dir)?;
    write(dir, "calibration.toml", &c.record.to_toml())?;
    write(dir, "gdd_sweep.csv", &c.gdd.to_csv())?;
    write(dir, "temperature_sweep.csv", &c.temperature.sweep.to_csv())?;
    Ok(())
}

pub fn read_summary(path: &Path) -> Result<RunSummary> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Fixed-width table of run summaries.
pub fn summary_table(rows: &[RunSummary]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<12} {:>6} {:>7} {:>7} {:>10} {:>10} {:>12} {:>12}",
        "scenario", "seed", "cycles", "failed", "p2p_pm", "sd_pm", "adev@100s", "adev@1e4s"
    );
    for r in rows {
        let a = |t: f64| r.adev_near(t).map_or("-".to_string(), |(_, a)| format!("{a:.3e}"));
        let _ = writeln!(
            out,
            "{:<12} {:>6} {:>7} {:>7} {:>10.2} {:>10.2} {:>12} {:>12}",
            r.scenario,
            r.seed,
            r.cycles,
            r.failed_fits,
            r.peak_to_peak_pm,
            r.sd_pm,
            a(100.0),
            a(1e4)
        );
    }
    out
}
