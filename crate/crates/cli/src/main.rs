use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use wavelock::harness::io::{parse_series_csv, read_summary, run_dir, summary_table, write_calibration, write_report};
use wavelock::harness::{obtain_calibration, run_calibrations, run_loop, ExperimentConfig, LoopMode, Scenario};
use wavelock::stability::{allan_deviation, log_tau_factors, summarize};
use wavelock::Error;

/// Simulated DFT wavelength lock: calibration, loop runs and stability analysis.
#[derive(Parser, Debug)]
#[command(name = "wavelock", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// Experiment configuration (TOML). Defaults apply to missing keys.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Overrides the seed of the configuration.
    #[arg(short, long)]
    seed: Option<u64>,
    /// Output root; each run writes to `<out>/<scenario>-seed<seed>/`.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Progress on stderr; repeat for more detail.
    #[arg(short, long, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Runs the filter and temperature sweeps and writes calibration.toml.
    Calibrate(Common),
    /// Runs one loop scenario for the configured duration.
    Run {
        #[arg(value_enum)]
        scenario: RunScenario,
        #[command(flatten)]
        common: Common,
    },
    /// Recomputes drift statistics and ADEV from a series CSV.
    Adev {
        /// CSV whose first two columns are time (s) and wavelength (nm).
        series: PathBuf,
        #[arg(long, default_value_t = 10)]
        points_per_decade: usize,
        /// Reference wavelength for the fractional series; defaults to the mean.
        #[arg(long)]
        reference_nm: Option<f64>,
        /// Writes the ADEV table here instead of stdout.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Prints a table of every summary.toml under the given directories.
    Report {
        #[arg(required = true)]
        dirs: Vec<PathBuf>,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum RunScenario {
    OpenLoop,
    ClosedLoop,
    PumpFloor,
}

impl RunScenario {
    fn mode(self) -> LoopMode {
        match self {
            Self::OpenLoop => LoopMode::OpenLoop,
            Self::ClosedLoop => LoopMode::ClosedLoop,
            Self::PumpFloor => LoopMode::PumpFloor,
        }
    }

    fn scenario(self) -> Scenario {
        match self {
            Self::OpenLoop => Scenario::OpenLoop,
            Self::ClosedLoop => Scenario::ClosedLoop,
            Self::PumpFloor => Scenario::PumpFloor,
        }
    }
}

fn load(common: &Common) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    // A relative calibration file is resolved against the config's directory.
    if let (Some(file), Some(cfg_path)) = (&cfg.calibration_file, &common.config) {
        if Path::new(file).is_relative() {
            if let Some(parent) = cfg_path.parent() {
                cfg.calibration_file = Some(parent.join(file).to_string_lossy().into_owned());
            }
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn out_root(common: &Common, cfg: &ExperimentConfig) -> PathBuf {
    common.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output_dir))
}

fn calibrate_cmd(common: &Common) -> Result<(), Error> {
    let cfg = load(common)?;
    let t = Instant::now();
    let run = run_calibrations(&cfg)?;
    let dir = run_dir(&out_root(common, &cfg), Scenario::Calibration.name(), cfg.seed);
    write_calibration(&run, &dir)?;
    let r = &run.record;
    println!("D          = {:.3} +/- {:.3} ps/nm", r.d_ps_per_nm, r.d_stderr);
    println!("slope_T    = {:.3} +/- {:.3} ps/degC", r.slope_t_ps_per_c, r.slope_t_stderr);
    println!("dlambda/dT = {:.5} +/- {:.5} nm/degC", r.dlambda_dt_nm_per_c, r.dlambda_dt_stderr);
    if common.verbose > 0 {
        eprintln!(
            "dropped sweep points: {} filter, {} temperature; {:.2?}",
            run.gdd.dropped(),
            run.temperature.sweep.dropped(),
            t.elapsed()
        );
    }
    println!("wrote {}", dir.display());
    Ok(())
}

fn run_cmd(which: RunScenario, common: &Common) -> Result<(), Error> {
    let cfg = load(common)?;
    let t = Instant::now();
    if common.verbose > 0 {
        eprintln!("{} seed {}: {} cycles of {} s", which.scenario(), cfg.seed, cfg.cycles(), cfg.control_period_s);
    }
    let cal = obtain_calibration(&cfg)?;
    if common.verbose > 1 {
        eprintln!("calibration D {:.3} ps/nm, dlambda/dT {:.5} nm/degC", cal.d_ps_per_nm, cal.dlambda_dt_nm_per_c);
    }
    let report = run_loop(&cfg, which.mode(), cal)?;
    let dir = run_dir(&out_root(common, &cfg), which.scenario().name(), cfg.seed);
    write_report(&report, &dir)?;
    let s = &report.summary;
    println!("mean {:.6} nm, p2p {:.2} pm, sd {:.2} pm", s.mean_nm, s.peak_to_peak_pm, s.sd_pm);
    if let Some(a) = report.adev.at(1e4) {
        println!("ADEV(1e4 s) = {a:.3e}");
    }
    if common.verbose > 0 {
        eprintln!("failed fits {}, gated cycles {}; {:.2?}", report.failed_fits, report.gated_cycles, t.elapsed());
    }
    println!("wrote {}", dir.display());
    Ok(())
}

fn adev_cmd(series: &Path, per_decade: usize, reference: Option<f64>, out: Option<&Path>) -> Result<(), Error> {
    let bad_input = |e: String| Error::Config(vec![format!("{}: {e}", series.display())]);
    let text = std::fs::read_to_string(series).map_err(|e| bad_input(e.to_string()))?;
    let mut s = parse_series_csv(&text).map_err(|e| bad_input(e.to_string()))?;
    if let Some(r) = reference {
        s = s.with_reference(r);
    }
    let taus: Vec<f64> =
        log_tau_factors(s.values.len(), per_decade).into_iter().map(|m| m as f64 * s.sample_interval_s).collect();
    let curve = allan_deviation(&s, &taus)?;
    let summary = summarize(&s, wavelock::stability::DEFAULT_HISTOGRAM_BINS)?;
    eprintln!("p2p {:.2} pm, sd {:.2} pm over {} samples", summary.peak_to_peak_pm, summary.sd_pm, s.values.len());
    match out {
        Some(p) => std::fs::write(p, curve.to_csv()).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{}", curve.to_csv());
            Ok(())
        }
    }
}

fn collect_summaries(dir: &Path, out: &mut Vec<PathBuf>) -> Result<(), Error> {
    let direct = dir.join("summary.toml");
    if direct.is_file() {
        out.push(direct);
        return Ok(());
    }
    let entries = std::fs::read_dir(dir).map_err(|e| Error::Config(vec![format!("{}: {e}", dir.display())]))?;
    let mut subdirs: Vec<PathBuf> = entries.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.is_dir()).collect();
    subdirs.sort();
    for d in subdirs {
        let f = d.join("summary.toml");
        if f.is_file() {
            out.push(f);
        }
    }
    Ok(())
}

fn report_cmd(dirs: &[PathBuf]) -> Result<(), Error> {
    let mut files = Vec::new();
    for d in dirs {
        collect_summaries(d, &mut files)?;
    }
    if files.is_empty() {
        return Err(Error::Config(vec!["no summary.toml found".into()]));
    }
    let rows = files.iter().map(|f| read_summary(f)).collect::<Result<Vec<_>, _>>()?;
    print!("{}", summary_table(&rows));
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match &cli.command {
        Command::Calibrate(c) => calibrate_cmd(c),
        Command::Run { scenario, common } => run_cmd(*scenario, common),
        Command::Adev { series, points_per_decade, reference_nm, out } => {
            adev_cmd(series, *points_per_decade, *reference_nm, out.as_deref())
        }
        Command::Report { dirs } => report_cmd(dirs),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 1 } else { 2 })
        }
    }
}
