use proptest::prelude::*;
use wavelock::calibration::CalibrationRecord;
use wavelock::controller::PidConfig;
use wavelock::dft::ValueWithError;
use wavelock::harness::io::{controller_log_csv, series_csv, write_report};
use wavelock::harness::{run_loop, ExperimentConfig, LoopMode, LoopRunner, Scenario};
use wavelock::Error;

fn record() -> CalibrationRecord {
    CalibrationRecord::from_slopes(
        ValueWithError { value: 335.17, stderr: 1.0 },
        ValueWithError { value: 335.17 * 0.58, stderr: 0.5 },
    )
    .unwrap()
}

fn short(seed: u64) -> ExperimentConfig {
    ExperimentConfig { seed, duration_s: 3000.0, settle_time_s: 600.0, ..Default::default() }
}

/// Every source of randomness and drift switched off.
fn silent() -> ExperimentConfig {
    let mut cfg = short(1);
    cfg.plant = cfg.plant.frozen();
    cfg.pump.walk_sigma_nm_per_sqrt_s = 0.0;
    cfg.dft.poisson_noise = false;
    cfg
}

fn files(dir: &std::path::Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn repeated_runs_write_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        let r = run_loop(&short(42), LoopMode::ClosedLoop, record()).unwrap();
        write_report(&r, dir).unwrap();
    }
    let (fa, fb) = (files(a.path()), files(b.path()));
    let names: Vec<&str> = fa.iter().map(|f| f.0.as_str()).collect();
    assert_eq!(
        names,
        [
            "adev.csv",
            "calibration.toml",
            "config.toml",
            "controller_log.csv",
            "histogram.csv",
            "series.csv",
            "summary.toml"
        ]
    );
    assert_eq!(fa, fb);
}

#[test]
fn silent_open_loop_is_flat() {
    let r = run_loop(&silent(), LoopMode::OpenLoop, record()).unwrap();
    for c in &r.log {
        assert!((c.measured_nm - 1560.0).abs() < 1e-9, "{c:?}");
        assert_eq!(c.true_nm, 1560.0);
    }
    assert_eq!(r.failed_fits, 0);
}

#[test]
fn pump_floor_without_pump_walk_is_flat() {
    let r = run_loop(&silent(), LoopMode::PumpFloor, record()).unwrap();
    assert!(r.summary.peak_to_peak_pm < 1e-6, "{}", r.summary.peak_to_peak_pm);
}

#[test]
fn closed_loop_rejects_a_gradient_step() {
    let cfg = silent();
    let mut runner = LoopRunner::new(&cfg, LoopMode::ClosedLoop, record()).unwrap();
    runner.step_cycle().unwrap();
    let step = 0.3;
    *runner.plant_mut() = runner.plant().with_offset_step(step);
    let deadband_c = cfg.pid.tau_th_ps / (335.17 * 0.58);
    let first = runner.step_cycle().unwrap();
    assert!(first.epsilon_c > 0.0, "waveguide too hot must lower the setpoint");
    let mut settled = None;
    for k in 0..20 {
        let r = runner.step_cycle().unwrap();
        let residual = runner.plant().t_spdc() - cfg.waveguide.t0_c;
        assert!(r.setpoint_c < cfg.waveguide.t0_c);
        if residual.abs() < deadband_c {
            settled = Some(k);
            break;
        }
    }
    assert!(settled.is_some(), "residual still above {deadband_c} degC after 20 cycles");
}

#[test]
fn zero_gain_closed_loop_equals_open_loop() {
    let mut cfg = short(7);
    cfg.pid = PidConfig { kp: 0.0, ki: 0.0, kd: 0.0, ..Default::default() };
    let open = run_loop(&cfg, LoopMode::OpenLoop, record()).unwrap();
    let closed = run_loop(&cfg, LoopMode::ClosedLoop, record()).unwrap();
    assert_eq!(series_csv(&open.log), series_csv(&closed.log));
    assert_eq!(open.adev, closed.adev);
}

#[test]
fn scenarios_share_disturbances() {
    let cfg = short(11);
    let mut open = LoopRunner::new(&cfg, LoopMode::OpenLoop, record()).unwrap();
    let mut closed = LoopRunner::new(&cfg, LoopMode::ClosedLoop, record()).unwrap();
    for _ in 0..100 {
        open.step_cycle().unwrap();
        closed.step_cycle().unwrap();
        assert_eq!(open.plant().delta_t, closed.plant().delta_t);
    }
    assert!(closed.controller().is_some());
}

#[test]
fn log_has_one_row_per_cycle() {
    let r = run_loop(&short(3), LoopMode::ClosedLoop, record()).unwrap();
    let csv = controller_log_csv(&r.log);
    assert_eq!(csv.lines().count(), 301);
    assert!(csv.starts_with("cycle,time_s,tau0_ps,dtau_ps,gated,"));
    assert_eq!(r.log[0].time_s, 0.0);
    assert_eq!(r.log[299].cycle, 299);
}

#[test]
fn persistent_fit_failure_aborts() {
    let mut cfg = short(1);
    cfg.dft.min_counts = 1e12;
    let err = run_loop(&cfg, LoopMode::ClosedLoop, record()).unwrap_err();
    assert!(matches!(err, Error::PersistentFitFailure { failed: 300, cycles: 300 }), "{err}");
    assert!(!err.is_validation());
}

#[test]
fn invalid_config_is_a_validation_error() {
    let mut cfg = short(1);
    cfg.control_period_s = -1.0;
    let err = run_loop(&cfg, LoopMode::OpenLoop, record()).unwrap_err();
    assert!(err.is_validation(), "{err}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn config_round_trips(seed in any::<u64>(), hours in 1u32..48, kp in 0.0f64..2.0, th in 0.5f64..10.0,
                          scenario in prop_oneof![Just(Scenario::Calibration), Just(Scenario::OpenLoop),
                                                   Just(Scenario::ClosedLoop), Just(Scenario::PumpFloor)],
                          file in proptest::option::of("[a-z]{1,8}\\.toml")) {
        let mut cfg = ExperimentConfig { seed, scenario, duration_s: hours as f64 * 3600.0, calibration_file: file, ..Default::default() };
        cfg.pid.kp = kp;
        cfg.pid.tau_th_ps = th;
        cfg.waveguide.sigma_i_nm = 1.0 + kp;
        let text = cfg.to_toml();
        let back = ExperimentConfig::from_toml(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.to_toml(), text);
    }
}
