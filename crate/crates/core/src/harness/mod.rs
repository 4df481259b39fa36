//! Experiment orchestration: configuration, timed loops and run outputs.

pub mod config;
pub mod io;
pub mod run;

pub use config::{ExperimentConfig, Scenario};
pub use run::{
    obtain_calibration, run_calibrations, run_closed_loop, run_loop, run_open_loop, run_pump_floor, CalibrationRun,
    CycleRecord, LoopMode, LoopRunner, RunReport,
};
