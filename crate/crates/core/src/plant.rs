//! Thermal plant: TEC-regulated package, gradient-induced offset inside the
//! waveguide, pump-laser drift, and the resulting idler center wavelength.
//!
//! The effective phase-matching temperature is `T_SPDC = T_tec + deltaT`.
//! The idler wavelength is the first-order expansion around the degenerate
//! point, written in the wavelength domain:
//!
//! ```text
//! lambda_i = lambda_deg + dlambda_dT * (T_SPDC - T0) + coupling * pump_offset
//! ```
//!
//! `deltaT` is the sum of three components: a slow exponential relaxation
//! (thermal equilibration after warm-up), an Ornstein-Uhlenbeck wander and an
//! optional ambient sinusoid. Both stochastic components use exact
//! discretizations, so statistics do not depend on the step size.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_non_negative, ensure_positive, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WaveguideModel {
    pub length_mm: f64,
    /// Degenerate phase-matching temperature, degC.
    pub t0_c: f64,
    /// Idler wavelength at `t0_c` with the pump on its nominal line, nm.
    pub lambda_deg_nm: f64,
    /// Temperature tuning coefficient of the idler, nm/degC.
    pub dlambda_dt_nm_per_c: f64,
    /// RMS spectral width of the idler, nm.
    pub sigma_i_nm: f64,
}

impl Default for WaveguideModel {
    fn default() -> Self {
        Self { length_mm: 15.0, t0_c: 31.5, lambda_deg_nm: 1560.0, dlambda_dt_nm_per_c: 0.58, sigma_i_nm: 1.5 }
    }
}

impl WaveguideModel {
    pub fn validate(&self) -> Result<()> {
        ensure_positive(self.length_mm, "waveguide.length_mm")?;
        ensure_finite(self.t0_c, "waveguide.t0_c")?;
        ensure_positive(self.lambda_deg_nm, "waveguide.lambda_deg_nm")?;
        ensure_positive(self.dlambda_dt_nm_per_c, "waveguide.dlambda_dt_nm_per_c")?;
        ensure_positive(self.sigma_i_nm, "waveguide.sigma_i_nm")
    }

    /// Idler wavelength for an effective SPDC temperature and an idler-referred
    /// pump contribution (already multiplied by the coupling).
    pub fn wavelength_at(&self, t_spdc_c: f64, pump_shift_nm: f64) -> f64 {
        self.lambda_deg_nm + self.dlambda_dt_nm_per_c * (t_spdc_c - self.t0_c) + pump_shift_nm
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThermalPlantParams {
    /// First-order response time of the TEC loop to a setpoint change, s.
    pub tec_time_constant_s: f64,
    /// RMS of the package-temperature regulation noise, degC. Excursions are
    /// clipped at twice this value.
    pub tec_noise_rms_c: f64,
    /// Initial amplitude of the equilibration transient, degC.
    pub relax_amplitude_c: f64,
    pub relax_tau_s: f64,
    /// Stationary RMS of the Ornstein-Uhlenbeck wander of deltaT, degC.
    pub ou_sigma_c: f64,
    pub ou_tau_s: f64,
    pub ambient_amp_c: f64,
    pub ambient_period_s: f64,
}

impl Default for ThermalPlantParams {
    fn default() -> Self {
        Self {
            tec_time_constant_s: 5.0,
            tec_noise_rms_c: 0.005,
            relax_amplitude_c: 0.6,
            relax_tau_s: 6000.0,
            ou_sigma_c: 0.01,
            ou_tau_s: 3600.0,
            ambient_amp_c: 0.0,
            ambient_period_s: 86_400.0,
        }
    }
}

impl ThermalPlantParams {
    pub fn validate(&self) -> Result<()> {
        ensure_positive(self.tec_time_constant_s, "plant.tec_time_constant_s")?;
        ensure_positive(self.relax_tau_s, "plant.relax_tau_s")?;
        ensure_positive(self.ou_tau_s, "plant.ou_tau_s")?;
        ensure_positive(self.ambient_period_s, "plant.ambient_period_s")?;
        ensure_non_negative(self.tec_noise_rms_c, "plant.tec_noise_rms_c")?;
        ensure_non_negative(self.ou_sigma_c, "plant.ou_sigma_c")?;
        ensure_non_negative(self.ambient_amp_c, "plant.ambient_amp_c")?;
        ensure_finite(self.relax_amplitude_c, "plant.relax_amplitude_c")
    }

    /// Same plant with every drift and noise source switched off.
    pub fn frozen(&self) -> Self {
        Self { tec_noise_rms_c: 0.0, relax_amplitude_c: 0.0, ou_sigma_c: 0.0, ambient_amp_c: 0.0, ..self.clone() }
    }

    fn ambient(&self, t: f64) -> f64 {
        if self.ambient_amp_c == 0.0 {
            0.0
        } else {
            self.ambient_amp_c * libm::sin(std::f64::consts::TAU * t / self.ambient_period_s)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalPlantState {
    pub t: f64,
    /// Package temperature reported by the thermistor, degC.
    pub t_tec: f64,
    /// Gradient-induced offset between package and SPDC temperature, degC.
    pub delta_t: f64,
    pub setpoint: f64,
    tec_lag: f64,
    tec_noise: f64,
    relax: f64,
    ou: f64,
}

impl ThermalPlantState {
    /// Package settled on `setpoint`, waveguide at the start of its
    /// equilibration transient.
    pub fn warm_start(setpoint: f64, params: &ThermalPlantParams) -> Self {
        Self::from_components(0.0, setpoint, setpoint, 0.0, params.relax_amplitude_c, 0.0, params)
    }

    /// Package settled on `setpoint` with no gradient offset.
    pub fn equilibrium(setpoint: f64) -> Self {
        Self { t: 0.0, t_tec: setpoint, delta_t: 0.0, setpoint, tec_lag: setpoint, tec_noise: 0.0, relax: 0.0, ou: 0.0 }
    }

    fn from_components(
        t: f64,
        setpoint: f64,
        tec_lag: f64,
        tec_noise: f64,
        relax: f64,
        ou: f64,
        params: &ThermalPlantParams,
    ) -> Self {
        Self {
            t,
            t_tec: tec_lag + tec_noise,
            delta_t: relax + ou + params.ambient(t),
            setpoint,
            tec_lag,
            tec_noise,
            relax,
            ou,
        }
    }

    /// Effective phase-matching temperature.
    pub fn t_spdc(&self) -> f64 {
        self.t_tec + self.delta_t
    }

    pub fn ou_state(&self) -> f64 {
        self.ou
    }

    pub fn relaxation(&self) -> f64 {
        self.relax
    }

    /// Adds a step to the gradient offset (e.g. a sudden change of the
    /// ambient conditions). The step decays with the relaxation time.
    pub fn with_offset_step(mut self, step_c: f64) -> Self {
        self.relax += step_c;
        self.delta_t += step_c;
        self
    }
}

fn ou_advance<R: Rng + ?Sized>(x: f64, sigma: f64, tau: f64, dt: f64, rng: &mut R) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    let a = libm::exp(-dt / tau);
    x * a + sigma * libm::sqrt(1.0 - a * a) * z
}

/// Advances the plant by `dt` seconds with a constant TEC `setpoint`.
///
/// The gradient wander and the TEC regulation noise draw from separate
/// generators so each source can be replayed independently.
pub fn step_plant<R: Rng + ?Sized>(
    state: &ThermalPlantState,
    params: &ThermalPlantParams,
    dt: f64,
    setpoint: f64,
    drift_rng: &mut R,
    tec_rng: &mut R,
) -> Result<ThermalPlantState> {
    ensure_positive(dt, "dt")?;
    ensure_finite(setpoint, "setpoint")?;
    ensure_finite(state.t_tec, "state.t_tec")?;
    ensure_finite(state.delta_t, "state.delta_t")?;

    let lag_decay = libm::exp(-dt / params.tec_time_constant_s);
    let tec_lag = setpoint + (state.tec_lag - setpoint) * lag_decay;

    let bound = 2.0 * params.tec_noise_rms_c;
    let tec_noise = ou_advance(state.tec_noise, params.tec_noise_rms_c, params.tec_time_constant_s, dt, tec_rng)
        .clamp(-bound, bound);

    let relax = state.relax * libm::exp(-dt / params.relax_tau_s);
    let ou = ou_advance(state.ou, params.ou_sigma_c, params.ou_tau_s, dt, drift_rng);

    Ok(ThermalPlantState::from_components(state.t + dt, setpoint, tec_lag, tec_noise, relax, ou, params))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PumpModel {
    pub lambda_p_nm: f64,
    /// Random-walk intensity of the pump wavelength, nm/sqrt(s).
    pub walk_sigma_nm_per_sqrt_s: f64,
    /// d(lambda_idler)/d(lambda_pump). At degeneracy the idler takes half the
    /// pump frequency shift, which is a factor 2 in wavelength.
    pub coupling: f64,
}

impl Default for PumpModel {
    fn default() -> Self {
        Self { lambda_p_nm: 780.0, walk_sigma_nm_per_sqrt_s: 1.0e-6, coupling: 2.0 }
    }
}

impl PumpModel {
    pub fn validate(&self) -> Result<()> {
        ensure_positive(self.lambda_p_nm, "pump.lambda_p_nm")?;
        ensure_non_negative(self.walk_sigma_nm_per_sqrt_s, "pump.walk_sigma_nm_per_sqrt_s")?;
        ensure_finite(self.coupling, "pump.coupling")
    }

    /// Advances the pump wavelength offset (nm) by one random-walk step.
    pub fn step<R: Rng + ?Sized>(&self, offset_nm: f64, dt: f64, rng: &mut R) -> Result<f64> {
        ensure_positive(dt, "dt")?;
        let z: f64 = rng.sample(StandardNormal);
        Ok(offset_nm + self.walk_sigma_nm_per_sqrt_s * libm::sqrt(dt) * z)
    }
}

/// Idler center wavelength (nm) for the current plant state and pump offset.
pub fn idler_center_wavelength(
    wg: &WaveguideModel,
    state: &ThermalPlantState,
    pump: &PumpModel,
    pump_offset_nm: f64,
) -> Result<f64> {
    ensure_finite(state.t_spdc(), "state.t_spdc")?;
    ensure_finite(pump_offset_nm, "pump_offset")?;
    Ok(wg.wavelength_at(state.t_spdc(), pump.coupling * pump_offset_nm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream_rng, Stream};

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn quiet() -> ThermalPlantParams {
        ThermalPlantParams { tec_noise_rms_c: 0.0, ou_sigma_c: 0.0, ambient_amp_c: 0.0, ..Default::default() }
    }

    fn rngs(seed: u64) -> (crate::rng::SimRng, crate::rng::SimRng) {
        (stream_rng(seed, Stream::GradientDrift, 0), stream_rng(seed, Stream::TecNoise, 0))
    }

    #[test]
    fn equilibrium_is_a_fixed_point() {
        let params = ThermalPlantParams { relax_amplitude_c: 0.0, ..quiet() };
        let (mut a, mut b) = rngs(1);
        let s0 = ThermalPlantState::equilibrium(31.5);
        let s1 = step_plant(&s0, &params, 10.0, 31.5, &mut a, &mut b).unwrap();
        assert_eq!(s1.t, 10.0);
        assert_eq!(s1.t_tec, s0.t_tec);
        assert_eq!(s1.delta_t, s0.delta_t);
    }

    #[test]
    fn relaxation_decays_to_one_over_e() {
        let params = quiet();
        let (mut a, mut b) = rngs(2);
        let mut s = ThermalPlantState::warm_start(31.5, &params);
        assert_eq!(s.delta_t, 0.6);
        for _ in 0..600 {
            s = step_plant(&s, &params, params.relax_tau_s / 600.0, 31.5, &mut a, &mut b).unwrap();
        }
        // 0.6 / e
        assert!(close(s.relaxation(), 0.220_727_66, 1e-7), "{}", s.relaxation());
    }

    #[test]
    fn tec_follows_setpoint_with_first_order_lag() {
        let params = ThermalPlantParams { relax_amplitude_c: 0.0, ..quiet() };
        let (mut a, mut b) = rngs(3);
        let s0 = ThermalPlantState::equilibrium(31.5);
        let s1 = step_plant(&s0, &params, 5.0, 32.5, &mut a, &mut b).unwrap();
        let expected = 32.5 - (-1.0f64).exp();
        assert!(close(s1.t_tec, expected, 1e-12));
    }

    #[test]
    fn deterministic_parts_compose_over_split_steps() {
        let params = ThermalPlantParams { ambient_amp_c: 0.1, ambient_period_s: 3000.0, ..quiet() };
        let (mut a, mut b) = rngs(4);
        let s0 = ThermalPlantState::warm_start(30.0, &params);
        let one = step_plant(&s0, &params, 7.0, 31.0, &mut a, &mut b).unwrap();
        let half = step_plant(&s0, &params, 3.0, 31.0, &mut a, &mut b).unwrap();
        let two = step_plant(&half, &params, 4.0, 31.0, &mut a, &mut b).unwrap();
        assert!(close(one.t_tec, two.t_tec, 1e-12));
        assert!(close(one.delta_t, two.delta_t, 1e-12));
    }

    #[test]
    fn ou_variance_does_not_depend_on_step_size() {
        // Exact discretization: after T seconds from zero the variance is
        // sigma^2 (1 - exp(-2T/tau)) regardless of how T is split.
        let params = ThermalPlantParams {
            relax_amplitude_c: 0.0,
            ou_sigma_c: 0.05,
            ou_tau_s: 100.0,
            tec_noise_rms_c: 0.0,
            ..Default::default()
        };
        let horizon = 50.0;
        let expected = 0.05f64.powi(2) * (1.0 - (-2.0 * horizon / 100.0f64).exp());
        for steps in [1usize, 5, 50] {
            let n = 4000;
            let mut sum_sq = 0.0;
            for seed in 0..n {
                let (mut a, mut b) = rngs(seed as u64 * 31 + steps as u64);
                let mut s = ThermalPlantState::equilibrium(30.0);
                for _ in 0..steps {
                    s = step_plant(&s, &params, horizon / steps as f64, 30.0, &mut a, &mut b).unwrap();
                }
                sum_sq += s.delta_t * s.delta_t;
            }
            let var = sum_sq / n as f64;
            // var estimate has relative std sqrt(2/n) ~ 2.2%
            assert!((var / expected - 1.0).abs() < 0.08, "steps {steps}: {var} vs {expected}");
        }
    }

    #[test]
    fn tec_noise_stays_within_ten_millikelvin() {
        let params = ThermalPlantParams { relax_amplitude_c: 0.0, ou_sigma_c: 0.0, ..Default::default() };
        let (mut a, mut b) = rngs(5);
        let mut s = ThermalPlantState::equilibrium(31.5);
        for _ in 0..20_000 {
            s = step_plant(&s, &params, 1.0, 31.5, &mut a, &mut b).unwrap();
            assert!((s.t_tec - 31.5).abs() <= 0.010 + 1e-12);
        }
    }

    #[test]
    fn rejects_bad_step() {
        let params = ThermalPlantParams::default();
        let (mut a, mut b) = rngs(6);
        let s = ThermalPlantState::equilibrium(31.5);
        assert!(step_plant(&s, &params, 0.0, 31.5, &mut a, &mut b).is_err());
        assert!(step_plant(&s, &params, 1.0, f64::NAN, &mut a, &mut b).is_err());
    }

    #[test]
    fn idler_wavelength_examples() {
        let wg = WaveguideModel::default();
        let pump = PumpModel::default();
        let s = ThermalPlantState::equilibrium(wg.t0_c);
        assert_eq!(idler_center_wavelength(&wg, &s, &pump, 0.0).unwrap(), 1560.0);

        let hot = s.with_offset_step(0.59);
        let shift_pm = (idler_center_wavelength(&wg, &hot, &pump, 0.0).unwrap() - 1560.0) * 1e3;
        assert!(close(shift_pm, 342.2, 1e-6), "{shift_pm}");

        let tec = s.with_offset_step(0.01);
        let shift_pm = (idler_center_wavelength(&wg, &tec, &pump, 0.0).unwrap() - 1560.0) * 1e3;
        assert!(close(shift_pm, 5.8, 1e-6));
        assert!(shift_pm < 6.0);

        let pumped = idler_center_wavelength(&wg, &s, &pump, 0.001).unwrap();
        assert!(close(pumped - 1560.0, 0.002, 1e-12));
    }

    #[test]
    fn noiseless_pump_stays_put_and_walk_is_seeded() {
        let still = PumpModel { walk_sigma_nm_per_sqrt_s: 0.0, ..Default::default() };
        let mut rng = stream_rng(9, Stream::Pump, 0);
        let mut x = 0.0;
        for _ in 0..100 {
            x = still.step(x, 10.0, &mut rng).unwrap();
        }
        assert_eq!(x, 0.0);

        let pump = PumpModel::default();
        let run = |seed| {
            let mut rng = stream_rng(seed, Stream::Pump, 0);
            let mut x = 0.0;
            (0..50)
                .map(|_| {
                    x = pump.step(x, 10.0, &mut rng).unwrap();
                    x
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(run(4), run(4));
        assert_ne!(run(4), run(5));
    }

    #[test]
    fn pump_walk_variance_matches_random_walk() {
        let s = 1e-3;
        let pump = PumpModel { walk_sigma_nm_per_sqrt_s: s, ..Default::default() };
        let (steps, dt, seeds) = (20usize, 2.5, 10_000u64);
        let mut sum_sq = 0.0;
        for seed in 0..seeds {
            let mut rng = stream_rng(seed, Stream::Pump, 0);
            let mut x = 0.0;
            for _ in 0..steps {
                x = pump.step(x, dt, &mut rng).unwrap();
            }
            sum_sq += x * x;
        }
        let var = sum_sq / seeds as f64;
        let expected = s * s * steps as f64 * dt;
        // relative std of the estimate: sqrt(2/1e4) = 1.4%
        assert!((var / expected - 1.0).abs() < 0.05, "{var} vs {expected}");
    }
}
