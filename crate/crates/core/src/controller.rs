//! Threshold-gated digital PID acting on the TEC setpoint.
//!
//! Each cycle the centroid shift against the first measured centroid is
//! converted to an inferred temperature error
//! `deltaT_k = dtau_k / (D * dlambda_dT)`. Shifts below the threshold `tau_th`
//! are ignored; otherwise
//!
//! ```text
//! eps_k = Kp * deltaT_k + Ki * sum_j deltaT_j + Kd * (deltaT_k - deltaT_{k-1})
//! ```
//!
//! is added to an accumulated correction and the TEC is driven to
//! `T0 - correction`.

use serde::{Deserialize, Serialize};

use crate::error::{ensure_finite, ensure_positive, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
}

impl PidGains {
    pub const ZERO: Self = Self { kp: 0.0, ki: 0.0, kd: 0.0 };

    pub fn validate(&self) -> Result<()> {
        ensure_finite(self.kp, "pid.kp")?;
        ensure_finite(self.ki, "pid.ki")?;
        ensure_finite(self.kd, "pid.kd")
    }
}

/// Controller configuration as it appears in the experiment file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PidConfig {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
    /// Gating threshold on the centroid shift, ps.
    pub tau_th_ps: f64,
    /// Lowest TEC setpoint the controller may command, degC.
    pub t_min_c: f64,
    pub t_max_c: f64,
}

impl Default for PidConfig {
    fn default() -> Self {
        Self { kp: 0.4, ki: 0.02, kd: 0.05, tau_th_ps: 4.0, t_min_c: 26.5, t_max_c: 36.5 }
    }
}

impl PidConfig {
    pub fn gains(&self) -> PidGains {
        PidGains { kp: self.kp, ki: self.ki, kd: self.kd }
    }

    pub fn band(&self) -> SafetyBand {
        SafetyBand { t_min_c: self.t_min_c, t_max_c: self.t_max_c }
    }

    pub fn validate(&self) -> Result<()> {
        self.gains().validate()?;
        ensure_positive(self.tau_th_ps, "pid.tau_th_ps")?;
        self.band().validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SafetyBand {
    pub t_min_c: f64,
    pub t_max_c: f64,
}

impl SafetyBand {
    pub fn validate(&self) -> Result<()> {
        ensure_finite(self.t_min_c, "pid.t_min_c")?;
        ensure_finite(self.t_max_c, "pid.t_max_c")?;
        if self.t_min_c >= self.t_max_c {
            return Err(Error::invalid("pid.t_max_c", "must exceed pid.t_min_c"));
        }
        Ok(())
    }

    pub fn span(&self) -> f64 {
        self.t_max_c - self.t_min_c
    }

    pub fn clamp(&self, t: f64) -> f64 {
        t.clamp(self.t_min_c, self.t_max_c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidState {
    /// Reference centroid from the first converged measurement, ps.
    pub tau0_ini: f64,
    pub tau_th: f64,
    pub gains: PidGains,
    pub band: SafetyBand,
    /// Sum of gated-in temperature errors, degC.
    pub integral_sum: f64,
    pub prev_delta_t: f64,
    /// Accumulated correction subtracted from T0, degC.
    pub correction_accum: f64,
    pub cycle_index: u64,
}

/// Result of one controller cycle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidStep {
    pub gated: bool,
    /// Inferred temperature error; `None` on gated cycles.
    pub delta_t: Option<f64>,
    pub epsilon: f64,
}

impl PidState {
    pub fn initialize(first_fit_tau0: f64, tau_th: f64, gains: PidGains, band: SafetyBand) -> Result<Self> {
        ensure_finite(first_fit_tau0, "first_fit_tau0")?;
        ensure_positive(tau_th, "pid.tau_th_ps")?;
        gains.validate()?;
        band.validate()?;
        Ok(Self {
            tau0_ini: first_fit_tau0,
            tau_th,
            gains,
            band,
            integral_sum: 0.0,
            prev_delta_t: 0.0,
            correction_accum: 0.0,
            cycle_index: 0,
        })
    }

    pub fn from_config(first_fit_tau0: f64, cfg: &PidConfig) -> Result<Self> {
        Self::initialize(first_fit_tau0, cfg.tau_th_ps, cfg.gains(), cfg.band())
    }

    /// Centroid shift against the reference.
    pub fn dtau(&self, tau0: f64) -> f64 {
        tau0 - self.tau0_ini
    }

    /// One controller cycle for a measured shift `dtau` (ps). A non-finite
    /// shift is an error and leaves the state untouched.
    pub fn update(&mut self, dtau: f64, d_ps_per_nm: f64, dlambda_dt: f64) -> Result<PidStep> {
        ensure_finite(dtau, "dtau")?;
        if dtau.abs() < self.tau_th {
            self.cycle_index += 1;
            return Ok(PidStep { gated: true, delta_t: None, epsilon: 0.0 });
        }
        let delta_t = infer_delta_t(dtau, d_ps_per_nm, dlambda_dt)?;
        let g = self.gains;
        let span = self.band.span();

        let mut integral = self.integral_sum + delta_t;
        if g.ki != 0.0 {
            let limit = span / g.ki.abs();
            integral = integral.clamp(-limit, limit);
        }
        let epsilon = g.kp * delta_t + g.ki * integral + g.kd * (delta_t - self.prev_delta_t);

        self.integral_sum = integral;
        self.prev_delta_t = delta_t;
        self.correction_accum = (self.correction_accum + epsilon).clamp(-span, span);
        self.cycle_index += 1;
        Ok(PidStep { gated: false, delta_t: Some(delta_t), epsilon })
    }

    /// TEC setpoint for nominal temperature `t0`, clamped to the safety band.
    pub fn commanded_setpoint(&self, t0: f64) -> f64 {
        self.band.clamp(t0 - self.correction_accum)
    }
}

/// Temperature error (degC) that explains a centroid shift `dtau` (ps).
pub fn infer_delta_t(dtau: f64, d_ps_per_nm: f64, dlambda_dt: f64) -> Result<f64> {
    let gain = d_ps_per_nm * dlambda_dt;
    if !gain.is_finite() || gain == 0.0 {
        return Err(Error::invalid("D * dlambda_dT", "must be finite and non-zero"));
    }
    Ok(dtau / gain)
}

/// Functional form of [`PidState::update`].
pub fn pid_update(state: &PidState, dtau: f64, d_ps_per_nm: f64, dlambda_dt: f64) -> Result<(PidState, PidStep)> {
    let mut next = *state;
    let step = next.update(dtau, d_ps_per_nm, dlambda_dt)?;
    Ok((next, step))
}

#[cfg(test)]
mod tests {
    use super::*;

    const D: f64 = 335.17;
    const K: f64 = 0.5783;
    const BAND: SafetyBand = SafetyBand { t_min_c: 26.5, t_max_c: 36.5 };

    fn state(gains: PidGains) -> PidState {
        PidState::initialize(12345.0, 2.0, gains, BAND).unwrap()
    }

    /// Shift that infers exactly `t` degrees with D = 1, dlambda_dT = 1.
    fn update_unit(s: &mut PidState, t: f64) -> PidStep {
        s.update(t, 1.0, 1.0).unwrap()
    }

    #[test]
    fn initialize_zeroes_history() {
        let s = state(PidGains { kp: 1.0, ki: 1.0, kd: 1.0 });
        assert_eq!(s.tau0_ini, 12345.0);
        assert_eq!((s.integral_sum, s.prev_delta_t, s.correction_accum, s.cycle_index), (0.0, 0.0, 0.0, 0));
        assert_eq!(s, state(PidGains { kp: 1.0, ki: 1.0, kd: 1.0 }));
        assert!(PidState::initialize(0.0, 0.0, PidGains::ZERO, BAND).is_err());
        assert!(PidState::initialize(0.0, -1.0, PidGains::ZERO, BAND).is_err());
    }

    #[test]
    fn inferred_error_scales_with_calibration() {
        assert!((infer_delta_t(193.84, D, K).unwrap() - 1.0).abs() < 1e-3);
        assert!((infer_delta_t(96.92, D, K).unwrap() - 0.5).abs() < 1e-3);
        assert_eq!(infer_delta_t(0.0, D, K).unwrap(), 0.0);
        assert!(infer_delta_t(1.0, 0.0, K).is_err());
    }

    #[test]
    fn eq8_hand_example() {
        let mut s = PidState::initialize(0.0, 0.01, PidGains { kp: 0.5, ki: 0.1, kd: 0.2 }, BAND).unwrap();
        assert!((update_unit(&mut s, 0.1).epsilon - 0.08).abs() < 1e-15);
        let step = update_unit(&mut s, 0.3);
        assert!((step.epsilon - 0.23).abs() < 1e-15, "{}", step.epsilon);
        assert!((s.commanded_setpoint(31.5) - (31.5 - 0.31)).abs() < 1e-12);
    }

    #[test]
    fn sub_threshold_cycle_is_gated() {
        let mut s = state(PidGains { kp: 0.5, ki: 0.1, kd: 0.2 });
        update_unit(&mut s, 3.0);
        let before = s;
        let step = s.update(1.0, 1.0, 1.0).unwrap();
        assert!(step.gated);
        assert_eq!(step.epsilon, 0.0);
        assert_eq!(s.cycle_index, before.cycle_index + 1);
        assert_eq!(PidState { cycle_index: before.cycle_index, ..s }, before);
    }

    #[test]
    fn zero_gains_never_act() {
        let mut s = state(PidGains::ZERO);
        for t in [5.0, -40.0, 300.0] {
            assert_eq!(update_unit(&mut s, t).epsilon, 0.0);
        }
        assert_eq!(s.commanded_setpoint(31.5), 31.5);
    }

    #[test]
    fn non_finite_shift_leaves_state() {
        let mut s = state(PidGains { kp: 1.0, ki: 0.0, kd: 0.0 });
        let before = s;
        assert!(s.update(f64::NAN, D, K).is_err());
        assert_eq!(s, before);
    }

    #[test]
    fn setpoint_sign_and_clamp() {
        let mut s = state(PidGains { kp: 1.0, ki: 0.0, kd: 0.0 });
        assert_eq!(s.commanded_setpoint(31.5), 31.5);
        s.correction_accum = 0.23;
        assert!((s.commanded_setpoint(31.5) - 31.27).abs() < 1e-12);
        update_unit(&mut s, 1000.0);
        assert_eq!(s.commanded_setpoint(31.5), BAND.t_min_c);
    }

    #[test]
    fn integral_is_clamped() {
        let mut s = state(PidGains { kp: 0.0, ki: 0.5, kd: 0.0 });
        for _ in 0..100 {
            update_unit(&mut s, 10.0);
        }
        assert_eq!(s.integral_sum, BAND.span() / 0.5);
    }

    /// Linear loop with an instant TEC: the residual inferred error follows
    /// `e_k = d * (1 - Kp)^(k-1)` while above the deadband.
    #[test]
    fn proportional_loop_converges_geometrically() {
        let kp = 0.4;
        let d = 0.3;
        let mut s = PidState::initialize(0.0, 1e-9, PidGains { kp, ki: 0.0, kd: 0.0 }, BAND).unwrap();
        let gain = D * K;
        for k in 1..=20 {
            let e = d + (s.commanded_setpoint(31.5) - 31.5);
            let expect = d * (1.0 - kp).powi(k - 1);
            assert!((e - expect).abs() < 1e-12, "cycle {k}: {e} vs {expect}");
            s.update(e * gain, D, K).unwrap();
        }
    }
}
