use wavelock_web::{drift, histogram, step_response};

#[test]
fn histogram_fit_lands_on_the_true_centroid() {
    let v = histogram(1560.4, 2000.0, 10.0, 3, 20).unwrap();
    assert!((v.tau0_ps() - v.true_tau0_ps()).abs() < 5.0 * v.tau0_stderr_ps());
    assert_eq!(v.counts().len(), v.model().len());
    assert_eq!(v.counts().len(), 200);
    let counts: f64 = v.counts().iter().sum();
    let model: f64 = v.model().iter().sum();
    assert!((counts / model - 1.0).abs() < 0.01);
    assert_eq!(v.bin_width_ps(), 20.0);
}

#[test]
fn histogram_outside_the_window_is_an_error() {
    assert!(histogram(1570.0, 2000.0, 10.0, 3, 1).is_err());
}

#[test]
fn drift_view_shows_the_lock() {
    let v = drift(4.0, 2, 0.4, 0.02, 0.05, 4.0).unwrap();
    assert_eq!(v.times_h().len(), 1440);
    assert_eq!(v.open_pm().len(), 1440);
    assert!(v.closed_sd_pm() < v.open_sd_pm());
    assert_eq!(v.taus_s().len(), v.closed_adev().len());
}

#[test]
fn step_is_removed() {
    let v = step_response(0.3, 0.4, 0.02, 0.05, 4.0, 30).unwrap();
    let r = v.residual_c();
    assert_eq!(r.len(), 31);
    assert_eq!(r[0], 0.3);
    assert!(r.last().unwrap().abs() < v.deadband_c(), "{r:?}");
    assert_eq!(*v.gated().last().unwrap(), 1);
    assert!(v.setpoint_c().iter().all(|s| (26.5..=36.5).contains(s)));
}

#[test]
fn zero_gain_step_persists() {
    let v = step_response(0.3, 0.0, 0.0, 0.0, 4.0, 10).unwrap();
    assert!(v.residual_c().iter().all(|r| *r > 0.29));
}
