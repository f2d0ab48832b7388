mod common;

use logfactor::bosonic::BosonicConfig;
use logfactor::dynamics::{build_rabi_system, integrate_full, rwa_amplitudes, rwa_trajectory, FullOdeConfig};
use logfactor::levels::ExtendedLevels;
use logfactor::spectra::Spectrum;

fn levels() -> ExtendedLevels<'static> {
    ExtendedLevels::new(common::log13(), common::log_spectrum()).unwrap()
}

#[test]
fn factor_states_of_small_integers() {
    let ext = levels();
    let s = common::log_spectrum();
    let sys = build_rabi_system(&ext, &s, 35, 2, 1.0).unwrap();
    assert_eq!(sys.factor_states, vec![BosonicConfig::new(vec![2, 4])]);
    assert_eq!(sys.factor_values, vec![vec![5, 7]]);
    assert!((sys.omega_ext - (35.0f64 / 9.0).ln()).abs() < 1e-15);
    assert!(sys.omega > 0.0);

    let sys = build_rabi_system(&ext, &s, 245, 2, 1.0).unwrap();
    assert_eq!(sys.d(), 2);
    assert_eq!(sys.factor_values, vec![vec![5, 49], vec![7, 35]]);

    assert!(build_rabi_system(&ext, &s, 37, 2, 1.0).unwrap().no_resonance());
    // 35 cannot be split into three parts above 3
    assert!(build_rabi_system(&ext, &s, 35, 3, 1.0).unwrap().no_resonance());
}

#[test]
fn small_factor_is_a_precondition_error() {
    let ext = levels();
    let err = build_rabi_system(&ext, &common::log_spectrum(), 105, 2, 1.0).unwrap_err();
    assert!(err.is_domain());
}

#[test]
fn rabi_frequency_definition() {
    let ext = levels();
    let sys = build_rabi_system(&ext, &common::log_spectrum(), 385, 2, 0.3).unwrap();
    assert_eq!(sys.d(), 3);
    let norm = sys.couplings.iter().map(|w| w * w).sum::<f64>().sqrt();
    assert!((sys.omega - 0.15 * norm).abs() < 1e-15);
    for t in [0.0, 1.0, 17.3, 400.0] {
        let (b0, bs) = rwa_amplitudes(&sys, t);
        assert!((b0 * b0 + bs.iter().map(|b| b * b).sum::<f64>() - 1.0).abs() < 1e-14);
    }
}

/// First maximum of `f` on `(0, t_max)` by golden-section search.
fn peak(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
    }
    0.5 * (a + b)
}

#[test]
fn all_factor_states_share_one_frequency() {
    let ext = levels();
    let sys = build_rabi_system(&ext, &common::log_spectrum(), 5005, 2, 1.0).unwrap();
    assert!(sys.d() > 3);
    let guess = std::f64::consts::FRAC_PI_2 / sys.omega;
    let freqs: Vec<f64> = (0..sys.d())
        .map(|j| {
            let t = peak(|t| rwa_amplitudes(&sys, t).1[j].powi(2), 0.5 * guess, 1.5 * guess);
            std::f64::consts::FRAC_PI_2 / t
        })
        .collect();
    for f in &freqs {
        assert!((f - freqs[0]).abs() < 1e-6 * freqs[0]);
    }
}

#[test]
fn zero_drive_keeps_initial_state() {
    let ext = levels();
    let spectrum = common::log_spectrum();
    let sys = build_rabi_system(&ext, &spectrum, 35, 2, 0.0).unwrap();
    let traj = integrate_full(&sys, common::log13(), &spectrum, &FullOdeConfig::new(200.0, 11)).unwrap();
    for i in 0..traj.times.len() {
        assert_eq!(traj.prob_ground(i), 1.0);
        assert_eq!(traj.prob_factor_total(i), 0.0);
    }
}

#[test]
fn full_equations_follow_closed_form_at_weak_drive() {
    let ext = levels();
    let spectrum = common::log_spectrum();
    let sys = build_rabi_system(&ext, &spectrum, 35, 2, 1.0).unwrap();
    let gamma = sys.gamma_for_omega(0.05 / 35.0).unwrap();
    let sys = sys.with_gamma(gamma);
    let t_end = std::f64::consts::PI / sys.omega;
    let traj = integrate_full(&sys, common::log13(), &spectrum, &FullOdeConfig::new(t_end, 101)).unwrap();
    let closed = rwa_trajectory(&sys, &traj.times);
    let dev = (0..traj.times.len())
        .map(|i| (traj.prob_ground(i) - closed.prob_ground(i)).abs())
        .fold(0.0, f64::max);
    assert!(dev < 0.05, "sup deviation {dev}");
    assert!(traj.max_norm_drift() < 1e-6);
    // at π/(2Ω) the factor state holds almost everything
    let mid = traj.times.len() / 2;
    assert!(traj.prob_factor_total(mid) > 0.95);
}

#[test]
fn three_bosons_stay_put_for_two_factors() {
    let ext = levels();
    let spectrum = common::log_spectrum();
    let reference = build_rabi_system(&ext, &spectrum, 35, 2, 1.0).unwrap();
    let gamma = reference.gamma_for_omega(0.05 / 35.0).unwrap();
    let sys = build_rabi_system(&ext, &spectrum, 35, 3, gamma).unwrap();
    assert!(sys.no_resonance());
    let mut config = FullOdeConfig::new(2000.0, 201);
    config.basis_cutoff = Some(8);
    let traj = integrate_full(&sys, common::log13(), &spectrum, &config).unwrap();
    let lowest = (0..traj.times.len()).map(|i| traj.prob_ground(i)).fold(1.0, f64::min);
    assert!(lowest > 0.99, "ground population dipped to {lowest}");
}

#[test]
fn trajectory_csv_columns() {
    let ext = levels();
    let sys = build_rabi_system(&ext, &common::log_spectrum(), 245, 2, 0.01).unwrap();
    let traj = rwa_trajectory(&sys, &[0.0, 1.0, 2.0]);
    let mut buf = Vec::new();
    traj.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(header, "t,re_b0,im_b0,prob_ground,prob_factor_total,norm,prob_2_46,prob_4_32");
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn prime_spectrum_system_pads_ground_bosons() {
    let spectrum = Spectrum::prime(40);
    let ext = ExtendedLevels::new(common::prime14(), spectrum.clone()).unwrap();
    let sys = build_rabi_system(&ext, &spectrum, 70, 6, 1.0).unwrap();
    assert_eq!(sys.factor_states, vec![BosonicConfig::new(vec![0, 0, 0, 1, 3, 4])]);
    assert_eq!(sys.factor_values, vec![vec![2, 5, 7]]);
    assert!(sys.couplings[0].abs() > 1e-10);
    // the odd-parity partner has a vanishing element
    let odd = build_rabi_system(&ext, &spectrum, 35, 6, 1.0).unwrap();
    assert_eq!(odd.couplings, vec![0.0]);
}
