use std::f64::consts::PI;
use std::sync::Arc;

use etdms::diagnostics::{modified_energy_terms, record, DEFAULT_FIT_WINDOW};
use etdms::integrator::reference_order_four_a;
use etdms::spectral::Field;
use etdms::{
    build_stepper, fit_loglog, fit_semilog, lipschitz_ratio, mean_slope, modified_energy,
    roughness, smooth_random_field, Error, LinearModel, NssModel, ParamChoice, SpectralGrid,
    StepperConfig,
};

#[test]
fn modified_energy_needs_retained_intervals() {
    let g = SpectralGrid::shared(16, 2.0 * PI, false).unwrap();
    let cfg = StepperConfig::new(4, 1e-3).retaining_intervals(true);
    let mut st = build_stepper(g.clone(), Arc::new(NssModel::new(0.1).unwrap()), &cfg).unwrap();
    st.set_initial(&smooth_random_field(g, 1, 0.1, 3), 0.0).unwrap();
    st.advance(5).unwrap();
    assert!(matches!(
        modified_energy(&st, 6),
        Err(Error::InsufficientIntervals { have: 2, need: 3 })
    ));
    st.advance(1).unwrap();
    assert!(modified_energy(&st, 6).is_ok());
}

#[test]
fn zero_state_has_zero_modified_energy() {
    let g = SpectralGrid::shared(16, 2.0 * PI, false).unwrap();
    let cfg = StepperConfig::new(4, 1e-2).retaining_intervals(true);
    let mut st = build_stepper(g.clone(), Arc::new(LinearModel::new(0.5).unwrap()), &cfg).unwrap();
    st.set_initial(&Field::zeros(g), 0.0).unwrap();
    for _ in 0..10 {
        st.step().unwrap();
        if st.intervals().len() == 3 {
            assert_eq!(modified_energy(&st, 6).unwrap(), 0.0);
        }
    }
}

/// On the linear model `du/dt = -K u` is known in closed form, so the interval
/// integrals of `|du/dt|^2` can be checked mode by mode.
#[test]
fn interval_integrals_match_closed_form_on_linear_flow() {
    let g = SpectralGrid::shared(16, 2.0 * PI, false).unwrap();
    let tau = 1e-2;
    let cfg = StepperConfig::new(2, tau).with_a(ParamChoice::Fixed(0.0)).retaining_intervals(true);
    let mut st = build_stepper(g.clone(), Arc::new(LinearModel::new(1e-3).unwrap()), &cfg).unwrap();
    let u0 = smooth_random_field(g.clone(), 2, 1.0, 3);
    st.set_initial(&u0, 0.0).unwrap();
    st.advance(3).unwrap();
    let rec = st.intervals()[0].clone();
    let terms = modified_energy_terms(&st, 8).unwrap();
    let expect: f64 = (0..g.len())
        .map(|m| {
            let k = st.k_symbol()[m];
            if k == 0.0 {
                return 0.0;
            }
            // int_0^tau k^2 |u|^2 e^{-2 k s} ds
            let amp = rec.u_start[m].norm_sqr();
            0.5 * k * amp * -(-2.0 * k * tau).exp_m1()
        })
        .sum::<f64>()
        * g.area();
    assert!((terms.h_terms[0] - expect).abs() <= 1e-12 * expect);
}

#[test]
fn quadrature_refinement_is_converged() {
    let g = SpectralGrid::shared(32, 12.8, false).unwrap();
    let cfg = StepperConfig::new(4, 1e-3)
        .with_a(ParamChoice::Fixed(reference_order_four_a()))
        .retaining_intervals(true);
    let mut st = build_stepper(g.clone(), Arc::new(NssModel::new(0.005).unwrap()), &cfg).unwrap();
    st.set_initial(&smooth_random_field(g, 3, 0.1, 6), 0.0).unwrap();
    st.advance(20).unwrap();
    let a = modified_energy_terms(&st, 6).unwrap();
    let b = modified_energy_terms(&st, 12).unwrap();
    assert!((a.value - b.value).abs() <= 1e-9 * b.value.abs());
    for (x, y) in a.h_terms.iter().zip(&b.h_terms) {
        assert!((x - y).abs() <= 1e-9 * y);
    }
}

#[test]
fn modified_energy_decreases_on_a_short_run() {
    let g = SpectralGrid::shared(32, 12.8, false).unwrap();
    let cfg = StepperConfig::new(4, 1e-3)
        .with_a(ParamChoice::Fixed(reference_order_four_a()))
        .retaining_intervals(true);
    let mut st = build_stepper(g.clone(), Arc::new(NssModel::new(0.005).unwrap()), &cfg).unwrap();
    st.set_initial(&smooth_random_field(g, 4, 0.1, 6), 0.0).unwrap();
    st.advance(6).unwrap();
    let mut prev = modified_energy(&st, 6).unwrap();
    for _ in 0..500 {
        st.step().unwrap();
        let e = modified_energy(&st, 6).unwrap();
        assert!(e <= prev + 1e-8 * prev.abs());
        prev = e;
    }
}

#[test]
fn records_follow_state() {
    let g = SpectralGrid::shared(16, 2.0 * PI, false).unwrap();
    let cfg = StepperConfig::new(2, 1e-3);
    let mut st = build_stepper(g.clone(), Arc::new(NssModel::new(0.1).unwrap()), &cfg).unwrap();
    let u0 = smooth_random_field(g, 7, 0.1, 3);
    st.set_initial(&u0, 1.5).unwrap();
    let r = record(&st);
    assert_eq!(r.t, 1.5);
    assert!((r.roughness - roughness(&u0)).abs() < 1e-14);
    assert!((r.slope - mean_slope(&u0)).abs() < 1e-14);
    assert!(r.modified_energy.is_none());
}

#[test]
fn observables_ignore_constant_shifts() {
    let g = SpectralGrid::shared(32, 12.8, false).unwrap();
    let u = smooth_random_field(g, 9, 0.3, 5);
    let mut v = u.clone();
    for x in v.values_mut() {
        *x += 4.0;
    }
    assert!((roughness(&u) - roughness(&v)).abs() < 1e-14);
    assert!((mean_slope(&u) - mean_slope(&v)).abs() < 1e-13);
}

#[test]
fn lipschitz_bound_holds_for_random_pairs() {
    let g = SpectralGrid::shared(64, 12.8, false).unwrap();
    let model = NssModel::new(0.005).unwrap();
    let mut worst: f64 = 0.0;
    for seed in 0..50u64 {
        let amp = 0.05 * (1 + seed % 20) as f64;
        let u = smooth_random_field(g.clone(), 2 * seed, amp, 3 + (seed % 10) as i64);
        let v = smooth_random_field(g.clone(), 2 * seed + 1, amp, 3 + (seed % 7) as i64);
        worst = worst.max(lipschitz_ratio(&model, &u, &v).unwrap());
    }
    assert!(worst <= 1.0 + 1e-10, "{worst}");
}

#[test]
fn lipschitz_bound_for_single_high_mode_difference() {
    let g = SpectralGrid::shared(64, 2.0 * PI, false).unwrap();
    let model = NssModel::new(0.01).unwrap();
    let u = smooth_random_field(g.clone(), 1, 0.5, 4);
    let mut v = u.clone();
    for (idx, x) in v.values_mut().iter_mut().enumerate() {
        let (px, py) = g.node(idx);
        *x += 1e-3 * (29.0 * px + 17.0 * py).cos();
    }
    assert!(lipschitz_ratio(&model, &u, &v).unwrap() <= 1.0 + 1e-10);
    assert!(lipschitz_ratio(&model, &u, &Field::zeros(g)).unwrap() <= 1.0);
}

#[test]
fn fits_recover_planted_laws() {
    let t: Vec<f64> = (1..=400).map(|i| i as f64).collect();
    let e: Vec<f64> = t.iter().map(|t| -40.27 * t.ln() - 48.5).collect();
    let f = fit_semilog(&t, &e, DEFAULT_FIT_WINDOW).unwrap();
    assert!((f.a + 40.27).abs() < 1e-10 && (f.b + 48.5).abs() < 1e-10);
    let h: Vec<f64> = t.iter().map(|t| 0.12 * t.sqrt()).collect();
    let f = fit_loglog(&t, &h, DEFAULT_FIT_WINDOW).unwrap();
    assert!((f.a - 0.12).abs() < 1e-10 && (f.b - 0.5).abs() < 1e-10);
    assert_eq!(f.samples, 400);
}
