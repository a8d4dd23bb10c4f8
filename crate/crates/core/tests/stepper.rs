use std::f64::consts::PI;
use std::sync::Arc;

use etdms::integrator::{phi_values, reference_order_four_a, Segment};
use etdms::spectral::Field;
use etdms::{
    build_stepper, random_field, run_schedule, smooth_random_field, Error, GradientFlowModel,
    LinearModel, LipschitzIndices, NonlinearWeighting, NssModel, ParamChoice, Schedule,
    SpectralGrid, StepKind, StepperConfig, StepperState,
};
use etdms::Complex64;

fn grid(n: usize) -> Arc<SpectralGrid> {
    SpectralGrid::shared(n, 2.0 * PI, false).unwrap()
}

fn linear_state(g: &Arc<SpectralGrid>, nu: f64, k: usize, tau: f64, a: f64) -> StepperState {
    let cfg = StepperConfig::new(k, tau).with_a(ParamChoice::Fixed(a)).with_p(ParamChoice::Fixed(2.0));
    build_stepper(g.clone(), Arc::new(LinearModel::new(nu).unwrap()), &cfg).unwrap()
}

#[test]
fn k_symbol_matches_formula() {
    let g = grid(32);
    let tau = 1e-2;
    let st = linear_state(&g, 0.01, 4, tau, 10.0);
    for (m, &l) in g.biharm_symbol().iter().enumerate() {
        let expect = 0.01 * l / (1.0 + 10.0 * tau.powi(4) * l.powf(2.0));
        assert!((st.k_symbol()[m] - expect).abs() <= 1e-15 * expect.max(1e-300));
        assert!((st.exp_op()[m] - (-expect * tau).exp()).abs() < 1e-16);
    }
    assert_eq!(st.k_symbol()[0], 0.0);
    assert_eq!(st.exp_op()[0], 1.0);

    let plain = linear_state(&g, 0.01, 4, tau, 0.0);
    for (m, &l) in g.biharm_symbol().iter().enumerate() {
        assert_eq!(plain.k_symbol()[m], 0.01 * l);
    }
}

#[test]
fn weights_sum_to_phi0() {
    let g = grid(32);
    for k in 1..=6 {
        let tau = 3e-3;
        let st = linear_state(&g, 1e-3, k, tau, 5.0);
        for m in 0..g.len() {
            let z = st.k_symbol()[m];
            let phi0 = phi_values(z, tau, 1).unwrap()[0];
            let pc = st.preconditioner().unwrap()[m];
            let s: f64 = st.weights().iter().map(|w| w[m]).sum();
            assert!((s - pc * phi0).abs() <= 1e-12 * phi0, "k={k} m={m}");
        }
    }
}

#[test]
fn zero_mode_and_order_one_weights() {
    let g = grid(16);
    let tau = 0.01;
    let st = linear_state(&g, 0.1, 4, tau, 0.0);
    let xi = st.table().xi_hat();
    for (row, w) in xi.iter().zip(st.weights()) {
        let expect: f64 = row.iter().enumerate().map(|(j, c)| c * tau / (j as f64 + 1.0)).sum();
        assert!((w[0] - expect).abs() < 1e-16);
    }
    let st = linear_state(&g, 0.1, 1, tau, 0.0);
    for m in 1..g.len() {
        let k = st.k_symbol()[m];
        let expect = -(-k * tau).exp_m1() / k;
        assert!((st.weights()[0][m] - expect).abs() <= 1e-14 * expect);
    }
}

#[test]
fn rejects_bad_configuration() {
    let g = grid(16);
    let model: Arc<dyn GradientFlowModel> = Arc::new(LinearModel::new(1.0).unwrap());
    for cfg in [
        StepperConfig::new(4, 0.0),
        StepperConfig::new(4, 1e-3).with_a(ParamChoice::Fixed(-1.0)),
        StepperConfig::new(4, 1e-3).with_p(ParamChoice::Fixed(-0.5)),
        StepperConfig::new(9, 1e-3),
    ] {
        assert!(build_stepper(g.clone(), model.clone(), &cfg).is_err());
    }
}

/// Every mode decays by `e^{-nu L tau}` during the ETD-RK4 start and by
/// `e^{-K tau}` afterwards.
#[test]
fn linear_flow_is_integrated_exactly() {
    let g = grid(32);
    let u0 = random_field(g.clone(), 11, 1.0);
    let tau = 1e-3;
    for a in [0.0, 10.0, reference_order_four_a()] {
        for k in [1, 4] {
            let mut st = linear_state(&g, 1e-3, k, tau, a);
            st.set_initial(&u0, 0.0).unwrap();
            st.advance(100).unwrap();
            let u0_hat = u0.spectrum();
            let boot = (k - 1) as f64;
            for m in 0..g.len() {
                let c = 1e-3 * g.biharm_symbol()[m];
                let factor = (-(c * boot + st.k_symbol()[m] * (100.0 - boot)) * tau).exp();
                let expect = u0_hat.coeffs()[m] * factor;
                let got = st.spectrum()[m];
                let dev = (got - expect).norm() / expect.norm();
                assert!(dev <= 1e-12, "A={a} k={k} m={m}: {dev}");
            }
        }
    }
}

#[test]
fn linear_trajectory_is_step_size_independent() {
    let g = grid(32);
    let u0 = random_field(g.clone(), 5, 1.0);
    let run = |tau: f64, n: u64| {
        let mut st = linear_state(&g, 1e-3, 4, tau, 0.0);
        st.set_initial(&u0, 0.0).unwrap();
        st.advance(n).unwrap();
        st.field()
    };
    let a = run(2e-3, 50);
    let b = run(1e-3, 100);
    let scale = a.max_abs();
    for (x, y) in a.values().iter().zip(b.values()) {
        assert!((x - y).abs() <= 1e-12 * scale);
    }
}

#[test]
fn bootstrap_fills_history_with_rk4_steps() {
    let g = grid(32);
    let model = Arc::new(NssModel::new(0.1).unwrap());
    let u0 = smooth_random_field(g.clone(), 1, 0.1, 4);
    let tau = 1e-3;
    let mut st = build_stepper(g.clone(), model.clone(), &StepperConfig::new(4, tau)).unwrap();
    st.set_initial(&u0, 2.0).unwrap();
    assert!(!st.history_ready());
    assert!(matches!(st.etdms_step(), Err(Error::IncompleteHistory { have: 1, need: 4 })));
    st.bootstrap().unwrap();
    assert_eq!(st.steps_taken(), 3);
    let times = st.history_times();
    assert_eq!(times.len(), 4);
    for (i, t) in times.iter().enumerate() {
        assert!((t - (2.0 + (3 - i) as f64 * tau)).abs() < 1e-15);
    }
    assert_eq!(st.step().unwrap(), StepKind::Multistep);

    let mut one = build_stepper(g.clone(), model, &StepperConfig::new(1, tau)).unwrap();
    one.set_initial(&u0, 0.0).unwrap();
    assert!(one.history_ready());
    assert_eq!(one.step().unwrap(), StepKind::Multistep);
}

#[test]
fn changing_tau_restarts_and_equal_tau_does_not() {
    let g = grid(32);
    let model = Arc::new(NssModel::new(0.1).unwrap());
    let mut st = build_stepper(g.clone(), model, &StepperConfig::new(3, 1e-3)).unwrap();
    st.set_initial(&smooth_random_field(g.clone(), 2, 0.1, 4), 0.0).unwrap();
    st.advance(5).unwrap();
    st.set_tau(1e-3).unwrap();
    assert!(st.history_ready());
    st.set_tau(2e-3).unwrap();
    assert!(!st.history_ready());
    assert_eq!(st.step().unwrap(), StepKind::Bootstrap);
    assert_eq!(st.step().unwrap(), StepKind::Bootstrap);
    assert_eq!(st.step().unwrap(), StepKind::Multistep);
    assert!((st.t() - (5e-3 + 6e-3)).abs() < 1e-15);
}

#[test]
fn split_schedule_with_equal_tau_is_bitwise_identical() {
    let g = grid(32);
    let model: Arc<dyn GradientFlowModel> = Arc::new(NssModel::new(0.1).unwrap());
    let u0 = smooth_random_field(g.clone(), 9, 0.2, 5);
    let trace = |schedule: Schedule| {
        let mut st = build_stepper(g.clone(), model.clone(), &StepperConfig::new(4, 1e-3)).unwrap();
        st.set_initial(&u0, 0.0).unwrap();
        let mut out: Vec<(f64, Vec<Complex64>)> = Vec::new();
        run_schedule(&mut st, &schedule, |s| {
            out.push((s.t(), s.spectrum().to_vec()));
            Ok(())
        })
        .unwrap();
        out
    };
    let merged = trace(Schedule::uniform(0.05, 1e-3).unwrap());
    let split = trace(
        Schedule::new(vec![Segment { t_end: 0.02, tau: 1e-3 }, Segment { t_end: 0.05, tau: 1e-3 }]).unwrap(),
    );
    assert_eq!(merged.len(), 51);
    assert_eq!(merged, split);
}

#[test]
fn schedule_segments_change_step_size() {
    let g = grid(16);
    let model: Arc<dyn GradientFlowModel> = Arc::new(NssModel::new(0.1).unwrap());
    let mut st = build_stepper(g.clone(), model, &StepperConfig::new(4, 1e-3)).unwrap();
    st.set_initial(&smooth_random_field(g.clone(), 3, 0.1, 3), 0.0).unwrap();
    let schedule = Schedule::new(vec![
        Segment { t_end: 0.01, tau: 1e-3 },
        Segment { t_end: 0.03, tau: 2e-3 },
    ])
    .unwrap();
    let mut calls = 0;
    run_schedule(&mut st, &schedule, |_| {
        calls += 1;
        Ok(())
    })
    .unwrap();
    assert_eq!(calls, 1 + 10 + 10);
    assert!((st.t() - 0.03).abs() < 1e-14);
    assert_eq!(st.tau(), 2e-3);
    let late = Schedule::uniform(0.02, 1e-3).unwrap();
    assert!(run_schedule(&mut st, &late, |_| Ok(())).is_err());
}

#[test]
fn mean_is_conserved() {
    let g = SpectralGrid::shared(32, 12.8, false).unwrap();
    let mut u0 = smooth_random_field(g.clone(), 4, 0.1, 6);
    for v in u0.values_mut() {
        *v += 0.3;
    }
    let m0 = u0.mean();
    let model = Arc::new(NssModel::new(0.05).unwrap());
    let mut st = build_stepper(g, model, &StepperConfig::new(4, 1e-3)).unwrap();
    st.set_initial(&u0, 0.0).unwrap();
    st.advance(10_000).unwrap();
    assert!((st.field().mean() - m0).abs() < 1e-12);
}

#[test]
fn non_finite_state_is_reported() {
    let g = grid(16);
    let mut u0 = Field::zeros(g.clone());
    u0.values_mut()[3] = f64::NAN;
    let mut st = linear_state(&g, 1e-3, 2, 1e-3, 0.0);
    st.set_initial(&u0, 0.0).unwrap();
    assert!(matches!(st.step(), Err(Error::BlowUp { .. })));
}

#[test]
fn both_weightings_coincide_without_stabilization() {
    let g = grid(32);
    let u0 = smooth_random_field(g.clone(), 8, 0.2, 4);
    let model: Arc<dyn GradientFlowModel> = Arc::new(NssModel::new(0.1).unwrap());
    let run = |w| {
        let cfg = StepperConfig::new(3, 1e-3).with_a(ParamChoice::Fixed(0.0)).with_weighting(w);
        let mut st = build_stepper(g.clone(), model.clone(), &cfg).unwrap();
        st.set_initial(&u0, 0.0).unwrap();
        st.advance(20).unwrap();
        st.field()
    };
    let a = run(NonlinearWeighting::Integrated);
    let b = run(NonlinearWeighting::Differential);
    assert_eq!(a.values(), b.values());
}

#[test]
fn auto_parameters_come_from_the_model() {
    let g = grid(16);
    let st = build_stepper(g, Arc::new(NssModel::new(0.01).unwrap()), &StepperConfig::new(4, 1e-3)).unwrap();
    assert_eq!(st.p(), 2.0);
    assert!((st.a() - 42.6297).abs() < 1e-4);
    assert_eq!(st.params().c_l, LipschitzIndices { beta: 0.5, gamma: 0.5, c_l: 1.0 }.c_l);
}
