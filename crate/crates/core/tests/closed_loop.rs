use ampc::controller::*;
use ampc::estimator::EstimatorInit;
use ampc::model::{constraint_residual, step_discrete, State};

fn short(adaptive: bool) -> SimConfig {
    SimConfig {
        total_steps: 120,
        adaptive,
        ..SimConfig::default()
    }
}

#[test]
fn runs_are_bit_deterministic() {
    let cfg = short(true);
    assert_eq!(
        run_closed_loop(&cfg).unwrap(),
        run_closed_loop(&cfg).unwrap()
    );
}

#[test]
fn logged_transitions_follow_the_true_plant() {
    let cfg = short(true);
    let log = run_closed_loop(&cfg).unwrap();
    let truth = cfg.true_proxy();
    assert_eq!(log.states.len(), cfg.total_steps + 1);
    assert_eq!(log.inputs.len(), cfg.total_steps);
    assert_eq!(log.estimates.len(), cfg.total_steps + 1);
    for t in 0..cfg.total_steps {
        assert_eq!(
            log.states[t + 1],
            step_discrete(&log.states[t], &log.inputs[t], &truth, cfg.dt)
        );
        assert!(cfg.bounds.contains(&log.inputs[t]));
    }
    assert!(log
        .states
        .iter()
        .all(|s| constraint_residual(s).abs() <= 1e-12));
}

#[test]
fn adaptive_with_true_prior_matches_full_knowledge() {
    let known = short(false);
    let seeded = SimConfig {
        adaptive: true,
        estimator: EstimatorInit::from_proxy(&known.true_proxy(), 100.0),
        ..known.clone()
    };
    let a = run_closed_loop(&seeded).unwrap();
    let b = run_closed_loop(&known).unwrap();
    for (ua, ub) in a.inputs.iter().zip(&b.inputs) {
        assert!((ua.thrust - ub.thrust).abs() <= 1e-9);
        assert!((ua.moment - ub.moment).abs() <= 1e-9);
    }
    assert!(a
        .prediction_errors
        .iter()
        .all(|e| e[0].abs() <= 1e-10 && e[1].abs() <= 1e-10));
}

#[test]
fn first_step_of_full_knowledge_run_is_plain_mpc() {
    let cfg = short(false);
    let log = run_closed_loop(&cfg).unwrap();
    let (u0, _) = control_step(&cfg.x_init, &cfg.true_proxy(), &cfg, None).unwrap();
    assert_eq!(log.inputs[0], u0);
}

#[test]
fn prediction_errors_decay_in_adaptive_run() {
    let log = run_closed_loop(&SimConfig::default()).unwrap();
    let early = log.prediction_errors[0][0]
        .abs()
        .max(log.prediction_errors[0][1].abs());
    let late = log.prediction_errors[log.steps() - 50..]
        .iter()
        .map(|e| e[0].abs().max(e[1].abs()))
        .fold(0.0, f64::max);
    assert!(early > 1e-2);
    assert!(late <= 1e-3);
}

#[test]
fn heading_and_rates_settle_in_reference_scenario() {
    for adaptive in [false, true] {
        let log = run_closed_loop(&SimConfig {
            adaptive,
            ..SimConfig::default()
        })
        .unwrap();
        let last = log.final_state().unwrap();
        assert!(last.psi.abs() <= 0.05);
        assert!(last.v.abs() <= 0.05 && last.omega.abs() <= 0.05);
        // Made progress toward the goal from (1, 1).
        assert!(last.x.hypot(last.y) < State::new(1.0, 1.0, 0.0, 0.0, 0.0).x.hypot(1.0));
    }
}
