mod common;

use servo_forge::eye_in_hand::EihParameters;
use servo_forge::report::write_timeseries;
use servo_forge::sim::{run_scenario, Mode, ScenarioConfig, TargetSpec};

#[test]
fn runs_are_bit_identical() {
    let mut cfg = ScenarioConfig::scenario2(Mode::FeedforwardFeedback);
    cfg.duration = 0.5;
    let params = EihParameters::default();
    let (a, sa) = run_scenario(&cfg, &params).unwrap();
    let (b, sb) = run_scenario(&cfg, &params).unwrap();
    assert_eq!(a, b);
    assert_eq!(sa, sb);
    let (mut ca, mut cb) = (Vec::new(), Vec::new());
    write_timeseries(&a, &mut ca).unwrap();
    write_timeseries(&b, &mut cb).unwrap();
    assert_eq!(ca, cb);
}

#[test]
fn halving_the_step_barely_moves_the_result() {
    let params = EihParameters::default();
    let cfg = ScenarioConfig::scenario1(Mode::FeedforwardFeedback);
    let fine = ScenarioConfig { dt: cfg.dt / 2.0, ..cfg.clone() };
    let (_, coarse) = run_scenario(&cfg, &params).unwrap();
    let (_, fine) = run_scenario(&fine, &params).unwrap();
    let diff = common::max_abs(coarse.final_feature_residuals.iter().zip(&fine.final_feature_residuals).map(|(a, b)| a - b));
    assert!(diff < 1e-4, "final residuals moved by {diff:e} mm");
}

#[test]
fn feedforward_from_rest_needs_no_feedback() {
    let params = EihParameters::default();
    let mut cfg = ScenarioConfig::scenario2(Mode::FeedforwardFeedback);
    cfg.disturbance = Default::default();
    cfg.initial_joints = match cfg.target {
        TargetSpec::Joints(q) => q,
        TargetSpec::Pose(_) => unreachable!(),
    };
    cfg.duration = 0.5;
    let (log, _) = run_scenario(&cfg, &params).unwrap();
    let fb = common::max_abs(log.q_feedback.iter().flatten().copied());
    let e = common::max_abs(log.feature_error.iter().flatten().copied());
    assert!(fb < 1e-6, "feedback {fb:e} rad");
    assert!(e < 1e-9, "error {e:e} mm");
}

#[test]
fn disturbance_is_rejected_in_the_controllable_subspace() {
    // the six controlled channels shrink monotonically in the long run
    let params = EihParameters::default();
    let cfg = ScenarioConfig::scenario2(Mode::FeedforwardFeedback);
    let (log, summary) = run_scenario(&cfg, &params).unwrap();
    let six = |k: usize| common::max_abs(log.projected_error[k][..6].iter().copied());
    let n = log.len();
    assert!(six(n - 1) < six(n / 2));
    assert!(six(n / 2) < six(n / 10));
    assert_eq!(summary.skipped_updates, 0);
}

#[test]
fn summary_json_has_every_field() {
    let params = EihParameters::default();
    for mode in [Mode::FeedbackOnly, Mode::FeedforwardFeedback] {
        let mut cfg = ScenarioConfig::scenario1(mode);
        cfg.duration = 0.05;
        let (_, s) = run_scenario(&cfg, &params).unwrap();
        let v = serde_json::to_value(&s).unwrap();
        for key in [
            "mode", "duration", "dt", "tolerance_mm", "settling_time", "projected_settling_time",
            "final_feature_residuals", "final_joint_error", "converged_all_nine", "six_channels_settled",
            "projected_error_final", "point3_residual", "target_joints", "initial_linearization",
            "adaptive_updates", "skipped_updates",
        ] {
            assert!(v.get(key).is_some(), "{key} missing in {} summary", mode.label());
        }
    }
}
