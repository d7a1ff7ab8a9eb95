use std::process::Command;

use servo_forge::eye_in_hand::{eih_map, EihParameters, MarkerSet};
use servo_forge::kinematics::JointVector;

fn servo_forge() -> Command {
    Command::new(env!("CARGO_BIN_EXE_servo-forge"))
}

fn features_arg(q: &JointVector) -> String {
    let f = eih_map(&EihParameters::default(), q, &MarkerSet::default()).unwrap();
    f.iter().map(|v| format!("{v:.17e}")).collect::<Vec<_>>().join(",")
}

#[test]
fn run_writes_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s1");
    let status = servo_forge()
        .args(["run", "scenario1", "--mode", "ff+fb", "--duration", "2.5", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    for name in ["timeseries.csv", "summary.json", "joints.svg", "features.svg"] {
        assert!(out.join(name).is_file(), "{name} missing");
    }
    let csv = std::fs::read_to_string(out.join("timeseries.csv")).unwrap();
    let header = csv.lines().next().unwrap();
    assert!(header.starts_with("t,q1,q2,q3,q4,q5,q6,qref1,qref2,qref3,qref4,qref5,qref6,ul1,ur1,v1,ul2,ur2,v2,ul3,ur3,v3,"));
    assert_eq!(csv.lines().count(), 1 + 25_001);
    let summary: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["converged_all_nine"], serde_json::Value::Bool(true));
    assert_eq!(summary["mode"], "ff+fb");
}

#[test]
fn csv_is_stable_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out = dir.path().join(sub);
        let status = servo_forge()
            .args(["run", "scenario2", "--mode", "fb", "--duration", "0.2", "--out"])
            .arg(&out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(2));
        std::fs::read(out.join("timeseries.csv")).unwrap()
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn run_from_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("maneuver.json");
    std::fs::write(
        &cfg,
        r#"{ "initial_joints_deg": [45, 18.59, 4.35, 0, 67.06, -45],
             "target_joints_deg": [45, 18.59, 4.35, 0, 67.06, -45],
             "mode": "ff+fb", "duration": 0.1 }"#,
    )
    .unwrap();
    let status = servo_forge().arg("run").arg(&cfg).arg("--out").arg(dir.path().join("o")).status().unwrap();
    assert_eq!(status.code(), Some(0));

    std::fs::write(&cfg, r#"{ "initial_joints_deg": [0,0,0,0,0,0], "target_joints_deg": [0,0,0,0,0,0], "mode": "fb", "typo": 1 }"#).unwrap();
    let status = servo_forge().arg("run").arg(&cfg).arg("--out").arg(dir.path().join("o")).status().unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn unreachable_target_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("far.json");
    std::fs::write(
        &cfg,
        r#"{ "initial_joints_deg": [0,0,0,0,0,0], "mode": "fb",
             "target_pose": { "rotation": [[0,0,1],[0,1,0],[-1,0,0]], "translation": [9, 0, 1.5] } }"#,
    )
    .unwrap();
    let out = servo_forge().arg("run").arg(&cfg).arg("--out").arg(dir.path().join("o")).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(!out.stderr.is_empty());
}

#[test]
fn check_suites_pass() {
    for suite in ["kinematics", "camera", "control", "all"] {
        let out = servo_forge().args(["check", "--suite", suite]).output().unwrap();
        let text = String::from_utf8_lossy(&out.stdout);
        assert_eq!(out.status.code(), Some(0), "{suite}:\n{text}");
        assert!(text.lines().all(|l| l.starts_with("PASS")));
    }
}

#[test]
fn pose_recovers_home() {
    let out = servo_forge().args(["pose", "--features", &features_arg(&JointVector::zeros())]).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let tool = &v["tool_pose"];
    for (row, expected) in [(0, 1.27), (1, 0.0), (2, 1.57)] {
        assert!((tool[row][3].as_f64().unwrap() - expected).abs() < 1e-9);
    }
    let joints: Vec<f64> = v["joints_deg"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert!(joints.iter().all(|q| q.abs() < 1e-7), "{joints:?}");
}

#[test]
fn pose_recovers_joints_with_marker_file() {
    let dir = tempfile::tempdir().unwrap();
    let markers = dir.path().join("markers.json");
    std::fs::write(&markers, "[[-0.5, 0, 0], [0, 0, 0.5], [2, -2, 0]]").unwrap();
    let q = JointVector::from_iterator([10.0, 5.0, -3.0, 20.0, 40.0, -15.0].iter().map(|d: &f64| d.to_radians()));
    let out = servo_forge().args(["pose", "--features", &features_arg(&q), "--markers"]).arg(&markers).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for (i, j) in v["joints_deg"].as_array().unwrap().iter().enumerate() {
        assert!((j.as_f64().unwrap() - q[i].to_degrees()).abs() < 1e-6);
    }
}

#[test]
fn pose_failures() {
    let zero_disparity = servo_forge().args(["pose", "--features", "1,1,0,1,1,0,1,1,0"]).status().unwrap();
    assert_eq!(zero_disparity.code(), Some(3));
    let short = servo_forge().args(["pose", "--features", "1,2,3"]).status().unwrap();
    assert_eq!(short.code(), Some(1));

    let dir = tempfile::tempdir().unwrap();
    let markers = dir.path().join("line.json");
    std::fs::write(&markers, "[[0, 0, 0], [1, 0, 0], [2, 0, 0]]").unwrap();
    let collinear = servo_forge()
        .args(["pose", "--features", &features_arg(&JointVector::zeros()), "--markers"])
        .arg(&markers)
        .status()
        .unwrap();
    assert_eq!(collinear.code(), Some(3));
}
