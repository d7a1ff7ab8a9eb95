//! Command-line front end.
//!
//! Exit codes: 0 success/converged, 1 configuration error, 2 unsettled run or
//! failed check, 3 unreachable target, divergence, or unrecoverable geometry.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::checks::{run_suite, Suite};
use crate::config::{load_markers, CliConfigFile};
use crate::error::Error;
use crate::eye_in_hand::{pose_from_features, EihParameters, FeatureVector, MarkerSet};
use crate::kinematics::inverse_kinematics;
use crate::report::write_run_outputs;
use crate::sim::{run_scenario, Mode, ScenarioConfig};

#[derive(Debug, Parser)]
#[command(name = "servo-forge", version, about = "Stereo image-based visual servoing simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a builtin scenario (`scenario1`, `scenario2`) or a JSON file.
    Run {
        scenario: String,
        /// `fb` (feedback only) or `ff+fb`.
        #[arg(long)]
        mode: Option<Mode>,
        #[arg(long, default_value = "servo-forge-out")]
        out: PathBuf,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        duration: Option<f64>,
    },
    /// Run built-in self checks.
    Check {
        #[arg(long, default_value = "all")]
        suite: Suite,
    },
    /// Recover the camera pose and joints from nine image coordinates (mm).
    Pose {
        /// Nine comma- or space-separated values `ul1,ur1,v1,…,v3`.
        #[arg(long, allow_hyphen_values = true)]
        features: String,
        /// JSON array of three `[x, y, z]` marker positions (m); defaults to
        /// the builtin markers.
        #[arg(long)]
        markers: Option<PathBuf>,
    },
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_UNSETTLED: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::InvalidConfig(_) | Error::Io(_) | Error::Json(_) | Error::Csv(_) => EXIT_CONFIG,
        _ => EXIT_FAILURE,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Run { scenario, mode, out, dt, duration } => cmd_run(&scenario, mode, &out, dt, duration),
        Command::Check { suite } => cmd_check(suite),
        Command::Pose { features, markers } => match parse_features(&features) {
            Ok(f) => cmd_pose(&f, markers.as_deref()),
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_CONFIG
            }
        },
    }
}

fn load_scenario(scenario: &str, mode: Option<Mode>) -> Result<(ScenarioConfig, EihParameters), Error> {
    if let Some(cfg) = ScenarioConfig::builtin(scenario, mode.unwrap_or(Mode::FeedforwardFeedback)) {
        return Ok((cfg, EihParameters::default()));
    }
    CliConfigFile::load(Path::new(scenario))?.resolve(mode)
}

pub fn cmd_run(scenario: &str, mode: Option<Mode>, out: &Path, dt: Option<f64>, duration: Option<f64>) -> i32 {
    let (mut cfg, params) = match load_scenario(scenario, mode) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if let Some(dt) = dt {
        cfg.dt = dt;
    }
    if let Some(d) = duration {
        cfg.duration = d;
    }
    if let Err(e) = cfg.validate() {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }
    let (log, summary) = match run_scenario(&cfg, &params) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code_for(&e);
        }
    };
    if let Err(e) = write_run_outputs(out, &log, &summary) {
        eprintln!("error: writing outputs to {}: {e}", out.display());
        return EXIT_CONFIG;
    }
    let fmt = |t: Option<f64>| t.map_or("unsettled".to_string(), |t| format!("{t:.3} s"));
    println!(
        "{} [{}]: settling {} (all nine), {} (six projected); max |e| = {:.3e} mm; point 3 = {:.3e} mm",
        scenario,
        summary.mode.label(),
        fmt(summary.settling_time),
        fmt(summary.projected_settling_time),
        summary.final_feature_residuals.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        summary.point3_residual,
    );
    if summary.converged() {
        EXIT_OK
    } else {
        EXIT_UNSETTLED
    }
}

pub fn cmd_check(suite: Suite) -> i32 {
    let results = run_suite(suite);
    for r in &results {
        println!("{} {}/{}: {}", if r.passed { "PASS" } else { "FAIL" }, r.suite, r.name, r.detail);
    }
    if results.iter().all(|r| r.passed) {
        EXIT_OK
    } else {
        EXIT_UNSETTLED
    }
}

/// Splits on commas and whitespace.
pub fn parse_features(text: &str) -> Result<Vec<f64>, Error> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| Error::InvalidConfig(format!("bad feature value `{t}`"))))
        .collect()
}

pub fn cmd_pose(features: &[f64], markers: Option<&Path>) -> i32 {
    let markers = match markers.map(load_markers).unwrap_or_else(|| Ok(MarkerSet::default())) {
        Ok(m) => m,
        Err(e @ Error::CollinearPoints) => {
            eprintln!("error: {e}");
            return EXIT_FAILURE;
        }
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG;
        }
    };
    if features.len() != 9 {
        eprintln!("error: expected 9 feature values, got {}", features.len());
        return EXIT_CONFIG;
    }
    let params = EihParameters::default();
    let f = FeatureVector::from_column_slice(features);
    let result = pose_from_features(&params.intr, &f, &markers).and_then(|cam| {
        let tool = params.tool_pose(&cam);
        inverse_kinematics(&params.geom, &tool).map(|q| (cam, tool, q))
    });
    match result {
        Ok((cam, tool, q)) => {
            let out = serde_json::json!({
                "camera_pose": cam.to_rows(),
                "tool_pose": tool.to_rows(),
                "joints_deg": q.iter().map(|v| v.to_degrees()).collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&out).expect("plain JSON"));
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bad_arguments_are_config_errors() {
        assert_eq!(main_with_args(["servo-forge", "run"]), EXIT_CONFIG);
        assert_eq!(main_with_args(["servo-forge", "check", "--suite", "nope"]), EXIT_CONFIG);
        assert_eq!(main_with_args(["servo-forge", "run", "/no/such/file.json", "--mode", "fb"]), EXIT_CONFIG);
    }

    #[test]
    fn zero_disparity_pose_fails() {
        let code = main_with_args([
            "servo-forge", "pose", "--features", "1,1,0,1,1,0,1,1,0",
        ]);
        assert_eq!(code, EXIT_FAILURE);
    }

    #[test]
    fn features_accept_signs_and_spaces() {
        assert_eq!(parse_features("-1.5e0,2, -3e-1").unwrap(), vec![-1.5, 2.0, -0.3]);
        assert!(parse_features("1,x").is_err());
    }
}
