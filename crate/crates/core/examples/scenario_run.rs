//! Closed-loop run of a builtin scenario, writing CSV, JSON and SVG output.
//!
//! `cargo run --release --example scenario_run -- scenario2 fb 5`

use servo_forge::eye_in_hand::EihParameters;
use servo_forge::report::write_run_outputs;
use servo_forge::sim::{run_scenario, Mode, ScenarioConfig};
use servo_forge::{Error, RunSummary};

pub fn run_example(name: &str, mode: Mode, duration: f64, out: Option<&std::path::Path>) -> servo_forge::Result<RunSummary> {
    let mut cfg = ScenarioConfig::builtin(name, mode)
        .ok_or_else(|| Error::InvalidConfig(format!("no builtin scenario `{name}`")))?;
    cfg.duration = duration;
    let (log, summary) = run_scenario(&cfg, &EihParameters::default())?;
    if let Some(dir) = out {
        write_run_outputs(dir, &log, &summary)?;
    }
    Ok(summary)
}

fn main() -> servo_forge::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map_or("scenario1", String::as_str);
    let mode: Mode = args.get(1).map_or(Ok(Mode::FeedforwardFeedback), |m| m.parse())?;
    let duration = args.get(2).map_or(Ok(5.0), |d| d.parse().map_err(|_| Error::InvalidConfig(format!("bad duration {d}"))))?;
    let out = std::path::PathBuf::from(format!("{name}-{}", mode.label().replace('+', "")));

    let s = run_example(name, mode, duration, Some(&out))?;
    println!("{}", serde_json::to_string_pretty(&s)?);
    println!("outputs in {}", out.display());
    Ok(())
}
