//! Driving the command layer programmatically from a JSON configuration.

use clap::Parser;
use vlab::cli::{execute, summary, Cli, RunConfig};

fn main() -> vlab::Result<()> {
    let cfg = RunConfig::from_json(r#"{"branch": "1B", "gamma": [0.7, 0.1], "seed": 7, "samples": 10}"#)?;
    println!("{}", serde_json::to_string(&cfg)?);
    let path = std::env::temp_dir().join("vlab-example-config.json");
    std::fs::write(&path, serde_json::to_string(&cfg)?)?;
    let cli = Cli::parse_from(["vlab", "--config", path.to_str().unwrap(), "verify", "--scope", "ybe", "--scope", "invariants"]);
    let env = execute(&cli);
    print!("{}", summary(&env));
    println!("exit code {}, {:.3}s", env.exit_code, env.wall_time_s);
    Ok(())
}
