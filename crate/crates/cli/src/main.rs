use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mixedopt_cli::checks::{self, CheckReport};
use mixedopt_cli::runner::{self, Overrides};
use mixedopt_cli::scenario::Scenario;
use mixedopt_cli::{presets, CliError, CliResult};

#[derive(Parser)]
#[command(name = "simulate", version, about = "Run mixed-optomechanics scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or preset and write CSV tables plus manifest.json.
    Run {
        /// Path to a scenario JSON file, or a preset name.
        scenario: String,
        #[arg(long)]
        out: PathBuf,
        /// Override the mode-b cutoff.
        #[arg(long)]
        nb: Option<usize>,
        /// Override the integrator relative tolerance (absolute is 1% of it).
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Print the derived parameters of a scenario.
    Derive {
        scenario: String,
        #[arg(long)]
        json: bool,
    },
    /// Run an oracle suite, or `all`.
    Check { suite: String },
    /// List presets, or write them as JSON files into a directory.
    Presets {
        #[arg(long)]
        export: Option<PathBuf>,
    },
}

fn load(arg: &str) -> CliResult<Scenario> {
    let path = Path::new(arg);
    if path.exists() || arg.ends_with(".json") {
        Scenario::load(path)
    } else {
        presets::preset(arg)
    }
}

fn print_check(r: &CheckReport) {
    for c in &r.criteria {
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        println!("{verdict} [{}] {}: {:.6e} ({:?} bound {:.3e})", r.suite, c.name, c.value, c.kind, c.bound);
    }
}

fn execute(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Run { scenario, out, nb, tol } => {
            let mut s = load(&scenario)?;
            Overrides { n_b: nb, tol }.apply(&mut s);
            let m = runner::run(&s, &out)?;
            for f in &m.outputs {
                println!("{}", out.join(&f.file).display());
            }
            println!("{}", out.join("manifest.json").display());
        }
        Command::Derive { scenario, json } => {
            let s = load(&scenario)?;
            let rows = runner::derive_rows(&s)?;
            if json {
                let map: serde_json::Map<String, serde_json::Value> =
                    rows.into_iter().map(|(k, v)| (k.to_string(), v.into())).collect();
                println!("{}", serde_json::to_string_pretty(&map).expect("map serializes"));
            } else {
                for (k, v) in rows {
                    println!("{k:<18} {v:>24.15e}");
                }
            }
        }
        Command::Check { suite } => {
            let names: Vec<&str> = if suite == "all" { checks::SUITES.to_vec() } else { vec![suite.as_str()] };
            let mut failed = Vec::new();
            for name in names {
                let r = checks::run_check(name)?;
                print_check(&r);
                if !r.passed {
                    failed.push(name.to_string());
                }
            }
            if !failed.is_empty() {
                return Err(CliError::CheckFailed(failed.join(", ")));
            }
        }
        Command::Presets { export } => match export {
            None => {
                for name in presets::names() {
                    println!("{name:<12} {}", presets::preset(name)?.description);
                }
            }
            Some(dir) => {
                std::fs::create_dir_all(&dir)?;
                for name in presets::names() {
                    let path = dir.join(format!("{name}.json"));
                    std::fs::write(&path, presets::preset(name)?.to_json() + "\n")?;
                    println!("{}", path.display());
                }
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = mixedopt_cli::init_threads().and_then(|_| execute(cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::to_string(&e.report()).expect("error serializes"));
            ExitCode::from(if matches!(e, CliError::CheckFailed(_)) { 1 } else { 2 })
        }
    }
}
