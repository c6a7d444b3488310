use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use geodes::config::{load_scenario, scenario_digest, ScenarioError};
use geodes::render::{canonical_report_json, text_summary, write_csv};
use geodes::{compare_policies, render_comparison, run_scenario};
use geodes_core::scenario::{validate_scenario, LoadBalancerPolicy};

const EXIT_INVALID: u8 = 1;
const EXIT_IO: u8 = 2;

#[derive(Parser)]
#[command(name = "sim", about = "Geo-distributed cloud deployment simulator", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and emit its report.
    Run {
        scenario: PathBuf,
        /// Overrides the scenario file's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Report destination: a file for json, a directory for csv.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// GMT hour mapped to simulated t=0.
        #[arg(long = "start-hour", default_value_t = 0)]
        start_hour: u32,
        /// Write an event trace (time, seq, kind, payload digest per line).
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run the same scenario and seed under several load balancer policies.
    Compare {
        scenario: PathBuf,
        /// Comma-separated policy names (RoundRobin, Throttled, ActiveMonitoring).
        #[arg(long, value_delimiter = ',', required = true)]
        policies: Vec<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long = "start-hour", default_value_t = 0)]
        start_hour: u32,
    },
    /// Check a scenario file and list every violation.
    Validate { scenario: PathBuf },
}

fn read_scenario(path: &PathBuf) -> Result<String, ExitCode> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("cannot read {}: {e}", path.display());
        ExitCode::from(EXIT_IO)
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SIM_LOG", "warn")).init();
    let cli = Cli::parse();

    match cli.command {
        Command::Run { scenario, seed, out, format, start_hour, trace } => {
            let text = match read_scenario(&scenario) {
                Ok(t) => t,
                Err(code) => return code,
            };
            let cfg = match load_scenario(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(EXIT_INVALID);
                }
            };
            let validated = match validate_scenario(&cfg) {
                Ok(v) => v,
                Err(violations) => {
                    eprintln!("{}", ScenarioError::Invalid(violations));
                    return ExitCode::from(EXIT_INVALID);
                }
            };
            let seed = seed.unwrap_or(cfg.seed);
            log::info!(
                "running {} (digest {}) with seed {seed}",
                scenario.display(),
                scenario_digest(&cfg)
            );

            let mut trace_file = match trace {
                Some(path) => match fs::File::create(&path) {
                    Ok(f) => Some(std::io::BufWriter::new(f)),
                    Err(e) => {
                        eprintln!("cannot create trace file {}: {e}", path.display());
                        return ExitCode::from(EXIT_IO);
                    }
                },
                None => None,
            };
            let mut sink = trace_file.as_mut().map(|f| {
                move |rec: &geodes_core::engine::TraceRecord| {
                    // ignore trace write errors until flush
                    let _ = writeln!(
                        f,
                        "{:.9} {} {} {:016x}",
                        rec.time, rec.seq, rec.kind, rec.payload_digest
                    );
                }
            });
            let report = run_scenario(
                &validated,
                seed,
                start_hour,
                sink.as_mut().map(|s| s as &mut dyn FnMut(&_)),
            );
            if let Some(mut f) = trace_file {
                if let Err(e) = f.flush() {
                    eprintln!("trace write failed: {e}");
                    return ExitCode::from(EXIT_IO);
                }
            }

            print!("{}", text_summary(&report));
            if let Some(out) = out {
                let result = match format {
                    Format::Json => fs::write(&out, canonical_report_json(&report)),
                    Format::Csv => write_csv(&report, &out),
                };
                if let Err(e) = result {
                    eprintln!("cannot write report to {}: {e}", out.display());
                    return ExitCode::from(EXIT_IO);
                }
            }
            ExitCode::SUCCESS
        }
        Command::Compare { scenario, policies, seed, start_hour } => {
            let text = match read_scenario(&scenario) {
                Ok(t) => t,
                Err(code) => return code,
            };
            let cfg = match load_scenario(&text) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("{e}");
                    return ExitCode::from(EXIT_INVALID);
                }
            };
            if policies.len() < 2 {
                eprintln!("compare needs at least two policies");
                return ExitCode::from(EXIT_INVALID);
            }
            let mut parsed = Vec::new();
            for name in &policies {
                match LoadBalancerPolicy::parse_name(name) {
                    Some(p) => parsed.push(p),
                    None => {
                        eprintln!("unknown policy name: {name}");
                        return ExitCode::from(EXIT_INVALID);
                    }
                }
            }
            let seed = seed.unwrap_or(cfg.seed);
            match compare_policies(&cfg, &parsed, seed, start_hour) {
                Ok(outcomes) => {
                    print!("{}", render_comparison(&outcomes));
                    ExitCode::SUCCESS
                }
                Err(violations) => {
                    eprintln!("{}", ScenarioError::Invalid(violations));
                    ExitCode::from(EXIT_INVALID)
                }
            }
        }
        Command::Validate { scenario } => {
            let text = match read_scenario(&scenario) {
                Ok(t) => t,
                Err(code) => return code,
            };
            match geodes::config::load_validated(&text) {
                Ok(_) => {
                    println!("valid");
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("{e}");
                    ExitCode::from(EXIT_INVALID)
                }
            }
        }
    }
}
