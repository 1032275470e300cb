use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use dsgs_bench::output::{emit_report_json, emit_trace_csv, trace_metadata};
use dsgs_bench::{
    demo_divergence, presets, run_experiment_with_traces, simulate_message_counts, BenchError, DemoKind,
    ExperimentConfig, Result,
};

/// Doubly stochastic Gauss-Seidel experiment harness.
#[derive(Parser, Debug)]
#[command(name = "dsgs-bench", version, about)]
struct Cli {
    /// Suppress progress and summaries on stdout.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve a single seed of a config and write its trace.
    Solve {
        #[command(flatten)]
        source: ConfigSource,
        /// Seed to run (defaults to the config's first seed).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exit with code 3 if the run stops at the update cap.
        #[arg(long)]
        strict: bool,
    },
    /// Run every seed of a config and write the report and traces.
    Experiment {
        #[command(flatten)]
        source: ConfigSource,
        /// Override the config's seed list.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Exit with code 3 if any seed stops at the update cap.
        #[arg(long)]
        strict: bool,
    },
    /// Divergence demonstrations: example1, example2-random, example2-spectral.
    Demo {
        example: String,
        #[arg(long, default_value_t = 2.0)]
        tau: f64,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Steps (default 10000 for example1, 100000 for example2-random).
        #[arg(long)]
        steps: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for the CSV output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tally controller/worker messages.
    SimulateMessages {
        #[arg(long)]
        solver: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        epochs: u64,
        #[arg(long, default_value_t = 1)]
        workers: u64,
    },
    /// List the built-in table presets, or write them as config files.
    Presets {
        /// Directory to write one `<name>.json` per preset into.
        #[arg(long)]
        write: Option<PathBuf>,
    },
}

#[derive(clap::Args, Debug)]
#[group(required = true, multiple = false)]
struct ConfigSource {
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Built-in preset name (see `presets`).
    #[arg(long)]
    preset: Option<String>,
}

impl ConfigSource {
    fn load(&self) -> Result<ExperimentConfig> {
        match (&self.config, &self.preset) {
            (Some(path), _) => ExperimentConfig::load(path),
            (None, Some(name)) => {
                presets::by_name(name).ok_or_else(|| BenchError::Config(format!("unknown preset {name:?}")))
            }
            (None, None) => Err(BenchError::Config("either --config or --preset is required".into())),
        }
    }
}

fn resolve(out: &Option<PathBuf>, p: &Path) -> PathBuf {
    match out {
        Some(dir) if p.is_relative() => dir.join(p),
        _ => p.to_path_buf(),
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| BenchError::io(dir, e))
}

fn run(cli: Cli) -> Result<ExitCode> {
    let quiet = cli.quiet;
    match cli.command {
        Command::Solve {
            source,
            seed,
            out,
            strict,
        } => {
            let mut config = source.load()?;
            let seed = seed.unwrap_or(config.seeds[0]);
            config.seeds = vec![seed];
            let (report, traces) = run_experiment_with_traces(&config)?;
            let dir = out.clone().unwrap_or_else(|| PathBuf::from("."));
            ensure_dir(&dir)?;
            let path = dir.join(format!("{}-seed{seed}.csv", config.name));
            emit_trace_csv(&traces[0], &trace_metadata(&report, seed), &path)?;
            let r = &report.runs[0];
            if !quiet {
                println!(
                    "{} seed {seed}: {} epochs, converged={}, truncated={}, final metric {:?}, {:.3}s -> {}",
                    config.name,
                    r.epochs,
                    r.converged,
                    r.truncated,
                    r.final_metric,
                    r.elapsed_seconds,
                    path.display()
                );
            }
            Ok(if strict && r.truncated {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Experiment {
            source,
            seeds,
            out,
            strict,
        } => {
            let mut config = source.load()?;
            if let Some(seeds) = seeds {
                config.seeds = seeds;
            }
            let (report, traces) = run_experiment_with_traces(&config)?;
            let report_path = resolve(
                &out,
                config.outputs.report.as_deref().unwrap_or(Path::new("report.json")),
            );
            if let Some(parent) = report_path.parent().filter(|p| !p.as_os_str().is_empty()) {
                ensure_dir(parent)?;
            }
            emit_report_json(&report, &report_path)?;
            if let Some(tdir) = &config.outputs.traces {
                let tdir = resolve(&out, tdir);
                ensure_dir(&tdir)?;
                for (run, trace) in report.runs.iter().zip(&traces) {
                    let path = tdir.join(format!("{}-seed{}.csv", config.name, run.seed));
                    emit_trace_csv(trace, &trace_metadata(&report, run.seed), &path)?;
                }
            }
            if !quiet {
                let s = &report.summary;
                println!(
                    "{}: mean epochs {:.1} (std {:.1}) over {} seeds, {} converged, {} truncated, mean {:.3}s -> {}",
                    config.name,
                    s.mean_epochs,
                    s.std_epochs,
                    s.runs,
                    s.converged,
                    s.truncated,
                    s.mean_seconds,
                    report_path.display()
                );
            }
            Ok(if strict && report.summary.truncated > 0 {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Demo {
            example,
            tau,
            alpha,
            steps,
            seed,
            out,
        } => {
            let kind =
                DemoKind::parse(&example).ok_or_else(|| BenchError::Config(format!("unknown demo {example:?}")))?;
            if !(tau > 1.0) {
                return Err(BenchError::Config(format!("tau must exceed 1, got {tau}")));
            }
            let steps = steps.unwrap_or(match kind {
                DemoKind::Example1 => 10_000,
                _ => 100_000,
            });
            let demo = demo_divergence(kind, tau, alpha, steps, seed)?;
            if !quiet {
                print!("{}", demo.summary);
            }
            if let Some(dir) = out {
                ensure_dir(&dir)?;
                let path = dir.join(format!("{example}.csv"));
                std::fs::write(&path, &demo.csv).map_err(|e| BenchError::io(&path, e))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::SimulateMessages {
            solver,
            m,
            n,
            epochs,
            workers,
        } => {
            let tally = simulate_message_counts(&solver, m, n, epochs, workers)?;
            if !quiet {
                println!(
                    "{solver} {m}x{n}: {} messages per epoch x {} epochs = {} ({} workers)",
                    tally.per_epoch, tally.epochs, tally.total, tally.workers
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Presets { write } => {
            for c in presets::all() {
                if let Some(dir) = &write {
                    ensure_dir(dir)?;
                    let path = dir.join(format!("{}.json", c.name));
                    std::fs::write(&path, c.to_json_pretty()).map_err(|e| BenchError::io(&path, e))?;
                }
                if !quiet {
                    println!("{}", c.name);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
