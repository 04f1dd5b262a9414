use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use robsub::harness::{
    generate_instance, performance_profile, read_records, run_experiment, write_records, ExperimentConfig,
    ExperimentKind, Metric, RunOptions,
};
use robsub::oracle::verification_suite;
use robsub::{bicriteria_solve, AcceptanceSlack};

#[derive(Parser)]
#[command(
    name = "robsub",
    version,
    about = "Robust submodular maximization under matroid constraints"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one generated instance and print the bi-criteria result as JSON.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Repetition index; the instance seed is `seed + repetition`.
        #[arg(long, default_value_t = 0)]
        repetition: u64,
    },
    /// Run the configured sweep and write one JSON record per line.
    Bench {
        #[command(flatten)]
        common: Common,
        /// Leave wall-clock times out so the output is reproducible.
        #[arg(long)]
        no_timing: bool,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        repetitions: Option<usize>,
    },
    /// Turn bench records into a performance-profile CSV.
    Profile {
        /// JSON-lines file written by `bench`.
        records: PathBuf,
        /// time, calls or f-calls.
        #[arg(long, default_value = "calls")]
        metric: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brute-force verification of the solvers on the built-in corpus.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        cases: u64,
    },
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Experiment kind when no config file is given.
    #[arg(long, default_value = "coverage-synthetic")]
    kind: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Algorithm name, a comma-separated list, or `all`.
    #[arg(long)]
    algorithm: Option<String>,
    #[arg(long)]
    no_lazy: bool,
    #[arg(long)]
    no_early_stop: bool,
    #[arg(long, value_parser = ["half", "full"])]
    acceptance_slack: Option<String>,
    /// Override any config key, e.g. `--set n=100`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::from_file(path).with_context(|| format!("reading {}", path.display()))?,
            None => ExperimentConfig::new(self.kind.parse::<ExperimentKind>()?),
        };
        for kv in &self.overrides {
            let Some((key, value)) = kv.split_once('=') else {
                bail!("--set expects KEY=VALUE, got `{kv}`");
            };
            config.set(key.trim(), value.trim())?;
        }
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(a) = &self.algorithm {
            config.set("algorithm", a)?;
        }
        if self.no_lazy {
            config.lazy = false;
        }
        if self.no_early_stop {
            config.early_stop = false;
        }
        if let Some(slack) = &self.acceptance_slack {
            config.acceptance_slack = slack.parse::<AcceptanceSlack>()?;
        }
        config.validate()?;
        Ok(config)
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn solve(common: &Common, repetition: u64) -> Result<()> {
    let config = common.config()?;
    let seed = config.seed.wrapping_add(repetition);
    let generated = generate_instance(&config, seed)?;
    let mut out = output(common.out.as_deref())?;
    for &algorithm in &config.algorithm {
        let result = bicriteria_solve(&generated.instance, algorithm, seed)?;
        eprintln!(
            "{algorithm}: min f_i = {:.6}, lb = {:.6}, ub = {:.6}, ν = {}, {} rounds, {} f-evals",
            result.min_value(),
            result.lb,
            result.ub,
            result.violation_ratio.map_or("-".into(), |v| v.to_string()),
            result.rounds.len(),
            result.stats.f_evals,
        );
        serde_json::to_writer(&mut out, &result)?;
        writeln!(out)?;
    }
    out.flush()?;
    Ok(())
}

fn bench(common: &Common, no_timing: bool, threads: Option<usize>, repetitions: Option<usize>) -> Result<()> {
    let mut config = common.config()?;
    if let Some(r) = repetitions {
        config.repetitions = r;
        config.validate()?;
    }
    let options = RunOptions {
        timing: !no_timing,
        threads,
    };
    let records = run_experiment(&config, options)?;
    let failed = records.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        eprintln!("{failed} of {} runs failed; see the `error` field", records.len());
    }
    let mut out = output(common.out.as_deref())?;
    write_records(&records, &mut out)?;
    out.flush()?;
    Ok(())
}

fn profile(records: &Path, metric: &str, out: Option<&Path>) -> Result<()> {
    let text = std::fs::read_to_string(records).with_context(|| format!("reading {}", records.display()))?;
    let table = performance_profile(&read_records(&text)?, metric.parse::<Metric>()?)?;
    let mut out = output(out)?;
    out.write_all(table.to_csv().as_bytes())?;
    out.flush()?;
    Ok(())
}

fn verify(seed: u64, cases: u64) -> Result<bool> {
    let checks = verification_suite(seed, cases)?;
    for c in &checks {
        println!("[{}] {} — {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Ok(checks.iter().all(|c| c.passed))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Solve { common, repetition } => solve(common, *repetition).map(|()| true),
        Command::Bench {
            common,
            no_timing,
            threads,
            repetitions,
        } => bench(common, *no_timing, *threads, *repetitions).map(|()| true),
        Command::Profile { records, metric, out } => profile(records, metric, out.as_deref()).map(|()| true),
        Command::Verify { seed, cases } => verify(*seed, *cases),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
