use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;
use submax::harness::{benchmark_only, error_json, write_outputs, write_plot, ExperimentConfig, PlotSeries};
use submax::rounding::impossibility_demo;
use submax::{run_experiment, Error, GENERATOR_ID};

#[derive(Parser)]
#[command(name = "submax", version, about = "Online Frank-Wolfe regret experiments for submodular maximization")]
struct Cli {
    /// Override the seed of every config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory; defaults to the config's `output.dir`, then $SUBMAX_OUT, then `.`.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Print nothing on success.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run experiments; with several configs a combined plot and slope table are written too.
    Run {
        #[arg(required = true)]
        configs: Vec<PathBuf>,
    },
    /// Compute only the offline benchmark of a config.
    Bench { config: PathBuf },
    /// Show that no single rounding rule is unbiased for every submodular function.
    DemoImpossibility,
    /// List the shipped constraint, objective, adversary and oracle families.
    ListFamilies,
}

fn load(path: &Path, cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut config = ExperimentConfig::from_path(path)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn out_dir(config: &ExperimentConfig, cli: &Cli) -> PathBuf {
    cli.out_dir.clone().unwrap_or_else(|| config.output_dir())
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Error> {
    serde_json::to_string_pretty(value).map_err(|e| Error::Io(e.to_string()))
}

/// Prints to stdout, ignoring a closed pipe (e.g. `| head`).
fn emit(text: &str) {
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn run(cli: &Cli, paths: &[PathBuf]) -> Result<(), Error> {
    let configs = paths.iter().map(|p| load(p, cli)).collect::<Result<Vec<_>, _>>()?;
    let mut series: Vec<PlotSeries> = Vec::new();
    let mut reports = Vec::new();
    for config in &configs {
        let out = run_experiment(config)?;
        let dir = out_dir(config, cli);
        let files = write_outputs(&out, &dir, &config.output_prefix())?;
        let s = out.summary();
        reports.push(json!({
            "algorithm": s.algorithm,
            "horizon": s.horizon,
            "seed": s.seed,
            "benchmark_mode": s.benchmark_mode,
            "final_regret": s.final_regret,
            "files": files,
        }));
        series.push(out.plot_series());
    }
    let mut combined = None;
    if configs.len() > 1 {
        let dir = out_dir(&configs[0], cli);
        let (svg, slopes) = (dir.join("combined.svg"), dir.join("combined_slopes.csv"));
        let rows = write_plot(&series, &svg, &slopes)?;
        combined = Some(json!({ "plot_svg": svg, "slopes_csv": slopes, "slopes": rows }));
    }
    if !cli.quiet {
        emit(&to_json(&json!({ "runs": reports, "combined": combined }))?);
    }
    Ok(())
}

fn bench(cli: &Cli, path: &Path) -> Result<(), Error> {
    let config = load(path, cli)?;
    let (plan, benchmark) = benchmark_only(&config)?;
    if !cli.quiet {
        emit(&to_json(&json!({ "params": plan, "benchmark": benchmark, "mode": benchmark.mode.as_str() }))?);
    }
    Ok(())
}

fn list_families() -> serde_json::Value {
    json!({
        "algorithms": ["mono_fw", "bandit_fw", "responsive_fw"],
        "constraints": {
            "box": {"upper": "[f64]"},
            "simplex": {"budget": "f64", "dim": "usize"},
            "uniform_matroid": {"rank": "usize", "dim": "usize"},
            "partition_matroid": {"parts": "[[usize]]", "caps": "[usize]"},
        },
        "objectives": {
            "quadratic": {"noise": 0.5},
            "linear": {"weights": null, "noise": 0.0},
            "coverage": {"universe": 20},
            "facility_location": {"clients": 10},
            "modular": {"weights": null},
        },
        "adversaries": {"fixed": {}, "iid": {}, "shifting": {"period": "usize", "pool": 2}},
        "oracles": {"ftpl": {"eta0": null}, "ogd": {"eta0": null}},
        "generator": GENERATOR_ID,
    })
}

fn dispatch(cli: &Cli) -> Result<(), Error> {
    match &cli.command {
        Command::Run { configs } => run(cli, configs),
        Command::Bench { config } => bench(cli, config),
        Command::DemoImpossibility => {
            let report = impossibility_demo();
            if !cli.quiet {
                emit(&to_json(&report)?);
            }
            if report.demonstrates_impossibility() {
                Ok(())
            } else {
                Err(Error::Unsupported("impossibility demonstration did not hold numerically".into()))
            }
        }
        Command::ListFamilies => {
            if !cli.quiet {
                emit(&to_json(&list_families())?);
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
