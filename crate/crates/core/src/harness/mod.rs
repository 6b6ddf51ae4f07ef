//! Experiment plumbing: configs, synthetic adversaries, benchmarks, regret
//! measurement and reporting.

mod benchmark;
mod config;
mod report;

pub use benchmark::{
    compute_benchmark, continuous_benchmark, exhaustive_benchmark, summed_quadratic, Benchmark, BenchmarkMode,
    EXHAUSTIVE_MAX_DIM, FW_BENCHMARK_ITERS, GRID_MAX_DIM,
};
pub use config::{AdversarySpec, AlgorithmKind, ExperimentConfig, ObjectiveSpec, OutputSpec};
pub use report::{emit_plot, fit_loglog_slope, write_slope_table, write_trace_csv, PlotSeries, SlopeRow, CSV_HEADER};

use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use crate::algorithms::{
    bandit_fw_run, compute_regret, derive_params_bandit_with, derive_params_mono_with, mono_fw_run, responsive_fw_run,
    AdversaryEnv, BlockPlan, ObjectiveSequence, Objectives, RegretCurve, RegretTrace,
};
use crate::error::{Error, Result};
use crate::geometry::{ConstraintSet, InteriorSet, Region};
use crate::objectives::{
    lipschitz_smoothness_of_extension, make_random_set_objective, ContinuousObjective, Modular, ObjectiveConstants,
    QuadraticDR, SetFamilyParams, SetFunction, SetObjective,
};
use crate::oracles::OracleBank;
use crate::point::Point;
use crate::rng::{Purpose, SeedTree, GENERATOR_ID};
use crate::rounding::Matroid;

/// Draws objective number `index` of the family; the same `(seeds, index)`
/// always gives the same function.
fn draw_continuous(spec: &ObjectiveSpec, caps: &Point, seeds: &SeedTree, index: usize) -> Result<QuadraticDR> {
    let mut rng = seeds.stream(Purpose::Adversary, index as u64, 0);
    let d = caps.dim();
    match spec {
        ObjectiveSpec::Quadratic { noise } => QuadraticDR::random(caps.clone(), *noise, &mut rng),
        ObjectiveSpec::Linear { weights, noise } => {
            let c = match weights {
                Some(w) => Point::from(w.as_slice()),
                None => Point::new((0..d).map(|_| 0.1 + rng.random::<f64>()).collect()),
            };
            QuadraticDR::new(c, vec![0.0; d * d], caps.clone(), *noise)
        }
        _ => Err(Error::Config(format!("{} is not a continuous family", spec.name()))),
    }
}

fn draw_set(spec: &ObjectiveSpec, ground: usize, seeds: &SeedTree, index: usize) -> Result<SetFunction> {
    let mut rng = seeds.stream(Purpose::Adversary, index as u64, 0);
    match spec {
        ObjectiveSpec::Modular { weights } => {
            let w = match weights {
                Some(w) => w.clone(),
                None => (0..ground).map(|_| rng.random::<f64>()).collect(),
            };
            Ok(Modular::new(w)?.into())
        }
        ObjectiveSpec::Coverage { universe } => {
            let params = SetFamilyParams { ground, universe: *universe, clients: 1 };
            make_random_set_objective(spec.set_family().expect("coverage"), params, &mut rng)
        }
        ObjectiveSpec::FacilityLocation { clients } => {
            let params = SetFamilyParams { ground, universe: 1, clients: *clients };
            make_random_set_objective(spec.set_family().expect("facility location"), params, &mut rng)
        }
        _ => Err(Error::Config(format!("{} is not a set-function family", spec.name()))),
    }
}

fn schedule<T, D>(adversary: AdversarySpec, horizon: usize, draw: D) -> Result<ObjectiveSequence<T>>
where
    T: Clone,
    D: Fn(usize) -> Result<T> + Send + Sync + 'static,
{
    match adversary {
        AdversarySpec::Fixed => Ok(ObjectiveSequence::fixed(draw(0)?, horizon)),
        AdversarySpec::Shifting { period, pool } => {
            let pool = (0..pool).map(&draw).collect::<Result<Vec<_>>>()?;
            ObjectiveSequence::shifting(pool, period, horizon)
        }
        AdversarySpec::Iid => {
            // every draw shares the parameters of draw 0, so it cannot fail later
            draw(0)?;
            Ok(ObjectiveSequence::generated(move |t| draw(t).expect("validated family"), horizon))
        }
    }
}

/// Objective sequence of `horizon` rounds over the dimension of
/// `constraint`, deterministic in `seeds`.
pub fn generate_adversary(
    objective: &ObjectiveSpec,
    adversary: AdversarySpec,
    constraint: &ConstraintSet,
    horizon: usize,
    seeds: &SeedTree,
) -> Result<Objectives> {
    let seeds = *seeds;
    let spec = Arc::new(objective.clone());
    if objective.is_continuous() {
        let caps = constraint.coordinate_caps();
        let seq = schedule(adversary, horizon, move |j| draw_continuous(&spec, &caps, &seeds, j))?;
        Ok(Objectives::Continuous(seq))
    } else {
        let ground = constraint.dim();
        let seq = schedule(adversary, horizon, move |j| draw_set(&spec, ground, &seeds, j))?;
        Ok(Objectives::Set(seq))
    }
}

/// Regularity constants of the round-1 objective.
fn first_constants(objectives: &Objectives) -> ObjectiveConstants {
    match objectives {
        Objectives::Continuous(seq) => seq.at(0).constants(),
        Objectives::Set(seq) => {
            let f = seq.at(0);
            let (lipschitz, smoothness) = lipschitz_smoothness_of_extension(&f);
            ObjectiveConstants {
                lipschitz,
                smoothness,
                value_bound: f.value_bound(),
                grad_norm_bound: lipschitz,
                grad_variance: 0.0,
            }
        }
    }
}

/// Schedule and optional interior for `config`.
pub fn derive_plan(config: &ExperimentConfig) -> Result<(BlockPlan, Option<InteriorSet>)> {
    match config.algorithm {
        AlgorithmKind::MonoFw => Ok((derive_params_mono_with(config.horizon, &config.overrides)?, None)),
        AlgorithmKind::BanditFw | AlgorithmKind::ResponsiveFw => {
            let (plan, interior) = derive_params_bandit_with(config.horizon, &config.constraint, &config.overrides)?;
            Ok((plan, Some(interior)))
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub config: ExperimentConfig,
    pub trace: RegretTrace,
    pub benchmark: Benchmark,
    pub curve: RegretCurve,
    pub constants: ObjectiveConstants,
    pub wall_clock_secs: f64,
}

/// Derives parameters, runs the configured algorithm over `T_effective`
/// rounds and measures regret against the offline benchmark.
pub fn run_experiment(config: &ExperimentConfig) -> Result<RunOutput> {
    let start = Instant::now();
    config.validate()?;
    let seeds = SeedTree::new(config.seed);
    let (plan, interior) = derive_plan(config)?;
    let objectives =
        generate_adversary(&config.objective, config.adversary, &config.constraint, plan.t_effective, &seeds)?;
    let mut env = AdversaryEnv::new(objectives.clone(), seeds);
    let trace = match (config.algorithm, interior) {
        (AlgorithmKind::MonoFw, _) => {
            let region = Region::Base(config.constraint.clone());
            let mut bank = OracleBank::new(plan.steps, region, config.oracle, &seeds)?;
            mono_fw_run(&mut env, &config.constraint, &mut bank, &plan, &seeds)?
        }
        (AlgorithmKind::BanditFw, Some(interior)) => {
            let mut bank = OracleBank::new(plan.steps, Region::Interior(interior.clone()), config.oracle, &seeds)?;
            bandit_fw_run(&mut env, &interior, &mut bank, &plan, &seeds)?
        }
        (AlgorithmKind::ResponsiveFw, Some(interior)) => {
            let matroid = Matroid::from_polytope(&config.constraint)?;
            let mut bank = OracleBank::new(plan.steps, Region::Interior(interior.clone()), config.oracle, &seeds)?;
            responsive_fw_run(&mut env, &interior, &mut bank, &plan, &matroid, &seeds)?
        }
        _ => unreachable!("bandit plans always carry an interior"),
    };
    let benchmark = compute_benchmark(&objectives, &config.constraint)?;
    let curve = compute_regret(&trace, benchmark.value);
    Ok(RunOutput {
        config: config.clone(),
        trace,
        benchmark,
        curve,
        constants: first_constants(&objectives),
        wall_clock_secs: start.elapsed().as_secs_f64(),
    })
}

/// Benchmark over the `T_effective` rounds `config` would play.
pub fn benchmark_only(config: &ExperimentConfig) -> Result<(BlockPlan, Benchmark)> {
    config.validate()?;
    let (plan, _) = derive_plan(config)?;
    let seeds = SeedTree::new(config.seed);
    let objectives =
        generate_adversary(&config.objective, config.adversary, &config.constraint, plan.t_effective, &seeds)?;
    Ok((plan, compute_benchmark(&objectives, &config.constraint)?))
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub algorithm: &'static str,
    pub constraint: &'static str,
    pub objective: &'static str,
    pub oracle: &'static str,
    pub seed: u64,
    pub generator: &'static str,
    pub horizon: usize,
    pub t_effective: usize,
    pub params: BlockPlan,
    pub benchmark: Benchmark,
    pub benchmark_mode: &'static str,
    pub cumulative_reward: f64,
    pub final_regret: f64,
    pub regret_per_round: f64,
    pub queries: usize,
    pub truncated: bool,
    pub all_feasible: bool,
    pub infeasible_rounds: usize,
    pub constants: ObjectiveConstants,
    pub wall_clock_secs: f64,
}

impl RunOutput {
    pub fn summary(&self) -> Summary {
        let trace = &self.trace;
        Summary {
            algorithm: trace.algorithm,
            constraint: self.config.constraint.family_name(),
            objective: self.config.objective.name(),
            oracle: self.config.oracle.name(),
            seed: self.config.seed,
            generator: GENERATOR_ID,
            horizon: trace.plan.horizon,
            t_effective: trace.plan.t_effective,
            params: trace.plan,
            benchmark: self.benchmark.clone(),
            benchmark_mode: self.benchmark.mode.as_str(),
            cumulative_reward: trace.cumulative_reward(),
            final_regret: self.curve.final_regret,
            regret_per_round: self.curve.final_regret / trace.len().max(1) as f64,
            queries: trace.queries,
            truncated: trace.truncated,
            all_feasible: trace.all_feasible(),
            infeasible_rounds: trace.records.iter().filter(|r| !r.feasible).count(),
            constants: self.constants,
            wall_clock_secs: self.wall_clock_secs,
        }
    }

    pub fn plot_series(&self) -> PlotSeries {
        PlotSeries {
            label: format!("{} T={}", self.trace.algorithm, self.trace.plan.horizon),
            regret: self.curve.prefix.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OutputPaths {
    pub trace_csv: PathBuf,
    pub summary_json: PathBuf,
    pub plot_svg: PathBuf,
}

/// Writes `<prefix>.csv`, `<prefix>.summary.json` and `<prefix>.svg` into `dir`.
pub fn write_outputs(output: &RunOutput, dir: &Path, prefix: &str) -> Result<OutputPaths> {
    fs::create_dir_all(dir)?;
    let paths = OutputPaths {
        trace_csv: dir.join(format!("{prefix}.csv")),
        summary_json: dir.join(format!("{prefix}.summary.json")),
        plot_svg: dir.join(format!("{prefix}.svg")),
    };
    write_trace_csv(&output.trace, BufWriter::new(fs::File::create(&paths.trace_csv)?))?;
    let summary = serde_json::to_string_pretty(&output.summary()).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(&paths.summary_json, summary + "\n")?;
    let (svg, _) = emit_plot(&[output.plot_series()])?;
    fs::write(&paths.plot_svg, svg)?;
    Ok(paths)
}

/// Writes the plot of several runs plus its slope table.
pub fn write_plot(series: &[PlotSeries], svg_path: &Path, slopes_path: &Path) -> Result<Vec<SlopeRow>> {
    let (svg, rows) = emit_plot(series)?;
    fs::write(svg_path, svg)?;
    write_slope_table(&rows, BufWriter::new(fs::File::create(slopes_path)?))?;
    Ok(rows)
}

/// Machine-readable error report.
pub fn error_json(err: &Error) -> serde_json::Value {
    serde_json::json!({
        "error": err.kind(),
        "message": err.to_string(),
        "exit_code": err.exit_code(),
    })
}
