//! Command-line driver.
//!
//! Exit codes: 0 success, 1 domain failure, 2 usage or format error.

use std::ffi::OsString;
use std::fs::File;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use cmdpst_core::ltlf::{compile_dfa, parse_ltlf, Dfa};
use cmdpst_core::oracle::{exact_value, TinyInstanceLimits};
use cmdpst_core::{
    check_beta, check_target_feasible, estimate, feasible_region, prune, synthesize_with,
    validate_model, AcceptanceMode, Cmdpst, NatureKind, Pipeline, SolveOptions, StateId,
    SynthesisConfig, SynthesisError, Task, TargetMode, WarehouseSpec, gen_warehouse,
};
use serde::Serialize;
use serde_json::json;

use crate::bench::{self, BenchConfig, StdClock};
use crate::formats::{self, StrategyFile};

#[derive(Debug, Parser)]
#[command(name = "cmdpst", version, about = "Robust strategy synthesis for consumption MDPs with set-valued transitions")]
pub struct Cli {
    /// Seed for simulation and generated benchmarks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Value iteration stops once the sup-norm change is at most this.
    #[arg(long, global = true, default_value = "1e-10", allow_hyphen_values = true, value_parser = parse_epsilon)]
    pub epsilon: f64,
    /// Value iteration sweep limit.
    #[arg(long, global = true, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_sweeps: u64,
    /// When a product state counts as accepting.
    #[arg(long, global = true, value_enum, default_value_t = ModeArg::Lag)]
    pub acceptance_mode: ModeArg,
    /// Indentation of JSON output; 0 writes compact JSON.
    #[arg(long, global = true, default_value_t = 2)]
    pub json_indent: usize,
    /// Print machine-readable JSON instead of a human summary.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Lag,
    Lookahead,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PipelineArg {
    Naive,
    Pruned,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TargetModeArg {
    Any,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum NatureArg {
    #[value(alias = "worst-case-greedy")]
    Greedy,
    Uniform,
    #[value(alias = "random-mixture")]
    Mixture,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a model file and list every violation.
    Check { model: PathBuf },
    /// Compile an LTLf formula into a DFA.
    Compile {
        formula: String,
        /// Comma-separated alphabet; defaults to the formula's atoms.
        #[arg(long, value_delimiter = ',')]
        atoms: Option<Vec<String>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report the feasible region or check targets against it.
    Feasible {
        model: PathBuf,
        /// Comma-separated target state names.
        #[arg(long, value_delimiter = ',')]
        targets: Option<Vec<String>>,
        #[arg(long, value_enum, default_value_t = TargetModeArg::Any)]
        mode: TargetModeArg,
    },
    /// Restrict a model to its feasible region.
    Prune {
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Synthesize an optimal robust strategy.
    Synthesize(SynthesizeArgs),
    /// Estimate a strategy's success rate by simulation.
    Simulate {
        model: PathBuf,
        strategy: PathBuf,
        #[arg(long, value_enum, default_value_t = NatureArg::Greedy)]
        nature: NatureArg,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        runs: u64,
        /// Defaults to ten times the number of product states.
        #[arg(long)]
        step_limit: Option<usize>,
    },
    /// Benchmark harness.
    Bench {
        #[command(subcommand)]
        family: BenchFamily,
    },
    /// Write a warehouse model: the 4×4 example, or the benchmark grid of `--size`.
    Generate {
        #[arg(long)]
        size: Option<usize>,
        #[arg(long, default_value_t = 0.0)]
        shortcut_density: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cross-check value iteration against the exhaustive oracle.
    Verify {
        model: PathBuf,
        #[arg(long)]
        ltlf: String,
        /// Oracle limits: states,actions,outcomes,set-size.
        #[arg(long, default_value = "6,2,2,2", value_parser = parse_limits)]
        limits: TinyInstanceLimits,
    },
}

#[derive(Debug, Args)]
#[group(id = "task", required = true, multiple = false)]
pub struct TaskArgs {
    /// LTLf formula over the model's atoms.
    #[arg(long, group = "task")]
    pub ltlf: Option<String>,
    /// DFA file in place of a formula.
    #[arg(long, group = "task")]
    pub dfa: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthesizeArgs {
    pub model: PathBuf,
    #[command(flatten)]
    pub task: TaskArgs,
    #[arg(long, value_enum, default_value_t = PipelineArg::Pruned)]
    pub pipeline: PipelineArg,
    /// Fail with exit code 1 unless the value reaches this threshold.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_beta)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// Export the (pruned) product model.
    #[arg(long)]
    pub product_out: Option<PathBuf>,
    /// Export the unrolled model.
    #[arg(long)]
    pub unrolled_out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum BenchFamily {
    /// Naive versus pruned on n×n warehouse grids.
    Warehouse {
        #[arg(long, default_value = "4..10", value_parser = bench::parse_sizes)]
        sizes: std::vec::Vec<usize>,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
        repetitions: u64,
        #[arg(long, default_value_t = 600)]
        timeout_secs: u64,
        #[arg(long, default_value_t = 0.0)]
        shortcut_density: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_epsilon(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(e) if e > 0.0 && e.is_finite() => Ok(e),
        _ => Err(format!("'{s}' is not a positive number; try --epsilon 1e-10")),
    }
}

fn parse_beta(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(b) if (0.0..=1.0).contains(&b) => Ok(b),
        _ => Err(format!("'{s}' is not in [0, 1]; try --beta 0.9")),
    }
}

fn parse_limits(s: &str) -> Result<TinyInstanceLimits, String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| p.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| format!("'{s}' is not a limit list; try --limits 6,2,2,2"))?;
    match parts[..] {
        [max_states, max_actions, max_outcomes, max_set_size] => Ok(TinyInstanceLimits {
            max_states,
            max_actions,
            max_outcomes,
            max_set_size,
        }),
        _ => Err(format!("'{s}' needs four numbers; try --limits 6,2,2,2")),
    }
}

/// A failed command with its exit code.
#[derive(Debug)]
pub enum Failure {
    Domain(anyhow::Error),
    Input(anyhow::Error),
}

type Outcome = Result<(), Failure>;

fn input<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Input(e.into())
}

fn domain<E: Into<anyhow::Error>>(e: E) -> Failure {
    Failure::Domain(e.into())
}

struct Ctx {
    json: bool,
    indent: usize,
    seed: u64,
    mode: AcceptanceMode,
    solve: SolveOptions,
}

impl Ctx {
    fn emit<T: Serialize>(&self, value: &T, human: impl FnOnce() -> String) -> Outcome {
        if self.json {
            formats::write_json(None, value, self.indent).map_err(input)
        } else {
            println!("{}", human());
            Ok(())
        }
    }

    fn write<T: Serialize>(&self, path: &Path, value: &T) -> Outcome {
        formats::write_json(Some(path), value, self.indent).map_err(input)
    }
}

fn load_model(path: &Path) -> Result<Cmdpst, Failure> {
    formats::read_model(path).map_err(input)
}

fn state_ids(model: &Cmdpst, names: &[String]) -> Result<Vec<StateId>, Failure> {
    names
        .iter()
        .map(|n| {
            model
                .state_by_name(n)
                .ok_or_else(|| input(anyhow!("unknown state '{n}'")))
        })
        .collect()
}

fn cmd_check(ctx: &Ctx, path: &Path) -> Outcome {
    let desc = formats::read_model_description(path).map_err(input)?;
    let violations = validate_model(&desc);
    let report = json!({
        "valid": violations.is_empty(),
        "violations": violations
            .iter()
            .map(|v| json!({"location": v.location, "message": v.message}))
            .collect::<Vec<_>>(),
    });
    ctx.emit(&report, || {
        if violations.is_empty() {
            format!("valid: {} states, {} actions", desc.states.len(), desc.actions.len())
        } else {
            let mut s = format!("{} violation(s)", violations.len());
            for v in &violations {
                s.push_str(&format!("\n  {v}"));
            }
            s
        }
    })?;
    if violations.is_empty() {
        Ok(())
    } else {
        Err(domain(anyhow!("model has {} violation(s)", violations.len())))
    }
}

fn cmd_compile(ctx: &Ctx, formula: &str, atoms: Option<Vec<String>>, out: Option<&Path>) -> Outcome {
    let f = parse_ltlf(formula).map_err(input)?;
    let atoms = atoms.unwrap_or_else(|| f.atoms().into_iter().collect());
    let dfa = compile_dfa(&f, &atoms).map_err(domain)?;
    let file = formats::DfaFile::from_dfa(&dfa);
    match out {
        None => formats::write_json(None, &file, ctx.indent).map_err(input),
        Some(p) => {
            ctx.write(p, &file)?;
            let summary = json!({
                "states": dfa.num_states(),
                "accepting": file.accepting.len(),
                "atoms": atoms,
            });
            ctx.emit(&summary, || {
                format!(
                    "DFA with {} states ({} accepting) over [{}] written to {}",
                    dfa.num_states(),
                    file.accepting.len(),
                    atoms.join(", "),
                    p.display()
                )
            })
        }
    }
}

fn cmd_feasible(ctx: &Ctx, path: &Path, targets: Option<Vec<String>>, mode: TargetModeArg) -> Outcome {
    let model = load_model(path)?;
    let name = |s: &StateId| model.state_name(*s).to_string();
    match targets {
        None => {
            let region = feasible_region(&model);
            let states: Vec<_> = region
                .states()
                .map(|s| {
                    json!({
                        "state": name(&s),
                        "min_cost": region.min_cost(s),
                        "actions": region.actions(s).iter().map(|&a| model.action_name(a)).collect::<Vec<_>>(),
                    })
                })
                .collect();
            ctx.emit(&json!({ "region": states }), || {
                format!("{} of {} states are feasible", region.len(), model.num_states())
            })
        }
        Some(names) => {
            let ids = state_ids(&model, &names)?;
            let mode = match mode {
                TargetModeArg::Any => TargetMode::Any,
                TargetModeArg::All => TargetMode::All,
            };
            let r = check_target_feasible(&model, &ids, mode).map_err(input)?;
            let feasible: Vec<String> = r.feasible.iter().map(name).collect();
            let blocked: Vec<String> = r.blocked.iter().map(name).collect();
            let report = json!({"satisfied": r.satisfied, "feasible": feasible, "blocked": blocked});
            ctx.emit(&report, || {
                format!(
                    "{}: feasible [{}], blocked [{}]",
                    if r.satisfied { "satisfied" } else { "not satisfied" },
                    feasible.join(", "),
                    blocked.join(", ")
                )
            })?;
            if r.satisfied {
                Ok(())
            } else {
                Err(domain(anyhow!("target feasibility not satisfied")))
            }
        }
    }
}

fn cmd_prune(ctx: &Ctx, path: &Path, out: Option<&Path>) -> Outcome {
    let model = load_model(path)?;
    let p = prune(&model);
    if let Some(out) = out {
        ctx.write(out, &p.model.to_description())?;
    }
    let report = formats::PruneJson::from(&p.report);
    ctx.emit(&report, || {
        format!(
            "kept {} of {} states; removed {} actions and {} transitions",
            report.states_after, report.states_before, report.removed_actions, report.removed_transitions
        )
    })
}

fn cmd_synthesize(ctx: &Ctx, args: &SynthesizeArgs) -> Outcome {
    let model = load_model(&args.model)?;
    let dfa: Dfa;
    let formula;
    let task = match (&args.task.ltlf, &args.task.dfa) {
        (Some(text), _) => {
            formula = parse_ltlf(text).map_err(input)?;
            Task::Formula(&formula)
        }
        (None, Some(p)) => {
            dfa = formats::read_dfa(p).map_err(input)?;
            Task::Dfa(&dfa)
        }
        (None, None) => unreachable!("clap requires one task source"),
    };
    let pipeline = match args.pipeline {
        PipelineArg::Naive => Pipeline::Naive,
        PipelineArg::Pruned => Pipeline::Pruned,
    };
    let config = SynthesisConfig {
        pipeline,
        mode: ctx.mode,
        solve: ctx.solve,
    };
    let r = synthesize_with(&model, task, &config, &StdClock::new(), &mut || false).map_err(|e| match e {
        SynthesisError::Dfa(_) | SynthesisError::Product(_) => input(e),
        _ => domain(e),
    })?;
    log::info!("synthesis stats: {:?}", r.stats);
    if let Some(p) = &args.out {
        ctx.write(p, &StrategyFile::from_strategy(&model, &r.strategy))?;
    }
    if let Some(p) = &args.stats {
        ctx.write(p, &formats::StatsJson::from(&r.stats))?;
    }
    if let Some(p) = &args.product_out {
        ctx.write(p, &formats::product_description(&r.product))?;
    }
    if let Some(p) = &args.unrolled_out {
        ctx.write(p, &formats::unrolled_file(&r.product, &r.unrolled))?;
    }
    let pipeline_name = bench::pipeline_name(pipeline);
    let summary = json!({
        "value": r.value,
        "pipeline": pipeline_name,
        "dfa_states": r.stats.dfa_states,
        "product_states": r.stats.product_states,
        "unrolled_states": r.stats.unrolled_states,
        "unrolled_transitions": r.stats.unrolled_transitions,
        "sweeps": r.stats.sweeps,
    });
    ctx.emit(&summary, || {
        format!(
            "value {} ({} pipeline, {} unrolled states, {} sweeps)",
            r.value, pipeline_name, r.stats.unrolled_states, r.stats.sweeps
        )
    })?;
    if let Some(beta) = args.beta {
        if !check_beta(r.value, beta).map_err(input)? {
            return Err(domain(anyhow!("beta not met: {} < {}", r.value, beta)));
        }
    }
    Ok(())
}

fn cmd_simulate(
    ctx: &Ctx,
    model_path: &Path,
    strategy_path: &Path,
    nature: NatureArg,
    runs: u64,
    step_limit: Option<usize>,
) -> Outcome {
    let model = load_model(model_path)?;
    let strategy = formats::read_strategy(strategy_path, &model).map_err(input)?;
    let limit = step_limit.unwrap_or(10 * model.num_states() * strategy.dfa().num_states());
    let kind = match nature {
        NatureArg::Greedy => NatureKind::WorstCaseGreedy,
        NatureArg::Uniform => NatureKind::Uniform,
        NatureArg::Mixture => NatureKind::RandomMixture,
    };
    let report = estimate(&model, &strategy, kind, runs as usize, ctx.seed, limit).map_err(input)?;
    let out = formats::EstimateJson::from(&report);
    ctx.emit(&out, || {
        format!(
            "success rate {} ± {} over {} runs; {} exhaustion events, {} truncated",
            report.success_rate, report.confidence_halfwidth, report.runs, report.exhaustion_count, report.truncated
        )
    })
}

fn cmd_bench(ctx: &Ctx, family: &BenchFamily) -> Outcome {
    let BenchFamily::Warehouse {
        sizes,
        repetitions,
        timeout_secs,
        shortcut_density,
        out,
    } = family;
    if !(0.0..=1.0).contains(shortcut_density) {
        return Err(input(anyhow!("--shortcut-density must lie in [0, 1]")));
    }
    let cfg = BenchConfig {
        sizes: sizes.clone(),
        repetitions: *repetitions as usize,
        timeout: Duration::from_secs(*timeout_secs),
        seed: ctx.seed,
        shortcut_density: *shortcut_density,
        mode: ctx.mode,
        solve: ctx.solve,
    };
    let rows = bench::run_experiment(&cfg).map_err(domain)?;
    match out {
        Some(p) => {
            let f = File::create(p)
                .with_context(|| format!("creating {}", p.display()))
                .map_err(input)?;
            bench::write_csv(&rows, f).map_err(input)?;
            eprintln!("wrote {} rows to {}", rows.len(), p.display());
            Ok(())
        }
        None => bench::write_csv(&rows, std::io::stdout()).map_err(input),
    }
}

fn cmd_generate(ctx: &Ctx, size: Option<usize>, density: f64, out: Option<&Path>) -> Outcome {
    if !(0.0..=1.0).contains(&density) {
        return Err(input(anyhow!("--shortcut-density must lie in [0, 1]")));
    }
    let mut spec = match size {
        Some(n) => WarehouseSpec::benchmark(n),
        None => WarehouseSpec::example(),
    };
    spec.shortcut_density = density;
    spec.seed = ctx.seed;
    let (model, formula) = gen_warehouse(&spec).map_err(input)?;
    let desc = model.to_description();
    match out {
        None => formats::write_json(None, &desc, ctx.indent).map_err(input),
        Some(p) => {
            ctx.write(p, &desc)?;
            let summary = json!({"states": model.num_states(), "cap": model.cap(), "formula": formula});
            ctx.emit(&summary, || {
                format!(
                    "{} states, cap {}, default formula \"{formula}\", written to {}",
                    model.num_states(),
                    model.cap(),
                    p.display()
                )
            })
        }
    }
}

fn cmd_verify(ctx: &Ctx, path: &Path, ltlf: &str, limits: &TinyInstanceLimits) -> Outcome {
    let model = load_model(path)?;
    let f = parse_ltlf(ltlf).map_err(input)?;
    let config = SynthesisConfig {
        pipeline: Pipeline::Pruned,
        mode: ctx.mode,
        solve: ctx.solve,
    };
    let r = synthesize_with(&model, Task::Formula(&f), &config, &StdClock::new(), &mut || false)
        .map_err(domain)?;
    let m = r.unrolled.structure();
    let exact = exact_value(m, r.unrolled.targets(), limits).map_err(domain)?;
    let max_diff = m
        .states()
        .map(|u| (exact[u.0] - r.values.value(u)).abs())
        .fold(0.0, f64::max);
    let agree = max_diff <= 1e-9;
    let report = json!({
        "value": r.value,
        "oracle_value": exact[m.initial().0],
        "unrolled_states": m.num_states(),
        "max_abs_diff": max_diff,
        "agree": agree,
    });
    ctx.emit(&report, || {
        format!(
            "value iteration {} vs oracle {} over {} states; max difference {:e}",
            r.value,
            exact[m.initial().0],
            m.num_states(),
            max_diff
        )
    })?;
    if agree {
        Ok(())
    } else {
        Err(domain(anyhow!("value iteration disagrees with the oracle by {max_diff:e}")))
    }
}

pub fn run(cli: Cli) -> Outcome {
    let ctx = Ctx {
        json: cli.json,
        indent: cli.json_indent,
        seed: cli.seed,
        mode: match cli.acceptance_mode {
            ModeArg::Lag => AcceptanceMode::Lag,
            ModeArg::Lookahead => AcceptanceMode::Lookahead,
        },
        solve: SolveOptions {
            epsilon: cli.epsilon,
            max_sweeps: cli.max_sweeps as usize,
        },
    };
    match &cli.command {
        Command::Check { model } => cmd_check(&ctx, model),
        Command::Compile { formula, atoms, out } => cmd_compile(&ctx, formula, atoms.clone(), out.as_deref()),
        Command::Feasible { model, targets, mode } => cmd_feasible(&ctx, model, targets.clone(), *mode),
        Command::Prune { model, out } => cmd_prune(&ctx, model, out.as_deref()),
        Command::Synthesize(args) => cmd_synthesize(&ctx, args),
        Command::Simulate {
            model,
            strategy,
            nature,
            runs,
            step_limit,
        } => cmd_simulate(&ctx, model, strategy, *nature, *runs, *step_limit),
        Command::Bench { family } => cmd_bench(&ctx, family),
        Command::Generate {
            size,
            shortcut_density,
            out,
        } => cmd_generate(&ctx, *size, *shortcut_density, out.as_deref()),
        Command::Verify { model, ltlf, limits } => cmd_verify(&ctx, model, ltlf, limits),
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::new().filter_or("CMDPST_LOG", "warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(Failure::Domain(e)) => {
            eprintln!("{e:#}");
            1
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            2
        }
    }
}
