//! Naive versus pruned comparison on the warehouse family.

use std::io::Write;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use cmdpst_core::ltlf::parse_ltlf;
use cmdpst_core::synthesis::Clock;
use cmdpst_core::{
    gen_warehouse, synthesize_with, Pipeline, SolveOptions, SynthesisConfig, SynthesisError,
    Task, WarehouseSpec, AcceptanceMode,
};

/// Wall clock backed by [`Instant`].
pub struct StdClock(Instant);

impl StdClock {
    pub fn new() -> StdClock {
        StdClock(Instant::now())
    }
}

impl Default for StdClock {
    fn default() -> Self {
        StdClock::new()
    }
}

impl Clock for StdClock {
    fn now_micros(&self) -> u64 {
        self.0.elapsed().as_micros() as u64
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub repetitions: usize,
    pub timeout: Duration,
    pub seed: u64,
    /// Probability of a shortcut edge per cell.
    pub shortcut_density: f64,
    pub mode: AcceptanceMode,
    pub solve: SolveOptions,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: (4..=10).collect(),
            repetitions: 1,
            timeout: Duration::from_secs(600),
            seed: 0,
            shortcut_density: 0.0,
            mode: AcceptanceMode::Lag,
            solve: SolveOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Measured {
    Done {
        states: usize,
        transitions: usize,
        value: f64,
        millis: f64,
    },
    Timeout,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub pipeline: Pipeline,
    pub seed: u64,
    pub result: Measured,
}

pub fn pipeline_name(p: Pipeline) -> &'static str {
    match p {
        Pipeline::Naive => "naive",
        Pipeline::Pruned => "pruned",
    }
}

fn measure(n: usize, pipeline: Pipeline, cfg: &BenchConfig) -> Result<Measured> {
    let mut spec = WarehouseSpec::benchmark(n);
    spec.seed = cfg.seed;
    spec.shortcut_density = cfg.shortcut_density;
    let (model, formula) = gen_warehouse(&spec)?;
    let formula = parse_ltlf(&formula)?;
    let config = SynthesisConfig {
        pipeline,
        mode: cfg.mode,
        solve: cfg.solve,
    };
    let clock = StdClock::new();
    let deadline = Instant::now() + cfg.timeout;
    let mut abort = || Instant::now() > deadline;
    match synthesize_with(&model, Task::Formula(&formula), &config, &clock, &mut abort) {
        Ok(r) => Ok(Measured::Done {
            states: r.stats.unrolled_states,
            transitions: r.stats.unrolled_transitions,
            value: r.value,
            millis: r.stats.total_micros() as f64 / 1000.0,
        }),
        Err(SynthesisError::Aborted) => Ok(Measured::Timeout),
        Err(e) => Err(e.into()),
    }
}

/// One row per size, repetition and pipeline. The two pipelines' values
/// must agree within 1e-9 before their rows are emitted.
pub fn run_experiment(cfg: &BenchConfig) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::new();
    for &n in &cfg.sizes {
        if n < 2 {
            bail!("warehouse size must be at least 2, got {n}");
        }
        for rep in 0..cfg.repetitions {
            let naive = measure(n, Pipeline::Naive, cfg)?;
            let pruned = measure(n, Pipeline::Pruned, cfg)?;
            if let (Measured::Done { value: a, .. }, Measured::Done { value: b, .. }) = (&naive, &pruned) {
                if (a - b).abs() > 1e-9 {
                    bail!("size {n}: naive value {a} differs from pruned value {b}");
                }
            }
            log::info!("size {n} repetition {rep}: naive {naive:?}, pruned {pruned:?}");
            for (pipeline, result) in [(Pipeline::Naive, naive), (Pipeline::Pruned, pruned)] {
                rows.push(BenchRow {
                    n,
                    pipeline,
                    seed: cfg.seed,
                    result,
                });
            }
        }
    }
    Ok(rows)
}

/// Writes `n,pipeline,states,transitions,value,millis,seed`; timed-out rows
/// carry `TIMEOUT` in the value column and leave the counts empty.
pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "pipeline", "states", "transitions", "value", "millis", "seed"])?;
    for r in rows {
        let (states, transitions, value, millis) = match &r.result {
            Measured::Done {
                states,
                transitions,
                value,
                millis,
            } => (
                states.to_string(),
                transitions.to_string(),
                value.to_string(),
                format!("{millis:.3}"),
            ),
            Measured::Timeout => (String::new(), String::new(), "TIMEOUT".into(), String::new()),
        };
        w.write_record([
            r.n.to_string(),
            pipeline_name(r.pipeline).to_string(),
            states,
            transitions,
            value,
            millis,
            r.seed.to_string(),
        ])?;
    }
    w.flush().context("writing CSV")?;
    Ok(())
}

/// Parses `4..10` (inclusive), `4,6,8` or a single size.
pub fn parse_sizes(text: &str) -> Result<Vec<usize>, String> {
    let bad = || format!("invalid size list '{text}'; use e.g. 4..10 or 4,6,8");
    if let Some((a, b)) = text.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    text.split(',')
        .map(|s| s.trim().parse().map_err(|_| bad()))
        .collect()
}
