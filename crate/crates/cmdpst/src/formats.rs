//! JSON file formats for models, DFAs, strategies, statistics and exports.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use cmdpst_core::ltlf::{Dfa, DfaState};
use cmdpst_core::synthesis::{Memory, StrategyEntry, SynthesisStats};
use cmdpst_core::{
    AcceptanceMode, AtomSet, Cmdpst, Decision, EstimateReport, FiniteMemoryStrategy,
    ModelDescription, ProductCmdpst, PruneReport, StateId, UnrolledMdpst,
};
use serde::{Deserialize, Serialize};

/// Serializes `value` with `indent` spaces, or compactly when `indent` is 0.
pub fn to_json<T: Serialize>(value: &T, indent: usize) -> Result<String> {
    if indent == 0 {
        return Ok(serde_json::to_string(value)?);
    }
    let pad = vec![b' '; indent];
    let mut out = Vec::new();
    let fmt = serde_json::ser::PrettyFormatter::with_indent(&pad);
    let mut ser = serde_json::Serializer::with_formatter(&mut out, fmt);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(out)?)
}

/// Writes JSON to `path`, or to stdout when `path` is `None`.
pub fn write_json<T: Serialize>(path: Option<&Path>, value: &T, indent: usize) -> Result<()> {
    let mut text = to_json(value, indent)?;
    text.push('\n');
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

/// Parses a model file without validating it.
pub fn parse_model(text: &str) -> Result<ModelDescription> {
    Ok(serde_json::from_str(text)?)
}

pub fn read_model_description(path: &Path) -> Result<ModelDescription> {
    parse_model(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))
}

pub fn read_model(path: &Path) -> Result<Cmdpst> {
    Ok(Cmdpst::from_description(&read_model_description(path)?)?)
}

pub fn model_to_json(model: &Cmdpst, indent: usize) -> Result<String> {
    to_json(&model.to_description(), indent)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DfaFile {
    pub atoms: Vec<String>,
    pub states: Vec<usize>,
    pub initial: usize,
    pub accepting: Vec<usize>,
    pub transitions: Vec<DfaEdge>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DfaEdge {
    pub from: usize,
    pub symbol: Vec<String>,
    pub to: usize,
}

impl DfaFile {
    pub fn from_dfa(dfa: &Dfa) -> DfaFile {
        let atoms = dfa.atoms().to_vec();
        let mut transitions = Vec::new();
        for (q, row) in dfa.transitions().iter().enumerate() {
            for (k, t) in row.iter().enumerate() {
                transitions.push(DfaEdge {
                    from: q,
                    symbol: AtomSet(k as u32).names(&atoms),
                    to: t.0,
                });
            }
        }
        DfaFile {
            states: (0..dfa.num_states()).collect(),
            initial: dfa.initial().0,
            accepting: dfa.states().filter(|&q| dfa.is_accepting(q)).map(|q| q.0).collect(),
            atoms,
            transitions,
        }
    }

    /// Rebuilds the DFA, rejecting missing or duplicate `(state, symbol)` entries.
    pub fn to_dfa(&self) -> Result<Dfa> {
        let n = self.states.len();
        if self.states.iter().enumerate().any(|(i, &q)| i != q) {
            bail!("DFA states must be listed as 0..{n}");
        }
        let symbols = 1usize
            .checked_shl(self.atoms.len() as u32)
            .ok_or_else(|| anyhow!("too many atoms"))?;
        let mut table: Vec<Vec<Option<DfaState>>> = vec![vec![None; symbols]; n];
        for e in &self.transitions {
            let set = AtomSet::from_names(&self.atoms, &e.symbol).map_err(|a| anyhow!("unknown atom '{a}' in DFA symbol"))?;
            let row = table
                .get_mut(e.from)
                .ok_or_else(|| anyhow!("transition from unknown state {}", e.from))?;
            let slot = &mut row[set.0 as usize];
            if slot.is_some() {
                bail!("nondeterministic DFA: state {} has two transitions on {:?}", e.from, e.symbol);
            }
            *slot = Some(DfaState(e.to));
        }
        let mut delta = Vec::with_capacity(n);
        for (q, row) in table.into_iter().enumerate() {
            let row: Option<Vec<DfaState>> = row.into_iter().collect();
            delta.push(row.ok_or_else(|| anyhow!("incomplete DFA: state {q} lacks a symbol"))?);
        }
        let mut accepting = vec![false; n];
        for &q in &self.accepting {
            *accepting
                .get_mut(q)
                .ok_or_else(|| anyhow!("accepting state {q} out of range"))? = true;
        }
        Ok(Dfa::from_parts(self.atoms.clone(), DfaState(self.initial), accepting, delta)?)
    }
}

pub fn read_dfa(path: &Path) -> Result<Dfa> {
    let file: DfaFile =
        serde_json::from_str(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))?;
    file.to_dfa()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeName {
    Lag,
    Lookahead,
}

impl From<AcceptanceMode> for ModeName {
    fn from(m: AcceptanceMode) -> Self {
        match m {
            AcceptanceMode::Lag => ModeName::Lag,
            AcceptanceMode::Lookahead => ModeName::Lookahead,
        }
    }
}

impl From<ModeName> for AcceptanceMode {
    fn from(m: ModeName) -> Self {
        match m {
            ModeName::Lag => AcceptanceMode::Lag,
            ModeName::Lookahead => AcceptanceMode::Lookahead,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MemoryJson {
    pub dfa: usize,
    pub level: u32,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecisionJson {
    pub state: String,
    pub dfa: usize,
    pub level: u32,
    pub action: String,
    pub value: f64,
}

pub const STOP: &str = "STOP";

/// Strategy file. It carries its DFA and acceptance mode so that it can be
/// replayed against the model alone.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategyFile {
    pub memory_initial: MemoryJson,
    pub decisions: Vec<DecisionJson>,
    pub value: f64,
    pub mode: ModeName,
    pub dfa: DfaFile,
}

impl StrategyFile {
    pub fn from_strategy(model: &Cmdpst, strategy: &FiniteMemoryStrategy) -> StrategyFile {
        let init = strategy.initial_memory();
        let decisions = strategy
            .entries()
            .map(|e| DecisionJson {
                state: model.state_name(e.state).to_string(),
                dfa: e.memory.dfa.0,
                level: e.memory.level,
                action: match e.decision {
                    Decision::Stop => STOP.to_string(),
                    Decision::Act(a) => model.action_name(a).to_string(),
                },
                value: e.value,
            })
            .collect();
        StrategyFile {
            memory_initial: MemoryJson {
                dfa: init.dfa.0,
                level: init.level,
            },
            decisions,
            value: strategy.value(),
            mode: strategy.mode().into(),
            dfa: DfaFile::from_dfa(strategy.dfa()),
        }
    }

    pub fn to_strategy(&self, model: &Cmdpst) -> Result<FiniteMemoryStrategy> {
        let dfa = self.dfa.to_dfa()?;
        if self.memory_initial.dfa != dfa.initial().0 || self.memory_initial.level != model.cap() {
            bail!("initial memory does not match the DFA's initial state and the model cap");
        }
        let mut entries = Vec::with_capacity(self.decisions.len());
        for d in &self.decisions {
            let state = model
                .state_by_name(&d.state)
                .ok_or_else(|| anyhow!("strategy names unknown state '{}'", d.state))?;
            if d.dfa >= dfa.num_states() || d.level > model.cap() {
                bail!("strategy memory ({}, {}) out of range at '{}'", d.dfa, d.level, d.state);
            }
            let decision = if d.action == STOP {
                Decision::Stop
            } else {
                let a = model
                    .action_by_name(&d.action)
                    .ok_or_else(|| anyhow!("strategy names unknown action '{}'", d.action))?;
                model.choice(state, a)?;
                Decision::Act(a)
            };
            entries.push(StrategyEntry {
                state,
                memory: Memory {
                    dfa: DfaState(d.dfa),
                    level: d.level,
                },
                decision,
                value: d.value,
            });
        }
        Ok(FiniteMemoryStrategy::new(model, dfa, self.mode.into(), entries, self.value)?)
    }
}

pub fn read_strategy(path: &Path, model: &Cmdpst) -> Result<FiniteMemoryStrategy> {
    let file: StrategyFile =
        serde_json::from_str(&read_text(path)?).with_context(|| format!("parsing {}", path.display()))?;
    file.to_strategy(model)
}

#[derive(Debug, Serialize)]
pub struct PruneJson {
    pub states_before: usize,
    pub states_after: usize,
    pub removed_states: usize,
    pub removed_actions: usize,
    pub removed_transitions: usize,
}

impl From<&PruneReport> for PruneJson {
    fn from(r: &PruneReport) -> Self {
        PruneJson {
            states_before: r.states_before,
            states_after: r.states_after,
            removed_states: r.removed_states,
            removed_actions: r.removed_actions,
            removed_transitions: r.removed_transitions,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct StatsJson {
    pub dfa_states: usize,
    pub product_states: usize,
    pub product_transitions: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prune: Option<PruneJson>,
    pub unrolled_states: usize,
    pub unrolled_transitions: usize,
    pub sweeps: usize,
    pub residual: f64,
    /// Milliseconds per stage.
    pub millis: BTreeMap<String, f64>,
    pub total_millis: f64,
}

impl From<&SynthesisStats> for StatsJson {
    fn from(s: &SynthesisStats) -> Self {
        StatsJson {
            dfa_states: s.dfa_states,
            product_states: s.product_states,
            product_transitions: s.product_transitions,
            prune: s.prune.as_ref().map(PruneJson::from),
            unrolled_states: s.unrolled_states,
            unrolled_transitions: s.unrolled_transitions,
            sweeps: s.sweeps,
            residual: s.residual,
            millis: s
                .stages
                .iter()
                .map(|&(k, us)| (k.to_string(), us as f64 / 1000.0))
                .collect(),
            total_millis: s.total_micros() as f64 / 1000.0,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct EstimateJson {
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub exhaustion_count: usize,
    pub truncated: usize,
    pub mean_path_length: f64,
    pub confidence_halfwidth: f64,
}

impl From<&EstimateReport> for EstimateJson {
    fn from(r: &EstimateReport) -> Self {
        EstimateJson {
            runs: r.runs,
            successes: r.successes,
            success_rate: r.success_rate,
            exhaustion_count: r.exhaustion_count,
            truncated: r.truncated,
            mean_path_length: r.mean_path_length,
            confidence_halfwidth: r.confidence_halfwidth,
        }
    }
}

/// The product in model format with its accepting states.
pub fn product_description(product: &ProductCmdpst) -> ModelDescription {
    let m = product.model();
    let mut desc = m.to_description();
    desc.accepting = Some(
        m.states()
            .filter(|&s| product.is_accepting(s))
            .map(|s| m.state_name(s).to_string())
            .collect(),
    );
    desc
}

#[derive(Debug, Serialize)]
pub struct UnrolledOutcome {
    pub prob: f64,
    pub set: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct UnrolledTransition {
    pub from: String,
    pub action: String,
    pub outcomes: Vec<UnrolledOutcome>,
}

/// An unrolled model: states are `product state@level`.
#[derive(Debug, Serialize)]
pub struct UnrolledFile {
    pub states: Vec<String>,
    pub initial: String,
    pub actions: Vec<String>,
    pub transitions: Vec<UnrolledTransition>,
    pub targets: Vec<String>,
}

pub fn unrolled_file(product: &ProductCmdpst, unrolled: &UnrolledMdpst) -> UnrolledFile {
    let pm = product.model();
    let m = unrolled.structure();
    let name = |u: StateId| {
        let (s, c) = unrolled.origin(u);
        format!("{}@{}", pm.state_name(s), c)
    };
    let transitions = m
        .states()
        .flat_map(|u| {
            m.choices(u).iter().map(move |c| UnrolledTransition {
                from: name(u),
                action: pm.action_name(c.action).to_string(),
                outcomes: c
                    .outcomes
                    .iter()
                    .map(|o| UnrolledOutcome {
                        prob: o.prob,
                        set: o.successors.iter().map(|&t| name(t)).collect(),
                    })
                    .collect(),
            })
        })
        .collect();
    UnrolledFile {
        states: m.states().map(name).collect(),
        initial: name(m.initial()),
        actions: pm.action_names().to_vec(),
        transitions,
        targets: m.states().filter(|&u| unrolled.is_target(u)).map(name).collect(),
    }
}
