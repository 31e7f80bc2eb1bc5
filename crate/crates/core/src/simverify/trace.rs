use serde::{Deserialize, Serialize};

use super::{Branch, OutcomeRecord, TrackedState};
use crate::bounds::ChannelWeightTable;
use crate::entropy::ChannelKind;
use crate::error::{Error, Result};
use crate::netmodel::{BroadcastNetwork, Partition};
use crate::rng::StreamRng;
use rand::SeedableRng;

const SLACK: f64 = 1e-9;

/// A GHZ state present before the protocol starts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegisterInit {
    pub id: String,
    pub vertices: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum ScriptStep {
    /// One use of a network edge; the output register defaults to
    /// `<edge>#<k>` for the k-th use.
    ApplyChannel {
        edge: String,
        register: Option<String>,
    },
    Merge {
        a: String,
        b: String,
        at: String,
    },
    Reduce {
        register: String,
        vertex: String,
    },
    Measure {
        register: String,
        vertex: String,
        outcome: Option<u8>,
    },
    Discard {
        register: String,
        vertex: String,
    },
}

/// Linear protocol: initial registers, then steps in order.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ProtocolScript {
    #[serde(default)]
    pub registers: Vec<RegisterInit>,
    pub steps: Vec<ScriptStep>,
    #[serde(default)]
    pub seed: u64,
}

impl ProtocolScript {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Script(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub index: usize,
    pub op: String,
    /// `Σ_c H(c) − H(all held qubits)`; equals the partition entanglement
    /// exactly while the held state is pure.
    pub value: f64,
    pub budget: f64,
    pub exact: bool,
    pub outcome: Option<OutcomeRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    pub partition: String,
    pub initial: f64,
    pub steps: Vec<StepRecord>,
    pub final_value: f64,
    pub final_budget: f64,
    /// Exact values above the budget.
    pub violations: usize,
    /// Surrogate values above the budget; the surrogate is only an upper
    /// estimate, so these decide nothing.
    pub inconclusive: usize,
    /// No exact value increased across a step without channel use.
    pub locc_monotone: bool,
}

fn value(ts: &TrackedState, net: &BroadcastNetwork, p: &Partition) -> Result<(f64, bool)> {
    let mut classes: Vec<Vec<usize>> = vec![vec![]; p.num_classes()];
    let mut held = vec![];
    let mut exact = true;
    for (i, q) in ts.qubits().iter().enumerate() {
        match &q.owner {
            Some(v) => {
                let vi = net.index_of(v).ok_or_else(|| Error::DanglingVertex { vertex: v.clone(), context: "trace".into() })?;
                classes[p.class_of(vi)].push(i);
                held.push(i);
            }
            None => exact = false,
        }
    }
    let sum: f64 = classes.iter().filter(|c| !c.is_empty()).map(|c| ts.entropy(c)).sum();
    let joint = if exact { 0.0 } else { ts.entropy(&held) };
    Ok((sum - joint, exact))
}

/// Replays `script` on a state vector and checks, after every step, the
/// partition entanglement of the held state against the running budget
/// `initial + Σ_uses w_e(p)`. Only noiseless qubit channels can be replayed.
pub fn verify_theorem1_trace(
    net: &BroadcastNetwork,
    script: &ProtocolScript,
    p: &Partition,
    weights: &ChannelWeightTable,
) -> Result<TraceReport> {
    if p.len() != net.num_vertices() {
        return Err(Error::PartitionDomain { expected: net.num_vertices(), got: p.len() });
    }
    let mut rng = StreamRng::from_seed(crate::rng::derive_seed(script.seed, "simverify.trace"));
    let mut ts = TrackedState::new();
    for r in &script.registers {
        for v in &r.vertices {
            if net.index_of(v).is_none() {
                return Err(Error::Script(format!("register {} uses unknown vertex {v}", r.id)));
            }
        }
        let vs: Vec<&str> = r.vertices.iter().map(|s| s.as_str()).collect();
        ts.add_ghz(&r.id, &vs)?;
    }
    let (initial, _) = value(&ts, net, p)?;
    let mut budget = initial;
    let mut uses = std::collections::HashMap::<String, usize>::new();
    let mut steps = Vec::with_capacity(script.steps.len());
    let (mut violations, mut inconclusive) = (0, 0);
    let mut locc_monotone = true;
    let mut prev = (initial, true);
    for (index, step) in script.steps.iter().enumerate() {
        let mut outcome = None;
        let op = match step {
            ScriptStep::ApplyChannel { edge, register } => {
                let (i, e) = net.edge(edge).ok_or_else(|| Error::Script(format!("unknown edge {edge}")))?;
                if e.channel.kind != ChannelKind::IdealBroadcast || e.channel.dim != 2 {
                    return Err(Error::Script(format!("edge {edge} is not a noiseless qubit channel")));
                }
                let k = uses.entry(edge.clone()).or_insert(0);
                let reg = register.clone().unwrap_or_else(|| format!("{edge}#{k}"));
                *k += 1;
                let heads: Vec<&str> = e.heads.iter().map(|s| s.as_str()).collect();
                ts.add_channel_ghz(&e.channel, &reg, &e.tail, &heads)?;
                budget += weights.weight_for(net, i, p)?;
                "apply_channel"
            }
            ScriptStep::Merge { a, b, at } => {
                let q1 = ts.qubit_at(a, at)?;
                let q2 = ts.qubit_at(b, at)?;
                outcome = Some(ts.merge(&q1, &q2, Branch::Sample(&mut rng))?);
                "merge"
            }
            ScriptStep::Reduce { register, vertex } => {
                let q = ts.qubit_at(register, vertex)?;
                outcome = Some(ts.reduce(&q, Branch::Sample(&mut rng), true)?);
                "reduce"
            }
            ScriptStep::Measure { register, vertex, outcome: forced } => {
                let q = ts.qubit_at(register, vertex)?;
                let br = match forced {
                    Some(o) => Branch::Forced(*o),
                    None => Branch::Sample(&mut rng),
                };
                outcome = Some(ts.measure(&q, br)?);
                "measure"
            }
            ScriptStep::Discard { register, vertex } => {
                let q = ts.qubit_at(register, vertex)?;
                ts.discard(&q)?;
                "discard"
            }
        };
        let (v, exact) = value(&ts, net, p)?;
        if v > budget + SLACK {
            if exact {
                violations += 1;
            } else {
                inconclusive += 1;
            }
        }
        if op != "apply_channel" && exact && prev.1 && v > prev.0 + SLACK {
            locc_monotone = false;
        }
        prev = (v, exact);
        steps.push(StepRecord { index, op: op.into(), value: v, budget, exact, outcome });
    }
    Ok(TraceReport {
        partition: p.render(net.vertices()),
        initial,
        final_value: prev.0,
        final_budget: budget,
        steps,
        violations,
        inconclusive,
        locc_monotone,
    })
}
