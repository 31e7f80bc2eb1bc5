use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use super::{Branch, OutcomeRecord, TrackedState, FIDELITY_TOL, QUBIT_CAP};
use crate::entropy::{measure_key, ChannelSpec};
use crate::error::{Error, Result};
use crate::lower::{connects, GhzHypergraph, SteinerTree};
use crate::rng::StreamRng;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtractionReport {
    pub family: Vec<String>,
    pub tree: Vec<String>,
    pub qubits: usize,
    pub merges: Vec<OutcomeRecord>,
    pub reductions: Vec<OutcomeRecord>,
    /// Vertices holding the final register, in qubit order.
    pub holders: Vec<String>,
    pub fidelity: f64,
    /// Measuring the final register in Z gives one shared uniform bit.
    pub key_ok: bool,
}

/// Qubits needed to distribute one GHZ state per tree hyperedge.
pub fn tree_qubits(g: &GhzHypergraph, tree: &SteinerTree) -> usize {
    tree.edges.iter().map(|&i| g.edges()[i].members.len()).sum()
}

/// Distributes one qubit GHZ state per tree hyperedge (an ideal broadcast use
/// from its first member), merges them along the tree, then reduces away
/// every qubit not needed by the family. Measurement outcomes are sampled
/// from `seed`.
pub fn simulate_tree_extraction(g: &GhzHypergraph, family: &[usize], tree: &SteinerTree, seed: u64) -> Result<ExtractionReport> {
    g.check_terminals(family)?;
    if tree.edges.is_empty() || !connects(g, &tree.edges, family) {
        return Err(Error::Simulation("tree does not span the family".into()));
    }
    let need = tree_qubits(g, tree);
    if need > QUBIT_CAP {
        return Err(Error::QubitCap { got: need, cap: QUBIT_CAP });
    }
    let name = |v: usize| g.vertices()[v].as_str();
    let mut rng = StreamRng::from_seed(crate::rng::derive_seed(seed, "simverify.tree"));
    let mut ts = TrackedState::new();
    for &i in &tree.edges {
        let e = &g.edges()[i];
        let heads: Vec<&str> = e.members[1..].iter().map(|&v| name(v)).collect();
        ts.add_channel_ghz(&ChannelSpec::ideal(2, heads.len()), &e.id, name(e.members[0]), &heads)?;
    }

    // grow one register along the tree
    let first = &g.edges()[tree.edges[0]];
    let mut reg = first.id.clone();
    let mut covered: Vec<usize> = first.members.clone();
    let mut pending: Vec<usize> = tree.edges[1..].to_vec();
    let mut merges = vec![];
    while !pending.is_empty() {
        let k = pending
            .iter()
            .position(|&i| g.edges()[i].members.iter().any(|v| covered.contains(v)))
            .ok_or_else(|| Error::Simulation("tree is not connected".into()))?;
        let e = &g.edges()[pending.remove(k)];
        let at = *e.members.iter().find(|v| covered.contains(v)).expect("shared vertex");
        let q1 = ts.qubit_at(&reg, name(at))?;
        let q2 = ts.qubit_at(&e.id, name(at))?;
        merges.push(ts.merge(&q1, &q2, Branch::Sample(&mut rng))?);
        reg = format!("{reg}+{}", e.id);
        covered.extend(e.members.iter().copied());
    }

    // keep exactly one qubit per family member
    let mut reductions = vec![];
    let mut kept: Vec<usize> = vec![];
    for q in ts.register(&reg)?.to_vec() {
        let v = ts.owner(&q)?.and_then(|o| g.index_of(o)).expect("owned qubit");
        if family.contains(&v) && !kept.contains(&v) {
            kept.push(v);
        } else {
            reductions.push(ts.reduce(&q, Branch::Sample(&mut rng), true)?);
        }
    }
    let members = ts.register(&reg)?.to_vec();
    let holders: Vec<String> = members.iter().map(|q| ts.owner(q).map(|o| o.unwrap_or("").to_string())).collect::<Result<_>>()?;
    let mut want: Vec<String> = family.iter().map(|&v| name(v).to_string()).collect();
    let mut got = holders.clone();
    want.sort();
    got.sort();
    if want != got {
        return Err(Error::Simulation(format!("final register held by {got:?}, expected {want:?}")));
    }
    let fidelity = ts.ghz_fidelity(&reg)?;
    if (fidelity - 1.0).abs() > 1e-9 {
        return Err(Error::Simulation(format!("extraction fidelity {fidelity}")));
    }
    let labels: Vec<&str> = members.iter().map(|s| s.as_str()).collect();
    let key = measure_key(&ts.to_pure_state(), &labels)?;
    let key_ok = key.is_perfectly_correlated(FIDELITY_TOL) && key.is_uniform_key(FIDELITY_TOL);
    Ok(ExtractionReport {
        family: family.iter().map(|&v| name(v).to_string()).collect(),
        tree: tree.edge_ids.clone(),
        qubits: need,
        merges,
        reductions,
        holders,
        fidelity,
        key_ok,
    })
}
