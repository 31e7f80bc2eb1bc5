//! Lower bounds from the aggregated repeater protocol: every channel use
//! yields one qubit GHZ state over its endpoints, and every edge-disjoint
//! Steiner tree of the resulting hypergraph yields one GHZ state among the
//! family.

mod cut;
mod packing;

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netmodel::BroadcastNetwork;

pub use cut::{min_steiner_cut, CutResult};
pub use packing::{
    aggregated_rate, brute_force_packing, connects, is_minimal_tree, pack_steiner_trees, AggregatedRate, PackingMethod, PackingResult,
    SteinerTree, BRUTE_FORCE_LIMIT, EXACT_LIMIT,
};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GhzHyperedge {
    pub id: String,
    /// Sorted vertex indices, at least two.
    pub members: Vec<usize>,
}

/// Undirected multi-hypergraph of distributed GHZ states.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GhzHypergraph {
    vertices: Vec<String>,
    edges: Vec<GhzHyperedge>,
}

impl GhzHypergraph {
    pub fn new(vertices: Vec<String>, edges: Vec<(String, Vec<usize>)>) -> Result<Self> {
        let mut g = Self { vertices, edges: Vec::with_capacity(edges.len()) };
        for (id, members) in edges {
            g.push(id, members)?;
        }
        Ok(g)
    }

    /// Convenience constructor from vertex names.
    pub fn from_names(vertices: &[&str], edges: &[(&str, &[&str])]) -> Result<Self> {
        let vs: Vec<String> = vertices.iter().map(|s| s.to_string()).collect();
        let mut g = Self { vertices: vs, edges: vec![] };
        for (id, members) in edges {
            let idx = g.indices(members)?;
            g.push(id.to_string(), idx)?;
        }
        Ok(g)
    }

    fn push(&mut self, id: String, mut members: Vec<usize>) -> Result<()> {
        members.sort_unstable();
        members.dedup();
        if members.len() < 2 {
            return Err(Error::Hypergraph(format!("hyperedge {id} needs at least two members")));
        }
        if let Some(&v) = members.iter().find(|&&v| v >= self.vertices.len()) {
            return Err(Error::Hypergraph(format!("hyperedge {id} references vertex {v}")));
        }
        if self.edges.iter().any(|e| e.id == id) {
            return Err(Error::Hypergraph(format!("duplicate hyperedge id {id}")));
        }
        self.edges.push(GhzHyperedge { id, members });
        Ok(())
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[GhzHyperedge] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn index_of(&self, v: &str) -> Option<usize> {
        self.vertices.iter().position(|x| x == v)
    }

    pub fn indices(&self, names: &[&str]) -> Result<Vec<usize>> {
        names
            .iter()
            .map(|n| self.index_of(n).ok_or_else(|| Error::DanglingVertex { vertex: n.to_string(), context: "hypergraph".into() }))
            .collect()
    }

    pub fn edge_index(&self, id: &str) -> Option<usize> {
        self.edges.iter().position(|e| e.id == id)
    }

    /// Only 2-member hyperedges, i.e. an ordinary multigraph.
    pub fn is_graph(&self) -> bool {
        self.edges.iter().all(|e| e.members.len() == 2)
    }

    /// Sub-hypergraph keeping the edges whose index satisfies `keep`.
    pub fn with_edges(&self, keep: impl Fn(usize) -> bool) -> Self {
        Self {
            vertices: self.vertices.clone(),
            edges: self.edges.iter().enumerate().filter(|(i, _)| keep(*i)).map(|(_, e)| e.clone()).collect(),
        }
    }

    pub(crate) fn check_terminals(&self, s: &[usize]) -> Result<()> {
        let mut distinct = s.to_vec();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() != s.len() || s.len() < 2 {
            return Err(Error::Hypergraph("need at least two distinct terminals".into()));
        }
        if let Some(&v) = s.iter().find(|&&v| v >= self.vertices.len()) {
            return Err(Error::DanglingVertex { vertex: v.to_string(), context: "terminal set".into() });
        }
        Ok(())
    }
}

/// How many GHZ states each channel contributes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Copies {
    /// `floor(avg_uses)` for noiseless channels; noisy channels must be listed.
    #[default]
    FromUses,
    Uniform(u64),
    /// Per-edge counts; edges not listed fall back to `FromUses`.
    PerEdge(BTreeMap<String, u64>),
}

impl Copies {
    /// `uniform:N` or a path to a JSON object `{edge_id: count}`.
    pub fn parse(spec: &str) -> Result<Self> {
        if let Some(n) = spec.strip_prefix("uniform:") {
            return n.trim().parse().map(Copies::Uniform).map_err(|_| Error::Config(format!("bad copy count '{n}'")));
        }
        let text = std::fs::read_to_string(spec)?;
        let map: BTreeMap<String, u64> = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(Copies::PerEdge(map))
    }

    fn for_edge(&self, net: &BroadcastNetwork, i: usize) -> Result<u64> {
        let e = &net.edges()[i];
        match self {
            Copies::Uniform(n) => Ok(*n),
            Copies::PerEdge(m) if m.contains_key(&e.id) => Ok(m[&e.id]),
            _ => {
                if !e.channel.is_isometric() {
                    return Err(Error::Config(format!("edge {} is noisy; give its GHZ copy count explicitly", e.id)));
                }
                Ok(e.avg_uses.floor() as u64)
            }
        }
    }
}

/// One hyperedge `"<edge>#<k>"` over `{tail} ∪ heads` per copy.
pub fn build_ghz_network(net: &BroadcastNetwork, copies: &Copies) -> Result<GhzHypergraph> {
    if let Copies::PerEdge(m) = copies {
        if let Some(id) = m.keys().find(|id| net.edge(id).is_none()) {
            return Err(Error::Config(format!("copies given for unknown edge {id}")));
        }
    }
    let mut edges = Vec::new();
    for i in 0..net.edges().len() {
        let c = copies.for_edge(net, i)?;
        for k in 0..c {
            edges.push((format!("{}#{k}", net.edges()[i].id), net.endpoints(i).to_vec()));
        }
    }
    GhzHypergraph::new(net.vertices().to_vec(), edges)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MergeNote {
    pub merged_id: String,
    /// Members shared by the two inputs; more than one means qubits were spent
    /// without enlarging the state.
    pub overlap: usize,
    pub wasteful: bool,
}

/// Fuses two GHZ hyperedges at a shared vertex into one over the union.
pub fn merge_rule(g: &GhzHypergraph, e1: &str, e2: &str, at: &str) -> Result<(GhzHypergraph, MergeNote)> {
    let i1 = g.edge_index(e1).ok_or_else(|| Error::Hypergraph(format!("no hyperedge {e1}")))?;
    let i2 = g.edge_index(e2).ok_or_else(|| Error::Hypergraph(format!("no hyperedge {e2}")))?;
    if i1 == i2 {
        return Err(Error::Hypergraph("cannot merge a hyperedge with itself".into()));
    }
    let v = g.index_of(at).ok_or_else(|| Error::DanglingVertex { vertex: at.into(), context: "merge".into() })?;
    let (a, b) = (&g.edges[i1].members, &g.edges[i2].members);
    if !a.contains(&v) || !b.contains(&v) {
        return Err(Error::Hypergraph(format!("vertex {at} is not shared by {e1} and {e2}")));
    }
    let overlap = a.iter().filter(|x| b.contains(x)).count();
    let mut members = a.clone();
    members.extend(b.iter().copied());
    let merged_id = format!("{e1}+{e2}");
    let mut edges = g.edges.clone();
    edges[i1] = GhzHyperedge { id: merged_id.clone(), members };
    edges[i1].members.sort_unstable();
    edges[i1].members.dedup();
    edges.remove(i2);
    let out = GhzHypergraph { vertices: g.vertices.clone(), edges };
    Ok((out, MergeNote { merged_id, overlap, wasteful: overlap > 1 }))
}

/// Removes `v` from a hyperedge with at least three members.
pub fn reduce_rule(g: &GhzHypergraph, e: &str, v: &str) -> Result<GhzHypergraph> {
    let i = g.edge_index(e).ok_or_else(|| Error::Hypergraph(format!("no hyperedge {e}")))?;
    let vi = g.index_of(v).ok_or_else(|| Error::DanglingVertex { vertex: v.into(), context: "reduce".into() })?;
    let m = &g.edges[i].members;
    if !m.contains(&vi) {
        return Err(Error::Hypergraph(format!("{v} is not a member of {e}")));
    }
    if m.len() < 3 {
        return Err(Error::Hypergraph(format!("reducing {e} would leave fewer than two members")));
    }
    let mut out = g.clone();
    out.edges[i].members.retain(|&x| x != vi);
    Ok(out)
}

/// Random hypergraph over `n` vertices with `m` hyperedges of 2..=`max_arity`
/// members, for tests and demos.
pub fn random_hypergraph<R: Rng>(rng: &mut R, n: usize, m: usize, max_arity: usize) -> GhzHypergraph {
    let vertices = (0..n).map(|i| format!("v{i}")).collect();
    let max_arity = max_arity.clamp(2, n.max(2));
    let edges = (0..m)
        .map(|k| {
            let arity = rng.random_range(2..=max_arity);
            let mut members: Vec<usize> = (0..n).collect();
            // partial Fisher-Yates
            for j in 0..arity {
                let r = rng.random_range(j..n);
                members.swap(j, r);
            }
            members.truncate(arity);
            (format!("h{k}"), members)
        })
        .collect();
    GhzHypergraph::new(vertices, edges).expect("generator respects invariants")
}

pub(crate) fn incidence(g: &GhzHypergraph) -> Vec<Vec<usize>> {
    let mut inc = vec![Vec::new(); g.num_vertices()];
    for (i, e) in g.edges.iter().enumerate() {
        for &v in &e.members {
            inc[v].push(i);
        }
    }
    inc
}
