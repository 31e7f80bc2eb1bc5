//! Broadcast networks as directed hypergraphs, client families and vertex
//! partitions.

mod dot;
mod partition;

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::entropy::ChannelSpec;
use crate::error::{Error, Result};

pub use dot::export_dot;
pub use partition::{bell_number, enumerate_partitions, enumerate_partitions_with_limit, Partition, PartitionIter, EXHAUSTIVE_LIMIT};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperedge {
    pub id: String,
    pub tail: String,
    pub heads: Vec<String>,
    pub channel: ChannelSpec,
    pub avg_uses: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClientFamily {
    pub id: String,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct NetworkDoc {
    vertices: Vec<String>,
    #[serde(default)]
    edges: Vec<Hyperedge>,
    #[serde(default)]
    families: Vec<ClientFamily>,
}

/// A validated broadcast network. Immutable after construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "NetworkDoc", into = "NetworkDoc")]
pub struct BroadcastNetwork {
    vertices: Vec<String>,
    edges: Vec<Hyperedge>,
    families: Vec<ClientFamily>,
    index: HashMap<String, usize>,
    /// endpoint vertex indices per edge, tail first
    endpoints: Vec<Vec<usize>>,
}

impl TryFrom<NetworkDoc> for BroadcastNetwork {
    type Error = Error;

    fn try_from(doc: NetworkDoc) -> Result<Self> {
        BroadcastNetwork::new(doc.vertices, doc.edges, doc.families)
    }
}

impl From<BroadcastNetwork> for NetworkDoc {
    fn from(n: BroadcastNetwork) -> Self {
        NetworkDoc { vertices: n.vertices, edges: n.edges, families: n.families }
    }
}

impl BroadcastNetwork {
    pub fn new(vertices: Vec<String>, mut edges: Vec<Hyperedge>, families: Vec<ClientFamily>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if v.is_empty() {
                return Err(Error::InvalidNetwork("empty vertex id".into()));
            }
            if index.insert(v.clone(), i).is_some() {
                return Err(Error::InvalidNetwork(format!("duplicate vertex '{v}'")));
            }
        }
        let lookup = |v: &str, context: &str| {
            index.get(v).copied().ok_or_else(|| Error::DanglingVertex { vertex: v.to_string(), context: context.to_string() })
        };
        let mut seen_edges = BTreeSet::new();
        let mut endpoints = Vec::with_capacity(edges.len());
        for e in edges.iter_mut() {
            if !seen_edges.insert(e.id.clone()) {
                return Err(Error::InvalidNetwork(format!("duplicate edge id '{}'", e.id)));
            }
            let ctx = format!("edge {}", e.id);
            if e.heads.is_empty() {
                return Err(Error::InvalidNetwork(format!("edge {} has no heads", e.id)));
            }
            if e.avg_uses < 0.0 || !e.avg_uses.is_finite() {
                return Err(Error::InvalidNetwork(format!("edge {} has invalid avg_uses {}", e.id, e.avg_uses)));
            }
            let mut ends = vec![lookup(&e.tail, &ctx)?];
            for h in &e.heads {
                let hi = lookup(h, &ctx)?;
                if hi == ends[0] {
                    return Err(Error::InvalidNetwork(format!("edge {}: tail {} is also a head", e.id, e.tail)));
                }
                if ends[1..].contains(&hi) {
                    return Err(Error::InvalidNetwork(format!("edge {}: head {h} listed twice", e.id)));
                }
                ends.push(hi);
            }
            match e.channel.num_heads {
                None => e.channel.num_heads = Some(e.heads.len()),
                Some(r) if r != e.heads.len() => {
                    return Err(Error::InvalidNetwork(format!("edge {}: channel has {r} heads, edge lists {}", e.id, e.heads.len())))
                }
                Some(_) => {}
            }
            e.channel.validate().map_err(|err| Error::InvalidNetwork(format!("edge {}: {err}", e.id)))?;
            endpoints.push(ends);
        }
        let mut seen_fams = BTreeSet::new();
        for f in &families {
            if !seen_fams.insert(f.id.clone()) {
                return Err(Error::InvalidNetwork(format!("duplicate family id '{}'", f.id)));
            }
            if f.members.is_empty() {
                return Err(Error::InvalidNetwork(format!("family {} has no members", f.id)));
            }
            let ctx = format!("family {}", f.id);
            let mut m = BTreeSet::new();
            for v in &f.members {
                lookup(v, &ctx)?;
                if !m.insert(v) {
                    return Err(Error::InvalidNetwork(format!("family {}: member {v} listed twice", f.id)));
                }
            }
        }
        Ok(Self { vertices, edges, families, index, endpoints })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: NetworkDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Self::try_from(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network serializes")
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    pub fn families(&self) -> &[ClientFamily] {
        &self.families
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn index_of(&self, v: &str) -> Option<usize> {
        self.index.get(v).copied()
    }

    pub fn edge(&self, id: &str) -> Option<(usize, &Hyperedge)> {
        self.edges.iter().enumerate().find(|(_, e)| e.id == id)
    }

    pub fn family(&self, id: &str) -> Option<&ClientFamily> {
        self.families.iter().find(|f| f.id == id)
    }

    /// Vertex indices of edge `i`: tail first, then heads in order.
    pub fn endpoints(&self, i: usize) -> &[usize] {
        &self.endpoints[i]
    }

    pub fn member_indices(&self, family: &ClientFamily) -> Result<Vec<usize>> {
        family
            .members
            .iter()
            .map(|v| self.index_of(v).ok_or_else(|| Error::DanglingVertex { vertex: v.clone(), context: format!("family {}", family.id) }))
            .collect()
    }

    /// Non-fatal findings, e.g. single-member families that can never
    /// contribute to a bound.
    pub fn warnings(&self) -> Vec<String> {
        self.families
            .iter()
            .filter(|f| f.members.len() < 2)
            .map(|f| format!("family {} has a single member and is inert in every bound", f.id))
            .collect()
    }

    /// Copy of the network without edge `id`.
    pub fn without_edge(&self, id: &str) -> Result<Self> {
        let edges = self.edges.iter().filter(|e| e.id != id).cloned().collect();
        Self::new(self.vertices.clone(), edges, self.families.clone())
    }

    fn check_domain(&self, p: &Partition) -> Result<()> {
        if p.len() != self.vertices.len() {
            return Err(Error::PartitionDomain { expected: self.vertices.len(), got: p.len() });
        }
        Ok(())
    }

    /// Class of the tail followed by the classes of the heads.
    pub fn endpoint_classes(&self, i: usize, p: &Partition) -> Vec<usize> {
        self.endpoints[i].iter().map(|&v| p.class_of(v)).collect()
    }

    fn is_crossing(&self, i: usize, p: &Partition) -> bool {
        let ends = &self.endpoints[i];
        let c0 = p.class_of(ends[0]);
        ends[1..].iter().any(|&v| p.class_of(v) != c0)
    }
}

pub fn load_network(text: &str) -> Result<BroadcastNetwork> {
    BroadcastNetwork::from_json(text)
}

pub fn load_network_file(path: impl AsRef<Path>) -> Result<BroadcastNetwork> {
    load_network(&std::fs::read_to_string(path)?)
}

/// Indices of edges whose endpoints span at least two classes.
pub fn crossing_edge_indices(net: &BroadcastNetwork, p: &Partition) -> Result<Vec<usize>> {
    net.check_domain(p)?;
    Ok((0..net.edges.len()).filter(|&i| net.is_crossing(i, p)).collect())
}

pub fn crossing_edges<'a>(net: &'a BroadcastNetwork, p: &Partition) -> Result<Vec<&'a Hyperedge>> {
    Ok(crossing_edge_indices(net, p)?.into_iter().map(|i| &net.edges[i]).collect())
}

/// Edges local to a single class.
pub fn trivial_edges<'a>(net: &'a BroadcastNetwork, p: &Partition) -> Result<Vec<&'a Hyperedge>> {
    net.check_domain(p)?;
    Ok((0..net.edges.len()).filter(|&i| !net.is_crossing(i, p)).map(|i| &net.edges[i]).collect())
}

/// Number of classes meeting the family, or 0 when that number is below 2.
pub fn n_parts(net: &BroadcastNetwork, family: &ClientFamily, p: &Partition) -> Result<usize> {
    net.check_domain(p)?;
    let members = net.member_indices(family)?;
    Ok(n_parts_indices(&members, p))
}

pub fn n_parts_indices(members: &[usize], p: &Partition) -> usize {
    let hit: BTreeSet<usize> = members.iter().map(|&v| p.class_of(v)).collect();
    if hit.len() < 2 {
        0
    } else {
        hit.len()
    }
}
