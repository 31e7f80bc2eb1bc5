use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{build_ghz_network, incidence, min_steiner_cut, Copies, CutResult, GhzHypergraph};
use crate::error::{Error, Result};
use crate::netmodel::BroadcastNetwork;

/// Hyperedge count accepted by the exact packer.
pub const EXACT_LIMIT: usize = 12;
/// Default hyperedge count accepted by the brute-force oracle.
pub const BRUTE_FORCE_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PackingMethod {
    Exact,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SteinerTree {
    pub edge_ids: Vec<String>,
    /// Hyperedge indices into the packed hypergraph.
    pub edges: Vec<usize>,
    /// Vertices touched by the tree, sorted.
    pub vertices: Vec<usize>,
}

impl SteinerTree {
    fn new(g: &GhzHypergraph, mut edges: Vec<usize>) -> Self {
        edges.sort_unstable();
        let mut vertices: Vec<usize> = edges.iter().flat_map(|&e| g.edges()[e].members.iter().copied()).collect();
        vertices.sort_unstable();
        vertices.dedup();
        Self { edge_ids: edges.iter().map(|&e| g.edges()[e].id.clone()).collect(), edges, vertices }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PackingResult {
    pub trees: Vec<SteinerTree>,
    pub count: usize,
    /// Minimum Steiner cut; no packing can exceed it.
    pub upper_certificate: usize,
    pub cut: CutResult,
    pub method: PackingMethod,
    /// `floor(cut / 26)`, only for ordinary graphs (2-member edges).
    pub lau_floor: Option<usize>,
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Whether the listed hyperedges connect every terminal.
pub fn connects(g: &GhzHypergraph, edges: &[usize], s: &[usize]) -> bool {
    connects_iter(g, edges.iter().copied(), s)
}

fn connects_iter(g: &GhzHypergraph, edges: impl Iterator<Item = usize>, s: &[usize]) -> bool {
    if s.len() < 2 {
        return true;
    }
    let mut parent: Vec<usize> = (0..g.num_vertices()).collect();
    for e in edges {
        let m = &g.edges()[e].members;
        let r0 = find(&mut parent, m[0]);
        for &v in &m[1..] {
            let r = find(&mut parent, v);
            parent[r] = r0;
        }
    }
    let root = find(&mut parent, s[0]);
    s[1..].iter().all(|&v| find(&mut parent, v) == root)
}

fn mask_edges(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |b| mask >> b & 1 == 1)
}

/// Connects `s`, and dropping any single hyperedge breaks that.
pub fn is_minimal_tree(g: &GhzHypergraph, edges: &[usize], s: &[usize]) -> bool {
    connects(g, edges, s)
        && (0..edges.len()).all(|i| !connects_iter(g, edges.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, &e)| e), s))
}

fn lau_floor(g: &GhzHypergraph, cut: usize) -> Option<usize> {
    g.is_graph().then_some(cut / 26)
}

/// Maximum number of hyperedge-disjoint Steiner trees spanning `s`.
pub fn pack_steiner_trees(g: &GhzHypergraph, s: &[usize], method: PackingMethod) -> Result<PackingResult> {
    let cut = min_steiner_cut(g, s)?;
    let trees = match method {
        PackingMethod::Exact => exact(g, s, cut.value)?,
        PackingMethod::Greedy => greedy(g, s),
    };
    Ok(PackingResult { count: trees.len(), trees, upper_certificate: cut.value, lau_floor: lau_floor(g, cut.value), cut, method })
}

fn exact(g: &GhzHypergraph, s: &[usize], cut: usize) -> Result<Vec<SteinerTree>> {
    let m = g.edges().len();
    if m > EXACT_LIMIT {
        return Err(Error::HyperedgeLimit { got: m, limit: EXACT_LIMIT });
    }
    let conn: Vec<bool> = (0..1u32 << m).map(|mask| connects_iter(g, mask_edges(mask), s)).collect();
    let mut trees: Vec<u32> =
        (1..1u32 << m).filter(|&mask| conn[mask as usize] && mask_edges(mask).all(|b| !conn[(mask & !(1 << b)) as usize])).collect();
    trees.sort_by_key(|t| (t.count_ones(), *t));
    let min_size = trees.first().map_or(1, |t| t.count_ones() as usize);

    struct Search<'a> {
        trees: &'a [u32],
        m: usize,
        min_size: usize,
        cut: usize,
        best: Vec<u32>,
        cur: Vec<u32>,
    }
    impl Search<'_> {
        fn go(&mut self, start: usize, used: u32) {
            if self.cur.len() > self.best.len() {
                self.best = self.cur.clone();
            }
            let free = self.m - used.count_ones() as usize;
            if self.best.len() >= self.cut || self.cur.len() + free / self.min_size <= self.best.len() {
                return;
            }
            for i in start..self.trees.len() {
                let t = self.trees[i];
                if t & used == 0 {
                    self.cur.push(t);
                    self.go(i + 1, used | t);
                    self.cur.pop();
                    if self.best.len() >= self.cut {
                        return;
                    }
                }
            }
        }
    }
    let mut search = Search { trees: &trees, m, min_size, cut, best: vec![], cur: vec![] };
    search.go(0, 0);
    Ok(search.best.iter().map(|&t| SteinerTree::new(g, mask_edges(t).collect())).collect())
}

/// Breadth-first hyperpath growth from `s[0]`, pruned to a minimal tree,
/// repeated on the remaining hyperedges.
fn greedy(g: &GhzHypergraph, s: &[usize]) -> Vec<SteinerTree> {
    let inc = incidence(g);
    let mut alive = vec![true; g.edges().len()];
    let mut out = Vec::new();
    loop {
        // parent hyperedge and the vertex it was entered from
        let mut via: Vec<Option<(usize, usize)>> = vec![None; g.num_vertices()];
        let mut seen = vec![false; g.num_vertices()];
        let mut used_edge = vec![false; g.edges().len()];
        seen[s[0]] = true;
        let mut q = VecDeque::from([s[0]]);
        while let Some(u) = q.pop_front() {
            for &e in &inc[u] {
                if !alive[e] || used_edge[e] {
                    continue;
                }
                used_edge[e] = true;
                for &w in &g.edges()[e].members {
                    if !seen[w] {
                        seen[w] = true;
                        via[w] = Some((e, u));
                        q.push_back(w);
                    }
                }
            }
        }
        if !s.iter().all(|&t| seen[t]) {
            break;
        }
        let mut edges: Vec<usize> = Vec::new();
        for &t in &s[1..] {
            let mut v = t;
            while let Some((e, from)) = via[v] {
                if !edges.contains(&e) {
                    edges.push(e);
                }
                v = from;
            }
        }
        edges.sort_unstable();
        let mut i = 0;
        while i < edges.len() {
            let rest: Vec<usize> = edges.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, &e)| e).collect();
            if connects(g, &rest, s) {
                edges = rest;
            } else {
                i += 1;
            }
        }
        for &e in &edges {
            alive[e] = false;
        }
        out.push(SteinerTree::new(g, edges));
    }
    out
}

/// Exhaustive maximum packing by memoized recursion over hyperedge subsets.
/// Independent of [`pack_steiner_trees`]; meant as a test oracle.
pub fn brute_force_packing(g: &GhzHypergraph, s: &[usize], limit: usize) -> Result<usize> {
    let m = g.edges().len();
    if m > limit || m > 24 {
        return Err(Error::HyperedgeLimit { got: m, limit: limit.min(24) });
    }
    if s.len() < 2 {
        return Err(Error::Hypergraph("need at least two terminals".into()));
    }
    let conn: Vec<bool> = (0..1u32 << m).map(|mask| connects_iter(g, mask_edges(mask), s)).collect();
    let mut memo: Vec<u8> = vec![u8::MAX; 1 << m];
    fn f(avail: u32, conn: &[bool], memo: &mut [u8]) -> u8 {
        if memo[avail as usize] != u8::MAX {
            return memo[avail as usize];
        }
        let r = if !conn[avail as usize] {
            0
        } else {
            let low = avail & avail.wrapping_neg();
            let mut best = f(avail & !low, conn, memo);
            // every subset of `avail` containing `low`
            let rest = avail & !low;
            let mut sub = rest;
            loop {
                let t = sub | low;
                if conn[t as usize] {
                    best = best.max(1 + f(avail & !t, conn, memo));
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
            best
        };
        memo[avail as usize] = r;
        r
    }
    Ok(f((1u32 << m).wrapping_sub(1), &conn, &mut memo) as usize)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AggregatedRate {
    pub family: String,
    pub hyperedges: usize,
    /// GHZ states among the family per protocol round.
    pub achievable: usize,
    pub packing: PackingResult,
}

/// Builds the GHZ hypergraph of the network and packs Steiner trees over the
/// family.
pub fn aggregated_rate(net: &BroadcastNetwork, family: &str, copies: &Copies, method: PackingMethod) -> Result<AggregatedRate> {
    let fam = net.family(family).ok_or_else(|| Error::Config(format!("unknown family {family}")))?;
    let s = net.member_indices(fam)?;
    let g = build_ghz_network(net, copies)?;
    let packing = pack_steiner_trees(&g, &s, method)?;
    Ok(AggregatedRate { family: family.into(), hyperedges: g.edges().len(), achievable: packing.count, packing })
}
