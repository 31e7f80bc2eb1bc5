use std::collections::VecDeque;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::GhzHypergraph;
use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutResult {
    pub value: usize,
    /// Hyperedge ids whose removal separates `pair`.
    pub witness: Vec<String>,
    pub pair: (String, String),
}

struct Arc {
    to: usize,
    cap: usize,
}

/// Flow network with one `in → out` node pair (capacity 1) per hyperedge and
/// uncapacitated vertex-to-hyperedge arcs in both directions.
struct FlowNet {
    arcs: Vec<Arc>,
    adj: Vec<Vec<usize>>,
    n: usize,
}

impl FlowNet {
    fn build(g: &GhzHypergraph) -> Self {
        let n = g.num_vertices();
        let m = g.edges().len();
        let inf = m + 1;
        let mut f = FlowNet { arcs: Vec::new(), adj: vec![Vec::new(); n + 2 * m], n };
        for (i, e) in g.edges().iter().enumerate() {
            let (ein, eout) = (n + 2 * i, n + 2 * i + 1);
            f.add(ein, eout, 1);
            for &v in &e.members {
                f.add(v, ein, inf);
                f.add(eout, v, inf);
            }
        }
        f
    }

    fn add(&mut self, a: usize, b: usize, cap: usize) {
        self.adj[a].push(self.arcs.len());
        self.arcs.push(Arc { to: b, cap });
        self.adj[b].push(self.arcs.len());
        self.arcs.push(Arc { to: a, cap: 0 });
    }

    /// Shortest augmenting paths; returns the flow value.
    fn max_flow(&mut self, s: usize, t: usize) -> usize {
        let mut flow = 0;
        loop {
            let mut prev = vec![usize::MAX; self.adj.len()];
            let mut q = VecDeque::from([s]);
            prev[s] = usize::MAX - 1;
            while let Some(u) = q.pop_front() {
                if u == t {
                    break;
                }
                for &a in &self.adj[u] {
                    let arc = &self.arcs[a];
                    if arc.cap > 0 && prev[arc.to] == usize::MAX {
                        prev[arc.to] = a;
                        q.push_back(arc.to);
                    }
                }
            }
            if prev[t] == usize::MAX {
                return flow;
            }
            // unit bottleneck: every augmenting path crosses an edge node
            let mut v = t;
            while v != s {
                let a = prev[v];
                self.arcs[a].cap -= 1;
                self.arcs[a ^ 1].cap += 1;
                v = self.arcs[a ^ 1].to;
            }
            flow += 1;
        }
    }

    fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.adj.len()];
        seen[s] = true;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &a in &self.adj[u] {
                let arc = &self.arcs[a];
                if arc.cap > 0 && !seen[arc.to] {
                    seen[arc.to] = true;
                    q.push_back(arc.to);
                }
            }
        }
        seen
    }
}

fn pair_cut(g: &GhzHypergraph, s: usize, t: usize) -> (usize, Vec<usize>) {
    let mut f = FlowNet::build(g);
    let value = f.max_flow(s, t);
    let seen = f.reachable(s);
    let witness = (0..g.edges().len()).filter(|i| seen[f.n + 2 * i] && !seen[f.n + 2 * i + 1]).collect();
    (value, witness)
}

/// Smallest set of hyperedges whose removal disconnects two terminals.
/// Every Steiner cut leaves some terminal on the far side from `s[0]`, so the
/// minimum over flows from `s[0]` to each other terminal is the global minimum.
pub fn min_steiner_cut(g: &GhzHypergraph, s: &[usize]) -> Result<CutResult> {
    g.check_terminals(s)?;
    let s0 = s[0];
    let cuts: Vec<(usize, Vec<usize>, usize)> = s[1..]
        .par_iter()
        .map(|&t| {
            let (v, w) = pair_cut(g, s0, t);
            (v, w, t)
        })
        .collect();
    let (value, witness, t) = cuts.into_iter().min_by_key(|c| c.0).expect("at least one other terminal");
    let ids = witness.iter().map(|&i| g.edges()[i].id.clone()).collect();
    Ok(CutResult { value, witness: ids, pair: (g.vertices()[s0].clone(), g.vertices()[t].clone()) })
}
