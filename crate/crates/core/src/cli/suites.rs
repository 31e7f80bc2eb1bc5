//! Randomized self-checks run by `qbnet verify`.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::bounds::ChannelWeightTable;
use crate::entropy::tensor::C64;
use crate::entropy::{
    ghz_state, measure_key, multipartite_cmi, squashed_ent_upper, ChannelSearch, DensityMatrix, PureState, SystemLabeling,
};
use crate::error::Result;
use crate::lower::{pack_steiner_trees, random_hypergraph, PackingMethod};
use crate::netmodel::{load_network, Partition};
use crate::rng::{stream, StreamRng};
use crate::simverify::{
    simulate_merge, simulate_reduce, simulate_tree_extraction, tree_qubits, verify_theorem1_trace, Branch, ProtocolScript, TrackedState,
    QUBIT_CAP,
};

const TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub name: String,
    pub checks: usize,
    pub passed: usize,
    /// Largest deviation seen (violation size or distance from target).
    pub worst: f64,
}

impl SuiteResult {
    pub fn ok(&self) -> bool {
        self.checks == self.passed
    }
}

struct Tally {
    name: &'static str,
    checks: usize,
    passed: usize,
    worst: f64,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self { name, checks: 0, passed: 0, worst: 0.0 }
    }

    /// Records a check whose deviation must stay within `tol`.
    fn check(&mut self, deviation: f64, tol: f64) {
        self.checks += 1;
        if deviation <= tol {
            self.passed += 1;
        }
        self.worst = self.worst.max(deviation);
    }

    fn done(self) -> SuiteResult {
        SuiteResult { name: self.name.into(), checks: self.checks, passed: self.passed, worst: self.worst }
    }
}

fn qubits(labels: &[&str]) -> SystemLabeling {
    SystemLabeling::qubits(labels.iter().copied()).expect("distinct labels")
}

/// Haar-ish unitary from the QR decomposition of a Gaussian matrix.
pub fn random_unitary(d: usize, rng: &mut StreamRng) -> DMatrix<C64> {
    let g = DMatrix::from_fn(d, d, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    g.qr().q()
}

pub fn entropic_suite(seed: u64, trials: usize) -> Result<Vec<SuiteResult>> {
    let mut out = vec![];

    let mut t = Tally::new("ghz_value");
    for m in 2..=4 {
        for d in 2..=3 {
            let rho = ghz_state(m, d)?.to_density();
            let parts: Vec<String> = (1..=m).map(|i| format!("A{i}")).collect();
            let parts: Vec<&str> = parts.iter().map(|s| s.as_str()).collect();
            let v = squashed_ent_upper(&rho, &parts, None)?;
            t.check((v - m as f64 * (d as f64).log2()).abs(), 1e-9);
        }
    }
    out.push(t.done());

    let mut rng = stream(seed, "verify.reduction");
    let mut t = Tally::new("reduction");
    for _ in 0..trials {
        let a = DensityMatrix::random(qubits(&["A"]), 2, &mut rng);
        let bc = DensityMatrix::random(qubits(&["B", "C"]), 4, &mut rng);
        let s = a.tensor(&bc)?;
        let lhs = multipartite_cmi(&s, &["A", "B", "C"], &[])?;
        let rhs = multipartite_cmi(&s, &["B", "C"], &[])?;
        t.check((lhs - rhs).abs(), 1e-9);
    }
    out.push(t.done());

    let mut rng = stream(seed, "verify.grouping");
    let mut t = Tally::new("grouping");
    for _ in 0..trials {
        let s = DensityMatrix::random(qubits(&["A", "B", "C", "E"]), 3, &mut rng);
        let fine = multipartite_cmi(&s, &["A", "B", "C"], &["E"])?;
        let coarse = multipartite_cmi(&s, &["A+B", "C"], &["E"])?;
        t.check(coarse - fine, TOL);
    }
    out.push(t.done());

    let mut rng = stream(seed, "verify.superadditivity");
    let mut t = Tally::new("superadditivity");
    for _ in 0..trials {
        let s = PureState::random(qubits(&["A", "A'", "B", "B'", "E"]), &mut rng);
        let joint = multipartite_cmi(&s, &["A+A'", "B+B'"], &["E"])?;
        let first = multipartite_cmi(&s, &["A", "B"], &["E", "A'", "B'"])?;
        let second = multipartite_cmi(&s, &["A'", "B'"], &["E"])?;
        t.check(first + second - joint, TOL);
    }
    out.push(t.done());

    let mut rng = stream(seed, "verify.chain");
    let mut t = Tally::new("squashing_chain");
    for _ in 0..trials {
        let s = PureState::random(qubits(&["S", "P1", "P2", "Q1", "E1", "E2"]), &mut rng);
        let lhs = multipartite_cmi(&s, &["S", "P1+Q1", "P2"], &["E1", "E2"])?;
        let a = multipartite_cmi(&s, &["S+Q1+E2", "P1", "P2"], &["E1"])?;
        let b = multipartite_cmi(&s, &["S+P1+P2+E1", "Q1"], &["E2"])?;
        t.check(lhs - a - b, TOL);
    }
    out.push(t.done());

    let mut rng = stream(seed, "verify.basis");
    let mut t = Tally::new("basis_invariance");
    for _ in 0..trials {
        let s = DensityMatrix::random(qubits(&["A", "B", "C"]), 2, &mut rng);
        let before = multipartite_cmi(&s, &["A", "B"], &["C"])?;
        let mut r = s.clone();
        for l in ["A", "B", "C"] {
            r = r.conjugate_local(l, &random_unitary(2, &mut rng))?;
        }
        let after = multipartite_cmi(&r, &["A", "B"], &["C"])?;
        t.check((before - after).abs(), 1e-9);
    }
    out.push(t.done());

    let mut t = Tally::new("ghz_key");
    let key = measure_key(&ghz_state(3, 2)?, &["A1", "A2", "A3"])?;
    t.check(if key.is_perfectly_correlated(1e-12) && key.is_uniform_key(1e-12) { 0.0 } else { 1.0 }, 0.0);
    out.push(t.done());
    Ok(out)
}

const TRACE_NET: &str = r#"{
    "vertices": ["A", "B", "C", "D"],
    "edges": [
        {"id": "b", "tail": "A", "heads": ["B", "C"], "channel": {"kind": "ideal_broadcast", "dim": 2}, "avg_uses": 1},
        {"id": "l", "tail": "C", "heads": ["D"], "channel": {"kind": "ideal_broadcast", "dim": 2}, "avg_uses": 1}
    ],
    "families": [{"id": "S", "members": ["A", "B", "D"]}]
}"#;

const TRACE_SCRIPT: &str = r#"{"steps": [
    {"op": "apply_channel", "edge": "b"},
    {"op": "apply_channel", "edge": "l"},
    {"op": "merge", "a": "b#0", "b": "l#0", "at": "C"},
    {"op": "reduce", "register": "b#0+l#0", "vertex": "C"}
]}"#;

pub fn protocol_suite(seed: u64, trials: usize) -> Result<Vec<SuiteResult>> {
    let mut out = vec![];

    let mut t = Tally::new("merge");
    for n in 2..=4 {
        for m in 2..=4 {
            let mut ts = TrackedState::new();
            let a: Vec<String> = (0..n - 1).map(|i| format!("a{i}")).chain(["M".to_string()]).collect();
            let b: Vec<String> = ["M".to_string()].into_iter().chain((1..m).map(|i| format!("b{i}"))).collect();
            ts.add_ghz("r", &a.iter().map(|s| s.as_str()).collect::<Vec<_>>())?;
            ts.add_ghz("s", &b.iter().map(|s| s.as_str()).collect::<Vec<_>>())?;
            for o in 0..2 {
                let (st, rec) = simulate_merge(&ts, "r@M", "s@M", Branch::Forced(o))?;
                t.check((st.ghz_fidelity("r+s")? - 1.0).abs(), 1e-10);
                t.check((rec.probability - 0.5).abs(), 1e-10);
            }
        }
    }
    out.push(t.done());

    let mut t = Tally::new("reduce");
    for n in 3..=4 {
        let mut ts = TrackedState::new();
        let vs: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        ts.add_ghz("r", &vs.iter().map(|s| s.as_str()).collect::<Vec<_>>())?;
        for o in 0..2 {
            let (st, rec) = simulate_reduce(&ts, "r@v0", Branch::Forced(o), true)?;
            t.check((st.ghz_fidelity("r")? - 1.0).abs(), 1e-10);
            t.check((rec.probability - 0.5).abs(), 1e-10);
        }
        // the uncorrected minus branch must be caught
        let (bad, _) = simulate_reduce(&ts, "r@v0", Branch::Forced(1), false)?;
        t.check(bad.ghz_fidelity("r")?, 1e-10);
    }
    out.push(t.done());

    let mut rng = stream(seed, "verify.trees");
    let mut t = Tally::new("tree_extraction");
    for k in 0..trials {
        let g = random_hypergraph(&mut rng, 6, 7, 3);
        let s = [0, 2, 5];
        let p = pack_steiner_trees(&g, &s, PackingMethod::Exact)?;
        for tree in p.trees.iter().filter(|tr| tree_qubits(&g, tr) <= QUBIT_CAP) {
            let r = simulate_tree_extraction(&g, &s, tree, seed.wrapping_add(k as u64))?;
            t.check((r.fidelity - 1.0).abs(), 1e-9);
        }
    }
    out.push(t.done());

    let mut t = Tally::new("trace_budget");
    let net = load_network(TRACE_NET)?;
    let w = ChannelWeightTable::compute(&net, &ChannelSearch { seed, ..Default::default() })?;
    let script = ProtocolScript::from_json(TRACE_SCRIPT)?;
    for p in crate::netmodel::enumerate_partitions(net.num_vertices(), None)? {
        let r = verify_theorem1_trace(&net, &script, &p, &w)?;
        t.check(r.violations as f64, 0.0);
    }
    let single = ProtocolScript::from_json(r#"{"steps": [{"op": "apply_channel", "edge": "b"}]}"#)?;
    let r = verify_theorem1_trace(&net, &single, &Partition::discrete(4), &w)?;
    t.check((r.final_value - r.final_budget).abs(), 1e-6);
    out.push(t.done());
    Ok(out)
}
