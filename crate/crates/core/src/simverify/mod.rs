//! State-vector checks of the GHZ merge and reduce rules, of Steiner-tree
//! extraction, and of the entanglement budget along scripted protocols.

mod trace;
mod tree;

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::entropy::state::ghz_state_capped;
use crate::entropy::tensor::{self, C64, ZERO};
use crate::entropy::{apply_isometric_pure, ghz_state_labeled, ChannelKind, ChannelSpec, PureState, SystemLabeling};
use crate::error::{Error, Result};
use crate::rng::StreamRng;

pub use trace::{verify_theorem1_trace, ProtocolScript, RegisterInit, ScriptStep, StepRecord, TraceReport};
pub use tree::{simulate_tree_extraction, tree_qubits, ExtractionReport};

/// Largest number of tracked qubits (state vectors of at most 2^20 entries).
pub const QUBIT_CAP: usize = 20;
pub const FIDELITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Qubit {
    pub label: String,
    /// `None` once the qubit has been discarded into the environment.
    pub owner: Option<String>,
}

/// Which measurement branch to follow.
pub enum Branch<'a> {
    Forced(u8),
    Sample(&'a mut StreamRng),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub qubit: String,
    pub outcome: u8,
    pub probability: f64,
    /// Qubits that received a Pauli correction.
    pub corrected: Vec<String>,
}

/// Pure state of a collection of qubits, each owned by a network vertex and
/// grouped into named GHZ registers.
#[derive(Debug, Clone)]
pub struct TrackedState {
    amps: Vec<C64>,
    qubits: Vec<Qubit>,
    registers: BTreeMap<String, Vec<String>>,
}

impl Default for TrackedState {
    fn default() -> Self {
        Self::new()
    }
}

impl TrackedState {
    pub fn new() -> Self {
        Self { amps: vec![C64::new(1.0, 0.0)], qubits: vec![], registers: BTreeMap::new() }
    }

    pub fn num_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn qubits(&self) -> &[Qubit] {
        &self.qubits
    }

    pub fn registers(&self) -> &BTreeMap<String, Vec<String>> {
        &self.registers
    }

    pub fn register(&self, id: &str) -> Result<&[String]> {
        self.registers.get(id).map(|v| v.as_slice()).ok_or_else(|| Error::Simulation(format!("no register {id}")))
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.qubits.iter().position(|q| q.label == label).ok_or_else(|| Error::UnknownLabel(label.into()))
    }

    pub fn owner(&self, label: &str) -> Result<Option<&str>> {
        Ok(self.qubits[self.position(label)?].owner.as_deref())
    }

    /// Qubit of `register` held at `vertex`.
    pub fn qubit_at(&self, register: &str, vertex: &str) -> Result<String> {
        self.register(register)?
            .iter()
            .find(|l| self.owner(l).ok().flatten() == Some(vertex))
            .cloned()
            .ok_or_else(|| Error::Simulation(format!("register {register} has no qubit at {vertex}")))
    }

    fn register_of(&self, label: &str) -> Option<String> {
        self.registers.iter().find(|(_, m)| m.iter().any(|l| l == label)).map(|(r, _)| r.clone())
    }

    pub fn labeling(&self) -> SystemLabeling {
        SystemLabeling::qubits(self.qubits.iter().map(|q| q.label.clone())).expect("labels are unique")
    }

    pub fn to_pure_state(&self) -> PureState {
        PureState::from_parts_unchecked(self.labeling(), self.amps.clone())
    }

    fn dims(&self) -> Vec<usize> {
        vec![2; self.qubits.len()]
    }

    fn append(&mut self, st: &PureState, owners: &[&str], register: &str) -> Result<()> {
        if self.qubits.len() + owners.len() > QUBIT_CAP {
            return Err(Error::QubitCap { got: self.qubits.len() + owners.len(), cap: QUBIT_CAP });
        }
        if self.registers.contains_key(register) {
            return Err(Error::Simulation(format!("register {register} already exists")));
        }
        let labels: Vec<String> = owners.iter().map(|v| format!("{register}@{v}")).collect();
        for l in &labels {
            if self.qubits.iter().any(|q| &q.label == l) {
                return Err(Error::Simulation(format!("qubit {l} already exists")));
            }
        }
        self.amps = tensor::kron_vec(&self.amps, st.amplitudes());
        for (l, v) in labels.iter().zip(owners) {
            self.qubits.push(Qubit { label: l.clone(), owner: Some(v.to_string()) });
        }
        self.registers.insert(register.to_string(), labels);
        Ok(())
    }

    /// Adds a qubit GHZ state held by `vertices` (one qubit each).
    pub fn add_ghz(&mut self, register: &str, vertices: &[&str]) -> Result<()> {
        if vertices.len() < 2 {
            return Err(Error::Simulation("a GHZ register needs two vertices".into()));
        }
        let labels: Vec<String> = (0..vertices.len()).map(|i| format!("q{i}")).collect();
        let st = ghz_state_capped(&labels, 2, 1 << QUBIT_CAP)?;
        self.append(&st, vertices, register)
    }

    /// One use of a noiseless qubit broadcast channel: the tail keeps half of
    /// a Bell pair and sends the other half through the channel.
    pub fn add_channel_ghz(&mut self, spec: &ChannelSpec, register: &str, tail: &str, heads: &[&str]) -> Result<()> {
        if spec.kind != ChannelKind::IdealBroadcast || spec.dim != 2 {
            return Err(Error::Simulation("state-vector tracking supports ideal qubit broadcast channels only".into()));
        }
        let mut spec = spec.clone();
        spec.num_heads = Some(heads.len());
        let bell = ghz_state_labeled(&["t", "x"], 2)?;
        let outs: Vec<String> = (0..heads.len()).map(|i| format!("y{i}")).collect();
        let st = apply_isometric_pure(&spec, &bell, "x", &outs)?;
        let mut owners = vec![tail];
        owners.extend_from_slice(heads);
        self.append(&st, &owners, register)
    }

    fn apply_1q(&mut self, pos: usize, op: [[f64; 2]; 2]) {
        let m = nalgebra::DMatrix::from_fn(2, 2, |r, c| C64::new(op[r][c], 0.0));
        self.amps = tensor::apply_op_vector(&self.amps, &self.dims(), pos, &m);
    }

    fn x(&mut self, pos: usize) {
        self.apply_1q(pos, [[0.0, 1.0], [1.0, 0.0]]);
    }

    fn z(&mut self, pos: usize) {
        self.apply_1q(pos, [[1.0, 0.0], [0.0, -1.0]]);
    }

    fn h(&mut self, pos: usize) {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        self.apply_1q(pos, [[s, s], [s, -s]]);
    }

    fn bit(&self, pos: usize) -> usize {
        1 << (self.qubits.len() - 1 - pos)
    }

    fn cnot(&mut self, c: usize, t: usize) {
        let (bc, bt) = (self.bit(c), self.bit(t));
        for i in 0..self.amps.len() {
            if i & bc != 0 && i & bt == 0 {
                self.amps.swap(i, i | bt);
            }
        }
    }

    /// Computational-basis measurement; the measured qubit is removed.
    fn measure_z(&mut self, pos: usize, branch: Branch) -> Result<(u8, f64)> {
        let b = self.bit(pos);
        let p1: f64 = self.amps.iter().enumerate().filter(|(i, _)| i & b != 0).map(|(_, a)| a.norm_sqr()).sum();
        let outcome = match branch {
            Branch::Forced(o) => o.min(1),
            Branch::Sample(rng) => u8::from(rng.random::<f64>() < p1),
        };
        let p = if outcome == 1 { p1 } else { 1.0 - p1 };
        if p < 1e-12 {
            return Err(Error::Simulation(format!("outcome {outcome} has zero probability")));
        }
        let scale = 1.0 / p.sqrt();
        let want = if outcome == 1 { b } else { 0 };
        let low = b - 1;
        let mut out = vec![ZERO; self.amps.len() / 2];
        for (i, a) in self.amps.iter().enumerate() {
            if i & b == want {
                // drop the measured bit
                let j = (i & low) | ((i >> 1) & !low);
                out[j] = a * scale;
            }
        }
        self.amps = out;
        Ok((outcome, p))
    }

    fn remove_from_register(&mut self, label: &str) {
        for m in self.registers.values_mut() {
            m.retain(|l| l != label);
        }
    }

    /// Fuses the registers of `q1` and `q2` (held at the same vertex): CNOT
    /// q1→q2, measure q2 in Z, flip the rest of q2's register on outcome 1.
    pub fn merge(&mut self, q1: &str, q2: &str, branch: Branch) -> Result<OutcomeRecord> {
        let (p1, p2) = (self.position(q1)?, self.position(q2)?);
        let o1 = self.qubits[p1].owner.clone();
        if o1.is_none() || o1 != self.qubits[p2].owner {
            return Err(Error::Simulation(format!("{q1} and {q2} are not held at one vertex")));
        }
        let r1 = self.register_of(q1).ok_or_else(|| Error::Simulation(format!("{q1} is in no register")))?;
        let r2 = self.register_of(q2).ok_or_else(|| Error::Simulation(format!("{q2} is in no register")))?;
        if r1 == r2 {
            return Err(Error::Simulation(format!("{q1} and {q2} are in the same register")));
        }
        self.cnot(p1, p2);
        let (outcome, probability) = self.measure_z(p2, branch)?;
        self.qubits.remove(p2);
        let rest: Vec<String> = self.registers[&r2].iter().filter(|l| *l != q2).cloned().collect();
        if outcome == 1 {
            for l in &rest {
                let p = self.position(l)?;
                self.x(p);
            }
        }
        let mut merged = self.registers.remove(&r1).expect("register exists");
        self.registers.remove(&r2);
        merged.extend(rest.iter().cloned());
        self.registers.insert(format!("{r1}+{r2}"), merged);
        Ok(OutcomeRecord { qubit: q2.into(), outcome, probability, corrected: if outcome == 1 { rest } else { vec![] } })
    }

    /// Drops `q` from its register: Hadamard, Z measurement, and a Z on one
    /// remaining member on outcome 1 (skipped when `correct` is false).
    pub fn reduce(&mut self, q: &str, branch: Branch, correct: bool) -> Result<OutcomeRecord> {
        let r = self.register_of(q).ok_or_else(|| Error::Simulation(format!("{q} is in no register")))?;
        if self.registers[&r].len() < 3 {
            return Err(Error::Simulation(format!("register {r} has fewer than three qubits")));
        }
        let p = self.position(q)?;
        self.h(p);
        let (outcome, probability) = self.measure_z(p, branch)?;
        self.qubits.remove(p);
        self.remove_from_register(q);
        let mut corrected = vec![];
        if outcome == 1 && correct {
            let target = self.registers[&r][0].clone();
            let tp = self.position(&target)?;
            self.z(tp);
            corrected.push(target);
        }
        Ok(OutcomeRecord { qubit: q.into(), outcome, probability, corrected })
    }

    /// Z measurement with the outcome kept classically.
    pub fn measure(&mut self, q: &str, branch: Branch) -> Result<OutcomeRecord> {
        let p = self.position(q)?;
        let (outcome, probability) = self.measure_z(p, branch)?;
        self.qubits.remove(p);
        self.remove_from_register(q);
        Ok(OutcomeRecord { qubit: q.into(), outcome, probability, corrected: vec![] })
    }

    /// Hands `q` to the environment: it stays in the global pure state but no
    /// vertex holds it any more.
    pub fn discard(&mut self, q: &str) -> Result<()> {
        let p = self.position(q)?;
        self.qubits[p].owner = None;
        self.remove_from_register(q);
        Ok(())
    }

    /// `⟨GHZ|ρ_reg|GHZ⟩` for the reduced state of a register.
    pub fn ghz_fidelity(&self, register: &str) -> Result<f64> {
        let members = self.register(register)?;
        let mut keep: Vec<usize> = members.iter().map(|l| self.position(l)).collect::<Result<_>>()?;
        keep.sort_unstable();
        let rho = tensor::reduce_vector(&self.amps, &self.dims(), &keep);
        let n = rho.nrows();
        let last = n - 1;
        // GHZ has amplitude 1/√2 at 0…0 and 1…1
        let f = 0.5 * (rho[(0, 0)] + rho[(0, last)] + rho[(last, 0)] + rho[(last, last)]).re;
        Ok(f)
    }

    /// Entropy of the qubits at the listed positions.
    pub fn entropy(&self, keep: &[usize]) -> f64 {
        tensor::vector_marginal_entropy(&self.amps, &self.dims(), keep)
    }
}

/// Clone-and-merge convenience around [`TrackedState::merge`].
pub fn simulate_merge(ts: &TrackedState, q1: &str, q2: &str, branch: Branch) -> Result<(TrackedState, OutcomeRecord)> {
    let mut out = ts.clone();
    let rec = out.merge(q1, q2, branch)?;
    Ok((out, rec))
}

/// Clone-and-reduce convenience around [`TrackedState::reduce`].
pub fn simulate_reduce(ts: &TrackedState, q: &str, branch: Branch, correct: bool) -> Result<(TrackedState, OutcomeRecord)> {
    let mut out = ts.clone();
    let rec = out.reduce(q, branch, correct)?;
    Ok((out, rec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn two_registers(n: usize, m: usize) -> TrackedState {
        // n-qubit GHZ on a0..a_{n-2}, M and m-qubit GHZ on M, b1..b_{m-1}
        let mut ts = TrackedState::new();
        let mut a: Vec<String> = (0..n - 1).map(|i| format!("a{i}")).collect();
        a.push("M".into());
        let mut b: Vec<String> = vec!["M".into()];
        b.extend((1..m).map(|i| format!("b{i}")));
        ts.add_ghz("r", &a.iter().map(|s| s.as_str()).collect::<Vec<_>>()).unwrap();
        ts.add_ghz("s", &b.iter().map(|s| s.as_str()).collect::<Vec<_>>()).unwrap();
        ts
    }

    #[test]
    fn merge_all_branches_all_sizes() {
        for n in 2..=4 {
            for m in 2..=4 {
                let ts = two_registers(n, m);
                for o in 0..2 {
                    let (out, rec) = simulate_merge(&ts, "r@M", "s@M", Branch::Forced(o)).unwrap();
                    assert_abs_diff_eq!(rec.probability, 0.5, epsilon = 1e-10);
                    assert_eq!(out.registers().len(), 1);
                    let reg = out.registers().keys().next().unwrap().clone();
                    assert_eq!(out.register(&reg).unwrap().len(), n + m - 1);
                    assert_abs_diff_eq!(out.ghz_fidelity(&reg).unwrap(), 1.0, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn reduce_all_branches_and_negative_control() {
        for n in 3..=4 {
            let mut ts = TrackedState::new();
            let vs: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
            ts.add_ghz("r", &vs.iter().map(|s| s.as_str()).collect::<Vec<_>>()).unwrap();
            for o in 0..2 {
                let (out, rec) = simulate_reduce(&ts, "r@v1", Branch::Forced(o), true).unwrap();
                assert_abs_diff_eq!(rec.probability, 0.5, epsilon = 1e-10);
                assert_abs_diff_eq!(out.ghz_fidelity("r").unwrap(), 1.0, epsilon = 1e-10);
            }
            let (bad, _) = simulate_reduce(&ts, "r@v1", Branch::Forced(1), false).unwrap();
            assert_abs_diff_eq!(bad.ghz_fidelity("r").unwrap(), 0.0, epsilon = 1e-10);
        }
        let mut ts = TrackedState::new();
        ts.add_ghz("r", &["A", "B"]).unwrap();
        assert!(simulate_reduce(&ts, "r@B", Branch::Forced(0), true).is_err());
    }

    #[test]
    fn channel_use_makes_ghz() {
        let mut ts = TrackedState::new();
        ts.add_channel_ghz(&ChannelSpec::ideal(2, 2), "e", "A", &["B", "C"]).unwrap();
        assert_abs_diff_eq!(ts.ghz_fidelity("e").unwrap(), 1.0, epsilon = 1e-12);
        assert!(ts.add_channel_ghz(&ChannelSpec::dephasing(2, 1, 0.1), "f", "A", &["B"]).is_err());
    }

    #[test]
    fn merge_preconditions() {
        let ts = two_registers(2, 2);
        assert!(simulate_merge(&ts, "r@a0", "s@M", Branch::Forced(0)).is_err());
        let mut big = TrackedState::new();
        let vs: Vec<String> = (0..QUBIT_CAP).map(|i| format!("v{i}")).collect();
        big.add_ghz("r", &vs.iter().map(|s| s.as_str()).collect::<Vec<_>>()).unwrap();
        assert!(matches!(big.add_ghz("s", &["x", "y"]), Err(Error::QubitCap { .. })));
    }
}
