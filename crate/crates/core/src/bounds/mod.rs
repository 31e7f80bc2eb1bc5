//! Partition-based upper bounds on GHZ / private-state distribution rates.
//!
//! For a partition `P` the accounting bound reads
//! `E_sq^P(final) ≤ E_sq^P(ρ_0) + Σ_{crossing e} l̄^e · w_e(P)` and, per unit of
//! rate, `Σ_j n_j(P) r_j ≤ (RHS + g) / (1 − bε)`.

mod region;
mod search;
mod weights;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::netmodel::{crossing_edge_indices, n_parts_indices, BroadcastNetwork, Partition};

pub use region::{rate_region, RateConstraint};
pub use search::{corollary_bound, optimize_partition, CorollaryResult, FamilyRequirement, Strategy};
pub use weights::{ChannelWeightTable, WeightEntry, SIGNATURE_LIMIT};

/// Finite-error terms `(ε, b, g(ε))`; `b·ε` must stay below 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpsTerms {
    pub epsilon: f64,
    pub b: f64,
    pub g: f64,
}

impl EpsTerms {
    pub fn apply(&self, rhs: f64) -> Result<f64> {
        let be = self.b * self.epsilon;
        if be.is_nan() || be >= 1.0 {
            return Err(Error::UnboundedConstraint(be));
        }
        Ok((rhs + self.g) / (1.0 - be))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyCoefficient {
    pub family: String,
    pub n: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundReport {
    pub partition: Vec<u32>,
    pub partition_text: String,
    pub families: Vec<FamilyCoefficient>,
    pub crossing_edges: Vec<String>,
    pub weight_sum: f64,
    pub initial_esq: f64,
    pub epsilon_terms: Option<EpsTerms>,
    /// Right-hand side of `Σ_j n_j r_j ≤ rhs`.
    pub rhs: f64,
    /// Every coefficient is zero, so the constraint says nothing.
    pub inert: bool,
}

impl BoundReport {
    pub fn partition(&self) -> Partition {
        Partition::from_classes(&self.partition.iter().map(|&c| c as usize).collect::<Vec<_>>())
    }

    pub fn coefficients(&self) -> Vec<usize> {
        self.families.iter().map(|f| f.n).collect()
    }
}

/// `initial_esq + Σ_{crossing e} avg_uses(e) · weight(e, P)`.
pub fn theorem1_rhs(net: &BroadcastNetwork, p: &Partition, weights: &ChannelWeightTable, initial_esq: f64) -> Result<f64> {
    Ok(initial_esq + weight_sum(net, p, weights)?.0)
}

fn weight_sum(net: &BroadcastNetwork, p: &Partition, weights: &ChannelWeightTable) -> Result<(f64, Vec<usize>)> {
    let crossing = crossing_edge_indices(net, p)?;
    let mut sum = 0.0;
    for &i in &crossing {
        let uses = net.edges()[i].avg_uses;
        if uses > 0.0 {
            sum += uses * weights.weight_for(net, i, p)?;
        }
    }
    Ok((sum, crossing))
}

/// Rate constraint for one partition over every family of the network.
pub fn theorem2_bound(
    net: &BroadcastNetwork,
    p: &Partition,
    weights: &ChannelWeightTable,
    initial_esq: f64,
    eps: Option<EpsTerms>,
) -> Result<BoundReport> {
    let (ws, crossing) = weight_sum(net, p, weights)?;
    let base = initial_esq + ws;
    let rhs = match eps {
        Some(t) => t.apply(base)?,
        None => base,
    };
    let families = net
        .families()
        .iter()
        .map(|f| Ok(FamilyCoefficient { family: f.id.clone(), n: n_parts_indices(&net.member_indices(f)?, p) }))
        .collect::<Result<Vec<_>>>()?;
    let inert = families.iter().all(|f| f.n == 0);
    Ok(BoundReport {
        partition: p.labels().to_vec(),
        partition_text: p.render(net.vertices()),
        families,
        crossing_edges: crossing.iter().map(|&i| net.edges()[i].id.clone()).collect(),
        weight_sum: ws,
        initial_esq,
        epsilon_terms: eps,
        rhs,
        inert,
    })
}
