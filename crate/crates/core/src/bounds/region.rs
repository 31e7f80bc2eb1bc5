use serde::{Deserialize, Serialize};

use super::{theorem2_bound, ChannelWeightTable, EpsTerms};
use crate::error::Result;
use crate::netmodel::{BroadcastNetwork, Partition};

/// `Σ_j coefficients[j] · r_j ≤ rhs`, families in network order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateConstraint {
    pub partition_text: String,
    pub coefficients: Vec<usize>,
    pub rhs: f64,
}

impl RateConstraint {
    /// Another constraint with coefficients at least as large and a right-hand
    /// side no larger implies this one for non-negative rates.
    pub fn dominated_by(&self, other: &RateConstraint) -> bool {
        other.coefficients.iter().zip(&self.coefficients).all(|(o, s)| o >= s) && other.rhs <= self.rhs
    }

    pub fn satisfied_by(&self, rates: &[f64]) -> bool {
        let lhs: f64 = self.coefficients.iter().zip(rates).map(|(&c, r)| c as f64 * r).sum();
        lhs <= self.rhs + 1e-12
    }
}

/// One constraint per partition; vacuous and dominated constraints removed.
/// Among identical constraints the first one is kept.
pub fn rate_region(
    net: &BroadcastNetwork,
    weights: &ChannelWeightTable,
    partitions: &[Partition],
    initial_esq: f64,
    eps: Option<EpsTerms>,
) -> Result<Vec<RateConstraint>> {
    let mut all = Vec::with_capacity(partitions.len());
    for p in partitions {
        let r = theorem2_bound(net, p, weights, initial_esq, eps)?;
        if r.inert {
            continue;
        }
        all.push(RateConstraint { partition_text: r.partition_text.clone(), coefficients: r.coefficients(), rhs: r.rhs });
    }
    let keep: Vec<bool> = (0..all.len())
        .map(|i| !all.iter().enumerate().any(|(j, o)| j != i && all[i].dominated_by(o) && (!o.dominated_by(&all[i]) || j < i)))
        .collect();
    Ok(all.into_iter().zip(keep).filter(|(_, k)| *k).map(|(c, _)| c).collect())
}
