use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{canonical_signature, channel_esq, ChannelSearch, ChannelWeight, WeightProvenance};
use crate::error::{Error, Result};
use crate::netmodel::{enumerate_partitions_with_limit, BroadcastNetwork, Partition};

/// Endpoint count above which signatures are no longer enumerated eagerly.
pub const SIGNATURE_LIMIT: usize = 12;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WeightEntry {
    pub edge: String,
    pub signature: Vec<u8>,
    pub value: f64,
    pub provenance: WeightProvenance,
}

/// Channel weights keyed by edge id and the canonical class signature of the
/// edge's endpoints (tail first).
#[derive(Debug, Clone, Default)]
pub struct ChannelWeightTable {
    map: HashMap<String, HashMap<Vec<u8>, (f64, WeightProvenance)>>,
}

impl ChannelWeightTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Manual entry; the signature is canonicalized.
    pub fn insert(&mut self, edge: &str, classes: &[usize], value: f64) {
        self.insert_with(edge, &canonical_signature(classes), value, WeightProvenance::HeuristicEstimate);
    }

    fn insert_with(&mut self, edge: &str, sig: &[u8], value: f64, prov: WeightProvenance) {
        self.map.entry(edge.to_string()).or_default().insert(sig.to_vec(), (value, prov));
    }

    pub fn get(&self, edge: &str, classes: &[usize]) -> Option<f64> {
        let sig = canonical_signature(classes);
        if sig.iter().all(|&c| c == 0) {
            return Some(0.0);
        }
        self.map.get(edge)?.get(&sig).map(|e| e.0)
    }

    pub fn provenance(&self, edge: &str, classes: &[usize]) -> Option<WeightProvenance> {
        let sig = canonical_signature(classes);
        if sig.iter().all(|&c| c == 0) {
            return Some(WeightProvenance::Trivial);
        }
        self.map.get(edge)?.get(&sig).map(|e| e.1)
    }

    /// Weight of edge `i` of `net` under partition `p`.
    pub fn weight_for(&self, net: &BroadcastNetwork, i: usize, p: &Partition) -> Result<f64> {
        let classes = net.endpoint_classes(i, p);
        let id = &net.edges()[i].id;
        self.get(id, &classes).ok_or_else(|| Error::MissingWeight { edge: id.clone(), signature: canonical_signature(&classes) })
    }

    pub fn len(&self) -> usize {
        self.map.values().map(|m| m.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sorted dump, for reports.
    pub fn entries(&self) -> Vec<WeightEntry> {
        let mut out: Vec<WeightEntry> = self
            .map
            .iter()
            .flat_map(|(e, m)| {
                m.iter().map(move |(sig, &(value, provenance))| WeightEntry { edge: e.clone(), signature: sig.clone(), value, provenance })
            })
            .collect();
        out.sort_by(|a, b| (&a.edge, &a.signature).cmp(&(&b.edge, &b.signature)));
        out
    }

    /// Computes every multi-class signature of every edge. Edges that share a
    /// channel description share the computation.
    pub fn compute(net: &BroadcastNetwork, search: &ChannelSearch) -> Result<Self> {
        // unique (channel, signature) jobs in deterministic order
        let mut jobs: BTreeMap<(String, Vec<u8>), usize> = BTreeMap::new();
        let mut per_edge: Vec<(String, String, Vec<u8>)> = Vec::new();
        for e in net.edges() {
            let key = serde_json::to_string(&e.channel)?;
            let n = e.heads.len() + 1;
            for p in enumerate_partitions_with_limit(n, None, SIGNATURE_LIMIT)? {
                if p.num_classes() < 2 {
                    continue;
                }
                let sig: Vec<u8> = p.labels().iter().map(|&c| c as u8).collect();
                let next = jobs.len();
                jobs.entry((key.clone(), sig.clone())).or_insert(next);
                per_edge.push((e.id.clone(), key.clone(), sig));
            }
        }
        let specs: HashMap<String, _> =
            net.edges().iter().map(|e| (serde_json::to_string(&e.channel).unwrap(), e.channel.clone())).collect();
        let list: Vec<(&(String, Vec<u8>), &usize)> = jobs.iter().collect();
        let results: Vec<Result<ChannelWeight>> = list
            .par_iter()
            .map(|((key, sig), _)| {
                let classes: Vec<usize> = sig.iter().map(|&c| c as usize).collect();
                channel_esq(&specs[key], &classes, search)
            })
            .collect();
        let mut solved: HashMap<(String, Vec<u8>), (f64, WeightProvenance)> = HashMap::new();
        for (((key, sig), _), r) in list.into_iter().zip(results) {
            let w = r?;
            solved.insert((key.clone(), sig.clone()), (w.value, w.provenance));
        }
        let mut table = Self::new();
        for (edge, key, sig) in per_edge {
            let (v, prov) = solved[&(key, sig.clone())];
            table.insert_with(&edge, &sig, v, prov);
        }
        Ok(table)
    }

    /// True when every stored weight came out certified.
    pub fn all_exact(&self) -> bool {
        self.map.values().flat_map(|m| m.values()).all(|e| e.1 != WeightProvenance::HeuristicEstimate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netmodel::load_network;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    const STAR: &str = r#"{
        "vertices": ["s", "A", "B", "C"],
        "edges": [{"id": "e", "tail": "s", "heads": ["A", "B", "C"], "channel": {"kind": "ideal_broadcast", "dim": 2}, "avg_uses": 1}],
        "families": [{"id": "S", "members": ["A", "B", "C"]}]
    }"#;

    #[test]
    fn ideal_star_weights_are_class_counts() {
        let net = load_network(STAR).unwrap();
        let t = ChannelWeightTable::compute(&net, &ChannelSearch::default()).unwrap();
        // B(4) - 1 multi-class signatures
        assert_eq!(t.len(), 14);
        assert!(t.all_exact());
        for p in enumerate_partitions_with_limit(4, None, 4).unwrap() {
            let classes: Vec<usize> = p.labels().iter().map(|&c| c as usize).collect();
            let want = if p.num_classes() < 2 { 0.0 } else { p.num_classes() as f64 };
            assert_abs_diff_eq!(t.get("e", &classes).unwrap(), want, epsilon = 1e-9);
        }
    }

    #[test]
    fn missing_entries_are_errors() {
        let net = load_network(STAR).unwrap();
        let t = ChannelWeightTable::new();
        assert!(matches!(t.weight_for(&net, 0, &Partition::discrete(4)), Err(Error::MissingWeight { .. })));
        assert_eq!(t.weight_for(&net, 0, &Partition::single(4)).unwrap(), 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn coarsening_never_increases_weight(labels in proptest::collection::vec(0usize..4, 3..=4), a in 0usize..4, b in 0usize..4, d in 2usize..4) {
            let spec = crate::entropy::ChannelSpec::ideal(d, labels.len() - 1);
            let s = ChannelSearch::default();
            let fine = Partition::from_classes(&labels);
            let coarse = fine.with_merge(a % fine.num_classes(), b % fine.num_classes());
            let cl = |p: &Partition| p.labels().iter().map(|&c| c as usize).collect::<Vec<_>>();
            let wf = channel_esq(&spec, &cl(&fine), &s).unwrap().value;
            let wc = channel_esq(&spec, &cl(&coarse), &s).unwrap().value;
            prop_assert!(wc <= wf + 1e-9);
        }
    }
}
