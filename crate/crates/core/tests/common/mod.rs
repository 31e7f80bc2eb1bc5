#![allow(dead_code)]

use qbnet::entropy::ChannelSpec;
use qbnet::netmodel::{BroadcastNetwork, ClientFamily, Hyperedge};
use rand::seq::SliceRandom;
use rand::Rng;

/// Random network of noiseless qubit broadcasts with integer use counts and
/// one family of `family_size` random members.
pub fn random_ideal_network<R: Rng>(rng: &mut R, n: usize, m: usize, max_heads: usize, family_size: usize) -> BroadcastNetwork {
    let vertices: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let edges = (0..m)
        .map(|k| {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            let heads = rng.random_range(1..=max_heads.min(n - 1));
            Hyperedge {
                id: format!("e{k}"),
                tail: vertices[order[0]].clone(),
                heads: order[1..=heads].iter().map(|&v| vertices[v].clone()).collect(),
                channel: ChannelSpec::ideal(2, heads),
                avg_uses: rng.random_range(1..=2) as f64,
            }
        })
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let members = order[..family_size].iter().map(|&v| vertices[v].clone()).collect();
    BroadcastNetwork::new(vertices, edges, vec![ClientFamily { id: "S".into(), members }]).expect("generator respects invariants")
}

/// Every set partition of `0..n` as canonical label vectors, found by
/// filtering all `n^n` labelings. Slow but obviously complete.
pub fn brute_partitions(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let total = n.pow(n as u32);
    for mut code in 0..total {
        let mut labels = vec![0; n];
        for l in labels.iter_mut().rev() {
            *l = code % n;
            code /= n;
        }
        let mut seen: Vec<usize> = vec![];
        let canonical: Vec<usize> = labels
            .iter()
            .map(|l| match seen.iter().position(|s| s == l) {
                Some(p) => p,
                None => {
                    seen.push(*l);
                    seen.len() - 1
                }
            })
            .collect();
        if canonical == labels {
            out.push(labels);
        }
    }
    out
}
