mod common;

use common::{brute_partitions, random_ideal_network};
use proptest::prelude::*;
use qbnet::bounds::{corollary_bound, rate_region, theorem1_rhs, theorem2_bound, ChannelWeightTable, EpsTerms, Strategy};
use qbnet::entropy::ChannelSearch;
use qbnet::netmodel::{crossing_edge_indices, enumerate_partitions, load_network_file, trivial_edges, Partition};
use qbnet::rng::stream;
use qbnet::Error;
use rand::Rng;

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn random_partition(seed: u64, n: usize) -> Partition {
    let mut rng = stream(seed, "partition");
    let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    Partition::from_classes(&labels)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn crossing_and_trivial_split_the_edges(seed in any::<u64>(), n in 3usize..7, m in 1usize..6) {
        let net = random_ideal_network(&mut stream(seed, "net"), n, m, 3, 2);
        let p = random_partition(seed, n);
        let crossing = crossing_edge_indices(&net, &p).unwrap();
        let trivial: Vec<String> = trivial_edges(&net, &p).unwrap().iter().map(|e| e.id.clone()).collect();
        prop_assert_eq!(crossing.len() + trivial.len(), net.edges().len());
        for i in crossing {
            prop_assert!(!trivial.contains(&net.edges()[i].id));
        }
    }

    #[test]
    fn refining_never_lowers_the_rhs(seed in any::<u64>(), n in 3usize..7, m in 1usize..6) {
        let net = random_ideal_network(&mut stream(seed, "net"), n, m, 3, 2);
        let w = ChannelWeightTable::compute(&net, &ChannelSearch::default()).unwrap();
        let coarse = random_partition(seed, n);
        let v = (seed as usize) % n;
        let fine = coarse.with_move(v, coarse.num_classes());
        prop_assert!(fine.refines(&coarse));
        let a = theorem1_rhs(&net, &coarse, &w, 0.0).unwrap();
        let b = theorem1_rhs(&net, &fine, &w, 0.0).unwrap();
        prop_assert!(b >= a - 1e-9);
    }

    #[test]
    fn deleting_an_edge_never_raises_the_rhs(seed in any::<u64>(), n in 3usize..7, m in 1usize..6) {
        let net = random_ideal_network(&mut stream(seed, "net"), n, m, 3, 2);
        let w = ChannelWeightTable::compute(&net, &ChannelSearch::default()).unwrap();
        let id = net.edges()[(seed as usize) % m].id.clone();
        let smaller = net.without_edge(&id).unwrap();
        for p in enumerate_partitions(n, None).unwrap() {
            prop_assert!(theorem1_rhs(&smaller, &p, &w, 0.0).unwrap() <= theorem1_rhs(&net, &p, &w, 0.0).unwrap() + 1e-12);
        }
    }

    #[test]
    fn exhaustive_never_worse_than_local(seed in any::<u64>(), n in 3usize..8, m in 1usize..7) {
        let net = random_ideal_network(&mut stream(seed, "net"), n, m, 3, 2);
        let w = ChannelWeightTable::compute(&net, &ChannelSearch::default()).unwrap();
        let ex = corollary_bound(&net, "S", &w, &Strategy::Exhaustive, 0.0).unwrap();
        let ls = corollary_bound(&net, "S", &w, &Strategy::Local { seed, restarts: 5, budget: None }, 0.0).unwrap();
        prop_assert!(ex.value <= ls.value + 1e-12);
    }
}

/// Closed form for one noiseless qubit broadcast used once: the weight is the
/// number of classes its endpoints meet (when at least two).
#[test]
fn star_matches_closed_form_oracle() {
    let net = load_network_file(data("star.json")).unwrap();
    let w = ChannelWeightTable::compute(&net, &ChannelSearch::default()).unwrap();
    let got = corollary_bound(&net, "ABC", &w, &Strategy::Exhaustive, 0.0).unwrap();

    // vertices s, A, B, C; the family is A, B, C
    let mut best: Option<(f64, Vec<usize>)> = None;
    for labels in brute_partitions(4) {
        let k = {
            let mut c = labels.clone();
            c.sort_unstable();
            c.dedup();
            c.len()
        };
        let n = {
            let mut c = labels[1..].to_vec();
            c.sort_unstable();
            c.dedup();
            if c.len() >= 2 {
                c.len()
            } else {
                0
            }
        };
        if n == 0 {
            continue;
        }
        let weight = if k >= 2 { k as f64 } else { 0.0 };
        let v = weight / n as f64;
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, labels));
        }
    }
    let (value, _) = best.unwrap();
    assert_eq!(value, 1.0);
    assert!((got.value - value).abs() < 1e-9);
    assert_eq!(got.partition_text, "{s,A,B}|{C}");
    // the discrete partition gives 4 bits over 3 parts
    let d = theorem2_bound(&net, &Partition::discrete(4), &w, 0.0, None).unwrap();
    assert!((d.rhs - 4.0).abs() < 1e-9);
}

#[test]
fn two_client_chain_gives_one_bit_per_use() {
    let net = load_network_file(data("chain.json")).unwrap();
    let w = ChannelWeightTable::compute(&net, &ChannelSearch::default()).unwrap();
    let r = corollary_bound(&net, "AB", &w, &Strategy::Exhaustive, 0.0).unwrap();
    assert!((r.value - 1.0).abs() < 1e-9);
    assert_eq!(r.n, 2);
}

#[test]
fn bottleneck_region_needs_the_joint_constraint() {
    let net = load_network_file(data("bottleneck.json")).unwrap();
    let w = ChannelWeightTable::compute(&net, &ChannelSearch::default()).unwrap();
    let parts: Vec<Partition> = enumerate_partitions(5, None).unwrap().collect();
    let region = rate_region(&net, &w, &parts, 0.0, None).unwrap();
    assert_eq!(region.len(), 3);
    let joint = region.iter().find(|c| c.coefficients.iter().all(|&k| k > 0)).unwrap();
    let singles: Vec<_> = region.iter().filter(|c| c.coefficients.contains(&0)).collect();
    assert_eq!(singles.len(), 2);
    let point = [1.0, 1.0];
    assert!(singles.iter().all(|c| c.satisfied_by(&point)));
    assert!(!joint.satisfied_by(&point));
}

#[test]
fn epsilon_terms() {
    let net = load_network_file(data("star.json")).unwrap();
    let w = ChannelWeightTable::compute(&net, &ChannelSearch::default()).unwrap();
    let p = Partition::discrete(4);
    let r = theorem2_bound(&net, &p, &w, 0.0, Some(EpsTerms { epsilon: 0.1, b: 2.0, g: 0.5 })).unwrap();
    assert!((r.rhs - 4.5 / 0.8).abs() < 1e-12);
    let bad = theorem2_bound(&net, &p, &w, 0.0, Some(EpsTerms { epsilon: 0.5, b: 2.0, g: 0.0 }));
    assert!(matches!(bad, Err(Error::UnboundedConstraint(_))));
}
