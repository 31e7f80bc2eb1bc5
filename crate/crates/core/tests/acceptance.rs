//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on failure.

#[path = "common/mod.rs"]
mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use qbnet::bounds::{corollary_bound, theorem1_rhs, ChannelWeightTable, Strategy};
use qbnet::entropy::{
    channel_esq, ghz_state, multipartite_cmi, squashed_ent_upper, ChannelSearch, ChannelSpec, DensityMatrix, PureState, SystemLabeling,
};
use qbnet::lower::{
    aggregated_rate, brute_force_packing, min_steiner_cut, pack_steiner_trees, random_hypergraph, Copies, GhzHypergraph, PackingMethod,
};
use qbnet::netmodel::{enumerate_partitions, load_network_file, n_parts_indices};
use qbnet::rng::{stream, StreamRng};
use qbnet::simverify::{simulate_merge, simulate_reduce, simulate_tree_extraction, tree_qubits, Branch, TrackedState, QUBIT_CAP};
use rand::seq::SliceRandom;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, u64);

fn data(name: &str) -> String {
    format!("{}/data/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn qubits(labels: &[&str]) -> SystemLabeling {
    SystemLabeling::qubits(labels.iter().copied()).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn c1() -> Outcome {
    let mut worst: f64 = 0.0;
    for m in 2..=4 {
        for d in 2..=3 {
            let rho = ghz_state(m, d).map_err(|e| e.to_string())?.to_density();
            let parts: Vec<String> = (1..=m).map(|i| format!("A{i}")).collect();
            let parts: Vec<&str> = parts.iter().map(|s| s.as_str()).collect();
            let v = squashed_ent_upper(&rho, &parts, None).map_err(|e| e.to_string())?;
            let dev = (v - m as f64 * (d as f64).log2()).abs();
            worst = worst.max(dev);
            ensure(dev <= 1e-9, || format!("m={m} d={d}: got {v}"))?;
        }
    }
    Ok(format!("6 cases, max deviation {worst:.1e}"))
}

fn c2() -> Outcome {
    let mut rng = stream(2, "acceptance.reduction");
    let mut worst: f64 = 0.0;
    for k in 0..50 {
        let a = DensityMatrix::random(qubits(&["A"]), 2, &mut rng);
        let bc = DensityMatrix::random(qubits(&["B", "C"]), 4, &mut rng);
        let s = a.tensor(&bc).unwrap();
        let lhs = multipartite_cmi(&s, &["A", "B", "C"], &[]).unwrap();
        let rhs = multipartite_cmi(&s, &["B", "C"], &[]).unwrap();
        worst = worst.max((lhs - rhs).abs());
        ensure((lhs - rhs).abs() <= 1e-8, || format!("state {k}: {lhs} vs {rhs}"))?;
    }
    Ok(format!("50 product states, max deviation {worst:.1e}"))
}

fn c3() -> Outcome {
    let mut rng = stream(3, "acceptance.grouping");
    let mut worst = f64::NEG_INFINITY;
    for k in 0..100 {
        let env = rng.random_range(1..=4);
        let s = DensityMatrix::random(qubits(&["A", "B", "C", "E"]), env, &mut rng);
        let fine = multipartite_cmi(&s, &["A", "B", "C"], &["E"]).unwrap();
        let coarse = multipartite_cmi(&s, &["A+B", "C"], &["E"]).unwrap();
        worst = worst.max(coarse - fine);
        ensure(coarse - fine < 1e-8, || format!("state {k}: grouped {coarse} > {fine}"))?;
    }
    Ok(format!("100 states, max violation {worst:.1e}"))
}

fn c4() -> Outcome {
    let mut rng = stream(4, "acceptance.superadditivity");
    let mut worst = f64::NEG_INFINITY;
    for k in 0..100 {
        let s = PureState::random(qubits(&["A", "A'", "B", "B'", "E"]), &mut rng);
        let joint = multipartite_cmi(&s, &["A+A'", "B+B'"], &["E"]).unwrap();
        let split = multipartite_cmi(&s, &["A", "B"], &["E", "A'", "B'"]).unwrap() + multipartite_cmi(&s, &["A'", "B'"], &["E"]).unwrap();
        worst = worst.max(split - joint);
        ensure(split - joint < 1e-8, || format!("state {k}: {split} > {joint}"))?;
    }
    Ok(format!("100 states, max violation {worst:.1e}"))
}

fn c5() -> Outcome {
    let mut rng = stream(5, "acceptance.chain");
    let mut worst = f64::NEG_INFINITY;
    for k in 0..100 {
        let s = PureState::random(qubits(&["S", "P1", "P2", "Q1", "E1", "E2"]), &mut rng);
        let lhs = multipartite_cmi(&s, &["S", "P1+Q1", "P2"], &["E1", "E2"]).unwrap();
        let rhs = multipartite_cmi(&s, &["S+Q1+E2", "P1", "P2"], &["E1"]).unwrap()
            + multipartite_cmi(&s, &["S+P1+P2+E1", "Q1"], &["E2"]).unwrap();
        worst = worst.max(lhs - rhs);
        ensure(lhs - rhs < 1e-8, || format!("state {k}: {lhs} > {rhs}"))?;
    }
    Ok(format!("100 states, max violation {worst:.1e}"))
}

fn c6() -> Outcome {
    let spec = ChannelSpec::ideal(2, 2);
    let s = ChannelSearch::default();
    let discrete = channel_esq(&spec, &[0, 1, 2], &s).map_err(|e| e.to_string())?.value;
    let grouped = channel_esq(&spec, &[0, 1, 1], &s).map_err(|e| e.to_string())?.value;
    ensure((discrete - 3.0).abs() <= 1e-6, || format!("discrete {discrete}"))?;
    ensure((grouped - 2.0).abs() <= 1e-6, || format!("grouped {grouped}"))?;
    Ok(format!("discrete {discrete:.9}, heads grouped {grouped:.9}"))
}

/// Value recorded for the star fixture by enumerating its 15 partitions by
/// hand: the best ratio is 2 bits over 2 parts.
const STAR_FIXTURE: f64 = 1.0;

fn c7() -> Outcome {
    let star = load_network_file(data("star.json")).map_err(|e| e.to_string())?;
    let w = ChannelWeightTable::compute(&star, &ChannelSearch::default()).map_err(|e| e.to_string())?;
    let r = corollary_bound(&star, "ABC", &w, &Strategy::Exhaustive, 0.0).map_err(|e| e.to_string())?;
    ensure(r.value.is_finite() && r.value == STAR_FIXTURE, || format!("star value {}", r.value))?;
    let chain = load_network_file(data("chain.json")).map_err(|e| e.to_string())?;
    let w = ChannelWeightTable::compute(&chain, &ChannelSearch::default()).map_err(|e| e.to_string())?;
    let c = corollary_bound(&chain, "AB", &w, &Strategy::Exhaustive, 0.0).map_err(|e| e.to_string())?;
    // one ideal qubit use per link: at most one Bell pair per round
    ensure((c.value - 1.0).abs() <= 1e-9, || format!("chain value {}", c.value))?;
    Ok(format!("star {} at {}, chain {}", r.value, r.partition_text, c.value))
}

fn connected(n: usize, edges: &[Vec<usize>], s: &[usize]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for e in edges {
        for w in e.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    let root = find(&mut parent, s[0]);
    s.iter().all(|&t| find(&mut parent, t) == root)
}

/// Fewest hyperedges whose removal leaves the terminals disconnected.
fn brute_cut(g: &GhzHypergraph, s: &[usize]) -> usize {
    let m = g.edges().len();
    let mut best = m;
    for mask in 0u32..(1 << m) {
        let k = mask.count_ones() as usize;
        if k >= best {
            continue;
        }
        let rest: Vec<Vec<usize>> = (0..m).filter(|i| mask & (1 << i) == 0).map(|i| g.edges()[i].members.clone()).collect();
        if !connected(g.num_vertices(), &rest, s) {
            best = k;
        }
    }
    best
}

fn terminals(rng: &mut StreamRng, n: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    let k = rng.random_range(2..=3.min(n));
    v.truncate(k);
    v
}

fn c8() -> Outcome {
    let mut rng = stream(8, "acceptance.menger");
    let mut graphs = 0;
    for k in 0..200 {
        let n = rng.random_range(3..=6);
        let m = rng.random_range(1..=10);
        let arity = if k % 2 == 0 { 2 } else { 4 };
        let g = random_hypergraph(&mut rng, n, m, arity);
        let s = terminals(&mut rng, n);
        let flow = min_steiner_cut(&g, &s).map_err(|e| e.to_string())?.value;
        let brute = brute_cut(&g, &s);
        ensure(flow == brute, || format!("instance {k}: flow {flow}, brute force {brute}"))?;
        if g.is_graph() {
            graphs += 1;
            for (i, &u) in s.iter().enumerate() {
                for &v in &s[i + 1..] {
                    let paths = brute_force_packing(&g, &[u, v], 12).map_err(|e| e.to_string())?;
                    let pair = min_steiner_cut(&g, &[u, v]).map_err(|e| e.to_string())?.value;
                    ensure(paths == pair, || format!("instance {k}: {paths} disjoint paths, cut {pair}"))?;
                }
            }
        }
    }
    Ok(format!("200 instances ({graphs} graphs)"))
}

/// Shared corpus for criteria 9 and 10.
fn packing_corpus() -> Vec<(GhzHypergraph, Vec<usize>)> {
    let mut rng = stream(9, "acceptance.packing");
    (0..100)
        .map(|_| {
            let n = rng.random_range(3..=7);
            let m = rng.random_range(1..=12);
            let g = random_hypergraph(&mut rng, n, m, 4);
            let s = terminals(&mut rng, n);
            (g, s)
        })
        .collect()
}

fn c9() -> Outcome {
    let mut total = 0;
    for (k, (g, s)) in packing_corpus().iter().enumerate() {
        let greedy = pack_steiner_trees(g, s, PackingMethod::Greedy).map_err(|e| e.to_string())?.count;
        let exact = pack_steiner_trees(g, s, PackingMethod::Exact).map_err(|e| e.to_string())?;
        let brute = brute_force_packing(g, s, 12).map_err(|e| e.to_string())?;
        let cut = min_steiner_cut(g, s).map_err(|e| e.to_string())?.value;
        ensure(greedy <= exact.count && exact.count == brute && exact.count <= cut, || {
            format!("instance {k}: greedy {greedy}, exact {}, brute {brute}, cut {cut}", exact.count)
        })?;
        total += exact.count;
    }
    let tri = GhzHypergraph::from_names(&["A", "B", "C"], &[("ab", &["A", "B"]), ("bc", &["B", "C"]), ("ca", &["C", "A"])]).unwrap();
    let t = pack_steiner_trees(&tri, &[0, 1, 2], PackingMethod::Exact).map_err(|e| e.to_string())?.count;
    ensure(t == 1, || format!("triangle packs {t}"))?;
    Ok(format!("100 instances, {total} trees in total, triangle 1"))
}

fn c10() -> Outcome {
    let mut worst: f64 = 0.0;
    for n in 2..=4 {
        for m in 2..=4 {
            let mut ts = TrackedState::new();
            let a: Vec<String> = (0..n - 1).map(|i| format!("a{i}")).chain(["M".into()]).collect();
            let b: Vec<String> = ["M".to_string()].into_iter().chain((1..m).map(|i| format!("b{i}"))).collect();
            ts.add_ghz("r", &a.iter().map(|s| s.as_str()).collect::<Vec<_>>()).unwrap();
            ts.add_ghz("s", &b.iter().map(|s| s.as_str()).collect::<Vec<_>>()).unwrap();
            for o in 0..2 {
                let (st, _) = simulate_merge(&ts, "r@M", "s@M", Branch::Forced(o)).map_err(|e| e.to_string())?;
                let f = st.ghz_fidelity("r+s").unwrap();
                worst = worst.max((f - 1.0).abs());
                ensure((f - 1.0).abs() <= 1e-10, || format!("merge {n}+{m} branch {o}: {f}"))?;
            }
        }
    }
    for n in 3..=4 {
        let mut ts = TrackedState::new();
        let vs: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        ts.add_ghz("r", &vs.iter().map(|s| s.as_str()).collect::<Vec<_>>()).unwrap();
        for o in 0..2 {
            let (st, _) = simulate_reduce(&ts, "r@v1", Branch::Forced(o), true).map_err(|e| e.to_string())?;
            let f = st.ghz_fidelity("r").unwrap();
            worst = worst.max((f - 1.0).abs());
            ensure((f - 1.0).abs() <= 1e-10, || format!("reduce {n} branch {o}: {f}"))?;
        }
    }
    let mut trees = 0;
    for (k, (g, s)) in packing_corpus().iter().enumerate() {
        let p = pack_steiner_trees(g, s, PackingMethod::Exact).map_err(|e| e.to_string())?;
        for t in p.trees.iter().filter(|t| tree_qubits(g, t) <= QUBIT_CAP) {
            let r = simulate_tree_extraction(g, s, t, k as u64).map_err(|e| e.to_string())?;
            worst = worst.max((r.fidelity - 1.0).abs());
            ensure((r.fidelity - 1.0).abs() <= 1e-9, || format!("instance {k}: fidelity {}", r.fidelity))?;
            trees += 1;
        }
    }
    Ok(format!("merge/reduce all branches, {trees} trees, max deviation {worst:.1e}"))
}

fn c11() -> Outcome {
    let mut rng = stream(11, "acceptance.soundness");
    let mut slack = f64::INFINITY;
    for k in 0..50 {
        let n = rng.random_range(3..=8);
        let m = rng.random_range(1..=6);
        let fam = rng.random_range(2..=3.min(n));
        let net = common::random_ideal_network(&mut rng, n, m, 3, fam);
        let w = ChannelWeightTable::compute(&net, &ChannelSearch::default()).map_err(|e| e.to_string())?;
        let lower = aggregated_rate(&net, "S", &Copies::FromUses, PackingMethod::Exact).map_err(|e| e.to_string())?;
        let members = net.member_indices(&net.families()[0]).unwrap();
        let mut best = f64::INFINITY;
        for p in enumerate_partitions(n, None).unwrap() {
            if n_parts_indices(&members, &p) == members.len() {
                best = best.min(theorem1_rhs(&net, &p, &w, 0.0).unwrap());
            }
        }
        let lhs = lower.achievable as f64 * members.len() as f64;
        slack = slack.min(best - lhs);
        ensure(lhs <= best + 1e-9, || format!("network {k}: {} GHZ x {} > {best}", lower.achievable, members.len()))?;
    }
    Ok(format!("50 networks, smallest slack {slack:.3}"))
}

fn run_bin(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_qbnet")).args(args).output().map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)))?;
    Ok(out.stdout)
}

fn c12() -> Outcome {
    let fig1 = data("fig1.json");
    let star = data("star.json");
    let script = data("scripts/star_wasted.json");
    let runs: [Vec<&str>; 4] = [
        vec!["bound-upper", "--network", &fig1, "--strategy", "local", "--seed", "7", "--restarts", "5"],
        vec!["verify", "--suite", "all", "--seed", "7", "--trials", "5"],
        vec!["simulate", "--network", &star, "--script", &script, "--all-partitions"],
        vec!["export-dot", "--network", &fig1],
    ];
    for args in &runs {
        let a = run_bin(args)?;
        let b = run_bin(args)?;
        ensure(a == b, || format!("{} differs between runs", args[0]))?;
    }
    Ok(format!("{} commands byte-identical across two runs", runs.len()))
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("GHZ squashed entanglement", c1, 5),
        ("reduction identity", c2, 10),
        ("grouping monotonicity", c3, 30),
        ("superadditivity inequality", c4, 60),
        ("squashing CMI chain", c5, 60),
        ("channel weight oracle", c6, 30),
        ("single-broadcast and chain bounds", c7, 60),
        ("min Steiner cut vs brute force", c8, 120),
        ("packing soundness", c9, 120),
        ("protocol fidelity", c10, 120),
        ("lower vs upper bound", c11, 300),
        ("determinism", c12, 120),
    ];
    let mut failed = 0;
    for (i, (name, f, limit)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = f();
        let dt = t.elapsed();
        let r = match r {
            Ok(d) if dt > Duration::from_secs(*limit) => Err(format!("{d}; took {dt:.1?}, limit {limit} s")),
            other => other,
        };
        match r {
            Ok(d) => println!("criterion {:>2} PASS  {name}: {d} [{dt:.2?}]", i + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {e} [{dt:.2?}]", i + 1);
            }
        }
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
