use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{theorem1_rhs, theorem2_bound, BoundReport, ChannelWeightTable, EpsTerms};
use crate::error::{Error, Result};
use crate::netmodel::{enumerate_partitions, n_parts_indices, BroadcastNetwork, Partition};
use crate::rng;

/// Relative tolerance under which two objective values count as tied.
const TIE_TOL: f64 = 1e-12;
const CHUNK: usize = 1 << 14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Strategy {
    Exhaustive,
    /// Random single-vertex moves and class merges with strict-improvement
    /// acceptance. Restart 0 starts from the discrete partition.
    Local {
        seed: u64,
        restarts: usize,
        /// Proposals per restart; `None` means `10·|V|²`.
        budget: Option<usize>,
    },
}

impl Strategy {
    pub fn local(seed: u64) -> Self {
        Strategy::Local { seed, restarts: 50, budget: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorollaryResult {
    pub family: String,
    /// `min RHS(P) / n(P)` over the partitions examined.
    pub value: f64,
    pub rhs: f64,
    pub n: usize,
    pub partition: Vec<u32>,
    pub partition_text: String,
    /// Other partitions attaining the same value, in enumeration order.
    pub ties: Vec<String>,
    pub evaluated: u64,
    pub strategy: Strategy,
}

impl CorollaryResult {
    pub fn partition(&self) -> Partition {
        Partition::from_classes(&self.partition.iter().map(|&c| c as usize).collect::<Vec<_>>())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyRequirement {
    pub family: String,
    pub min_n: usize,
}

/// (constraint violations, objective); smaller is better.
type Score = (u32, f64);

fn better(a: Score, b: Score) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1 - TIE_TOL * (1.0 + b.1.abs()))
}

fn tied(a: Score, b: Score) -> bool {
    a.0 == b.0 && (a.1 - b.1).abs() <= TIE_TOL * (1.0 + b.1.abs())
}

struct Found {
    score: Score,
    best: Partition,
    ties: Vec<Partition>,
    evaluated: u64,
}

fn exhaustive<F>(n: usize, obj: F) -> Result<Found>
where
    F: Fn(&Partition) -> Result<Score> + Sync,
{
    let mut it = enumerate_partitions(n, None)?;
    let mut found: Option<Found> = None;
    loop {
        let chunk: Vec<Partition> = it.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            break;
        }
        let scores: Vec<Result<Score>> = chunk.par_iter().map(&obj).collect();
        for (p, s) in chunk.into_iter().zip(scores) {
            let s = s?;
            match &mut found {
                None => found = Some(Found { score: s, best: p, ties: vec![], evaluated: 1 }),
                Some(f) => {
                    f.evaluated += 1;
                    if better(s, f.score) {
                        f.score = s;
                        f.best = p;
                        f.ties.clear();
                    } else if tied(s, f.score) {
                        f.ties.push(p);
                    }
                }
            }
        }
    }
    Ok(found.expect("at least one partition"))
}

fn random_partition<R: Rng>(n: usize, rng: &mut R) -> Partition {
    let k = rng.random_range(1..=n);
    let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    Partition::from_classes(&labels)
}

fn local<F>(n: usize, obj: F, seed: u64, restarts: usize, budget: Option<usize>) -> Result<Found>
where
    F: Fn(&Partition) -> Result<Score> + Sync,
{
    let budget = budget.unwrap_or(10 * n * n);
    let runs: Vec<Result<(Score, Partition, u64)>> = (0..restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::substream(seed, "bounds.local_search", r as u64);
            let mut cur = if r == 0 { Partition::discrete(n) } else { random_partition(n, &mut rng) };
            let mut s = obj(&cur)?;
            let mut evals = 1u64;
            for _ in 0..budget {
                let k = cur.num_classes();
                let cand = if k >= 2 && rng.random_bool(0.25) {
                    let a = rng.random_range(0..k);
                    let b = (a + rng.random_range(1..k)) % k;
                    cur.with_merge(a, b)
                } else {
                    cur.with_move(rng.random_range(0..n), rng.random_range(0..=k))
                };
                if cand == cur {
                    continue;
                }
                let cs = obj(&cand)?;
                evals += 1;
                if better(cs, s) {
                    cur = cand;
                    s = cs;
                }
            }
            Ok((s, cur, evals))
        })
        .collect();
    let mut found: Option<Found> = None;
    let mut total = 0;
    for run in runs {
        let (s, p, e) = run?;
        total += e;
        if found.as_ref().is_none_or(|f| better(s, f.score)) {
            found = Some(Found { score: s, best: p, ties: vec![], evaluated: 0 });
        }
    }
    let mut f = found.expect("at least one restart");
    f.evaluated = total;
    Ok(f)
}

fn run<F>(n: usize, strategy: &Strategy, obj: F) -> Result<Found>
where
    F: Fn(&Partition) -> Result<Score> + Sync,
{
    if n == 0 {
        return Err(Error::InvalidNetwork("network has no vertices".into()));
    }
    match strategy {
        Strategy::Exhaustive => exhaustive(n, obj),
        Strategy::Local { seed, restarts, budget } => local(n, obj, *seed, *restarts, *budget),
    }
}

/// Best single-family bound `min_P RHS(P) / n(P)` over partitions that split
/// the family.
pub fn corollary_bound(
    net: &BroadcastNetwork,
    family: &str,
    weights: &ChannelWeightTable,
    strategy: &Strategy,
    initial_esq: f64,
) -> Result<CorollaryResult> {
    let fam = net.family(family).ok_or_else(|| Error::NoAdmissiblePartition(format!("unknown family {family}")))?;
    let members = net.member_indices(fam)?;
    if members.len() < 2 {
        return Err(Error::NoAdmissiblePartition(format!("family {family} has fewer than two members")));
    }
    let obj = |p: &Partition| -> Result<Score> {
        let n = n_parts_indices(&members, p);
        if n == 0 {
            return Ok((1, 0.0));
        }
        Ok((0, theorem1_rhs(net, p, weights, initial_esq)? / n as f64))
    };
    let f = run(net.num_vertices(), strategy, obj)?;
    if f.score.0 > 0 {
        return Err(Error::NoAdmissiblePartition(format!("search found no partition splitting {family}")));
    }
    let n = n_parts_indices(&members, &f.best);
    Ok(CorollaryResult {
        family: family.to_string(),
        value: f.score.1,
        rhs: theorem1_rhs(net, &f.best, weights, initial_esq)?,
        n,
        partition: f.best.labels().to_vec(),
        partition_text: f.best.render(net.vertices()),
        ties: f.ties.iter().map(|p| p.render(net.vertices())).collect(),
        evaluated: f.evaluated,
        strategy: strategy.clone(),
    })
}

/// Minimizes the right-hand side subject to `n_j(P) ≥ min_n` per listed family.
pub fn optimize_partition(
    net: &BroadcastNetwork,
    requirements: &[FamilyRequirement],
    weights: &ChannelWeightTable,
    strategy: &Strategy,
    initial_esq: f64,
    eps: Option<EpsTerms>,
) -> Result<BoundReport> {
    let mut reqs = Vec::with_capacity(requirements.len());
    for r in requirements {
        let fam = net.family(&r.family).ok_or_else(|| Error::Infeasible(format!("unknown family {}", r.family)))?;
        let members = net.member_indices(fam)?;
        if r.min_n > members.len() || (r.min_n > 0 && members.len() < 2) {
            return Err(Error::Infeasible(format!(
                "family {} has {} members, cannot be split into {} parts",
                r.family,
                members.len(),
                r.min_n
            )));
        }
        reqs.push((members, r.min_n));
    }
    let obj = |p: &Partition| -> Result<Score> {
        let viol: usize = reqs
            .iter()
            .map(|(m, need)| {
                let n = n_parts_indices(m, p);
                need.saturating_sub(n)
            })
            .sum();
        Ok((viol as u32, theorem1_rhs(net, p, weights, initial_esq)?))
    };
    let f = run(net.num_vertices(), strategy, obj)?;
    if f.score.0 > 0 {
        return Err(Error::Infeasible("no partition found meeting the requirements".into()));
    }
    theorem2_bound(net, &f.best, weights, initial_esq, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::tests::PATH;
    use crate::entropy::ChannelSearch;
    use crate::netmodel::load_network;
    use approx::assert_abs_diff_eq;

    #[test]
    fn two_client_chain_gives_one() {
        let net = load_network(PATH).unwrap();
        let w = ChannelWeightTable::compute(&net, &ChannelSearch::default()).unwrap();
        let r = corollary_bound(&net, "AC", &w, &Strategy::Exhaustive, 0.0).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-9);
        assert_eq!(r.n, 2);
        // {A}|{B,C} and {A,B}|{C} both cut one link
        assert_eq!(r.partition_text, "{A,B}|{C}");
        assert_eq!(r.ties, vec!["{A}|{B,C}".to_string()]);
        let l = corollary_bound(&net, "AC", &w, &Strategy::local(3), 0.0).unwrap();
        assert_abs_diff_eq!(l.value, r.value, epsilon = 1e-12);
        let req = [FamilyRequirement { family: "AC".into(), min_n: 2 }];
        let o = optimize_partition(&net, &req, &w, &Strategy::Exhaustive, 0.0, None).unwrap();
        assert_abs_diff_eq!(o.rhs / 2.0, r.value, epsilon = 1e-12);
    }

    #[test]
    fn isolated_family_bound_is_zero() {
        let text = PATH.replace(r#"["A", "B", "C"]"#, r#"["A", "B", "C", "X", "Y"]"#).replace(r#"["A", "C"]"#, r#"["X", "Y"]"#);
        let net = load_network(&text).unwrap();
        let w = ChannelWeightTable::compute(&net, &ChannelSearch::default()).unwrap();
        let r = corollary_bound(&net, "AC", &w, &Strategy::Exhaustive, 0.0).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn admissibility_errors() {
        let text = PATH.replace(r#"["A", "C"]"#, r#"["A"]"#);
        let net = load_network(&text).unwrap();
        let w = ChannelWeightTable::new();
        assert!(matches!(corollary_bound(&net, "AC", &w, &Strategy::Exhaustive, 0.0), Err(Error::NoAdmissiblePartition(_))));
        let net = load_network(PATH).unwrap();
        let req = [FamilyRequirement { family: "AC".into(), min_n: 3 }];
        assert!(matches!(optimize_partition(&net, &req, &w, &Strategy::Exhaustive, 0.0, None), Err(Error::Infeasible(_))));
    }
}
