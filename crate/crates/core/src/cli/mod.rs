//! The `qbnet` command line. Every command produces one JSON report (DOT text
//! for `export-dot`) that embeds the tool version, the seed and the SHA-256
//! digest of each input file, so a report can be reproduced byte for byte.

mod suites;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::bounds::{corollary_bound, optimize_partition, rate_region, ChannelWeightTable, EpsTerms, FamilyRequirement, Strategy};
use crate::entropy::ChannelSearch;
use crate::error::{Error, Result};
use crate::lower::{aggregated_rate, build_ghz_network, pack_steiner_trees, Copies, PackingMethod};
use crate::netmodel::{enumerate_partitions, export_dot, load_network, BroadcastNetwork, Partition};
use crate::simverify::{simulate_tree_extraction, tree_qubits, verify_theorem1_trace, ProtocolScript, QUBIT_CAP};

pub use suites::{entropic_suite, protocol_suite, random_unitary, SuiteResult};

#[derive(Parser, Debug, Clone)]
#[command(name = "qbnet", version, about = "Rate bounds for GHZ distribution over quantum broadcast networks")]
pub struct RunConfig {
    /// Worker threads for parallel sections.
    #[arg(long, global = true, env = "QBNET_THREADS")]
    pub threads: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Print a short summary to stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Partition-based upper bounds per client family.
    BoundUpper(UpperArgs),
    /// Steiner-tree packing lower bounds per client family.
    BoundLower(LowerArgs),
    /// Randomized invariant and protocol self-checks.
    Verify(VerifyArgs),
    /// Replay a protocol script, or extract GHZ states along Steiner trees.
    Simulate(SimulateArgs),
    /// Graphviz rendering of a network, optionally with a partition.
    ExportDot(DotArgs),
}

#[derive(clap::Args, Debug, Clone)]
pub struct FamilySelector {
    /// Client family id; repeat for several.
    #[arg(long = "family")]
    pub families: Vec<String>,
    /// Every family of the network (the default when no --family is given).
    #[arg(long)]
    pub all_families: bool,
}

impl FamilySelector {
    fn resolve(&self, net: &BroadcastNetwork) -> Result<Vec<String>> {
        if self.families.is_empty() || self.all_families {
            return Ok(net.families().iter().map(|f| f.id.clone()).collect());
        }
        for f in &self.families {
            if net.family(f).is_none() {
                return Err(Error::Config(format!("unknown family {f}")));
            }
        }
        Ok(self.families.clone())
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyArg {
    Exhaustive,
    Local,
}

#[derive(clap::Args, Debug, Clone)]
pub struct UpperArgs {
    #[arg(long)]
    pub network: PathBuf,
    #[command(flatten)]
    pub select: FamilySelector,
    #[arg(long, value_enum, default_value = "exhaustive")]
    pub strategy: StrategyArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Local-search restarts.
    #[arg(long, default_value_t = 50)]
    pub restarts: usize,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub g: Option<f64>,
    /// Partition entanglement of the initial state.
    #[arg(long, default_value_t = 0.0)]
    pub initial_esq: f64,
    /// Also list the non-dominated rate-region constraints.
    #[arg(long)]
    pub region: bool,
    /// Joint requirement `FAMILY=N`: the family must meet at least N classes.
    #[arg(long = "require")]
    pub requirements: Vec<String>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodArg {
    Exact,
    Greedy,
}

impl From<MethodArg> for PackingMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Exact => PackingMethod::Exact,
            MethodArg::Greedy => PackingMethod::Greedy,
        }
    }
}

#[derive(clap::Args, Debug, Clone)]
pub struct LowerArgs {
    #[arg(long)]
    pub network: PathBuf,
    #[command(flatten)]
    pub select: FamilySelector,
    /// `uniform:N` or a JSON file mapping edge ids to copy counts; by default
    /// each noiseless edge contributes floor(avg_uses) copies.
    #[arg(long)]
    pub copies: Option<String>,
    #[arg(long, value_enum, default_value = "greedy")]
    pub method: MethodArg,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum SuiteArg {
    Entropic,
    Protocol,
    All,
}

#[derive(clap::Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "all")]
    pub suite: SuiteArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random instances per randomized check.
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
}

#[derive(clap::Args, Debug, Clone)]
pub struct SimulateArgs {
    #[arg(long)]
    pub network: PathBuf,
    /// Protocol script to replay against the budget.
    #[arg(long, conflicts_with = "family")]
    pub script: Option<PathBuf>,
    /// Partition for the script, e.g. `A,B|C`; discrete by default.
    #[arg(long)]
    pub partition: Option<String>,
    /// Replay the script against every partition instead.
    #[arg(long)]
    pub all_partitions: bool,
    /// Extract GHZ states for this family along packed Steiner trees.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub copies: Option<String>,
    #[arg(long, value_enum, default_value = "exact")]
    pub method: MethodArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(clap::Args, Debug, Clone)]
pub struct DotArgs {
    #[arg(long)]
    pub network: PathBuf,
    #[arg(long)]
    pub partition: Option<String>,
}

/// Rendered report plus whether any check inside it failed.
#[derive(Debug, Clone)]
pub struct Output {
    pub text: String,
    pub failed: bool,
}

#[derive(Serialize)]
struct InputDigest {
    path: String,
    sha256: String,
}

struct Inputs(Vec<InputDigest>);

impl Inputs {
    fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = std::fs::read(path)?;
        self.0.push(InputDigest { path: path.display().to_string(), sha256: hex::encode(Sha256::digest(&bytes)) });
        String::from_utf8(bytes).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    fn network(&mut self, path: &Path) -> Result<BroadcastNetwork> {
        load_network(&self.read(path)?)
    }
}

fn envelope(command: &str, seed: Option<u64>, inputs: Inputs, warnings: Vec<String>, result: Value) -> String {
    let v = json!({
        "tool": "qbnet",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "seed": seed,
        "inputs": inputs.0,
        "warnings": warnings,
        "result": result,
    });
    let mut s = serde_json::to_string_pretty(&v).expect("report serializes");
    s.push('\n');
    s
}

/// Parses `A,B|C` or `{A,B}|{C}`; every vertex must appear exactly once.
pub fn parse_partition(net: &BroadcastNetwork, text: &str) -> Result<Partition> {
    let mut groups = vec![];
    for class in text.split('|') {
        let class = class.trim().trim_start_matches('{').trim_end_matches('}');
        let mut g = vec![];
        for v in class.split(',').map(str::trim).filter(|v| !v.is_empty()) {
            g.push(net.index_of(v).ok_or_else(|| Error::DanglingVertex { vertex: v.into(), context: "partition".into() })?);
        }
        groups.push(g);
    }
    Partition::from_groups(net.num_vertices(), &groups)
}

fn parse_copies(spec: &Option<String>) -> Result<Copies> {
    match spec {
        None => Ok(Copies::FromUses),
        Some(s) => Copies::parse(s),
    }
}

fn eps_terms(a: &UpperArgs) -> Result<Option<EpsTerms>> {
    match (a.epsilon, a.b, a.g) {
        (None, None, None) => Ok(None),
        (Some(epsilon), Some(b), Some(g)) => Ok(Some(EpsTerms { epsilon, b, g })),
        _ => Err(Error::Config("--epsilon, --b and --g must be given together".into())),
    }
}

fn bound_upper(a: &UpperArgs) -> Result<Output> {
    let eps = eps_terms(a)?;
    let mut inputs = Inputs(vec![]);
    let net = inputs.network(&a.network)?;
    let families = a.select.resolve(&net)?;
    let strategy = match a.strategy {
        StrategyArg::Exhaustive => Strategy::Exhaustive,
        StrategyArg::Local => Strategy::Local { seed: a.seed, restarts: a.restarts, budget: None },
    };
    let weights = ChannelWeightTable::compute(&net, &ChannelSearch { seed: a.seed, ..Default::default() })?;
    let mut per_family = vec![];
    for f in &families {
        let r = corollary_bound(&net, f, &weights, &strategy, a.initial_esq)?;
        let with_eps = match eps {
            Some(e) => Some(e.apply(r.rhs)? / r.n as f64),
            None => None,
        };
        per_family.push(json!({ "bound": r, "bound_with_epsilon": with_eps }));
    }
    let mut result = json!({
        "strategy": strategy,
        "weights": weights.entries(),
        "all_weights_exact": weights.all_exact(),
        "families": per_family,
    });
    if !a.requirements.is_empty() {
        let reqs = a
            .requirements
            .iter()
            .map(|r| {
                let (f, n) = r.split_once('=').ok_or_else(|| Error::Config(format!("bad requirement '{r}', expected FAMILY=N")))?;
                let min_n = n.trim().parse().map_err(|_| Error::Config(format!("bad class count in '{r}'")))?;
                Ok(FamilyRequirement { family: f.trim().into(), min_n })
            })
            .collect::<Result<Vec<_>>>()?;
        result["joint"] = serde_json::to_value(optimize_partition(&net, &reqs, &weights, &strategy, a.initial_esq, eps)?)?;
    }
    if a.region {
        let parts: Vec<Partition> = enumerate_partitions(net.num_vertices(), None)?.collect();
        result["region"] = serde_json::to_value(rate_region(&net, &weights, &parts, a.initial_esq, eps)?)?;
    }
    Ok(Output { text: envelope("bound-upper", Some(a.seed), inputs, net.warnings(), result), failed: false })
}

fn bound_lower(a: &LowerArgs) -> Result<Output> {
    let mut inputs = Inputs(vec![]);
    let net = inputs.network(&a.network)?;
    let copies = match &a.copies {
        Some(s) if !s.starts_with("uniform:") => {
            inputs.read(Path::new(s))?;
            Copies::parse(s)?
        }
        other => parse_copies(other)?,
    };
    let mut out = vec![];
    for f in a.select.resolve(&net)? {
        out.push(aggregated_rate(&net, &f, &copies, a.method.into())?);
    }
    Ok(Output { text: envelope("bound-lower", None, inputs, net.warnings(), json!({ "families": out })), failed: false })
}

fn verify(a: &VerifyArgs) -> Result<Output> {
    let mut results = vec![];
    if matches!(a.suite, SuiteArg::Entropic | SuiteArg::All) {
        results.extend(entropic_suite(a.seed, a.trials)?);
    }
    if matches!(a.suite, SuiteArg::Protocol | SuiteArg::All) {
        results.extend(protocol_suite(a.seed, a.trials)?);
    }
    let failed = results.iter().any(|r| !r.ok());
    let result = json!({ "suites": results, "all_passed": !failed });
    Ok(Output { text: envelope("verify", Some(a.seed), Inputs(vec![]), vec![], result), failed })
}

fn simulate(a: &SimulateArgs) -> Result<Output> {
    let mut inputs = Inputs(vec![]);
    let net = inputs.network(&a.network)?;
    if let Some(path) = &a.script {
        let script = ProtocolScript::from_json(&inputs.read(path)?)?;
        let weights = ChannelWeightTable::compute(&net, &ChannelSearch { seed: a.seed, ..Default::default() })?;
        let parts: Vec<Partition> = if a.all_partitions {
            enumerate_partitions(net.num_vertices(), None)?.collect()
        } else {
            vec![match &a.partition {
                Some(t) => parse_partition(&net, t)?,
                None => Partition::discrete(net.num_vertices()),
            }]
        };
        let reports = parts.iter().map(|p| verify_theorem1_trace(&net, &script, p, &weights)).collect::<Result<Vec<_>>>()?;
        let failed = reports.iter().any(|r| r.violations > 0);
        let result = json!({ "traces": reports, "violations": reports.iter().map(|r| r.violations).sum::<usize>() });
        return Ok(Output { text: envelope("simulate", Some(script.seed), inputs, net.warnings(), result), failed });
    }
    let family = a.family.as_deref().ok_or_else(|| Error::Config("simulate needs --script or --family".into()))?;
    let fam = net.family(family).ok_or_else(|| Error::Config(format!("unknown family {family}")))?;
    let g = build_ghz_network(&net, &parse_copies(&a.copies)?)?;
    let s = net.member_indices(fam)?;
    let packing = pack_steiner_trees(&g, &s, a.method.into())?;
    let mut reports = vec![];
    let mut skipped = vec![];
    for (k, t) in packing.trees.iter().enumerate() {
        if tree_qubits(&g, t) > QUBIT_CAP {
            skipped.push(t.edge_ids.clone());
            continue;
        }
        reports.push(simulate_tree_extraction(&g, &s, t, a.seed.wrapping_add(k as u64))?);
    }
    let result = json!({ "family": family, "trees": packing.count, "extractions": reports, "skipped_over_cap": skipped });
    Ok(Output { text: envelope("simulate", Some(a.seed), inputs, net.warnings(), result), failed: false })
}

fn dot(a: &DotArgs) -> Result<Output> {
    let mut inputs = Inputs(vec![]);
    let net = inputs.network(&a.network)?;
    let p = a.partition.as_deref().map(|t| parse_partition(&net, t)).transpose()?;
    Ok(Output { text: export_dot(&net, p.as_ref()), failed: false })
}

/// Executes one command and renders its report.
pub fn run(config: &RunConfig) -> Result<Output> {
    match &config.command {
        Command::BoundUpper(a) => bound_upper(a),
        Command::BoundLower(a) => bound_lower(a),
        Command::Verify(a) => verify(a),
        Command::Simulate(a) => simulate(a),
        Command::ExportDot(a) => dot(a),
    }
}

/// Entry point of the binary; returns the process exit code (0 success,
/// 1 failed check, 2 invalid input or I/O error).
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    if let Some(n) = config.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("warning: thread pool already initialised: {e}");
        }
    }
    let out = match run(&config) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let written = match &config.report {
        Some(p) => std::fs::write(p, &out.text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(out.text.as_bytes())
        }
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return 2;
    }
    if config.verbose > 0 {
        eprintln!("{}", if out.failed { "checks failed" } else { "ok" });
    }
    i32::from(out.failed)
}
