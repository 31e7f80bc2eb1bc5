//! Von Neumann entropies, multipartite conditional mutual information and
//! squashed-entanglement upper bounds.
//!
//! `I(A_1:…:A_m|E) = Σ_i H(A_i|E) − H(A_1…A_m|E)`, all logarithms base 2,
//! without the factor 1/2 some authors put in front of squashed
//! entanglement.
//!
//! Squashed entanglement is an infimum over extensions. Every concrete
//! extension evaluated here gives an upper bound; the estimator searches over
//! squashing channels `Λ : P → E'` acting on a purifying system `P`.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::labeling::SystemLabeling;
use super::state::{DensityMatrix, PureState, QuantumState};
use super::tensor::{self, C64, ZERO};
use crate::error::{Error, Result};
use crate::rng;

/// Largest state dimension accepted by [`squashed_ent_estimate`].
pub const SQUASH_DIM_CAP: usize = 1 << 10;

const PURIFIER_LABEL: &str = "__P";
const EXT_LABEL: &str = "__E";
const JUNK_LABEL: &str = "__F";

/// `H(ρ_group)` in bits.
pub fn von_neumann_entropy<S: QuantumState + ?Sized>(state: &S, group: &str) -> Result<f64> {
    let idx = state.labeling().resolve(group)?;
    Ok(state.marginal_entropy(&idx))
}

/// `I(parts | cond)`; an empty `cond` gives the unconditioned multipartite
/// mutual information. `cond` entries are united into one system.
pub fn multipartite_cmi<S: QuantumState + ?Sized>(state: &S, parts: &[&str], cond: &[&str]) -> Result<f64> {
    let mut all: Vec<&str> = parts.to_vec();
    let cond_joined = cond.join("+");
    if !cond_joined.is_empty() {
        all.push(&cond_joined);
    }
    let groups = state.labeling().resolve_disjoint(&all)?;
    let (part_idx, cond_idx) =
        if cond_joined.is_empty() { (&groups[..], Vec::new()) } else { (&groups[..groups.len() - 1], groups[groups.len() - 1].clone()) };
    Ok(cmi_indices(state, part_idx, &cond_idx))
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut v: Vec<usize> = a.iter().chain(b).copied().collect();
    v.sort_unstable();
    v
}

pub(crate) fn cmi_indices<S: QuantumState + ?Sized>(state: &S, parts: &[Vec<usize>], cond: &[usize]) -> f64 {
    let h_e = state.marginal_entropy(cond);
    let mut total = 0.0;
    let mut joint: Vec<usize> = Vec::new();
    for p in parts {
        total += state.marginal_entropy(&union(p, cond)) - h_e;
        joint.extend_from_slice(p);
    }
    total - (state.marginal_entropy(&union(&joint, cond)) - h_e)
}

/// A state together with a purifying system `P` of dimension rank(ρ).
#[derive(Debug, Clone)]
pub struct Purification {
    pub state: PureState,
    /// Index of `P` in `state`'s labeling (always last).
    pub purifier: usize,
}

impl Purification {
    pub fn purifier_dim(&self) -> usize {
        self.state.dims()[self.purifier]
    }
}

/// `|ψ⟩ = Σ_k √λ_k |v_k⟩|k⟩_P` over the eigenvectors with `λ_k > 1e-12`.
pub fn purify(rho: &DensityMatrix) -> Result<Purification> {
    let h = (rho.matrix() + rho.matrix().adjoint()) * C64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).filter(|&k| eig.eigenvalues[k] > tensor::EIGEN_CLIP).collect();
    // stable, deterministic ordering: by descending eigenvalue then index
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    let rank = order.len().max(1);
    let n = rho.matrix().nrows();
    let mut amps = vec![ZERO; n * rank];
    let norm: f64 = order.iter().map(|&k| eig.eigenvalues[k]).sum();
    for (slot, &k) in order.iter().enumerate() {
        let w = (eig.eigenvalues[k] / norm).sqrt();
        for i in 0..n {
            amps[i * rank + slot] = eig.eigenvectors[(i, k)] * w;
        }
    }
    let labeling = rho.labeling().concat(&SystemLabeling::new([(PURIFIER_LABEL, rank)])?)?;
    let purifier = labeling.len() - 1;
    Ok(Purification { state: PureState::from_parts_unchecked(labeling, amps), purifier })
}

/// Stinespring isometry `V : P → E' ⊗ F` of a squashing channel; `F` is
/// discarded and the extension system is `E'`.
#[derive(Debug, Clone)]
pub struct SquashingChannel {
    pub isometry: DMatrix<C64>,
    pub ext_dim: usize,
}

impl SquashingChannel {
    pub fn new(isometry: DMatrix<C64>, ext_dim: usize) -> Result<Self> {
        if ext_dim == 0 || !isometry.nrows().is_multiple_of(ext_dim) {
            return Err(Error::InvalidChannel("isometry rows must be a multiple of the extension dimension".into()));
        }
        let d = tensor::isometry_defect(&isometry);
        if d > super::channel::ISOMETRY_TOL {
            return Err(Error::NotIsometric(d));
        }
        Ok(Self { isometry, ext_dim })
    }

    fn junk_dim(&self) -> usize {
        self.isometry.nrows() / self.ext_dim
    }
}

fn extended_state(pur: &Purification, ext: &SquashingChannel) -> Result<PureState> {
    let p = pur.purifier_dim();
    if ext.isometry.ncols() != p {
        return Err(Error::InvalidChannel(format!("extension acts on dimension {}, purifier has dimension {p}", ext.isometry.ncols())));
    }
    let dims = pur.state.dims();
    let amps = tensor::apply_op_vector(pur.state.amplitudes(), &dims, pur.purifier, &ext.isometry);
    let labeling =
        pur.state.labeling().replace(pur.purifier, &[(EXT_LABEL.to_string(), ext.ext_dim), (JUNK_LABEL.to_string(), ext.junk_dim())])?;
    Ok(PureState::from_parts_unchecked(labeling, amps))
}

fn squashed_cmi(pur: &Purification, parts: &[Vec<usize>], ext: &SquashingChannel) -> Result<f64> {
    let st = extended_state(pur, ext)?;
    // E' sits where P was
    Ok(cmi_indices(&st, parts, &[pur.purifier]))
}

/// `I(parts | E')_σ` for `σ = (id ⊗ Λ)(ψ)` with `ψ` a purification of `ρ`.
/// Without an extension this is the unconditioned multipartite mutual
/// information (the trivial extension).
pub fn squashed_ent_upper(rho: &DensityMatrix, parts: &[&str], extension: Option<&SquashingChannel>) -> Result<f64> {
    let groups = rho.labeling().resolve_disjoint(parts)?;
    match extension {
        None => Ok(cmi_indices(rho, &groups, &[])),
        Some(ext) => {
            let pur = purify(rho)?;
            squashed_cmi(&pur, &groups, ext)
        }
    }
}

/// Search budget for [`squashed_ent_estimate`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SquashSearch {
    pub seed: u64,
    pub restarts: usize,
    /// Coordinate-descent sweeps per restart.
    pub sweeps: usize,
    /// Dimension of `E'`; defaults to `min(dim P, 4)` and is capped at `dim P`.
    pub ext_dim: Option<usize>,
    /// Dimension of the discarded system `F`; defaults to `min(dim P, 4)`,
    /// raised to `ceil(dim P / dim E')` when needed.
    pub junk_dim: Option<usize>,
}

impl Default for SquashSearch {
    fn default() -> Self {
        Self { seed: 0, restarts: 8, sweeps: 12, ext_dim: None, junk_dim: None }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SquashEstimate {
    /// Best upper bound found.
    pub value: f64,
    /// Trivial-extension value (the starting point).
    pub default_value: f64,
    /// Best value per restart.
    pub restart_values: Vec<f64>,
    pub evaluations: usize,
    /// True when the purifier is one-dimensional, i.e. every extension is a
    /// product and the default value is exact.
    pub exact: bool,
}

fn random_isometry<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

fn orthonormalize(z: &DMatrix<C64>) -> DMatrix<C64> {
    z.clone().qr().q()
}

/// Minimises `I(parts|E')` over squashing channels `P → E'`. Every value it
/// reports comes from an explicit extension, so it never goes below the
/// true squashed entanglement, and it never exceeds the trivial-extension
/// value (which is always one of the candidates).
pub fn squashed_ent_estimate(rho: &DensityMatrix, parts: &[&str], search: &SquashSearch) -> Result<SquashEstimate> {
    let n = rho.labeling().total_dim();
    if n > SQUASH_DIM_CAP {
        return Err(Error::DimensionCap { dim: n, cap: SQUASH_DIM_CAP });
    }
    let groups = rho.labeling().resolve_disjoint(parts)?;
    let default_value = cmi_indices(rho, &groups, &[]);
    let pur = purify(rho)?;
    let p = pur.purifier_dim();
    if p == 1 {
        return Ok(SquashEstimate { value: default_value, default_value, restart_values: vec![], evaluations: 1, exact: true });
    }
    let e = search.ext_dim.unwrap_or(p.min(4)).clamp(1, p);
    // V must have at least as many rows as columns
    let f = search.junk_dim.unwrap_or(p.min(4)).max(p.div_ceil(e));

    let eval = |z: &DMatrix<C64>| -> f64 {
        let ext = SquashingChannel { isometry: orthonormalize(z), ext_dim: e };
        squashed_cmi(&pur, &groups, &ext).expect("dimensions fixed by construction")
    };

    let results: Vec<(f64, usize)> = (0..search.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng::substream(search.seed, "entropy.squash", r as u64);
            let mut z = random_isometry(e * f, p, &mut rng);
            let mut best = eval(&z);
            let mut evals = 1;
            let mut step = 0.5;
            for _ in 0..search.sweeps {
                let mut improved = false;
                for idx in 0..z.len() {
                    for part in 0..2 {
                        for sign in [1.0, -1.0] {
                            let old = z[idx];
                            let delta = sign * step;
                            z[idx] = if part == 0 { old + C64::new(delta, 0.0) } else { old + C64::new(0.0, delta) };
                            let v = eval(&z);
                            evals += 1;
                            if v < best - 1e-13 {
                                best = v;
                                improved = true;
                                break;
                            }
                            z[idx] = old;
                        }
                    }
                }
                if !improved {
                    step *= 0.5;
                    if step < 1e-4 {
                        break;
                    }
                }
            }
            (best, evals)
        })
        .collect();

    let restart_values: Vec<f64> = results.iter().map(|r| r.0).collect();
    let evaluations = 1 + results.iter().map(|r| r.1).sum::<usize>();
    let value = restart_values.iter().copied().fold(default_value, f64::min).max(0.0);
    Ok(SquashEstimate { value, default_value, restart_values, evaluations, exact: false })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::state::ghz_state;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn entropy_basics() {
        let mm = DensityMatrix::maximally_mixed(SystemLabeling::qubits(["a"]).unwrap());
        assert_abs_diff_eq!(von_neumann_entropy(&mm, "a").unwrap(), 1.0, epsilon = 1e-12);
        let g = ghz_state(3, 2).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&g, "A1+A2+A3").unwrap(), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(von_neumann_entropy(&g.to_density(), "A1+A2+A3").unwrap(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn ghz_marginal_by_explicit_partial_trace() {
        let g = ghz_state(3, 2).unwrap().to_density();
        let m = tensor::reduce_matrix(g.matrix(), &g.dims(), &[1]);
        assert_abs_diff_eq!(m[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(1, 1)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(0, 1)].norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(von_neumann_entropy(&g, "A2").unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ghz3_cmi_is_three_bits() {
        let g = ghz_state(3, 2).unwrap();
        let v = multipartite_cmi(&g, &["A1", "A2", "A3"], &[]).unwrap();
        let by_hand: f64 = ["A1", "A2", "A3"].iter().map(|p| g.entropy_of(p).unwrap()).sum::<f64>() - g.entropy_of("A1+A2+A3").unwrap();
        assert_abs_diff_eq!(v, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(v, by_hand, epsilon = 1e-12);
    }

    #[test]
    fn overlapping_parts_rejected() {
        let g = ghz_state(3, 2).unwrap();
        assert!(matches!(multipartite_cmi(&g, &["A1", "A1+A2"], &[]), Err(Error::OverlappingGroups(_))));
        assert!(matches!(multipartite_cmi(&g, &["A1", "A2"], &["A2"]), Err(Error::OverlappingGroups(_))));
    }

    #[test]
    fn conditioning_on_independent_system_is_inert() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rho = DensityMatrix::random(SystemLabeling::qubits(["a", "b", "c"]).unwrap(), 3, &mut rng);
        let e = DensityMatrix::random(SystemLabeling::qubits(["e"]).unwrap(), 2, &mut rng);
        let joint = rho.tensor(&e).unwrap();
        let cond = multipartite_cmi(&joint, &["a", "b", "c"], &["e"]).unwrap();
        let plain = multipartite_cmi(&rho, &["a", "b", "c"], &[]).unwrap();
        assert_abs_diff_eq!(cond, plain, epsilon = 1e-10);
    }

    #[test]
    fn purification_reproduces_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = DensityMatrix::random(SystemLabeling::qubits(["a", "b"]).unwrap(), 2, &mut rng);
        let pur = purify(&rho).unwrap();
        assert_eq!(pur.purifier_dim(), 2);
        let back = pur.state.marginal(&[0, 1]);
        assert_abs_diff_eq!((back - rho.matrix()).norm(), 0.0, epsilon = 1e-10);
    }

    #[test]
    fn explicit_extension_bounds_are_valid() {
        // a squashing channel that measures the purifier of a classically
        // correlated state kills all correlations
        let l = SystemLabeling::qubits(["a", "b"]).unwrap();
        let mut m = DMatrix::from_element(4, 4, ZERO);
        m[(0, 0)] = C64::new(0.5, 0.0);
        m[(3, 3)] = C64::new(0.5, 0.0);
        let rho = DensityMatrix::new(l, m).unwrap();
        let pur = purify(&rho).unwrap();
        assert_eq!(pur.purifier_dim(), 2);
        // copy the purifier in the computational basis: |i> -> |i>_E' |i>_F
        let mut copy = DMatrix::from_element(4, 2, ZERO);
        copy[(0, 0)] = C64::new(1.0, 0.0);
        copy[(3, 1)] = C64::new(1.0, 0.0);
        let ext = SquashingChannel::new(copy, 2).unwrap();
        let v = squashed_ent_upper(&rho, &["a", "b"], Some(&ext)).unwrap();
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-10);
        // conditioning on the whole purifier of this GHZ-like purification leaves 1 bit
        let ext = SquashingChannel::new(DMatrix::identity(2, 2), 2).unwrap();
        let v = squashed_ent_upper(&rho, &["a", "b"], Some(&ext)).unwrap();
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(squashed_ent_upper(&rho, &["a", "b"], None).unwrap(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn extension_dimension_checked() {
        let rho = ghz_state(2, 2).unwrap().to_density();
        let ext = SquashingChannel::new(DMatrix::identity(3, 3), 3).unwrap();
        assert!(matches!(squashed_ent_upper(&rho, &["A1", "A2"], Some(&ext)), Err(Error::InvalidChannel(_))));
        assert!(matches!(SquashingChannel::new(DMatrix::from_element(2, 2, C64::new(1.0, 0.0)), 2), Err(Error::NotIsometric(_))));
    }

    #[test]
    fn estimate_on_pure_is_exact() {
        let g = ghz_state(3, 2).unwrap().to_density();
        let est = squashed_ent_estimate(&g, &["A1", "A2", "A3"], &SquashSearch::default()).unwrap();
        assert!(est.exact);
        assert_abs_diff_eq!(est.value, 3.0, epsilon = 1e-9);
    }

    #[test]
    fn estimate_dimension_cap() {
        let rho = DensityMatrix::maximally_mixed(SystemLabeling::qubits((0..11).map(|i| format!("q{i}"))).unwrap());
        assert!(matches!(squashed_ent_estimate(&rho, &["q0", "q1"], &SquashSearch::default()), Err(Error::DimensionCap { .. })));
    }
}
