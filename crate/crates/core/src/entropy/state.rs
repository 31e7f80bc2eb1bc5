use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::labeling::SystemLabeling;
use super::tensor::{self, C64, ZERO};
use crate::error::{Error, Result};

/// Largest Hilbert-space dimension the constructors accept.
pub const DEFAULT_DIM_CAP: usize = 1 << 16;

pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const PSD_TOL: f64 = 1e-10;
pub const NORM_TOL: f64 = 1e-10;

/// Anything with a labeling whose marginal entropies can be computed.
pub trait QuantumState {
    fn labeling(&self) -> &SystemLabeling;

    /// Reduced density matrix on sorted subsystem indices.
    fn marginal(&self, keep: &[usize]) -> DMatrix<C64>;

    /// Entropy in bits of the marginal on `keep`.
    fn marginal_entropy(&self, keep: &[usize]) -> f64 {
        if keep.is_empty() {
            return 0.0;
        }
        tensor::matrix_entropy(&self.marginal(keep))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    labeling: SystemLabeling,
    amplitudes: Vec<C64>,
}

impl PureState {
    pub fn new(labeling: SystemLabeling, amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.len() != labeling.total_dim() {
            return Err(Error::DimensionMismatch(format!("{} amplitudes for total dimension {}", amplitudes.len(), labeling.total_dim())));
        }
        let n = tensor::norm_sqr(&amplitudes);
        if (n - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidState(format!("norm² is {n}, expected 1")));
        }
        Ok(Self { labeling, amplitudes })
    }

    pub(crate) fn from_parts_unchecked(labeling: SystemLabeling, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), labeling.total_dim());
        Self { labeling, amplitudes }
    }

    /// Basis state `|i_1 … i_n⟩`.
    pub fn basis(labeling: SystemLabeling, digits: &[usize]) -> Result<Self> {
        let dims = labeling.dims();
        if digits.len() != dims.len() || digits.iter().zip(&dims).any(|(d, n)| d >= n) {
            return Err(Error::DimensionMismatch("basis digits do not fit the labeling".into()));
        }
        let idx = digits.iter().zip(&dims).fold(0, |acc, (d, n)| acc * n + d);
        let mut amps = vec![ZERO; labeling.total_dim()];
        amps[idx] = tensor::ONE;
        Ok(Self { labeling, amplitudes: amps })
    }

    /// Haar-random pure state (normalised complex Gaussian vector).
    pub fn random<R: Rng + ?Sized>(labeling: SystemLabeling, rng: &mut R) -> Self {
        let n = labeling.total_dim();
        let mut amps: Vec<C64> = (0..n).map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
        let norm = tensor::norm_sqr(&amps).sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        Self { labeling, amplitudes: amps }
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn dims(&self) -> Vec<usize> {
        self.labeling.dims()
    }

    pub fn to_density(&self) -> DensityMatrix {
        DensityMatrix::from_parts_unchecked(self.labeling.clone(), tensor::outer(&self.amplitudes))
    }

    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        let labeling = self.labeling.concat(&other.labeling)?;
        Ok(PureState { labeling, amplitudes: tensor::kron_vec(&self.amplitudes, &other.amplitudes) })
    }

    /// `|⟨self|other⟩|²`; labelings must agree.
    pub fn fidelity(&self, other: &PureState) -> Result<f64> {
        if self.labeling.dims() != other.labeling.dims() {
            return Err(Error::DimensionMismatch("fidelity between different spaces".into()));
        }
        let ip: C64 = self.amplitudes.iter().zip(&other.amplitudes).map(|(a, b)| a.conj() * b).sum();
        Ok(ip.norm_sqr())
    }

    /// Entropy of the reduced state of a party label.
    pub fn entropy_of(&self, party: &str) -> Result<f64> {
        let idx = self.labeling.resolve(party)?;
        Ok(self.marginal_entropy(&idx))
    }

    pub fn dump(&self) -> StateDump {
        StateDump { labeling: self.labeling.clone(), kind: DumpKind::Pure, entries: self.amplitudes.iter().map(|c| [c.re, c.im]).collect() }
    }
}

impl QuantumState for PureState {
    fn labeling(&self) -> &SystemLabeling {
        &self.labeling
    }

    fn marginal(&self, keep: &[usize]) -> DMatrix<C64> {
        tensor::reduce_vector(&self.amplitudes, &self.labeling.dims(), keep)
    }

    fn marginal_entropy(&self, keep: &[usize]) -> f64 {
        tensor::vector_marginal_entropy(&self.amplitudes, &self.labeling.dims(), keep)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    labeling: SystemLabeling,
    matrix: DMatrix<C64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(labeling: SystemLabeling, matrix: DMatrix<C64>) -> Result<Self> {
        let n = labeling.total_dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch(format!("{}x{} matrix for total dimension {n}", matrix.nrows(), matrix.ncols())));
        }
        let herm = (&matrix - matrix.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:.3e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        let min = tensor::hermitian_eigenvalues(&matrix).into_iter().fold(f64::INFINITY, f64::min);
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(Self { labeling, matrix })
    }

    pub(crate) fn from_parts_unchecked(labeling: SystemLabeling, matrix: DMatrix<C64>) -> Self {
        debug_assert_eq!(matrix.nrows(), labeling.total_dim());
        Self { labeling, matrix }
    }

    pub fn maximally_mixed(labeling: SystemLabeling) -> Self {
        let n = labeling.total_dim();
        let m = DMatrix::from_diagonal_element(n, n, C64::new(1.0 / n as f64, 0.0));
        Self { labeling, matrix: m }
    }

    /// Random mixed state: marginal of a random pure state with an
    /// environment of dimension `env_dim`.
    pub fn random<R: Rng + ?Sized>(labeling: SystemLabeling, env_dim: usize, rng: &mut R) -> Self {
        let n = labeling.total_dim();
        let mut dims = labeling.dims();
        dims.push(env_dim);
        let big = SystemLabeling::new((0..dims.len()).map(|i| (format!("s{i}"), dims[i]))).expect("fresh labels");
        let psi = PureState::random(big, rng);
        let keep: Vec<usize> = (0..dims.len() - 1).collect();
        let m = tensor::reduce_vector(psi.amplitudes(), &dims, &keep);
        debug_assert_eq!(m.nrows(), n);
        Self { labeling, matrix: m }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn dims(&self) -> Vec<usize> {
        self.labeling.dims()
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let labeling = self.labeling.concat(&other.labeling)?;
        Ok(DensityMatrix { labeling, matrix: tensor::kron(&self.matrix, &other.matrix) })
    }

    /// Reduced state on a party label, relabelled to that party's subsystems.
    pub fn reduce(&self, party: &str) -> Result<DensityMatrix> {
        let idx = self.labeling.resolve(party)?;
        Ok(DensityMatrix { labeling: self.labeling.restrict(&idx), matrix: self.marginal(&idx) })
    }

    pub fn with_labeling(self, labeling: SystemLabeling) -> Result<Self> {
        if labeling.dims() != self.labeling.dims() {
            return Err(Error::DimensionMismatch("relabelling changes dimensions".into()));
        }
        Ok(Self { labeling, matrix: self.matrix })
    }

    /// `U ρ U†` for a unitary acting on the single subsystem `label`.
    pub fn conjugate_local(&self, label: &str, u: &DMatrix<C64>) -> Result<DensityMatrix> {
        let pos = self.labeling.index_of(label).ok_or_else(|| Error::UnknownLabel(label.into()))?;
        if u.nrows() != u.ncols() || u.ncols() != self.labeling.subsystems()[pos].dim {
            return Err(Error::DimensionMismatch("local unitary dimension".into()));
        }
        let m = tensor::apply_kraus_matrix(&self.matrix, &self.labeling.dims(), pos, std::slice::from_ref(u));
        Ok(DensityMatrix { labeling: self.labeling.clone(), matrix: m })
    }

    pub fn entropy_of(&self, party: &str) -> Result<f64> {
        let idx = self.labeling.resolve(party)?;
        Ok(self.marginal_entropy(&idx))
    }

    pub fn dump(&self) -> StateDump {
        StateDump {
            labeling: self.labeling.clone(),
            kind: DumpKind::Density,
            entries: self.matrix.transpose().iter().map(|c| [c.re, c.im]).collect(),
        }
    }
}

impl QuantumState for DensityMatrix {
    fn labeling(&self) -> &SystemLabeling {
        &self.labeling
    }

    fn marginal(&self, keep: &[usize]) -> DMatrix<C64> {
        if keep.len() == self.labeling.len() {
            return self.matrix.clone();
        }
        tensor::reduce_matrix(&self.matrix, &self.labeling.dims(), keep)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DumpKind {
    Pure,
    Density,
}

/// Flat dump of a state for cross-checking with other tools: the labeling
/// header followed by `[re, im]` entries (row-major for matrices).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateDump {
    pub labeling: SystemLabeling,
    pub kind: DumpKind,
    pub entries: Vec<[f64; 2]>,
}

impl StateDump {
    pub fn to_pure(&self) -> Result<PureState> {
        if self.kind != DumpKind::Pure {
            return Err(Error::InvalidState("dump holds a density matrix".into()));
        }
        PureState::new(self.labeling.clone(), self.entries.iter().map(|[r, i]| C64::new(*r, *i)).collect())
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        match self.kind {
            DumpKind::Pure => Ok(self.to_pure()?.to_density()),
            DumpKind::Density => {
                let n = self.labeling.total_dim();
                if self.entries.len() != n * n {
                    return Err(Error::DimensionMismatch("dump entry count".into()));
                }
                let m = DMatrix::from_row_iterator(n, n, self.entries.iter().map(|[r, i]| C64::new(*r, *i)));
                DensityMatrix::new(self.labeling.clone(), m)
            }
        }
    }
}

/// `(1/√d) Σ_i |i…i⟩` on parties `A1..Am`.
pub fn ghz_state(m: usize, d: usize) -> Result<PureState> {
    ghz_state_labeled(&(1..=m).map(|i| format!("A{i}")).collect::<Vec<_>>(), d)
}

pub fn ghz_state_labeled<S: AsRef<str>>(labels: &[S], d: usize) -> Result<PureState> {
    ghz_state_capped(labels, d, DEFAULT_DIM_CAP)
}

pub fn ghz_state_capped<S: AsRef<str>>(labels: &[S], d: usize, cap: usize) -> Result<PureState> {
    let m = labels.len();
    if m == 0 || d < 2 {
        return Err(Error::InvalidState(format!("GHZ needs m >= 1 and d >= 2 (got m={m}, d={d})")));
    }
    let dim = (d as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if dim > cap as u128 {
        return Err(Error::DimensionCap { dim: dim.min(usize::MAX as u128) as usize, cap });
    }
    let labeling = SystemLabeling::new(labels.iter().map(|l| (l.as_ref().to_string(), d)))?;
    let n = dim as usize;
    let mut amps = vec![ZERO; n];
    // |i…i⟩ has index i·(d^{m-1} + … + 1)
    let rep: usize = (0..m).map(|k| d.pow(k as u32)).sum();
    let a = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    for i in 0..d {
        amps[i * rep] = a;
    }
    Ok(PureState { labeling, amplitudes: amps })
}
