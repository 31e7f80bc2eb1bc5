//! Multipartite private states and key measurements.

use nalgebra::DMatrix;
use serde::Serialize;

use super::labeling::SystemLabeling;
use super::state::{DensityMatrix, QuantumState, DEFAULT_DIM_CAP};
use super::tensor::{self, C64, ZERO};
use crate::error::{Error, Result};

/// Controlled unitary `Σ |i_1…i_m⟩⟨i_1…i_m| ⊗ U_{i_1…i_m}` acting on the
/// shield.
#[derive(Debug, Clone)]
pub enum Twisting {
    Identity,
    /// One unitary per key string, indexed by the string read as a base-`d`
    /// number (`d^m` entries).
    PerString(Vec<DMatrix<C64>>),
}

impl Twisting {
    fn block(&self, key_index: usize, shield_dim: usize) -> DMatrix<C64> {
        match self {
            Twisting::Identity => DMatrix::identity(shield_dim, shield_dim),
            Twisting::PerString(us) => us[key_index].clone(),
        }
    }
}

/// `U_twist (|Φ_d⟩⟨Φ_d| ⊗ σ) U_twist†` with key parts `K1..Km`, shield parts
/// `S1..Sm` (taken in order from the shield's subsystems) and parties
/// `A_i = {K_i, S_i}`.
pub fn private_state(m: usize, d: usize, shield: &DensityMatrix, twisting: &Twisting) -> Result<DensityMatrix> {
    if m == 0 || d < 2 {
        return Err(Error::InvalidState(format!("private state needs m >= 1, d >= 2 (got m={m}, d={d})")));
    }
    if shield.labeling().len() != m {
        return Err(Error::DimensionMismatch(format!("shield has {} subsystems, expected one per party ({m})", shield.labeling().len())));
    }
    let key_dim = d.pow(m as u32);
    let s_dim = shield.labeling().total_dim();
    if key_dim * s_dim > DEFAULT_DIM_CAP {
        return Err(Error::DimensionCap { dim: key_dim * s_dim, cap: DEFAULT_DIM_CAP });
    }
    if let Twisting::PerString(us) = twisting {
        if us.len() != key_dim {
            return Err(Error::DimensionMismatch(format!("{} twisting blocks, expected {key_dim}", us.len())));
        }
        for u in us {
            if u.nrows() != s_dim || u.ncols() != s_dim {
                return Err(Error::DimensionMismatch("twisting block does not match shield dimension".into()));
            }
            let defect = tensor::isometry_defect(u);
            if defect > super::channel::ISOMETRY_TOL {
                return Err(Error::NotIsometric(defect));
            }
        }
    }

    let mut subs: Vec<(String, usize)> = (1..=m).map(|i| (format!("K{i}"), d)).collect();
    subs.extend(shield.labeling().subsystems().iter().enumerate().map(|(i, s)| (format!("S{}", i + 1), s.dim)));
    let mut labeling = SystemLabeling::new(subs)?;
    for i in 1..=m {
        labeling = labeling.with_group(format!("A{i}"), [format!("K{i}"), format!("S{i}")])?;
    }

    let rep: usize = (0..m).map(|k| d.pow(k as u32)).sum();
    let sigma = shield.matrix();
    let n = key_dim * s_dim;
    let mut out = DMatrix::from_element(n, n, ZERO);
    let scale = C64::new(1.0 / d as f64, 0.0);
    let blocks: Vec<DMatrix<C64>> = (0..d).map(|i| twisting.block(i * rep, s_dim)).collect();
    for (i, bi) in blocks.iter().enumerate() {
        let left = bi * sigma;
        for (k, bk) in blocks.iter().enumerate() {
            let b = &left * bk.adjoint() * scale;
            let (r0, c0) = (i * rep * s_dim, k * rep * s_dim);
            out.view_mut((r0, c0), (s_dim, s_dim)).copy_from(&b);
        }
    }
    Ok(DensityMatrix::from_parts_unchecked(labeling, out))
}

/// Joint distribution of computational-basis outcomes on the key systems.
#[derive(Debug, Clone, Serialize)]
pub struct KeyDistribution {
    pub labels: Vec<String>,
    pub dims: Vec<usize>,
    /// Probabilities indexed by the outcome string read big-endian.
    pub probs: Vec<f64>,
}

impl KeyDistribution {
    pub fn prob(&self, outcome: &[usize]) -> f64 {
        let idx = outcome.iter().zip(&self.dims).fold(0, |acc, (o, d)| acc * d + o);
        self.probs[idx]
    }

    pub fn outcome(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.dims.len()];
        for (slot, d) in out.iter_mut().zip(&self.dims).rev() {
            *slot = idx % d;
            idx /= d;
        }
        out
    }

    /// All probability mass on strings whose digits all agree.
    pub fn is_perfectly_correlated(&self, tol: f64) -> bool {
        self.probs.iter().enumerate().all(|(i, &p)| {
            let o = self.outcome(i);
            p <= tol || o.iter().all(|&x| x == o[0])
        })
    }

    /// Uniform over the `d` all-equal strings.
    pub fn is_uniform_key(&self, tol: f64) -> bool {
        let d = self.dims[0];
        if self.dims.iter().any(|&x| x != d) {
            return false;
        }
        (0..d).all(|k| (self.prob(&vec![k; self.dims.len()]) - 1.0 / d as f64).abs() <= tol)
    }

    /// Marginal of one key system.
    pub fn marginal(&self, which: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dims[which]];
        for (i, p) in self.probs.iter().enumerate() {
            out[self.outcome(i)[which]] += p;
        }
        out
    }
}

pub fn measure_key<S: QuantumState + ?Sized>(state: &S, key_labels: &[&str]) -> Result<KeyDistribution> {
    let labeling = state.labeling();
    let mut idx = Vec::with_capacity(key_labels.len());
    for l in key_labels {
        idx.push(labeling.index_of(l).ok_or_else(|| Error::UnknownLabel(l.to_string()))?);
    }
    let mut sorted = idx.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != idx.len() {
        return Err(Error::OverlappingGroups(key_labels.join(",")));
    }
    let marg = state.marginal(&sorted);
    let sorted_dims: Vec<usize> = sorted.iter().map(|&i| labeling.subsystems()[i].dim).collect();
    let dims: Vec<usize> = idx.iter().map(|&i| labeling.subsystems()[i].dim).collect();
    // reorder from sorted-subsystem order into the requested label order
    let mut probs = vec![0.0; marg.nrows()];
    for s in 0..marg.nrows() {
        let mut digits = vec![0usize; sorted.len()];
        let mut rem = s;
        for (slot, d) in digits.iter_mut().zip(&sorted_dims).rev() {
            *slot = rem % d;
            rem /= d;
        }
        let mut target = 0usize;
        for (&sub, &d) in idx.iter().zip(&dims) {
            let pos = sorted.iter().position(|&x| x == sub).expect("present");
            target = target * d + digits[pos];
        }
        probs[target] = marg[(s, s)].re.max(0.0);
    }
    Ok(KeyDistribution { labels: key_labels.iter().map(|s| s.to_string()).collect(), dims, probs })
}
