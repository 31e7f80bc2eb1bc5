//! Broadcast channels `x → y_1 … y_r` in Kraus form, with their isometric
//! extensions.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::labeling::SystemLabeling;
use super::state::{DensityMatrix, PureState};
use super::tensor::{self, C64, ONE, ZERO};
use crate::error::{Error, Result};

pub const ISOMETRY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ChannelKind {
    /// `|i⟩ → |i…i⟩`.
    IdealBroadcast,
    /// Ideal copy, then each head independently dephased in the
    /// computational basis with probability `p`.
    DephasingBroadcast { p: f64 },
    /// Ideal copy with probability `1 − p`; otherwise every head receives
    /// the flag state `|d⟩` (heads have dimension `d + 1`).
    ErasureBroadcast { p: f64 },
    /// Explicit isometry `V : x → y_1 … y_r ⊗ env`, stored row-major as
    /// `[re, im]` pairs with `Π head_dims · env_dim` rows and `dim` columns.
    CustomIsometry { head_dims: Vec<usize>, env_dim: usize, isometry: Vec<[f64; 2]> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    #[serde(flatten)]
    pub kind: ChannelKind,
    /// Input dimension.
    pub dim: usize,
    /// Number of heads; filled from the edge when loaded from a network.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub num_heads: Option<usize>,
}

impl ChannelSpec {
    pub fn ideal(dim: usize, heads: usize) -> Self {
        Self { kind: ChannelKind::IdealBroadcast, dim, num_heads: Some(heads) }
    }

    pub fn dephasing(dim: usize, heads: usize, p: f64) -> Self {
        Self { kind: ChannelKind::DephasingBroadcast { p }, dim, num_heads: Some(heads) }
    }

    pub fn erasure(dim: usize, heads: usize, p: f64) -> Self {
        Self { kind: ChannelKind::ErasureBroadcast { p }, dim, num_heads: Some(heads) }
    }

    pub fn custom(dim: usize, head_dims: Vec<usize>, env_dim: usize, v: &DMatrix<C64>) -> Result<Self> {
        let spec = Self {
            num_heads: Some(head_dims.len()),
            kind: ChannelKind::CustomIsometry { head_dims, env_dim, isometry: v.transpose().iter().map(|c| [c.re, c.im]).collect() },
            dim,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn heads(&self) -> Result<usize> {
        let r = match &self.kind {
            ChannelKind::CustomIsometry { head_dims, .. } => Some(head_dims.len()),
            _ => self.num_heads,
        };
        r.ok_or_else(|| Error::InvalidChannel("number of heads not set".into()))
    }

    pub fn head_dims(&self) -> Result<Vec<usize>> {
        let r = self.heads()?;
        Ok(match &self.kind {
            ChannelKind::IdealBroadcast | ChannelKind::DephasingBroadcast { .. } => vec![self.dim; r],
            ChannelKind::ErasureBroadcast { .. } => vec![self.dim + 1; r],
            ChannelKind::CustomIsometry { head_dims, .. } => head_dims.clone(),
        })
    }

    /// True when the channel is an isometry (its output on a pure input is pure).
    pub fn is_isometric(&self) -> bool {
        match &self.kind {
            ChannelKind::IdealBroadcast => true,
            ChannelKind::DephasingBroadcast { p } | ChannelKind::ErasureBroadcast { p } => *p == 0.0,
            ChannelKind::CustomIsometry { env_dim, .. } => *env_dim == 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 1 {
            return Err(Error::InvalidChannel("input dimension must be >= 1".into()));
        }
        let r = self.heads()?;
        if r == 0 {
            return Err(Error::InvalidChannel("a channel needs at least one head".into()));
        }
        if let Some(n) = self.num_heads {
            if n != r {
                return Err(Error::InvalidChannel(format!("num_heads {n} but isometry has {r} heads")));
            }
        }
        match &self.kind {
            ChannelKind::DephasingBroadcast { p } | ChannelKind::ErasureBroadcast { p } => {
                if !(0.0..=1.0).contains(p) {
                    return Err(Error::InvalidChannel(format!("noise probability {p} outside [0, 1]")));
                }
            }
            ChannelKind::CustomIsometry { .. } => {
                let d = tensor::isometry_defect(&self.isometry()?);
                if d > ISOMETRY_TOL {
                    return Err(Error::NotIsometric(d));
                }
            }
            ChannelKind::IdealBroadcast => {}
        }
        Ok(())
    }

    /// Kraus operators `K_a : x → y_1…y_r`, zero operators dropped.
    pub fn kraus(&self) -> Result<Vec<DMatrix<C64>>> {
        let d = self.dim;
        let r = self.heads()?;
        let copy = |out_dim: usize| {
            // |i⟩ → |i…i⟩ inside heads of dimension out_dim
            let rows = out_dim.pow(r as u32);
            let rep: usize = (0..r).map(|k| out_dim.pow(k as u32)).sum();
            let mut m = DMatrix::from_element(rows, d, ZERO);
            for i in 0..d {
                m[(i * rep, i)] = ONE;
            }
            m
        };
        let ops = match &self.kind {
            ChannelKind::IdealBroadcast => vec![copy(d)],
            ChannelKind::DephasingBroadcast { p } => {
                // per head: sqrt(1-p) I and sqrt(p)|k⟩⟨k|
                let mut per_head: Vec<DMatrix<C64>> = Vec::new();
                if *p < 1.0 {
                    per_head.push(DMatrix::identity(d, d) * C64::new((1.0 - p).sqrt(), 0.0));
                }
                if *p > 0.0 {
                    for k in 0..d {
                        let mut m = DMatrix::from_element(d, d, ZERO);
                        m[(k, k)] = C64::new(p.sqrt(), 0.0);
                        per_head.push(m);
                    }
                }
                let base = copy(d);
                let mut out = Vec::new();
                let mut choice = vec![0usize; r];
                loop {
                    let mut local = DMatrix::from_element(1, 1, ONE);
                    for &c in &choice {
                        local = local.kronecker(&per_head[c]);
                    }
                    let k = &local * &base;
                    if k.iter().any(|c| *c != ZERO) {
                        out.push(k);
                    }
                    let mut pos = r;
                    loop {
                        if pos == 0 {
                            return Ok(out);
                        }
                        pos -= 1;
                        choice[pos] += 1;
                        if choice[pos] < per_head.len() {
                            break;
                        }
                        choice[pos] = 0;
                    }
                }
            }
            ChannelKind::ErasureBroadcast { p } => {
                let mut out = Vec::new();
                if *p < 1.0 {
                    out.push(copy(d + 1) * C64::new((1.0 - p).sqrt(), 0.0));
                }
                if *p > 0.0 {
                    let rows = (d + 1).pow(r as u32);
                    for i in 0..d {
                        let mut m = DMatrix::from_element(rows, d, ZERO);
                        m[(rows - 1, i)] = C64::new(p.sqrt(), 0.0);
                        out.push(m);
                    }
                }
                out
            }
            ChannelKind::CustomIsometry { env_dim, .. } => {
                let v = self.isometry()?;
                let out_rows = v.nrows() / env_dim;
                // V = Σ_a K_a ⊗ |a⟩_env
                (0..*env_dim)
                    .map(|a| DMatrix::from_fn(out_rows, d, |row, col| v[(row * env_dim + a, col)]))
                    .filter(|k| k.iter().any(|c| *c != ZERO))
                    .collect()
            }
        };
        Ok(ops)
    }

    /// Stinespring isometry `x → y_1…y_r ⊗ env`, env last and of dimension
    /// equal to the number of Kraus operators.
    pub fn isometry(&self) -> Result<DMatrix<C64>> {
        if let ChannelKind::CustomIsometry { head_dims, env_dim, isometry } = &self.kind {
            let rows = head_dims.iter().product::<usize>() * env_dim;
            if isometry.len() != rows * self.dim {
                return Err(Error::InvalidChannel(format!("isometry has {} entries, expected {}x{}", isometry.len(), rows, self.dim)));
            }
            return Ok(DMatrix::from_row_iterator(rows, self.dim, isometry.iter().map(|[r, i]| C64::new(*r, *i))));
        }
        let kraus = self.kraus()?;
        let e = kraus.len();
        let out = kraus[0].nrows();
        Ok(DMatrix::from_fn(out * e, self.dim, |row, col| kraus[row % e][(row / e, col)]))
    }

    pub fn env_dim(&self) -> Result<usize> {
        match &self.kind {
            ChannelKind::CustomIsometry { env_dim, .. } => Ok(*env_dim),
            _ => Ok(self.kraus()?.len()),
        }
    }
}

fn check_input(spec: &ChannelSpec, labeling: &SystemLabeling, input_label: &str, outputs: &[String]) -> Result<usize> {
    spec.validate()?;
    let pos = labeling.index_of(input_label).ok_or_else(|| Error::UnknownLabel(input_label.into()))?;
    let din = labeling.subsystems()[pos].dim;
    if din != spec.dim {
        return Err(Error::DimensionMismatch(format!("subsystem `{input_label}` has dimension {din}, channel expects {}", spec.dim)));
    }
    if outputs.len() != spec.heads()? {
        return Err(Error::DimensionMismatch(format!("{} output labels for {} heads", outputs.len(), spec.heads()?)));
    }
    Ok(pos)
}

/// Replaces subsystem `input_label` by the channel outputs `outputs`
/// (placed where the input was).
pub fn apply_channel(spec: &ChannelSpec, state: &DensityMatrix, input_label: &str, outputs: &[String]) -> Result<DensityMatrix> {
    use super::state::QuantumState;
    let pos = check_input(spec, state.labeling(), input_label, outputs)?;
    let repl: Vec<(String, usize)> = outputs.iter().cloned().zip(spec.head_dims()?).collect();
    let labeling = state.labeling().replace(pos, &repl)?;
    let m = tensor::apply_kraus_matrix(state.matrix(), &state.dims(), pos, &spec.kraus()?);
    Ok(DensityMatrix::from_parts_unchecked(labeling, m))
}

/// Purified variant: applies the isometric extension, keeping the channel
/// environment as an extra subsystem `env_label` right after the outputs.
pub fn apply_channel_pure(
    spec: &ChannelSpec,
    state: &PureState,
    input_label: &str,
    outputs: &[String],
    env_label: &str,
) -> Result<PureState> {
    use super::state::QuantumState;
    let pos = check_input(spec, state.labeling(), input_label, outputs)?;
    let v = spec.isometry()?;
    let mut repl: Vec<(String, usize)> = outputs.iter().cloned().zip(spec.head_dims()?).collect();
    repl.push((env_label.to_string(), spec.env_dim()?));
    let labeling = state.labeling().replace(pos, &repl)?;
    let amps = tensor::apply_op_vector(state.amplitudes(), &state.dims(), pos, &v);
    Ok(PureState::from_parts_unchecked(labeling, amps))
}

/// Isometric channels applied to a pure state, no environment kept.
pub fn apply_isometric_pure(spec: &ChannelSpec, state: &PureState, input_label: &str, outputs: &[String]) -> Result<PureState> {
    use super::state::QuantumState;
    if !spec.is_isometric() {
        return Err(Error::InvalidChannel("channel is not isometric; use the purified variant".into()));
    }
    let pos = check_input(spec, state.labeling(), input_label, outputs)?;
    let k = spec.kraus()?;
    let repl: Vec<(String, usize)> = outputs.iter().cloned().zip(spec.head_dims()?).collect();
    let labeling = state.labeling().replace(pos, &repl)?;
    let amps = tensor::apply_op_vector(state.amplitudes(), &state.dims(), pos, &k[0]);
    Ok(PureState::from_parts_unchecked(labeling, amps))
}
