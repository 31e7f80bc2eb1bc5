//! Dense tensor-product helpers. Basis indices are big-endian: the first
//! subsystem is the most significant digit.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

pub type C64 = Complex64;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Eigenvalues below this are treated as exact zeros in `λ log λ`.
pub const EIGEN_CLIP: f64 = 1e-12;

pub fn total_dim(dims: &[usize]) -> usize {
    dims.iter().product()
}

/// Splits every full basis index into `(kept index, rest index)`.
pub(crate) fn split_indices(dims: &[usize], keep: &[usize]) -> (Vec<usize>, Vec<usize>, usize, usize) {
    let n = total_dim(dims);
    let mut is_kept = vec![false; dims.len()];
    for &k in keep {
        is_kept[k] = true;
    }
    // strides inside the kept and the rest spaces, preserving subsystem order
    let mut keep_stride = vec![0usize; dims.len()];
    let mut rest_stride = vec![0usize; dims.len()];
    let (mut ks, mut rs) = (1usize, 1usize);
    for s in (0..dims.len()).rev() {
        if is_kept[s] {
            keep_stride[s] = ks;
            ks *= dims[s];
        } else {
            rest_stride[s] = rs;
            rs *= dims[s];
        }
    }
    let mut kidx = vec![0usize; n];
    let mut ridx = vec![0usize; n];
    let mut digits = vec![0usize; dims.len()];
    let (mut kcur, mut rcur) = (0usize, 0usize);
    for i in 0..n {
        kidx[i] = kcur;
        ridx[i] = rcur;
        // increment the mixed-radix counter
        for s in (0..dims.len()).rev() {
            digits[s] += 1;
            if is_kept[s] {
                kcur += keep_stride[s];
            } else {
                rcur += rest_stride[s];
            }
            if digits[s] < dims[s] {
                break;
            }
            if is_kept[s] {
                kcur -= keep_stride[s] * dims[s];
            } else {
                rcur -= rest_stride[s] * dims[s];
            }
            digits[s] = 0;
        }
    }
    (kidx, ridx, ks, rs)
}

/// Reshapes a state vector into the `kept × rest` coefficient matrix.
pub(crate) fn coefficient_matrix(psi: &[C64], dims: &[usize], keep: &[usize]) -> DMatrix<C64> {
    let (kidx, ridx, dk, dr) = split_indices(dims, keep);
    let mut m = DMatrix::from_element(dk, dr, ZERO);
    for (i, amp) in psi.iter().enumerate() {
        m[(kidx[i], ridx[i])] = *amp;
    }
    m
}

/// Reduced density matrix of a pure state on the subsystems `keep`.
pub fn reduce_vector(psi: &[C64], dims: &[usize], keep: &[usize]) -> DMatrix<C64> {
    let m = coefficient_matrix(psi, dims, keep);
    &m * m.adjoint()
}

/// Partial trace of a density matrix, keeping the subsystems `keep`.
pub fn reduce_matrix(rho: &DMatrix<C64>, dims: &[usize], keep: &[usize]) -> DMatrix<C64> {
    let (kidx, ridx, dk, dr) = split_indices(dims, keep);
    let mut groups: Vec<Vec<(usize, usize)>> = vec![Vec::with_capacity(dk); dr];
    for i in 0..kidx.len() {
        groups[ridx[i]].push((kidx[i], i));
    }
    let mut out = DMatrix::from_element(dk, dk, ZERO);
    for g in &groups {
        for &(a, i) in g {
            for &(b, j) in g {
                out[(a, b)] += rho[(i, j)];
            }
        }
    }
    out
}

/// Eigenvalues of `(A + A†)/2`.
pub fn hermitian_eigenvalues(a: &DMatrix<C64>) -> Vec<f64> {
    let h = (a + a.adjoint()) * C64::new(0.5, 0.0);
    SymmetricEigen::new(h).eigenvalues.iter().copied().collect()
}

/// Shannon entropy in bits of a spectrum, clipping tiny eigenvalues.
pub fn spectrum_entropy(eigs: impl IntoIterator<Item = f64>) -> f64 {
    eigs.into_iter().filter(|&l| l > EIGEN_CLIP).map(|l| -l * l.log2()).sum()
}

pub fn matrix_entropy(a: &DMatrix<C64>) -> f64 {
    if a.nrows() == 1 {
        return 0.0;
    }
    spectrum_entropy(hermitian_eigenvalues(a))
}

/// Entropy of the marginal of a pure state on `keep`, using whichever
/// side of the bipartition is smaller.
pub fn vector_marginal_entropy(psi: &[C64], dims: &[usize], keep: &[usize]) -> f64 {
    if keep.is_empty() || keep.len() == dims.len() {
        return 0.0;
    }
    let m = coefficient_matrix(psi, dims, keep);
    let g = if m.nrows() <= m.ncols() { &m * m.adjoint() } else { m.adjoint() * &m };
    matrix_entropy(&g)
}

/// Applies `op` (shape `d_out × d_in`) to subsystem `pos` of a vector.
pub fn apply_op_vector(psi: &[C64], dims: &[usize], pos: usize, op: &DMatrix<C64>) -> Vec<C64> {
    let d_in = dims[pos];
    assert_eq!(op.ncols(), d_in, "operator input dimension");
    let d_out = op.nrows();
    let right: usize = dims[pos + 1..].iter().product();
    let left: usize = dims[..pos].iter().product();
    let mut out = vec![ZERO; left * d_out * right];
    for l in 0..left {
        for x in 0..d_in {
            let base_in = (l * d_in + x) * right;
            for y in 0..d_out {
                let c = op[(y, x)];
                if c == ZERO {
                    continue;
                }
                let base_out = (l * d_out + y) * right;
                for r in 0..right {
                    out[base_out + r] += c * psi[base_in + r];
                }
            }
        }
    }
    out
}

/// Applies `op` to subsystem `pos` on the row index of `mat` (each column
/// is treated as a vector over `dims`).
fn apply_op_rows(mat: &DMatrix<C64>, dims: &[usize], pos: usize, op: &DMatrix<C64>) -> DMatrix<C64> {
    let d_out_total = total_dim(dims) / dims[pos] * op.nrows();
    let mut out = DMatrix::from_element(d_out_total, mat.ncols(), ZERO);
    for j in 0..mat.ncols() {
        let col: Vec<C64> = mat.column(j).iter().copied().collect();
        let v = apply_op_vector(&col, dims, pos, op);
        out.set_column(j, &DVector::from_vec(v));
    }
    out
}

/// Computes `Σ_a K_a ρ K_a†` with each Kraus operator acting on `pos`.
pub fn apply_kraus_matrix(rho: &DMatrix<C64>, dims: &[usize], pos: usize, kraus: &[DMatrix<C64>]) -> DMatrix<C64> {
    let mut new_dims = dims.to_vec();
    let d_out = kraus[0].nrows();
    new_dims[pos] = d_out;
    let n_out = total_dim(&new_dims);
    let mut acc = DMatrix::from_element(n_out, n_out, ZERO);
    for k in kraus {
        let left = apply_op_rows(rho, dims, pos, k);
        // (K ρ)† = ρ K† for Hermitian ρ
        let both = apply_op_rows(&left.adjoint(), dims, pos, k);
        acc += both;
    }
    acc
}

pub fn kron_vec(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for x in a {
        for y in b {
            out.push(x * y);
        }
    }
    out
}

pub fn kron(a: &DMatrix<C64>, b: &DMatrix<C64>) -> DMatrix<C64> {
    a.kronecker(b)
}

pub fn outer(psi: &[C64]) -> DMatrix<C64> {
    let v = DVector::from_column_slice(psi);
    &v * v.adjoint()
}

/// Largest entry of `|V†V − I|`.
pub fn isometry_defect(v: &DMatrix<C64>) -> f64 {
    let g = v.adjoint() * v;
    let mut worst = 0.0f64;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((g[(i, j)] - target).norm());
        }
    }
    worst
}

pub fn norm_sqr(psi: &[C64]) -> f64 {
    psi.iter().map(|c| c.norm_sqr()).sum()
}
