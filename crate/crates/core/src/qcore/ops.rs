//! Composition, reduction and evolution of density matrices.

use super::density::{check_dim, DensityMatrix, MAX_DIM};
use super::layout::{gather, mask, SubsystemLayout};
use super::linalg::{self, CMat};
use super::QuantumChannel;
use crate::error::{Error, Result};

/// Below this retained trace a postselected state counts as empty.
pub const EMPTY_TRACE: f64 = 1e-14;
const UNITARY_TOL: f64 = 1e-12;

/// Kronecker product `a ⊗ b`; weights multiply.
pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    tensor_with_limit(a, b, MAX_DIM)
}

pub fn tensor_with_limit(a: &DensityMatrix, b: &DensityMatrix, max_dim: usize) -> Result<DensityMatrix> {
    let dim = a.dim() * b.dim();
    if dim > max_dim.min(MAX_DIM) {
        return Err(Error::DimensionOverflow { dim, max: max_dim.min(MAX_DIM) });
    }
    let data = linalg::kron(a.matrix(), b.matrix());
    DensityMatrix::from_positive(data, a.weight() * b.weight())
}

fn check_layout(rho: &DensityMatrix, layout: &SubsystemLayout) -> Result<()> {
    if rho.dim() != layout.dim() {
        return Err(Error::DimensionMismatch { expected: layout.dim(), got: rho.dim() });
    }
    Ok(())
}

/// Reduced state on `keep`, returned in layout order regardless of the order
/// of `keep`.
pub fn partial_trace(rho: &DensityMatrix, layout: &SubsystemLayout, keep: &[&str]) -> Result<DensityMatrix> {
    check_layout(rho, layout)?;
    if keep.is_empty() {
        return Err(Error::InvalidSelection("nothing to keep".into()));
    }
    let mut kept = layout.positions(keep)?;
    kept.sort_unstable();
    let n = layout.n_qubits();
    let traced: Vec<usize> = (0..n).filter(|p| !kept.contains(p)).collect();
    let kept_mask = mask(&kept, n);
    let sub_dim = 1 << kept.len();

    // full index of (kept sub-index, traced sub-index)
    let compose = |k: usize, t: usize| -> usize {
        let mut idx = 0;
        for (i, &p) in kept.iter().enumerate() {
            idx |= ((k >> (kept.len() - 1 - i)) & 1) << (n - 1 - p);
        }
        for (i, &p) in traced.iter().enumerate() {
            idx |= ((t >> (traced.len() - 1 - i)) & 1) << (n - 1 - p);
        }
        idx
    };
    debug_assert_eq!(compose(sub_dim - 1, 0), kept_mask);

    let m = rho.matrix();
    let mut out = CMat::zeros(sub_dim, sub_dim);
    for r in 0..sub_dim {
        for c in 0..sub_dim {
            let mut acc = linalg::ZERO;
            for t in 0..(1 << traced.len()) {
                acc += m[(compose(r, t), compose(c, t))];
            }
            out[(r, c)] = acc;
        }
    }
    DensityMatrix::from_positive(out, rho.weight())
}

/// Lifts `op` (acting on `targets`, first target most significant) to the
/// full register, identity elsewhere.
pub fn embed(op: &CMat, targets: &[&str], layout: &SubsystemLayout) -> Result<CMat> {
    let positions = layout.positions(targets)?;
    let sub_dim = 1 << positions.len();
    if op.nrows() != sub_dim || op.ncols() != sub_dim {
        return Err(Error::DimensionMismatch { expected: sub_dim, got: op.nrows() });
    }
    let n = layout.n_qubits();
    let dim = layout.dim();
    let rest = !mask(&positions, n);
    let mut full = CMat::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            if r & rest == c & rest {
                full[(r, c)] = op[(gather(r, &positions, n), gather(c, &positions, n))];
            }
        }
    }
    Ok(full)
}

/// `UρU†` with `u` acting on `targets`.
pub fn apply_unitary(rho: &DensityMatrix, u: &CMat, targets: &[&str], layout: &SubsystemLayout) -> Result<DensityMatrix> {
    check_layout(rho, layout)?;
    let residual = linalg::unitarity_residual(u);
    if residual > UNITARY_TOL {
        return Err(Error::NotUnitary { residual });
    }
    let full = embed(u, targets, layout)?;
    let out = &full * rho.matrix() * full.adjoint();
    DensityMatrix::from_positive(out, rho.weight())
}

/// `Σ KρK†` on `targets`, renormalized; the weight absorbs the retained trace.
pub fn apply_channel(
    rho: &DensityMatrix,
    channel: &QuantumChannel,
    targets: &[&str],
    layout: &SubsystemLayout,
) -> Result<DensityMatrix> {
    check_layout(rho, layout)?;
    let dim = rho.dim();
    let mut out = CMat::zeros(dim, dim);
    for k in channel.kraus() {
        let full = embed(k, targets, layout)?;
        out += &full * rho.matrix() * full.adjoint();
    }
    let retained = linalg::trace(&out).re;
    if retained < EMPTY_TRACE {
        return Err(Error::EmptyPostselection { probability: retained.max(0.0) });
    }
    let weight = if channel.is_trace_preserving() { rho.weight() } else { rho.weight() * retained };
    DensityMatrix::from_positive(out, weight)
}

/// Reorders qubits: the result's qubit `k` is `order[k]` of `layout`.
pub fn permute(rho: &DensityMatrix, layout: &SubsystemLayout, order: &[&str]) -> Result<DensityMatrix> {
    check_layout(rho, layout)?;
    let positions = layout.positions(order)?;
    if positions.len() != layout.n_qubits() {
        return Err(Error::InvalidSelection("permutation must name every qubit".into()));
    }
    let n = layout.n_qubits();
    let dim = layout.dim();
    let m = rho.matrix();
    let mut out = CMat::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            out[(gather(r, &positions, n), gather(c, &positions, n))] = m[(r, c)];
        }
    }
    check_dim(dim)?;
    DensityMatrix::from_positive(out, rho.weight())
}
