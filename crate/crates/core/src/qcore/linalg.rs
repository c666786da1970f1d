//! Dense complex matrix helpers on top of nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(dim: usize) -> CMat {
    CMat::identity(dim, dim)
}

pub fn pauli_x() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, ONE, ONE, ZERO])
}

pub fn pauli_y() -> CMat {
    CMat::from_row_slice(2, 2, &[ZERO, -I, I, ZERO])
}

pub fn pauli_z() -> CMat {
    CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, -ONE])
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// `(m + m†) / 2`.
pub fn hermitize(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Largest entry of `|m − m†|`.
pub fn hermiticity_residual(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Largest entry of `|U†U − 1|`.
pub fn unitarity_residual(u: &CMat) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    max_abs(&(u.adjoint() * u - identity(u.nrows())))
}

pub fn trace(m: &CMat) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Eigen-decomposition of a Hermitian matrix. Eigenvalues are returned in
/// ascending order with eigenvectors as the matching columns.
pub fn eigh(m: &CMat) -> (Vec<f64>, CMat) {
    let dim = m.nrows();
    let eig = hermitize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vectors = CMat::zeros(dim, dim);
    for (col, &k) in order.iter().enumerate() {
        vectors.set_column(col, &eig.eigenvectors.column(k));
    }
    (values, vectors)
}

pub fn eigvalsh(m: &CMat) -> Vec<f64> {
    eigh(m).0
}

/// Rebuild `V diag(values) V†`.
pub fn from_spectrum(values: &[f64], vectors: &CMat) -> CMat {
    let dim = vectors.nrows();
    let mut out = CMat::zeros(dim, dim);
    for (k, &lambda) in values.iter().enumerate() {
        if lambda == 0.0 {
            continue;
        }
        let v = vectors.column(k);
        out += (v * v.adjoint()).scale(lambda);
    }
    out
}

pub fn outer(psi: &[Complex64]) -> CMat {
    let v = nalgebra::DVector::from_column_slice(psi);
    &v * v.adjoint()
}

/// Number of qubits for a power-of-two dimension.
pub fn qubits_for_dim(dim: usize) -> Option<usize> {
    (dim.is_power_of_two()).then(|| dim.trailing_zeros() as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn paulis_anticommute_and_square_to_identity() {
        let (x, y, z) = (pauli_x(), pauli_y(), pauli_z());
        for p in [&x, &y, &z] {
            assert!(max_abs(&(p * p - identity(2))) < 1e-15);
        }
        assert!(max_abs(&(&x * &y + &y * &x)) < 1e-15);
        assert!(max_abs(&(&x * &y - (&z * I))) < 1e-15);
    }

    #[test]
    fn eigh_reconstructs_input() {
        let m = CMat::from_row_slice(
            3,
            3,
            &[c(2.0, 0.0), c(0.5, 0.2), c(0.0, -1.0), c(0.5, -0.2), c(1.0, 0.0), c(0.3, 0.0), c(0.0, 1.0), c(0.3, 0.0), c(-1.0, 0.0)],
        );
        let (vals, vecs) = eigh(&m);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        assert!(max_abs(&(from_spectrum(&vals, &vecs) - &m)) < 1e-12);
    }
}
