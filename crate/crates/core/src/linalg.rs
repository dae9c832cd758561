//! Dense complex helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut v: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Eigenpairs of a Hermitian matrix, ascending; column `i` of the matrix
/// belongs to eigenvalue `i`.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Largest singular value.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    let gram = m.adjoint() * m;
    hermitian_eigenvalues(&gram)
        .last()
        .copied()
        .unwrap_or(0.0)
        .max(0.0)
        .sqrt()
}

/// e^{-iHt} for Hermitian H.
pub fn evolution_operator(h: &CMatrix, t: f64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(h);
    let phases = DVector::from_iterator(values.len(), values.iter().map(|e| Complex64::from_polar(1.0, -e * t)));
    let scaled = CMatrix::from_fn(vectors.nrows(), vectors.ncols(), |r, c| vectors[(r, c)] * phases[c]);
    scaled * vectors.adjoint()
}

/// F_kl = e^{2πikl/N}/√N.
pub fn dft_matrix(levels: usize) -> CMatrix {
    let norm = 1.0 / (levels as f64).sqrt();
    CMatrix::from_fn(levels, levels, |k, l| {
        let phase = 2.0 * std::f64::consts::PI * ((k * l) % levels) as f64 / levels as f64;
        Complex64::from_polar(norm, phase)
    })
}

/// max |H − H†|.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    (m - m.adjoint()).iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// max |A_ij − B_ij|.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted_and_consistent() {
        let m = CMatrix::from_fn(4, 4, |i, j| {
            if i == j {
                Complex64::new(i as f64 * 1.5 - 2.0, 0.0)
            } else if i < j {
                Complex64::new(0.1 * (i + j) as f64, 0.05)
            } else {
                Complex64::new(0.1 * (i + j) as f64, -0.05)
            }
        });
        let (vals, vecs) = hermitian_eigen(&m);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        for (i, e) in vals.iter().enumerate() {
            let v = vecs.column(i).into_owned();
            let r = &m * &v - v * Complex64::new(*e, 0.0);
            assert!(r.norm() < 1e-12);
        }
        let only = hermitian_eigenvalues(&m);
        for (a, b) in only.iter().zip(&vals) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dft_is_unitary_and_evolution_at_zero_is_identity() {
        let f = dft_matrix(8);
        let id = CMatrix::identity(8, 8);
        assert!(max_abs_diff(&(f.adjoint() * &f), &id) < 1e-14);
        let h = &f + f.adjoint();
        assert!(max_abs_diff(&evolution_operator(&h, 0.0), &id) < 1e-12);
        assert!((spectral_norm(&f) - 1.0).abs() < 1e-12);
    }
}
