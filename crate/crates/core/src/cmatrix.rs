//! Dense complex matrices and the spectral helpers the rest of the crate
//! leans on: Hermitian eigensolves, spectral norms, PSD square roots.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::C64;

/// Dense complex matrix, double precision.
pub type CMatrix = DMatrix<C64>;

pub fn zeros(rows: usize, cols: usize) -> CMatrix {
    CMatrix::zeros(rows, cols)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// Real matrix lifted entrywise to complex.
pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> CMatrix {
    assert_eq!(entries.len(), rows * cols, "entry count");
    CMatrix::from_row_slice(rows, cols, &entries.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>())
}

pub fn scalar(value: C64) -> CMatrix {
    CMatrix::from_element(1, 1, value)
}

/// Largest entry magnitude; 0 for empty matrices.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Max entry magnitude of `M - M*`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// `(M + M*) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigenvalues of a Hermitian matrix, ascending. The input is hermitized
/// first; callers that care about the defect check it themselves.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut vals: Vec<f64> = hermitize(m)
        .symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

/// Smallest eigenvalue of a Hermitian matrix; +inf for an empty matrix so
/// that vacuous positivity checks pass.
pub fn min_eig_hermitian(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).first().copied().unwrap_or(f64::INFINITY)
}

pub fn max_eig_hermitian(m: &CMatrix) -> f64 {
    hermitian_eigenvalues(m).last().copied().unwrap_or(0.0)
}

/// Spectral norm via a Hermitian eigensolve of `M* M`.
pub fn spectral_norm(m: &CMatrix) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    let gram = m.adjoint() * m;
    max_eig_hermitian(&gram).max(0.0).sqrt()
}

pub fn frobenius_norm(m: &CMatrix) -> f64 {
    m.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Hermitian square root of a PSD matrix. Eigenvalues in `[-1e-12, 0)` are
/// clipped to zero; anything more negative is an error.
pub fn sqrt_psd(m: &CMatrix) -> Result<CMatrix> {
    if m.nrows() == 0 {
        return Ok(m.clone());
    }
    let eig = hermitize(m).symmetric_eigen();
    let mut roots = Vec::with_capacity(eig.eigenvalues.len());
    for &lambda in eig.eigenvalues.iter() {
        if lambda < -1e-12 {
            return Err(Error::numerics(format!(
                "matrix square root: eigenvalue {lambda:.3e} below -1e-12"
            )));
        }
        roots.push(C64::new(lambda.max(0.0).sqrt(), 0.0));
    }
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(roots));
    Ok(&eig.eigenvectors * d * eig.eigenvectors.adjoint())
}

/// Metric projection onto the PSD cone: hermitize, then clip negative
/// eigenvalues to zero.
pub fn project_psd(m: &CMatrix) -> CMatrix {
    if m.nrows() == 0 {
        return m.clone();
    }
    let eig = hermitize(m).symmetric_eigen();
    let d = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        eig.eigenvalues.len(),
        eig.eigenvalues.iter().map(|&l| C64::new(l.max(0.0), 0.0)),
    ));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// Kronecker product `A (x) B`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Matrix power by repeated squaring.
pub fn matrix_power(m: &CMatrix, mut exp: u32) -> CMatrix {
    assert_eq!(m.nrows(), m.ncols(), "matrix power needs a square matrix");
    let mut result = identity(m.nrows());
    let mut base = m.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            result = &result * &base;
        }
        exp >>= 1;
        if exp > 0 {
            base = &base * &base;
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn adjoint_involution_exact() {
        let m = CMatrix::from_row_slice(
            2,
            3,
            &[
                C64::new(1.0, 2.0),
                C64::new(-0.5, 0.25),
                C64::new(0.0, -1.0),
                C64::new(3.0, 0.0),
                C64::new(0.125, 0.75),
                C64::new(-2.5, 1.5),
            ],
        );
        assert_eq!(m.adjoint().adjoint(), m);
    }

    #[test]
    fn spectral_norm_known() {
        // [[1,2],[2,1]] has eigenvalues 3 and -1.
        let m = from_real(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert_abs_diff_eq!(spectral_norm(&m), 3.0, epsilon = 1e-12);
        let vals = hermitian_eigenvalues(&m);
        assert_abs_diff_eq!(vals[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(vals[1], 3.0, epsilon = 1e-12);
    }

    #[test]
    fn sqrt_psd_squares_back() {
        let b = CMatrix::from_fn(3, 3, |i, j| C64::new((i + 2 * j) as f64 * 0.1, (i as f64 - j as f64) * 0.05));
        let g = &b * b.adjoint();
        let s = sqrt_psd(&g).unwrap();
        assert!(max_abs(&(&s * &s - &g)) < 1e-12);
        assert!(hermitian_defect(&s) < 1e-13);
    }

    #[test]
    fn sqrt_psd_rejects_indefinite() {
        let m = from_real(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(sqrt_psd(&m).is_err());
    }

    #[test]
    fn matrix_power_matches_repeated_mul() {
        let m = CMatrix::from_fn(3, 3, |i, j| C64::new(0.3 * (i as f64 + 1.0), 0.1 * j as f64));
        let mut direct = identity(3);
        for _ in 0..7 {
            direct = &direct * &m;
        }
        assert!(max_abs(&(matrix_power(&m, 7) - direct)) < 1e-10);
    }

    #[test]
    fn kron_known_values() {
        let a = from_real(2, 2, &[1.0, 2.0, 4.0, 5.0]);
        let b = from_real(1, 2, &[1.0, 2.0]);
        let k = kron(&a, &b);
        let expected = from_real(2, 4, &[1.0, 2.0, 2.0, 4.0, 4.0, 8.0, 5.0, 10.0]);
        assert_eq!(k, expected);
    }
}
