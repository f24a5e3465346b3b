//! Dense complex linear-algebra helpers shared by the engine and the oracle.

use nalgebra::DMatrix;
use rand::Rng;

use crate::{CMatrix, CVector, C64};

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Largest absolute column sum.
pub fn norm_one(a: &CMatrix) -> f64 {
    a.column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

pub fn frobenius(a: &CMatrix) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn vec_norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Spectral norm (largest singular value).
pub fn op_norm(a: &CMatrix) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    a.clone()
        .singular_values()
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

pub fn singular_values(a: &CMatrix) -> Vec<f64> {
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| x.total_cmp(y));
    s
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
///
/// The argument is scaled by `2^-s` until its 1-norm is at most 1/2; the series
/// is summed until the next term is below `1e-17` relative to the partial sum,
/// then squared `s` times.
pub fn expm(a: &CMatrix) -> CMatrix {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm requires a square matrix");
    if n == 0 {
        return a.clone();
    }
    let norm = norm_one(a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a * C64::new(0.5f64.powi(squarings), 0.0);

    let mut sum = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for k in 1..64 {
        term = &term * &scaled * C64::new(1.0 / k as f64, 0.0);
        sum += &term;
        if norm_one(&term) <= 1e-17 * norm_one(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
///
/// Only the lower triangle of a slightly non-Hermitian input is effectively
/// used; callers symmetrize first when that matters.
pub fn hermitian_eigen(h: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = h.nrows();
    let herm = hermitian_part(h);
    let eig = herm.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    hermitian_eigen(h).0
}

/// `f(H)` for Hermitian `H`, evaluated through its eigen-decomposition.
pub fn hermitian_function(h: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let (values, vectors) = hermitian_eigen(h);
    let n = h.nrows();
    let diag = CMatrix::from_diagonal(&CVector::from_iterator(
        n,
        values.iter().map(|&v| C64::new(f(v), 0.0)),
    ));
    &vectors * diag * vectors.adjoint()
}

pub fn hermitian_part(h: &CMatrix) -> CMatrix {
    (h + h.adjoint()) * C64::new(0.5, 0.0)
}

pub fn symmetric_part(m: &CMatrix) -> CMatrix {
    (m + m.transpose()) * C64::new(0.5, 0.0)
}

pub fn antisymmetric_part(m: &CMatrix) -> CMatrix {
    (m - m.transpose()) * C64::new(0.5, 0.0)
}

pub fn scalar(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn zeros(r: usize, c: usize) -> CMatrix {
    DMatrix::from_element(r, c, ZERO)
}

pub fn identity(n: usize) -> CMatrix {
    DMatrix::from_fn(n, n, |i, j| if i == j { ONE } else { ZERO })
}

/// Complex number with independent uniform real and imaginary parts in `[-1, 1)`.
pub fn random_complex<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

pub fn random_matrix<R: Rng + ?Sized>(rng: &mut R, r: usize, c: usize) -> CMatrix {
    CMatrix::from_fn(r, c, |_, _| random_complex(rng))
}

pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVector {
    CVector::from_fn(n, |_, _| random_complex(rng))
}

/// Random unitary `exp(iA)` with `A` a random Hermitian matrix of entries O(1).
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMatrix {
    let a = hermitian_part(&random_matrix(rng, n, n)) * C64::new(0.0, 2.0);
    expm(&a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn expm_of_rotation_generator() {
        let t = 0.7f64;
        let a = CMatrix::from_row_slice(2, 2, &[ZERO, scalar(-t), scalar(t), ZERO]);
        let e = expm(&a);
        assert!((e[(0, 0)] - scalar(t.cos())).norm() < 1e-14);
        assert!((e[(0, 1)] - scalar(-t.sin())).norm() < 1e-14);
        assert!((e[(1, 0)] - scalar(t.sin())).norm() < 1e-14);
    }

    #[test]
    fn expm_large_norm_hyperbolic() {
        let t = 12.0f64;
        let a = CMatrix::from_row_slice(2, 2, &[ZERO, scalar(t), scalar(t), ZERO]);
        let e = expm(&a);
        assert!(((e[(0, 0)].re - t.cosh()) / t.cosh()).abs() < 1e-12);
        assert!(((e[(0, 1)].re - t.sinh()) / t.sinh()).abs() < 1e-12);
    }

    #[test]
    fn expm_matches_eigen_route_for_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = hermitian_part(&random_matrix(&mut rng, 4, 4));
        let via_taylor = expm(&(&h * C64::new(0.0, 1.3)));
        let (vals, vecs) = hermitian_eigen(&h);
        let d = CMatrix::from_diagonal(&CVector::from_iterator(
            4,
            vals.iter().map(|&v| C64::new(0.0, 1.3 * v).exp()),
        ));
        let via_eigen = &vecs * d * vecs.adjoint();
        assert!(frobenius(&(via_taylor - via_eigen)) < 1e-12);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = random_unitary(&mut rng, 3);
        assert!(frobenius(&(&u * u.adjoint() - identity(3))) < 1e-12);
    }

    #[test]
    fn eigenvalues_ascending() {
        let h = CMatrix::from_row_slice(2, 2, &[scalar(2.0), ZERO, ZERO, scalar(-1.0)]);
        assert_eq!(hermitian_eigenvalues(&h), vec![-1.0, 2.0]);
    }
}
