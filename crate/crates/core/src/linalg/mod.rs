//! Dense complex linear algebra: factorizations, subspaces, projectors and contour projectors.

mod banded;
mod dense;
mod lu;
mod projector;
pub mod quadrature;
mod riesz;
mod subspace;
mod svd;

pub use banded::{BandedLu, BandedMatrix};
pub use dense::{
    null_space, orthonormal_basis, orthonormal_basis_scaled, singular_values, smallest_singular_value, spectral_norm,
};
pub use lu::{inverse, lu_solve, Lu};
pub use projector::{idempotence_defect, orth_projector, projector_from_pair, Projector};
pub use riesz::{riesz_projector, Contour, ContourSpec};
pub use subspace::{direct_sum_check, subspace_distance, DirectSumReport, SubspaceBasis};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub type CMatrix<T> = DMatrix<Complex<T>>;
pub type CVector<T> = DVector<Complex<T>>;

/// Frobenius norm.
#[inline]
pub fn fro<T: Real>(a: &CMatrix<T>) -> T {
    a.norm()
}

/// `max(1, ||a||_F)`, the scale used for relative tolerances.
#[inline]
pub fn scale<T: Real>(a: &CMatrix<T>) -> T {
    let n = a.norm();
    if n > T::one() {
        n
    } else {
        T::one()
    }
}

pub fn check_finite<T: Real>(a: &CMatrix<T>) -> Result<()> {
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            if !crate::scalar::is_finite(&a[(i, j)]) {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

pub fn identity<T: Real>(n: usize) -> CMatrix<T> {
    CMatrix::identity(n, n)
}

/// Real matrix lifted to complex entries.
pub fn from_real<T: Real>(rows: usize, cols: usize, data_row_major: &[f64]) -> CMatrix<T> {
    assert_eq!(rows * cols, data_row_major.len());
    CMatrix::from_fn(rows, cols, |i, j| Complex::new(T::lit(data_row_major[i * cols + j]), T::zero()))
}

pub fn hstack<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<CMatrix<T>> {
    if a.nrows() != b.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "hstack rows {} vs {}",
            a.nrows(),
            b.nrows()
        )));
    }
    let mut out = CMatrix::zeros(a.nrows(), a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    Ok(out)
}

pub fn vstack<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<CMatrix<T>> {
    if a.ncols() != b.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "vstack cols {} vs {}",
            a.ncols(),
            b.ncols()
        )));
    }
    let mut out = CMatrix::zeros(a.nrows() + b.nrows(), a.ncols());
    out.rows_mut(0, a.nrows()).copy_from(a);
    out.rows_mut(a.nrows(), b.nrows()).copy_from(b);
    Ok(out)
}

/// Block-diagonal concatenation.
pub fn block_diag<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    let mut out = CMatrix::zeros(a.nrows() + b.nrows(), a.ncols() + b.ncols());
    out.view_mut((0, 0), a.shape()).copy_from(a);
    out.view_mut((a.nrows(), a.ncols()), b.shape()).copy_from(b);
    out
}

/// Adjoint with respect to the inner product `<u, v>_G = u^H G v`: `G^{-1} C^H G`.
pub fn gram_adjoint<T: Real>(c: &CMatrix<T>, gram: &CMatrix<T>) -> Result<CMatrix<T>> {
    let rhs = c.adjoint() * gram;
    lu_solve(gram, &rhs)
}

/// `||a - a^H||_F <= tol * scale(a)`.
pub fn is_hermitian<T: Real>(a: &CMatrix<T>, tol: T) -> bool {
    a.is_square() && fro(&(a - a.adjoint())) <= tol * scale(a)
}

/// Hermitian positive definite test by an explicit Cholesky sweep with real positive pivots.
pub fn is_positive_definite<T: Real>(g: &CMatrix<T>) -> bool {
    if !is_hermitian(g, T::tol(1e-12)) {
        return false;
    }
    let n = g.nrows();
    let mut l = g.clone();
    let tiny = T::lit(T::UNIT_ROUNDOFF) * scale(g);
    for k in 0..n {
        let mut d = l[(k, k)].re;
        for j in 0..k {
            d -= l[(k, j)].norm_sqr();
        }
        if d <= tiny {
            return false;
        }
        let d = d.sqrt();
        l[(k, k)] = Complex::new(d, T::zero());
        for i in (k + 1)..n {
            let mut v = l[(i, k)];
            for j in 0..k {
                v -= l[(i, j)] * l[(k, j)].conj();
            }
            l[(i, k)] = v / d;
        }
    }
    true
}

/// Matrix with independent standard complex Gaussian entries.
pub fn random_complex<T: Real, R: rand::Rng>(rng: &mut R, rows: usize, cols: usize) -> CMatrix<T> {
    use rand_distr::StandardNormal;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex::new(T::lit(re), T::lit(im))
    })
}
