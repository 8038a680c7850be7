use num_complex::Complex;

use super::{CMatrix, Lu};
use crate::scalar::Real;

/// Thin SVD with singular values sorted in descending order.
fn sorted_svd<T: Real>(a: &CMatrix<T>, want_u: bool, want_v: bool) -> (Vec<T>, Option<CMatrix<T>>, Option<CMatrix<T>>) {
    let s = super::svd::svd(a, want_u, want_v);
    (s.sv, s.u, s.v)
}

/// Singular values in descending order.
pub fn singular_values<T: Real>(a: &CMatrix<T>) -> Vec<T> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Vec::new();
    }
    sorted_svd(a, false, false).0
}

/// Largest singular value.
pub fn spectral_norm<T: Real>(a: &CMatrix<T>) -> T {
    singular_values(a).first().cloned().unwrap_or_else(T::zero)
}

/// Smallest singular value of a square or rectangular matrix (`min(m, n)`-th value).
///
/// Large square matrices use inverse power iteration on `(A^H A)^{-1}` through an LU
/// factorization instead of a full SVD.
pub fn smallest_singular_value<T: Real>(a: &CMatrix<T>) -> T {
    if a.nrows() == 0 || a.ncols() == 0 {
        return T::zero();
    }
    if a.is_square() && a.nrows() > 256 {
        let lu = match Lu::factor(a) {
            Ok(lu) => lu,
            Err(_) => return T::zero(),
        };
        let n = a.nrows();
        let mut v: Vec<Complex<T>> =
            (0..n).map(|i| Complex::new(T::one() + T::lit(0.37 * ((i * 7919) % 101) as f64 / 101.0), T::zero())).collect();
        let mut est = T::zero();
        for _ in 0..60 {
            let nrm = v.iter().map(|z| z.norm_sqr()).fold(T::zero(), |s, x| s + x).sqrt();
            for z in v.iter_mut() {
                *z /= Complex::new(nrm, T::zero());
            }
            lu.solve_adjoint_vec(&mut v);
            lu.solve_vec(&mut v);
            let grow = v.iter().map(|z| z.norm_sqr()).fold(T::zero(), |s, x| s + x).sqrt();
            let next = T::one() / grow.sqrt();
            if est != T::zero() && ((next - est) / est).abs() < T::lit(1e-10) {
                return next;
            }
            est = next;
        }
        return est;
    }
    singular_values(a).last().cloned().unwrap_or_else(T::zero)
}

/// Orthonormal basis of the column span, keeping singular values above `rel_tol * s_max`.
pub fn orthonormal_basis<T: Real>(a: &CMatrix<T>, rel_tol: T) -> CMatrix<T> {
    orthonormal_basis_scaled(a, rel_tol, T::zero())
}

/// As [`orthonormal_basis`] with the threshold `rel_tol * max(s_max, reference)`, so that a
/// product that is numerically zero against the scale of its factors has rank zero.
pub fn orthonormal_basis_scaled<T: Real>(a: &CMatrix<T>, rel_tol: T, reference: T) -> CMatrix<T> {
    if a.ncols() == 0 || a.nrows() == 0 {
        return CMatrix::zeros(a.nrows(), 0);
    }
    let (sv, u, _) = sorted_svd(a, true, false);
    let smax = if sv[0] > reference { sv[0] } else { reference };
    if smax == T::zero() {
        return CMatrix::zeros(a.nrows(), 0);
    }
    let k = sv.iter().take_while(|&&s| s > rel_tol * smax).count();
    let u = u.expect("svd u requested");
    u.columns(0, k).into_owned()
}

/// Orthonormal basis of the kernel of `a` (columns), using the relative rank tolerance.
pub fn null_space<T: Real>(a: &CMatrix<T>, rel_tol: T) -> CMatrix<T> {
    let n = a.ncols();
    if n == 0 {
        return CMatrix::zeros(0, 0);
    }
    // pad to at least square so the SVD returns a complete right basis
    let padded = if a.nrows() < n {
        let mut p = CMatrix::zeros(n, n);
        p.rows_mut(0, a.nrows()).copy_from(a);
        p
    } else {
        a.clone()
    };
    let (sv, _, v) = sorted_svd(&padded, false, true);
    let v = v.expect("svd v requested");
    let smax = sv[0];
    let rank = if smax == T::zero() {
        0
    } else {
        sv.iter().take_while(|&&s| s > rel_tol * smax).count()
    };
    v.columns(rank, n - rank).into_owned()
}
