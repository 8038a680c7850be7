use num_complex::Complex;

use super::CMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// LU factorization with partial pivoting, `P A = L U`.
///
/// Factors are stored column-major in a single buffer; `perm[k]` is the row swapped into
/// position `k` at step `k`.
#[derive(Debug, Clone)]
pub struct Lu<T: Real> {
    n: usize,
    lu: Vec<Complex<T>>,
    perm: Vec<usize>,
}

impl<T: Real> Lu<T> {
    /// Factors `a`. A pivot with modulus below `n * eps * max|a_ij|` is reported as
    /// [`Error::SingularMatrix`].
    pub fn factor(a: &CMatrix<T>) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "LU of non-square {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        super::check_finite(a)?;
        let n = a.nrows();
        let mut lu: Vec<Complex<T>> = a.as_slice().to_vec();
        let amax = lu.iter().map(|z| z.norm_sqr()).fold(T::zero(), |m, x| if x > m { x } else { m });
        let amax = amax.sqrt();
        let tiny = T::lit(T::UNIT_ROUNDOFF) * T::nat(n.max(1)) * amax;
        let mut perm = vec![0usize; n];
        for k in 0..n {
            let col = k * n;
            let mut p = k;
            let mut best = lu[col + k].norm_sqr();
            for i in (k + 1)..n {
                let v = lu[col + i].norm_sqr();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            perm[k] = p;
            if best.sqrt() <= tiny || best == T::zero() {
                return Err(Error::SingularMatrix { pivot_index: k });
            }
            if p != k {
                for j in 0..n {
                    lu.swap(j * n + k, j * n + p);
                }
            }
            let pivot = lu[col + k];
            let inv = Complex::new(T::one(), T::zero()) / pivot;
            for i in (k + 1)..n {
                lu[col + i] *= inv;
            }
            for j in (k + 1)..n {
                let akj = lu[j * n + k];
                if akj.re == T::zero() && akj.im == T::zero() {
                    continue;
                }
                let (left, right) = lu.split_at_mut(j * n);
                let lcol = &left[col..col + n];
                let ucol = &mut right[..n];
                for i in (k + 1)..n {
                    ucol[i] -= lcol[i] * akj;
                }
            }
        }
        Ok(Self { n, lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `ln |det A|` from the pivots.
    pub fn log_abs_det(&self) -> T {
        (0..self.n).fold(T::zero(), |acc, k| acc + self.lu[k * self.n + k].norm_sqr().sqrt().ln())
    }

    /// Solves `A X = B` for every column of `b`.
    pub fn solve(&self, b: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(b.nrows(), self.n, "rhs rows must match the factored dimension");
        let mut x = b.clone();
        for c in 0..x.ncols() {
            let col = x.column_mut(c);
            let mut v: Vec<Complex<T>> = col.iter().cloned().collect();
            self.solve_vec(&mut v);
            for (i, z) in v.into_iter().enumerate() {
                x[(i, c)] = z;
            }
        }
        x
    }

    /// In-place solve of `A x = b`.
    pub fn solve_vec(&self, v: &mut [Complex<T>]) {
        let n = self.n;
        for k in 0..n {
            let p = self.perm[k];
            if p != k {
                v.swap(k, p);
            }
        }
        for k in 0..n {
            let vk = v[k];
            let col = &self.lu[k * n..(k + 1) * n];
            for i in (k + 1)..n {
                v[i] -= col[i] * vk;
            }
        }
        for k in (0..n).rev() {
            let col = &self.lu[k * n..(k + 1) * n];
            v[k] /= col[k];
            let vk = v[k];
            for i in 0..k {
                v[i] -= col[i] * vk;
            }
        }
    }

    /// Solves `A^H x = b`.
    pub fn solve_adjoint_vec(&self, v: &mut [Complex<T>]) {
        let n = self.n;
        // U^H y = b
        for k in 0..n {
            let col = &self.lu[k * n..(k + 1) * n];
            let mut s = v[k];
            for i in 0..k {
                s -= col[i].conj() * v[i];
            }
            v[k] = s / col[k].conj();
        }
        // L^H w = y
        for k in (0..n).rev() {
            let col = &self.lu[k * n..(k + 1) * n];
            let mut s = v[k];
            for i in (k + 1)..n {
                s -= col[i].conj() * v[i];
            }
            v[k] = s;
        }
        for k in (0..n).rev() {
            let p = self.perm[k];
            if p != k {
                v.swap(k, p);
            }
        }
    }
}

/// Solves `A X = B` by partial-pivoting LU.
pub fn lu_solve<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<CMatrix<T>> {
    if b.nrows() != a.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "rhs has {} rows, matrix {}",
            b.nrows(),
            a.nrows()
        )));
    }
    Ok(Lu::factor(a)?.solve(b))
}

pub fn inverse<T: Real>(a: &CMatrix<T>) -> Result<CMatrix<T>> {
    lu_solve(a, &CMatrix::identity(a.nrows(), a.nrows()))
}
