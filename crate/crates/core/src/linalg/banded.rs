use nalgebra::ComplexField;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Square band matrix with `kl` sub- and `ku` super-diagonals.
///
/// Rows are stored contiguously with room for the `kl` extra super-diagonals that partial
/// pivoting can create, so the same buffer is factored in place.
#[derive(Debug, Clone)]
pub struct BandedMatrix<F: ComplexField + Copy> {
    n: usize,
    kl: usize,
    ku: usize,
    width: usize,
    data: Vec<F>,
}

impl<F: ComplexField + Copy> BandedMatrix<F> {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Self { n, kl, ku, width, data: vec![F::zero(); n * width] }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        (self.kl, self.ku)
    }

    #[inline]
    fn idx(&self, i: usize, j: usize) -> usize {
        i * self.width + (j + self.kl - i)
    }

    #[inline]
    pub fn in_band(&self, i: usize, j: usize) -> bool {
        i < self.n && j < self.n && j + self.kl >= i && j <= i + self.ku
    }

    pub fn get(&self, i: usize, j: usize) -> F {
        if self.in_band(i, j) {
            self.data[self.idx(i, j)]
        } else {
            F::zero()
        }
    }

    /// Adds `v` to entry `(i, j)`; panics outside the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: F) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let k = self.idx(i, j);
        self.data[k] += v;
    }

    pub fn set(&mut self, i: usize, j: usize, v: F) {
        assert!(self.in_band(i, j), "entry ({i}, {j}) outside band");
        let k = self.idx(i, j);
        self.data[k] = v;
    }

    /// `y = A x` for a single vector.
    pub fn mul_vec(&self, x: &[F]) -> Vec<F> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.kl);
                let hi = (i + self.ku).min(self.n - 1);
                let mut acc = F::zero();
                for j in lo..=hi {
                    acc += self.data[self.idx(i, j)] * x[j];
                }
                acc
            })
            .collect()
    }

    pub fn factor(self) -> Result<BandedLu<F>> {
        BandedLu::factor(self)
    }
}

/// Banded LU with partial pivoting (row interchanges confined to the band).
#[derive(Debug, Clone)]
pub struct BandedLu<F: ComplexField + Copy> {
    a: BandedMatrix<F>,
    perm: Vec<usize>,
    reach: Vec<usize>,
}

impl<F: ComplexField + Copy> BandedLu<F> {
    pub fn factor(mut a: BandedMatrix<F>) -> Result<Self> {
        let n = a.n;
        let kl = a.kl;
        let mut amax = F::RealField::zero();
        for v in &a.data {
            let m = v.modulus();
            if m > amax {
                amax = m;
            }
        }
        let eps: F::RealField = nalgebra::convert(f64::EPSILON);
        let tiny = eps * nalgebra::convert::<f64, F::RealField>(n.max(1) as f64) * amax;
        let mut perm = vec![0usize; n];
        // last column holding a nonzero in each row; grows with pivoting fill
        let mut reach: Vec<usize> = (0..n).map(|i| (i + a.ku).min(n.saturating_sub(1))).collect();
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            let mut p = k;
            let mut best = a.data[a.idx(k, k)].modulus();
            for i in (k + 1)..=last {
                let v = a.data[a.idx(i, k)].modulus();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            perm[k] = p;
            if best <= tiny || best == F::RealField::zero() {
                return Err(Error::SingularMatrix { pivot_index: k });
            }
            if p != k {
                let hi = reach[k].max(reach[p]);
                for j in k..=hi {
                    let (x, y) = (a.idx(k, j), a.idx(p, j));
                    a.data.swap(x, y);
                }
                reach.swap(k, p);
            }
            let pivot = a.data[a.idx(k, k)];
            let hi = reach[k];
            let row_k = a.idx(k, k);
            for i in (k + 1)..=last {
                let ik = a.idx(i, k);
                let l = a.data[ik] / pivot;
                a.data[ik] = l;
                if l == F::zero() {
                    continue;
                }
                let row_i = ik;
                for off in 1..=(hi - k) {
                    let upd = a.data[row_k + off];
                    a.data[row_i + off] -= l * upd;
                }
                if hi > reach[i] {
                    reach[i] = hi;
                }
            }
        }
        Ok(Self { a, perm, reach })
    }

    pub fn dim(&self) -> usize {
        self.a.n
    }

    /// Solves in place for `nrhs` right-hand sides stored row-major (`b[i * nrhs + r]`).
    pub fn solve_many(&self, b: &mut [F], nrhs: usize) {
        let n = self.a.n;
        assert_eq!(b.len(), n * nrhs);
        for k in 0..n {
            let p = self.perm[k];
            if p != k {
                for r in 0..nrhs {
                    b.swap(k * nrhs + r, p * nrhs + r);
                }
            }
            let last = (k + self.a.kl).min(n - 1);
            let (head, tail) = b.split_at_mut((k + 1) * nrhs);
            let bk = &head[k * nrhs..];
            for i in (k + 1)..=last {
                let l = self.a.data[self.a.idx(i, k)];
                if l == F::zero() {
                    continue;
                }
                let bi = &mut tail[(i - k - 1) * nrhs..(i - k) * nrhs];
                for r in 0..nrhs {
                    bi[r] -= l * bk[r];
                }
            }
        }
        let mut acc = vec![F::zero(); nrhs];
        for k in (0..n).rev() {
            acc.copy_from_slice(&b[k * nrhs..(k + 1) * nrhs]);
            for j in (k + 1)..=self.reach[k] {
                let u = self.a.data[self.a.idx(k, j)];
                if u == F::zero() {
                    continue;
                }
                let bj = &b[j * nrhs..(j + 1) * nrhs];
                for r in 0..nrhs {
                    acc[r] -= u * bj[r];
                }
            }
            let d = self.a.data[self.a.idx(k, k)];
            for r in 0..nrhs {
                b[k * nrhs + r] = acc[r] / d;
            }
        }
    }

    pub fn solve(&self, b: &[F]) -> Vec<F> {
        let mut x = b.to_vec();
        self.solve_many(&mut x, 1);
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_band(n: usize, kl: usize, ku: usize, seed: u64) -> BandedMatrix<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = BandedMatrix::zeros(n, kl, ku);
        for i in 0..n {
            for j in i.saturating_sub(kl)..=(i + ku).min(n - 1) {
                a.set(i, j, rng.random_range(-1.0..1.0));
            }
        }
        a
    }

    #[test]
    fn solves_random_banded_system() {
        let (n, kl, ku) = (60, 3, 2);
        let a = random_band(n, kl, ku, 7);
        let x0: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let b = a.mul_vec(&x0);
        let lu = a.clone().factor().unwrap();
        let x = lu.solve(&b);
        let err: f64 = x.iter().zip(&x0).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        assert!(err < 1e-9, "err {err}");
    }

    #[test]
    fn multi_rhs_matches_single() {
        let (n, kl, ku) = (40, 2, 4);
        let a = random_band(n, kl, ku, 11);
        let lu = a.factor().unwrap();
        let nrhs = 3;
        let b: Vec<f64> = (0..n * nrhs).map(|k| (k as f64).cos()).collect();
        let mut many = b.clone();
        lu.solve_many(&mut many, nrhs);
        for r in 0..nrhs {
            let col: Vec<f64> = (0..n).map(|i| b[i * nrhs + r]).collect();
            let x = lu.solve(&col);
            for i in 0..n {
                assert!((x[i] - many[i * nrhs + r]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn complex_tridiagonal() {
        let n = 30;
        let mut a = BandedMatrix::<Complex64>::zeros(n, 1, 1);
        for i in 0..n {
            a.set(i, i, Complex64::new(2.0, 0.5));
            if i > 0 {
                a.set(i, i - 1, Complex64::new(-1.0, 0.0));
                a.set(i - 1, i, Complex64::new(-1.0, 0.0));
            }
        }
        let x0: Vec<Complex64> = (0..n).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let b = a.mul_vec(&x0);
        let x = a.factor().unwrap().solve(&b);
        for (p, q) in x.iter().zip(&x0) {
            assert!((p - q).norm() < 1e-10);
        }
    }

    #[test]
    fn singular_reported() {
        let a = BandedMatrix::<f64>::zeros(4, 1, 1);
        assert!(matches!(a.factor(), Err(Error::SingularMatrix { pivot_index: 0 })));
    }
}
