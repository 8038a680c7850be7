//! One-sided Jacobi SVD.
//!
//! Used instead of the bidiagonal SVD of nalgebra, whose complex path can return factors that do
//! not reconstruct rank-deficient inputs. Jacobi is slower but accurate to working precision
//! for every singular value, which the rank decisions downstream rely on.

use num_complex::Complex;

use super::CMatrix;
use crate::scalar::Real;

pub(crate) struct Svd<T: Real> {
    /// Descending.
    pub sv: Vec<T>,
    /// `m × min(m, n)`; columns belonging to zero singular values are zero.
    pub u: Option<CMatrix<T>>,
    /// `n × min(m, n)`.
    pub v: Option<CMatrix<T>>,
}

pub(crate) fn svd<T: Real>(a: &CMatrix<T>, want_u: bool, want_v: bool) -> Svd<T> {
    if a.nrows() < a.ncols() {
        let s = tall_svd(&a.adjoint(), want_v, want_u);
        return Svd { sv: s.sv, u: s.v, v: s.u };
    }
    tall_svd(a, want_u, want_v)
}

fn tall_svd<T: Real>(a: &CMatrix<T>, want_u: bool, want_v: bool) -> Svd<T> {
    let (m, n) = a.shape();
    let mut w: Vec<Complex<T>> = a.as_slice().to_vec();
    let mut v: Vec<Complex<T>> = if want_v {
        let mut id = vec![Complex::new(T::zero(), T::zero()); n * n];
        for i in 0..n {
            id[i * n + i] = Complex::new(T::one(), T::zero());
        }
        id
    } else {
        Vec::new()
    };
    let eps = T::lit(T::UNIT_ROUNDOFF * (m.max(1) as f64));
    let mut norms: Vec<T> = (0..n).map(|j| col_norm2(&w[j * m..(j + 1) * m])).collect();
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (alpha, beta) = (norms[p], norms[q]);
                if alpha == T::zero() || beta == T::zero() {
                    continue;
                }
                let (cp, cq) = split_cols(&mut w, m, p, q);
                let mut gamma = Complex::new(T::zero(), T::zero());
                for i in 0..m {
                    gamma += cp[i].conj() * cq[i];
                }
                let g = crate::scalar::cabs(gamma);
                if g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / Complex::new(g, T::zero());
                let zeta = (beta - alpha) / (T::lit(2.0) * g);
                let sign = if zeta >= T::zero() { T::one() } else { -T::one() };
                let t = sign / (zeta.abs() + (T::one() + zeta * zeta).sqrt());
                let c = T::one() / (T::one() + t * t).sqrt();
                let s = c * t;
                let cc = Complex::new(c, T::zero());
                let sc = Complex::new(s, T::zero());
                // a_q is rescaled by conj(phase) so that the pairing becomes real
                let pc = phase.conj();
                for i in 0..m {
                    let x = cp[i];
                    let y = cq[i] * pc;
                    cp[i] = cc * x - sc * y;
                    cq[i] = sc * x + cc * y;
                }
                norms[p] = col_norm2(cp);
                norms[q] = col_norm2(cq);
                if want_v {
                    let (vp, vq) = split_cols(&mut v, n, p, q);
                    for i in 0..n {
                        let x = vp[i];
                        let y = vq[i] * pc;
                        vp[i] = cc * x - sc * y;
                        vq[i] = sc * x + cc * y;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let sv_unsorted: Vec<T> = norms.iter().map(|x| x.sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| sv_unsorted[j].partial_cmp(&sv_unsorted[i]).unwrap_or(std::cmp::Ordering::Equal));
    let sv: Vec<T> = order.iter().map(|&i| sv_unsorted[i]).collect();
    let u = want_u.then(|| {
        CMatrix::from_fn(m, n, |r, c| {
            let j = order[c];
            let s = sv_unsorted[j];
            if s == T::zero() {
                Complex::new(T::zero(), T::zero())
            } else {
                w[j * m + r] / Complex::new(s, T::zero())
            }
        })
    });
    let v = want_v.then(|| CMatrix::from_fn(n, n, |r, c| v[order[c] * n + r]));
    Svd { sv, u, v }
}

fn col_norm2<T: Real>(c: &[Complex<T>]) -> T {
    c.iter().fold(T::zero(), |s, z| s + z.norm_sqr())
}

/// Two disjoint mutable columns `p < q` of a column-major buffer.
fn split_cols<T>(buf: &mut [T], m: usize, p: usize, q: usize) -> (&mut [T], &mut [T]) {
    let (left, right) = buf.split_at_mut(q * m);
    (&mut left[p * m..(p + 1) * m], &mut right[..m])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{identity, random_complex};
    use rand::SeedableRng;

    fn check(a: &CMatrix<f64>) {
        let s = svd(a, true, true);
        let (u, v) = (s.u.unwrap(), s.v.unwrap());
        let k = s.sv.len();
        let sig = CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(k, s.sv.iter().map(|&x| Complex::new(x, 0.0))));
        let recon = &u * sig * v.adjoint();
        assert!((recon - a).norm() <= 1e-13 * (1.0 + a.norm()));
        assert!((v.adjoint() * &v - identity::<f64>(k)).norm() < 1e-13);
        assert!(s.sv.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn random_shapes() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for (m, n) in [(1, 1), (4, 4), (7, 3), (3, 7), (12, 12)] {
            check(&random_complex(&mut rng, m, n));
        }
    }

    #[test]
    fn rank_deficient_oblique_projector() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let b = random_complex::<f64, _>(&mut rng, 6, 3);
        let g0 = random_complex::<f64, _>(&mut rng, 6, 6);
        let g = g0.adjoint() * &g0 + identity::<f64>(6);
        let pi = &b * crate::linalg::lu_solve(&(b.adjoint() * &g * &b), &(b.adjoint() * &g)).unwrap();
        check(&pi);
        let s = svd(&pi, false, false).sv;
        assert!(s[3] < 1e-14 && s[2] > 0.5);
    }

    #[test]
    fn zero_matrix() {
        let s = svd(&CMatrix::<f64>::zeros(3, 2), true, true);
        assert_eq!(s.sv, vec![0.0, 0.0]);
    }
}
