use super::{check_finite, hstack, orthonormal_basis, singular_values, smallest_singular_value, CMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Column basis of a subspace of `C^d` with a certified full column rank.
#[derive(Debug, Clone)]
pub struct SubspaceBasis<T: Real> {
    basis: CMatrix<T>,
    rank_tol: T,
}

impl<T: Real> SubspaceBasis<T> {
    /// Wraps `basis`, rejecting it when `s_min <= rank_tol * s_max`.
    pub fn new(basis: CMatrix<T>, rank_tol: T) -> Result<Self> {
        check_finite(&basis)?;
        if basis.ncols() > basis.nrows() {
            return Err(Error::RankDeficient { ratio: 0.0 });
        }
        if basis.ncols() > 0 {
            let sv = singular_values(&basis);
            let smax = sv[0];
            let smin = *sv.last().unwrap();
            if smax == T::zero() || smin <= rank_tol * smax {
                let ratio = if smax == T::zero() { 0.0 } else { (smin / smax).as_f64() };
                return Err(Error::RankDeficient { ratio });
            }
        }
        Ok(Self { basis, rank_tol })
    }

    /// Orthonormal basis for the column span of `spanning`; the dimension is the numerical rank.
    pub fn from_span(spanning: &CMatrix<T>, rank_tol: T) -> Result<Self> {
        check_finite(spanning)?;
        Ok(Self { basis: orthonormal_basis(spanning, rank_tol), rank_tol })
    }

    /// Span with the rank decided against `max(s_max, reference)`; `reference` is typically the
    /// norm of the map that produced `spanning`.
    pub fn from_span_scaled(spanning: &CMatrix<T>, rank_tol: T, reference: T) -> Result<Self> {
        check_finite(spanning)?;
        Ok(Self { basis: super::dense::orthonormal_basis_scaled(spanning, rank_tol, reference), rank_tol })
    }

    pub fn zero(ambient_dim: usize) -> Self {
        Self { basis: CMatrix::zeros(ambient_dim, 0), rank_tol: T::tol(1e-8) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.basis.nrows()
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &CMatrix<T> {
        &self.basis
    }

    pub fn rank_tol(&self) -> T {
        self.rank_tol
    }

    /// Orthonormalized copy of the basis (same span).
    pub fn orthonormal(&self) -> CMatrix<T> {
        orthonormal_basis(&self.basis, self.rank_tol)
    }

    /// Euclidean-orthogonal projector onto the span.
    pub fn orthogonal_projector(&self) -> CMatrix<T> {
        let q = self.orthonormal();
        &q * q.adjoint()
    }

    /// Distance of each column of `v` from the span, relative to the column norm.
    pub fn contains(&self, v: &CMatrix<T>, tol: T) -> bool {
        let p = self.orthogonal_projector();
        (0..v.ncols()).all(|j| {
            let col = v.column(j).into_owned();
            let n = col.norm();
            n == T::zero() || (&col - &p * &col).norm() <= tol * n
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectSumReport<T> {
    pub is_direct_sum: bool,
    /// Smallest singular value of the concatenated orthonormalized bases.
    pub gap: T,
}

/// Decides whether `U ⊕ V` is the whole ambient space.
pub fn direct_sum_check<T: Real>(u: &SubspaceBasis<T>, v: &SubspaceBasis<T>, tol: T) -> Result<DirectSumReport<T>> {
    if u.ambient_dim() != v.ambient_dim() {
        return Err(Error::DimensionMismatch(format!(
            "ambient dims {} and {}",
            u.ambient_dim(),
            v.ambient_dim()
        )));
    }
    let m = hstack(&u.orthonormal(), &v.orthonormal())?;
    if m.ncols() == 0 {
        return Ok(DirectSumReport { is_direct_sum: u.ambient_dim() == 0, gap: T::one() });
    }
    let gap = if m.ncols() > m.nrows() { T::zero() } else { smallest_singular_value(&m) };
    let dims_add = m.ncols() == u.ambient_dim();
    Ok(DirectSumReport { is_direct_sum: dims_add && gap > tol, gap })
}

/// Spectral norm of the difference of the orthogonal projectors onto the two spans.
pub fn subspace_distance<T: Real>(u: &SubspaceBasis<T>, v: &SubspaceBasis<T>) -> T {
    let d = u.orthogonal_projector() - v.orthogonal_projector();
    super::spectral_norm(&d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_real;
    use crate::scalar::cplx;

    fn span(rows: usize, data: &[f64]) -> SubspaceBasis<f64> {
        SubspaceBasis::new(from_real(rows, data.len() / rows, data), 1e-8).unwrap()
    }

    #[test]
    fn coordinate_axes_are_direct() {
        let r = direct_sum_check(&span(2, &[1.0, 0.0]), &span(2, &[0.0, 1.0]), 1e-8).unwrap();
        assert!(r.is_direct_sum);
        assert!((r.gap - 1.0).abs() < 1e-14);
    }

    #[test]
    fn same_line_is_not_direct() {
        let r = direct_sum_check(&span(2, &[1.0, 0.0]), &span(2, &[1.0, 0.0]), 1e-8).unwrap();
        assert!(!r.is_direct_sum);
    }

    #[test]
    fn conjugate_lines_are_direct() {
        let s = 1.0;
        let u = SubspaceBasis::new(CMatrix::from_vec(2, 1, vec![cplx(1.0, 0.0), cplx(0.0, s)]), 1e-8).unwrap();
        let v = SubspaceBasis::new(CMatrix::from_vec(2, 1, vec![cplx(1.0, 0.0), cplx(0.0, -s)]), 1e-8).unwrap();
        let r = direct_sum_check(&u, &v, 1e-8).unwrap();
        assert!(r.is_direct_sum);
        // (1, ±i)/sqrt2 are orthonormal, so the gap is 1
        assert!((r.gap - 1.0f64).abs() < 1e-12);
    }

    #[test]
    fn rank_deficient_rejected() {
        let b = from_real::<f64>(2, 2, &[1.0, 2.0, 2.0, 4.0]);
        assert!(matches!(SubspaceBasis::new(b, 1e-8), Err(Error::RankDeficient { .. })));
    }

    #[test]
    fn distance_of_equal_spans_is_zero() {
        let a = span(3, &[1.0, 0.0, 1.0, 1.0, 0.0, -1.0]);
        let b = span(3, &[1.0, 1.0, 2.0, 0.0, -1.0, 1.0]);
        assert!(subspace_distance(&a, &b) < 1e-14);
    }
}
