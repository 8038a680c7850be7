use super::{check_finite, direct_sum_check, fro, hstack, lu_solve, scale, CMatrix, SubspaceBasis};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `||C^2 - C||_F`.
pub fn idempotence_defect<T: Real>(c: &CMatrix<T>) -> T {
    fro(&(c * c - c))
}

/// A square matrix with a recorded idempotence defect and, when known, its declared
/// range and kernel.
#[derive(Debug, Clone)]
pub struct Projector<T: Real> {
    matrix: CMatrix<T>,
    idem_defect: T,
    range: Option<SubspaceBasis<T>>,
    kernel: Option<SubspaceBasis<T>>,
}

impl<T: Real> Projector<T> {
    /// Accepts `matrix` if `||C^2 - C||_F <= tol * max(1, ||C||_F)`.
    pub fn certify(matrix: CMatrix<T>, tol: T) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::DimensionMismatch("projector must be square".into()));
        }
        check_finite(&matrix)?;
        let idem_defect = idempotence_defect(&matrix);
        if idem_defect > tol * scale(&matrix) {
            return Err(Error::NotIdempotent { defect: idem_defect.as_f64() });
        }
        Ok(Self { matrix, idem_defect, range: None, kernel: None })
    }

    pub fn with_spaces(mut self, range: SubspaceBasis<T>, kernel: SubspaceBasis<T>) -> Self {
        self.range = Some(range);
        self.kernel = Some(kernel);
        self
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn idem_defect(&self) -> T {
        self.idem_defect
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn range(&self) -> Option<&SubspaceBasis<T>> {
        self.range.as_ref()
    }

    pub fn kernel(&self) -> Option<&SubspaceBasis<T>> {
        self.kernel.as_ref()
    }

    /// Numerical rank (count of singular values above `rel_tol * s_max`).
    pub fn rank(&self, rel_tol: T) -> usize {
        let sv = super::singular_values(&self.matrix);
        match sv.first() {
            Some(&smax) if smax > T::zero() => sv.iter().filter(|&&s| s > rel_tol * smax).count(),
            _ => 0,
        }
    }

    /// Range as an orthonormal basis computed from the matrix itself.
    pub fn numerical_range(&self, rel_tol: T) -> SubspaceBasis<T> {
        SubspaceBasis::from_span(&self.matrix, rel_tol).expect("projector entries are finite")
    }
}

/// The projection with the given range and kernel: `[R | K] diag(I, 0) [R | K]^{-1}`.
pub fn projector_from_pair<T: Real>(range: &SubspaceBasis<T>, kernel: &SubspaceBasis<T>) -> Result<Projector<T>> {
    let tol = if range.rank_tol() > kernel.rank_tol() { range.rank_tol() } else { kernel.rank_tol() };
    let report = direct_sum_check(range, kernel, tol)?;
    if !report.is_direct_sum {
        return Err(Error::NotComplementary { gap: report.gap.as_f64(), mu: None });
    }
    let m = hstack(range.basis(), kernel.basis())?;
    let k = range.dim();
    // C = R * (rows 0..k of M^{-1}), i.e. C^T solves M^T C^T = [R | 0]^T
    let mt = m.transpose();
    let mut rhs = CMatrix::zeros(m.nrows(), m.nrows());
    rhs.rows_mut(0, k).copy_from(&range.basis().transpose());
    let ct = lu_solve(&mt, &rhs).map_err(|_| Error::NotComplementary { gap: report.gap.as_f64(), mu: None })?;
    let c = ct.transpose();
    let idem_defect = idempotence_defect(&c);
    Ok(Projector { matrix: c, idem_defect, range: Some(range.clone()), kernel: Some(kernel.clone()) })
}

/// Gram-orthogonal projector onto `span(U)`: `U (U^H G U)^{-1} U^H G`.
pub fn orth_projector<T: Real>(u: &SubspaceBasis<T>, gram: &CMatrix<T>) -> Result<Projector<T>> {
    let n = u.ambient_dim();
    if gram.nrows() != n || gram.ncols() != n {
        return Err(Error::DimensionMismatch(format!("gram {}x{} for ambient {n}", gram.nrows(), gram.ncols())));
    }
    if !super::is_positive_definite(gram) {
        return Err(Error::GramNotPD);
    }
    if u.dim() == 0 {
        return Ok(Projector { matrix: CMatrix::zeros(n, n), idem_defect: T::zero(), range: Some(u.clone()), kernel: None });
    }
    let b = u.basis();
    let ugu = b.adjoint() * gram * b;
    let rhs = b.adjoint() * gram;
    let c = b * lu_solve(&ugu, &rhs)?;
    let idem_defect = idempotence_defect(&c);
    Ok(Projector { matrix: c, idem_defect, range: Some(u.clone()), kernel: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_real, gram_adjoint};
    use crate::scalar::cplx;

    fn line(a: (f64, f64), b: (f64, f64)) -> SubspaceBasis<f64> {
        SubspaceBasis::new(CMatrix::from_vec(2, 1, vec![cplx(a.0, a.1), cplx(b.0, b.1)]), 1e-8).unwrap()
    }

    #[test]
    fn axes_pair() {
        let c = projector_from_pair(&line((1.0, 0.0), (0.0, 0.0)), &line((0.0, 0.0), (1.0, 0.0))).unwrap();
        let want = from_real::<f64>(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        assert!((c.matrix() - want).norm() < 1e-15);
    }

    #[test]
    fn conjugate_pair_closed_form() {
        for s in [0.25, 1.0, 4.0] {
            let c = projector_from_pair(&line((1.0, 0.0), (0.0, s)), &line((1.0, 0.0), (0.0, -s))).unwrap();
            let want = CMatrix::from_vec(2, 2, vec![cplx(0.5, 0.0), cplx(0.0, 0.5 * s), cplx(0.0, -0.5 / s), cplx(0.5, 0.0)]);
            assert!((c.matrix() - want).norm() < 1e-14, "s = {s}");
        }
    }

    #[test]
    fn degenerate_pair_rejected() {
        let e1 = line((1.0, 0.0), (0.0, 0.0));
        assert!(matches!(projector_from_pair(&e1, &e1), Err(Error::NotComplementary { .. })));
    }

    #[test]
    fn orth_projector_examples() {
        let e1 = line((1.0, 0.0), (0.0, 0.0));
        let p = orth_projector(&e1, &CMatrix::identity(2, 2)).unwrap();
        assert!((p.matrix() - from_real::<f64>(2, 2, &[1.0, 0.0, 0.0, 0.0])).norm() < 1e-15);

        let d = line((1.0, 0.0), (1.0, 0.0));
        let p = orth_projector(&d, &CMatrix::identity(2, 2)).unwrap();
        assert!((p.matrix() - from_real::<f64>(2, 2, &[0.5, 0.5, 0.5, 0.5])).norm() < 1e-15);

        // weighted: C = u (u^T G u)^{-1} u^T G with u = (1,1), G = diag(1,4): (u^T G u) = 5
        let g = from_real::<f64>(2, 2, &[1.0, 0.0, 0.0, 4.0]);
        let p = orth_projector(&d, &g).unwrap();
        let want = from_real::<f64>(2, 2, &[0.2, 0.8, 0.2, 0.8]);
        assert!((p.matrix() - &want).norm() < 1e-15);
        assert!(p.idem_defect() < 1e-15);
        let gc = &g * p.matrix();
        assert!((gc.adjoint() - &gc).norm() < 1e-15);
        assert!((gram_adjoint(p.matrix(), &g).unwrap() - p.matrix()).norm() < 1e-14);
    }

    #[test]
    fn gram_must_be_pd() {
        let d = line((1.0, 0.0), (1.0, 0.0));
        let g = from_real::<f64>(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(orth_projector(&d, &g), Err(Error::GramNotPD)));
    }
}
