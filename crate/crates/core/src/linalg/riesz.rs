use num_complex::Complex;

use super::quadrature::gauss_legendre;
use super::{check_finite, fro, idempotence_defect, scale, CMatrix, Lu, Projector};
use crate::error::{Error, Result};
use crate::scalar::{i_unit, Real};

/// Closed, positively oriented contour in the spectral plane.
#[derive(Debug, Clone, Copy)]
pub enum Contour<T: Real> {
    Circle { center: Complex<T>, radius: T },
    Rectangle { re_min: T, re_max: T, im_min: T, im_max: T },
}

#[derive(Debug, Clone, Copy)]
pub struct ContourSpec<T: Real> {
    pub contour: Contour<T>,
    pub initial_nodes: usize,
    pub max_nodes: usize,
    /// Relative tolerance on the idempotence defect and on the change between two levels.
    pub tol: T,
}

impl<T: Real> ContourSpec<T> {
    pub fn new(contour: Contour<T>) -> Self {
        Self { contour, initial_nodes: 32, max_nodes: 4096, tol: T::tol(1e-12) }
    }

    pub fn with_tol(mut self, tol: T) -> Self {
        self.tol = tol;
        self
    }
}

const PANEL: usize = 8;

/// Quadrature nodes `lambda_j` and weights `w_j` with `(1/2πi)∮ f ≈ Σ w_j f(lambda_j)`.
fn nodes<T: Real>(contour: &Contour<T>, n: usize) -> Vec<(Complex<T>, Complex<T>)> {
    let two_pi_i = Complex::new(T::zero(), T::two_pi());
    match *contour {
        Contour::Circle { center, radius } => (0..n)
            .map(|j| {
                let theta = T::two_pi() * T::nat(j) / T::nat(n);
                let e = Complex::new(theta.cos(), theta.sin());
                let lam = center + e * radius;
                // dλ = i r e^{iθ} dθ, dθ = 2π/n
                let w = i_unit::<T>() * e * radius * (T::two_pi() / T::nat(n)) / two_pi_i;
                (lam, w)
            })
            .collect(),
        Contour::Rectangle { re_min, re_max, im_min, im_max } => {
            let corners = [
                Complex::new(re_min, im_min),
                Complex::new(re_max, im_min),
                Complex::new(re_max, im_max),
                Complex::new(re_min, im_max),
            ];
            // composite Gauss–Legendre on every side: trapezoid sums lose their spectral
            // accuracy at the corners
            let per_side = (n / 4).max(PANEL);
            let panels = per_side.div_ceil(PANEL);
            let (gx, gw) = gauss_legendre(PANEL);
            let mut out = Vec::with_capacity(4 * panels * PANEL);
            for s in 0..4 {
                let a = corners[s];
                let b = corners[(s + 1) % 4];
                for p in 0..panels {
                    let pa = a + (b - a) * T::nat(p) / T::nat(panels);
                    let pb = a + (b - a) * T::nat(p + 1) / T::nat(panels);
                    let half = (pb - pa) * T::lit(0.5);
                    let mid = (pa + pb) * T::lit(0.5);
                    for (x, w) in gx.iter().zip(&gw) {
                        out.push((mid + half * T::lit(*x), half * T::lit(*w) / two_pi_i));
                    }
                }
            }
            out
        }
    }
}

fn quadrature<T: Real>(a: &CMatrix<T>, contour: &Contour<T>, n: usize) -> Result<CMatrix<T>> {
    let dim = a.nrows();
    let mut c = CMatrix::zeros(dim, dim);
    let eye = CMatrix::<T>::identity(dim, dim);
    for (lam, w) in nodes(contour, n) {
        let shifted = &eye * lam - a;
        let lu = Lu::factor(&shifted).map_err(|_| Error::ContourTooClose { defect: f64::INFINITY, nodes: n })?;
        c += lu.solve(&eye) * w;
    }
    Ok(c)
}

/// Spectral projector `(1/2πi)∮ (λ - A)^{-1} dλ` for the eigenvalues enclosed by the contour.
///
/// Nodes are doubled from `initial_nodes` until both the idempotence defect and the change
/// from the previous level fall below `tol * max(1, ||C||_F)`.
pub fn riesz_projector<T: Real>(a: &CMatrix<T>, spec: &ContourSpec<T>) -> Result<Projector<T>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("riesz projector of non-square matrix".into()));
    }
    check_finite(a)?;
    let mut n = spec.initial_nodes.max(4);
    let mut prev: Option<CMatrix<T>> = None;
    let mut last_defect = T::zero();
    while n <= spec.max_nodes {
        let c = quadrature(a, &spec.contour, n)?;
        let sc = scale(&c);
        last_defect = idempotence_defect(&c);
        let settled = prev.as_ref().map(|p| fro(&(p - &c)) <= spec.tol * sc).unwrap_or(false);
        if settled && last_defect <= spec.tol * sc {
            return Projector::certify(c, spec.tol);
        }
        prev = Some(c);
        n *= 2;
    }
    Err(Error::ContourTooClose { defect: last_defect.as_f64(), nodes: n / 2 })
}
