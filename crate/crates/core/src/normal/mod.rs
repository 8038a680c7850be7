//! Normal family `N(P)(τ, η)` on an interval fibre: solution spaces, their boundary data at
//! both fibre endpoints, the doubled-fibre extension and the resulting Calderón projector.
//!
//! Data vectors follow one global convention: `(u, D_z u, …, D_z^{m-1} u)` at `z = 0`
//! followed by the same jet at `z = L`, with `D_z = -i ∂_z` at both ends.

mod ode;

pub use ode::{integrate, CompanionField, OdeOptions, SolutionBasis};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{
    direct_sum_check, orthonormal_basis, projector_from_pair, smallest_singular_value, vstack, CMatrix, Lu,
    Projector, SubspaceBasis,
};
use crate::model::{Fibre, ModelOperator};
use crate::scalar::Real;
use crate::symbol::companion_from_coefficients;

/// Nonnegative bump `a(z) = h exp(-1/(1-w²))` on the minus half `(L, 2L)` of the doubled fibre,
/// `w = 2(z-L)/L - 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub height: f64,
    pub length: f64,
}

impl Bump {
    fn w(&self, z: f64) -> Option<f64> {
        let w = 2.0 * (z - self.length) / self.length - 1.0;
        (w > -1.0 && w < 1.0).then_some(w)
    }

    pub fn value(&self, z: f64) -> f64 {
        match self.w(z) {
            Some(w) => self.height * (-1.0 / (1.0 - w * w)).exp(),
            None => 0.0,
        }
    }

    pub fn derivative(&self, z: f64) -> f64 {
        match self.w(z) {
            Some(w) => {
                let q = 1.0 - w * w;
                self.value(z) * (-2.0 * w / (q * q)) * (2.0 / self.length)
            }
            None => 0.0,
        }
    }
}

/// Extension of the fibre operator across both fibre endpoints: the fibre is doubled to the
/// circle `[0, 2L]/(0 ~ 2L)`, the minus half carries the mirrored operator plus a bump.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FibreExtension {
    pub bump_height: f64,
}

impl FibreExtension {
    pub fn circle(bump_height: f64) -> Self {
        Self { bump_height }
    }
}

impl Default for FibreExtension {
    fn default() -> Self {
        Self { bump_height: 1.0 }
    }
}

/// `Σ_β A_β(z) D_z^β` with matrix-polynomial coefficients, possibly mirrored onto `[L, 2L]`.
#[derive(Debug, Clone)]
pub struct FibreODE<T: Real> {
    pub order: usize,
    pub system_size: usize,
    pub length: T,
    pub mu: (T, T),
    /// `coeffs[β][j]` multiplies `z^j D_z^β`.
    coeffs: Vec<Vec<CMatrix<T>>>,
    /// Evaluate at `2L - z` with sign `(-1)^β` (the minus half of the doubled fibre).
    mirrored: bool,
    bump: Option<Bump>,
}

fn poly_eval<T: Real>(p: &[CMatrix<T>], z: T, n: usize) -> CMatrix<T> {
    let mut out = CMatrix::zeros(n, n);
    for c in p.iter().rev() {
        out = out * Complex::new(z, T::zero()) + c;
    }
    out
}

fn poly_deriv<T: Real>(p: &[CMatrix<T>], n: usize) -> Vec<CMatrix<T>> {
    if p.len() <= 1 {
        return vec![CMatrix::zeros(n, n)];
    }
    p.iter().enumerate().skip(1).map(|(j, c)| c * Complex::new(T::nat(j), T::zero())).collect()
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl<T: Real> FibreODE<T> {
    pub fn new(order: usize, system_size: usize, length: T, mu: (T, T), coeffs: Vec<Vec<CMatrix<T>>>) -> Result<Self> {
        if coeffs.len() != order + 1 {
            return Err(Error::DimensionMismatch(format!("{} coefficient slots for order {order}", coeffs.len())));
        }
        let ode = Self { order, system_size, length, mu, coeffs, mirrored: false, bump: None };
        for j in 0..=16 {
            let z = length * T::lit(j as f64 / 16.0);
            Lu::factor(&ode.coefficient(order, z)).map_err(|_| Error::LeadingCoefficientSingular)?;
        }
        Ok(ode)
    }

    /// Mirrored operator on `[L, 2L]` with the extension's bump added to the zeroth-order term.
    pub fn minus_side(&self, ext: &FibreExtension) -> Self {
        let mut m = self.clone();
        m.mirrored = true;
        m.bump = (ext.bump_height != 0.0).then_some(Bump { height: ext.bump_height, length: self.length.as_f64() });
        m
    }

    pub fn interval(&self) -> (T, T) {
        if self.mirrored {
            (self.length, self.length * T::lit(2.0))
        } else {
            (T::zero(), self.length)
        }
    }

    /// `A_β(z)`.
    pub fn coefficient(&self, beta: usize, z: T) -> CMatrix<T> {
        let n = self.system_size;
        let mut a = if self.mirrored {
            let sign = if beta % 2 == 0 { T::one() } else { -T::one() };
            poly_eval(&self.coeffs[beta], T::lit(2.0) * self.length - z, n) * Complex::new(sign, T::zero())
        } else {
            poly_eval(&self.coeffs[beta], z, n)
        };
        if beta == 0 {
            if let Some(b) = &self.bump {
                a += CMatrix::identity(n, n) * Complex::new(T::lit(b.value(z.as_f64())), T::zero());
            }
        }
        a
    }

    /// `A_β'(z)`.
    pub fn coefficient_derivative(&self, beta: usize, z: T) -> CMatrix<T> {
        let n = self.system_size;
        let d = poly_deriv(&self.coeffs[beta], n);
        let mut a = if self.mirrored {
            let sign = if beta % 2 == 0 { -T::one() } else { T::one() };
            poly_eval(&d, T::lit(2.0) * self.length - z, n) * Complex::new(sign, T::zero())
        } else {
            poly_eval(&d, z, n)
        };
        if beta == 0 {
            if let Some(b) = &self.bump {
                a += CMatrix::identity(n, n) * Complex::new(T::lit(b.derivative(z.as_f64())), T::zero());
            }
        }
        a
    }

    /// Formal adjoint `Σ_j B_j D_z^j`, `B_j = Σ_{β≥j} C(β,j) (-i)^{β-j} ∂_z^{β-j} A_β^H`.
    pub fn adjoint(&self) -> Result<Self> {
        if self.mirrored || self.bump.is_some() {
            return Err(Error::Unsupported("adjoint of an extended fibre operator".into()));
        }
        let n = self.system_size;
        let mut out: Vec<Vec<CMatrix<T>>> = vec![vec![CMatrix::zeros(n, n)]; self.order + 1];
        for (beta, poly) in self.coeffs.iter().enumerate() {
            let mut deriv: Vec<CMatrix<T>> = poly.iter().map(|c| c.adjoint()).collect();
            for d in 0..=beta {
                let j = beta - d;
                // (-i)^d
                let phase = match d % 4 {
                    0 => Complex::new(T::one(), T::zero()),
                    1 => Complex::new(T::zero(), -T::one()),
                    2 => Complex::new(-T::one(), T::zero()),
                    _ => Complex::new(T::zero(), T::one()),
                };
                let w = phase * Complex::new(T::lit(binom(beta, d)), T::zero());
                let slot = &mut out[j];
                if slot.len() < deriv.len() {
                    slot.resize(deriv.len(), CMatrix::zeros(n, n));
                }
                for (k, c) in deriv.iter().enumerate() {
                    slot[k] += c * w;
                }
                deriv = poly_deriv(&deriv, n);
            }
        }
        Self::new(self.order, self.system_size, self.length, self.mu, out)
    }

    pub fn companion(&self, z: T) -> CMatrix<T> {
        let cs: Vec<CMatrix<T>> = (0..=self.order).map(|b| self.coefficient(b, z)).collect();
        companion_from_coefficients(&cs).expect("leading coefficient checked at construction")
    }

    /// Derivative of the companion in `z`.
    pub fn companion_derivative(&self, z: T) -> CMatrix<T> {
        let (m, n) = (self.order, self.system_size);
        let lead = Lu::factor(&self.coefficient(m, z)).expect("leading coefficient checked at construction");
        let dlead = self.coefficient_derivative(m, z);
        let mut out = CMatrix::zeros(m * n, m * n);
        for j in 0..m {
            // d/dz(-A_m^{-1} A_j) = A_m^{-1} A_m' A_m^{-1} A_j - A_m^{-1} A_j'
            let aj = self.coefficient(j, z);
            let daj = self.coefficient_derivative(j, z);
            let block = lead.solve(&(&dlead * lead.solve(&aj))) - lead.solve(&daj);
            out.view_mut(((m - 1) * n, j * n), (n, n)).copy_from(&block);
        }
        out
    }
}

impl<T: Real> CompanionField<T> for FibreODE<T> {
    fn dim(&self) -> usize {
        self.order * self.system_size
    }

    fn a(&self, z: T) -> CMatrix<T> {
        self.companion(z)
    }

    fn da(&self, z: T) -> CMatrix<T> {
        self.companion_derivative(z)
    }
}

/// Freezes the coefficients at `x = 0` and substitutes `x²D_x → τ`, `xD_y → η`.
pub fn normal_operator<T: Real>(op: &ModelOperator<T>, mu: (T, T)) -> Result<FibreODE<T>> {
    let length = match op.fibre {
        Fibre::Point => return Err(Error::PointFibre),
        Fibre::Interval { length } => T::lit(length),
    };
    let n = op.system_size;
    let mut coeffs: Vec<Vec<CMatrix<T>>> = vec![vec![CMatrix::zeros(n, n)]; op.order + 1];
    for (&(k, a, b), poly) in op.coefficients() {
        let w = Complex::new(mu.0.powi(k as i32) * mu.1.powi(a as i32), T::zero());
        let zp = poly.at_x0();
        let slot = &mut coeffs[b];
        if slot.len() < zp.len() {
            slot.resize(zp.len(), CMatrix::zeros(n, n));
        }
        for (j, c) in zp.iter().enumerate() {
            slot[j] += c * w;
        }
    }
    FibreODE::new(op.order, n, length, mu, coeffs)
}

/// Solution space of the fibre ODE on its interval.
pub fn fundamental_matrix<T: Real>(ode: &FibreODE<T>) -> Result<SolutionBasis<T>> {
    fundamental_matrix_with(ode, &OdeOptions::default())
}

pub fn fundamental_matrix_with<T: Real>(ode: &FibreODE<T>, opts: &OdeOptions) -> Result<SolutionBasis<T>> {
    let (z0, z1) = ode.interval();
    integrate(ode, z0, z1, opts)
}

fn rank_tol<T: Real>() -> T {
    T::tol(1e-8)
}

/// `B⁺(μ) = {γu : N(P)(μ)u = 0}` in `C^{2mN}`, ordered (jet at 0, jet at L).
pub fn boundary_data_space<T: Real>(ode: &FibreODE<T>) -> Result<SubspaceBasis<T>> {
    let sol = fundamental_matrix(ode)?;
    let stacked = vstack(&sol.start, &sol.end)?;
    SubspaceBasis::new(orthonormal_basis(&stacked, T::zero()), rank_tol())
}

/// `B⁻(μ)`: boundary data at `{0, L}` of solutions on the minus half `[L, 2L]`, where the
/// point `2L` is identified with `0`.
pub fn minus_boundary_data_space<T: Real>(ode: &FibreODE<T>, ext: &FibreExtension) -> Result<SubspaceBasis<T>> {
    let minus = ode.minus_side(ext);
    let sol = fundamental_matrix(&minus)?;
    let stacked = vstack(&sol.end, &sol.start)?;
    SubspaceBasis::new(orthonormal_basis(&stacked, T::zero()), rank_tol())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UcpReport<T> {
    /// Dimension of the solutions whose full boundary jet vanishes.
    pub dim_shadow: usize,
    /// Smallest singular value of the `z = 0` block of an orthonormal basis of the boundary
    /// data space; a conditioning measure for reading solutions off one endpoint.
    pub min_sv: T,
}

pub fn ucp_check<T: Real>(ode: &FibreODE<T>) -> Result<UcpReport<T>> {
    let sol = fundamental_matrix(ode)?;
    let stacked = vstack(&sol.start, &sol.end)?;
    let rank = orthonormal_basis(&stacked, rank_tol()).ncols();
    let dim = ode.order * ode.system_size;
    let q = orthonormal_basis(&stacked, T::zero());
    let top = q.rows(0, dim).into_owned();
    Ok(UcpReport { dim_shadow: dim.saturating_sub(rank), min_sv: smallest_singular_value(&top) })
}

/// Both boundary data spaces with the gap between them.
#[derive(Debug, Clone)]
pub struct NormalSplit<T: Real> {
    pub plus: SubspaceBasis<T>,
    pub minus: SubspaceBasis<T>,
    pub gap: T,
    pub residual: T,
}

pub fn normal_split<T: Real>(op: &ModelOperator<T>, mu: (T, T), ext: &FibreExtension) -> Result<NormalSplit<T>> {
    let ode = normal_operator(op, mu)?;
    let plus_sol = fundamental_matrix(&ode)?;
    let minus_sol = fundamental_matrix(&ode.minus_side(ext))?;
    let plus = SubspaceBasis::new(orthonormal_basis(&vstack(&plus_sol.start, &plus_sol.end)?, T::zero()), rank_tol())?;
    let minus =
        SubspaceBasis::new(orthonormal_basis(&vstack(&minus_sol.end, &minus_sol.start)?, T::zero()), rank_tol())?;
    let report = direct_sum_check(&plus, &minus, rank_tol())?;
    let residual = if plus_sol.residual > minus_sol.residual { plus_sol.residual } else { minus_sol.residual };
    Ok(NormalSplit { plus, minus, gap: report.gap, residual })
}

/// Gap below which the two data spaces are treated as not complementary.
pub const COMPLEMENT_TOL: f64 = 1e-6;

/// Projector onto `B⁺(μ)` along `B⁻(μ)` on `C^{2mN}`.
pub fn normal_calderon<T: Real>(op: &ModelOperator<T>, mu: (T, T), ext: &FibreExtension) -> Result<Projector<T>> {
    let split = normal_split(op, mu, ext)?;
    if split.gap <= T::lit(COMPLEMENT_TOL) {
        return Err(Error::NotComplementary { gap: split.gap.as_f64(), mu: Some((mu.0.as_f64(), mu.1.as_f64())) });
    }
    projector_from_pair(&split.plus, &split.minus).map_err(|e| match e {
        Error::NotComplementary { gap, .. } => {
            Error::NotComplementary { gap, mu: Some((mu.0.as_f64(), mu.1.as_f64())) }
        }
        other => other,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint<T> {
    pub mu: (T, T),
    pub min_sv: T,
    pub invertible: bool,
}

/// Nodes per unit fibre length in the periodic discretization used by the scan.
const SCAN_NODES: usize = 64;

/// Smallest singular value of `N(P)(μ)` across a grid: the matrix itself for a point fibre,
/// a periodic finite-difference discretization of the doubled fibre operator otherwise.
pub fn full_ellipticity_scan<T: Real>(
    op: &ModelOperator<T>,
    mu_grid: &[(T, T)],
    ext: &FibreExtension,
) -> Result<Vec<ScanPoint<T>>> {
    let tol = T::tol(1e-8);
    let mut out = Vec::with_capacity(mu_grid.len());
    for &mu in mu_grid {
        let min_sv = match op.fibre {
            Fibre::Point => smallest_singular_value(&op.normal_matrix(mu.0, mu.1)),
            Fibre::Interval { .. } => {
                let ode = normal_operator(op, mu)?;
                smallest_singular_value(&doubled_fibre_matrix(&ode, ext, SCAN_NODES))
            }
        };
        out.push(ScanPoint { mu, min_sv, invertible: min_sv > tol });
    }
    Ok(out)
}

/// Periodic second-order discretization of the doubled fibre operator on `[0, 2L)`.
pub fn doubled_fibre_matrix<T: Real>(ode: &FibreODE<T>, ext: &FibreExtension, nodes_per_half: usize) -> CMatrix<T> {
    let minus = ode.minus_side(ext);
    let m = 2 * nodes_per_half;
    let n = ode.system_size;
    let h = ode.length / T::nat(nodes_per_half);
    // scalar periodic difference matrices for D_z and D_z^2
    let d1 = CMatrix::<T>::from_fn(m, m, |i, j| {
        let c = Complex::new(T::zero(), -T::one() / (T::lit(2.0) * h));
        if j == (i + 1) % m {
            c
        } else if j == (i + m - 1) % m {
            -c
        } else {
            Complex::new(T::zero(), T::zero())
        }
    });
    let d2 = CMatrix::<T>::from_fn(m, m, |i, j| {
        let w = T::one() / (h * h);
        if i == j {
            Complex::new(T::lit(2.0) * w, T::zero())
        } else if j == (i + 1) % m || j == (i + m - 1) % m {
            Complex::new(-w, T::zero())
        } else {
            Complex::new(T::zero(), T::zero())
        }
    });
    let mut powers = vec![CMatrix::<T>::identity(m, m)];
    for beta in 1..=ode.order {
        let p = if beta % 2 == 0 { &powers[beta - 2] * &d2 } else { &powers[beta - 1] * &d1 };
        powers.push(p);
    }
    let mut out = CMatrix::zeros(m * n, m * n);
    for i in 0..m {
        let z = h * T::nat(i);
        let side = if i < nodes_per_half { ode } else { &minus };
        for (beta, pw) in powers.iter().enumerate() {
            let a = side.coefficient(beta, z);
            for j in 0..m {
                let w = pw[(i, j)];
                if w == Complex::new(T::zero(), T::zero()) {
                    continue;
                }
                let mut blk = out.view_mut((i * n, j * n), (n, n));
                blk += &a * w;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::subspace_distance;
    use crate::scalar::cplx;

    fn strip() -> ModelOperator<f64> {
        ModelOperator::strip_laplacian(1.0)
    }

    fn closed_form_plus(tau: f64, l: f64) -> SubspaceBasis<f64> {
        let (c, s) = ((tau * l).cosh(), (tau * l).sinh());
        // cosh(τz) and sinh(τz)/τ with D_z = -i d/dz
        let b = CMatrix::from_vec(
            4,
            2,
            vec![
                cplx(1.0, 0.0),
                cplx(0.0, 0.0),
                cplx(c, 0.0),
                cplx(0.0, -tau * s),
                cplx(0.0, 0.0),
                cplx(0.0, -1.0),
                cplx(s / tau, 0.0),
                cplx(0.0, -c),
            ],
        );
        SubspaceBasis::new(b, 1e-10).unwrap()
    }

    #[test]
    fn strip_normal_operator() {
        let ode = normal_operator(&strip(), (1.5, 0.0)).unwrap();
        assert_eq!(ode.coefficient(0, 0.3)[(0, 0)], cplx(2.25, 0.0));
        assert_eq!(ode.coefficient(1, 0.3)[(0, 0)], cplx(0.0, 0.0));
        assert_eq!(ode.coefficient(2, 0.3)[(0, 0)], cplx(1.0, 0.0));
        assert!(matches!(normal_operator(&ModelOperator::<f64>::exterior_toy(1.0), (1.0, 0.0)), Err(Error::PointFibre)));
    }

    #[test]
    fn x_dependent_terms_vanish() {
        let mut op = strip();
        let mut p = crate::model::XzPoly::zero(1);
        p.add(1, 2, CMatrix::from_element(1, 1, cplx(1.0, 0.0)));
        op.add_coefficient((0, 0, 0), p).unwrap();
        let ode = normal_operator(&op, (1.0, 0.0)).unwrap();
        assert_eq!(ode.coefficient(0, 0.7)[(0, 0)], cplx(1.0, 0.0));
    }

    #[test]
    fn plus_space_matches_cosh_sinh() {
        for tau in [0.5, 1.0, 2.0] {
            let ode = normal_operator(&strip(), (tau, 0.0)).unwrap();
            let b = boundary_data_space(&ode).unwrap();
            assert!(subspace_distance(&b, &closed_form_plus(tau, 1.0)) < 1e-8, "tau={tau}");
        }
    }

    #[test]
    fn zero_tau_space_is_affine() {
        let ode = normal_operator(&strip(), (0.0, 0.0)).unwrap();
        let b = boundary_data_space(&ode).unwrap();
        let want = SubspaceBasis::new(
            CMatrix::from_vec(
                4,
                2,
                vec![cplx(1.0, 0.0), cplx(0.0, 0.0), cplx(1.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(0.0, -1.0), cplx(1.0, 0.0), cplx(0.0, -1.0)],
            ),
            1e-10,
        )
        .unwrap();
        assert!(subspace_distance(&b, &want) < 1e-10);
    }

    #[test]
    fn first_order_exponential() {
        let c = 0.7;
        let ode = FibreODE::new(
            1,
            1,
            1.0,
            (0.0, 0.0),
            vec![vec![CMatrix::from_element(1, 1, cplx(0.0, -c))], vec![CMatrix::from_element(1, 1, cplx(1.0, 0.0))]],
        )
        .unwrap();
        // (D_z - ic) u = 0  =>  u = e^{-cz}
        let sol = fundamental_matrix(&ode).unwrap();
        let ratio = sol.end[(0, 0)] / sol.start[(0, 0)];
        assert!((ratio - cplx((-c).exp(), 0.0)).norm() < 1e-11);
    }

    #[test]
    fn minus_space_closed_form() {
        let tau: f64 = 1.0;
        let ode = normal_operator(&strip(), (tau, 0.0)).unwrap();
        let bm = minus_boundary_data_space(&ode, &FibreExtension::circle(0.0)).unwrap();
        let (c, s) = (tau.cosh(), tau.sinh());
        // cosh(z-L), sinh(z-L) on [L, 2L]: data at 2L ≡ 0 first, then at L
        let want = CMatrix::from_vec(
            4,
            2,
            vec![cplx(c, 0.0), cplx(0.0, -s), cplx(1.0, 0.0), cplx(0.0, 0.0), cplx(s, 0.0), cplx(0.0, -c), cplx(0.0, 0.0), cplx(0.0, -1.0)],
        );
        assert!(subspace_distance(&bm, &SubspaceBasis::new(want, 1e-10).unwrap()) < 1e-9);
    }

    #[test]
    fn bump_decides_complementarity_at_zero_tau() {
        let off = normal_calderon(&strip(), (0.0, 0.0), &FibreExtension::circle(0.0));
        assert!(matches!(off, Err(Error::NotComplementary { .. })), "{off:?}");
        let on = normal_split(&strip(), (0.0, 0.0), &FibreExtension::circle(1.0)).unwrap();
        assert!(on.gap > 0.05, "gap {}", on.gap);
    }

    #[test]
    fn normal_calderon_reproduces_cosh() {
        let c = normal_calderon(&strip(), (1.0, 0.0), &FibreExtension::default()).unwrap();
        assert!(c.idem_defect() < 1e-8);
        assert_eq!(c.rank(1e-8), 2);
        let g = closed_form_plus(1.0, 1.0).basis().columns(0, 1).into_owned();
        assert!((c.matrix() * &g - &g).norm() < 1e-8);
    }

    #[test]
    fn ucp_for_strip_and_adjoint() {
        let ode = normal_operator(&strip(), (1.0, 0.0)).unwrap();
        let r = ucp_check(&ode).unwrap();
        assert_eq!(r.dim_shadow, 0);
        assert!(r.min_sv > 0.1);
        let adj = ode.adjoint().unwrap();
        assert_eq!(ucp_check(&adj).unwrap().dim_shadow, 0);
    }

    #[test]
    fn adjoint_of_first_order_term() {
        // A_1 = z (scalar), adjoint: D(z ·) = z D - i
        let ode = FibreODE::new(
            1,
            1,
            1.0,
            (0.0, 0.0),
            vec![
                vec![CMatrix::zeros(1, 1)],
                vec![CMatrix::from_element(1, 1, cplx(1.0, 0.0)), CMatrix::from_element(1, 1, cplx(2.0, 0.0))],
            ],
        )
        .unwrap();
        let adj = ode.adjoint().unwrap();
        assert!((adj.coefficient(0, 0.5)[(0, 0)] - cplx(0.0, -2.0)).norm() < 1e-15);
        assert!((adj.coefficient(1, 0.5)[(0, 0)] - cplx(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn ellipticity_scans() {
        let good = ModelOperator::<f64>::exterior_toy(1.0);
        let grid = [(0.0, 0.0), (0.5, 0.5), (2.0, -1.0)];
        assert!(full_ellipticity_scan(&good, &grid, &FibreExtension::default()).unwrap().iter().all(|p| p.invertible));
        let bad = ModelOperator::<f64>::exterior_toy(0.0);
        let r = full_ellipticity_scan(&bad, &grid, &FibreExtension::default()).unwrap();
        assert!(!r[0].invertible && r[1].invertible && r[2].invertible);

        let taus = [(-1.0, 0.0), (-0.25, 0.0), (0.0, 0.0), (0.25, 0.0), (1.0, 0.0)];
        let r = full_ellipticity_scan(&strip(), &taus, &FibreExtension::circle(0.0)).unwrap();
        let flags: Vec<bool> = r.iter().map(|p| p.invertible).collect();
        assert_eq!(flags, vec![true, true, false, true, true]);
    }
}
