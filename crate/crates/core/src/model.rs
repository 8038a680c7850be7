//! Model φ-differential operators `P = x^{-cm} Σ a_{kαβ}(x, z) (x²D_x)^k (xD_y)^α D_z^β`.
//!
//! The base has dimension `b ≤ 1` and the fibre is a point or an interval, so `α` and `β` are
//! single exponents. Coefficients are matrix polynomials in `(x, z)` and do not depend on `y`.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Lu};
use crate::scalar::Real;
use crate::symbol::PolyMatrixSymbol;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Fibre {
    Point,
    Interval { length: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeometryTag {
    HalfLineToy,
    StripHyperbolic,
    CuspDomain,
    ExteriorToy,
}

impl GeometryTag {
    pub fn name(self) -> &'static str {
        match self {
            GeometryTag::HalfLineToy => "halfline_toy",
            GeometryTag::StripHyperbolic => "strip_hyperbolic",
            GeometryTag::CuspDomain => "cusp_domain",
            GeometryTag::ExteriorToy => "exterior_toy",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "halfline_toy" => GeometryTag::HalfLineToy,
            "strip_hyperbolic" => GeometryTag::StripHyperbolic,
            "cusp_domain" => GeometryTag::CuspDomain,
            "exterior_toy" => GeometryTag::ExteriorToy,
            _ => return None,
        })
    }
}

/// Matrix polynomial `Σ c_{ij} x^i z^j`.
#[derive(Debug, Clone, PartialEq)]
pub struct XzPoly<T: Real> {
    n: usize,
    terms: BTreeMap<(usize, usize), CMatrix<T>>,
}

impl<T: Real> XzPoly<T> {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    /// `c · I_n`.
    pub fn constant(n: usize, c: Complex<T>) -> Self {
        let mut p = Self::zero(n);
        p.add(0, 0, CMatrix::identity(n, n) * c);
        p
    }

    pub fn add(&mut self, x_deg: usize, z_deg: usize, c: CMatrix<T>) {
        assert_eq!(c.shape(), (self.n, self.n));
        self.terms.entry((x_deg, z_deg)).and_modify(|v| *v += &c).or_insert(c);
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &CMatrix<T>)> {
        self.terms.iter()
    }

    pub fn eval(&self, x: T, z: T) -> CMatrix<T> {
        let mut out = CMatrix::zeros(self.n, self.n);
        for (&(i, j), c) in &self.terms {
            out += c * Complex::new(x.powi(i as i32) * z.powi(j as i32), T::zero());
        }
        out
    }

    /// Coefficients in `z` of the restriction to `x = 0`, ascending.
    pub fn at_x0(&self) -> Vec<CMatrix<T>> {
        let deg = self.terms.keys().filter(|k| k.0 == 0).map(|k| k.1).max().unwrap_or(0);
        let mut out = vec![CMatrix::zeros(self.n, self.n); deg + 1];
        for (&(i, j), c) in &self.terms {
            if i == 0 {
                out[j] += c;
            }
        }
        out
    }
}

/// Key `(k, α, β)` of a coefficient.
pub type TermKey = (usize, usize, usize);

#[derive(Debug, Clone)]
pub struct ModelOperator<T: Real> {
    pub order: usize,
    pub system_size: usize,
    pub base_dim: usize,
    pub fibre: Fibre,
    pub geometry: GeometryTag,
    pub weight_c: i32,
    coefficients: BTreeMap<TermKey, XzPoly<T>>,
}

impl<T: Real> ModelOperator<T> {
    pub fn new(order: usize, system_size: usize, base_dim: usize, fibre: Fibre, geometry: GeometryTag) -> Self {
        Self { order, system_size, base_dim, fibre, geometry, weight_c: 0, coefficients: BTreeMap::new() }
    }

    pub fn fibre_dim(&self) -> usize {
        match self.fibre {
            Fibre::Point => 0,
            Fibre::Interval { .. } => 1,
        }
    }

    pub fn add_coefficient(&mut self, key: TermKey, poly: XzPoly<T>) -> Result<()> {
        let (k, a, b) = key;
        if k + a + b > self.order {
            return Err(Error::InvalidArgument(format!("term {key:?} exceeds order {}", self.order)));
        }
        if (a > 0 && self.base_dim == 0) || (b > 0 && self.fibre_dim() == 0) {
            return Err(Error::InvalidArgument(format!("term {key:?} uses an absent variable")));
        }
        if poly.dim() != self.system_size {
            return Err(Error::DimensionMismatch(format!("coefficient of size {}", poly.dim())));
        }
        match self.coefficients.get_mut(&key) {
            Some(p) => {
                for (&(i, j), c) in &poly.terms {
                    p.add(i, j, c.clone());
                }
            }
            None => {
                self.coefficients.insert(key, poly);
            }
        }
        Ok(())
    }

    pub fn coefficient(&self, key: TermKey) -> Option<&XzPoly<T>> {
        self.coefficients.get(&key)
    }

    pub fn coefficients(&self) -> impl Iterator<Item = (&TermKey, &XzPoly<T>)> {
        self.coefficients.iter()
    }

    /// `a_{m00}` must be invertible at `x = 0` for the sampled fibre points; for interval
    /// fibres `a_{00m}` must be as well, since the boundary reduction is in `D_z`.
    pub fn check_leading(&self) -> Result<()> {
        let zs: Vec<T> = match self.fibre {
            Fibre::Point => vec![T::zero()],
            Fibre::Interval { length } => (0..=8).map(|j| T::lit(length * j as f64 / 8.0)).collect(),
        };
        let mut keys = vec![(self.order, 0, 0)];
        if self.fibre_dim() == 1 {
            keys.push((0, 0, self.order));
        }
        for key in keys {
            let p = self.coefficients.get(&key).ok_or(Error::LeadingCoefficientSingular)?;
            for &z in &zs {
                Lu::factor(&p.eval(T::zero(), z)).map_err(|_| Error::LeadingCoefficientSingular)?;
            }
        }
        Ok(())
    }

    /// Principal symbol at a point of the boundary `z = 0` as a boundary symbol: the ODE
    /// covariable is `ζ` (dual to `z`), the tangential ones are `η` (base) and `τ` (dual to
    /// `x²D_x`).
    pub fn boundary_principal_symbol(&self, x: T, z: T) -> Result<PolyMatrixSymbol<T>> {
        if self.fibre_dim() == 0 {
            return Err(Error::PointFibre);
        }
        let mut s = PolyMatrixSymbol::new(self.order, self.system_size, self.base_dim, 1);
        for (&(k, a, b), p) in &self.coefficients {
            if k + a + b != self.order {
                continue;
            }
            let alpha: Vec<usize> = if self.base_dim == 1 { vec![a] } else { vec![] };
            s.add_term(b, &alpha, &[k], p.eval(x, z))?;
        }
        s.validated()
    }

    /// `N(P)(μ)` for a point fibre: `Σ a_{kα0}(0) τ^k η^α`.
    pub fn normal_matrix(&self, tau: T, eta: T) -> CMatrix<T> {
        let mut out = CMatrix::zeros(self.system_size, self.system_size);
        for (&(k, a, b), p) in &self.coefficients {
            if b != 0 {
                continue;
            }
            let w = tau.powi(k as i32) * eta.powi(a as i32);
            out += p.eval(T::zero(), T::zero()) * Complex::new(w, T::zero());
        }
        out
    }

    /// `(x²D_x)² + D_z²` on the strip `[0, length]` (flat in `s = 1/x`).
    pub fn strip_laplacian(length: f64) -> Self {
        let mut op = Self::new(2, 1, 0, Fibre::Interval { length }, GeometryTag::StripHyperbolic);
        let one = Complex::new(T::one(), T::zero());
        op.add_coefficient((2, 0, 0), XzPoly::constant(1, one)).unwrap();
        op.add_coefficient((0, 0, 2), XzPoly::constant(1, one)).unwrap();
        op
    }

    /// `(x²D_x)² + c + x²` with point fibre: a half-line problem whose potential tends to `c`
    /// at the singular end and varies in the collar.
    pub fn halfline_toy(c: f64) -> Self {
        let mut op = Self::new(2, 1, 0, Fibre::Point, GeometryTag::HalfLineToy);
        op.add_coefficient((2, 0, 0), XzPoly::constant(1, Complex::new(T::one(), T::zero()))).unwrap();
        let mut q = XzPoly::constant(1, Complex::new(T::lit(c), T::zero()));
        q.add(2, 0, CMatrix::identity(1, 1));
        op.add_coefficient((0, 0, 0), q).unwrap();
        op
    }

    /// `(x²D_x)² + |xD_y|² + c` with point fibre: the exterior toy `-Δ + c` near infinity.
    pub fn exterior_toy(c: f64) -> Self {
        let mut op = Self::new(2, 1, 1, Fibre::Point, GeometryTag::ExteriorToy);
        let one = Complex::new(T::one(), T::zero());
        op.add_coefficient((2, 0, 0), XzPoly::constant(1, one)).unwrap();
        op.add_coefficient((0, 2, 0), XzPoly::constant(1, one)).unwrap();
        if c != 0.0 {
            op.add_coefficient((0, 0, 0), XzPoly::constant(1, Complex::new(T::lit(c), T::zero()))).unwrap();
        }
        op
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    #[test]
    fn polynomial_evaluation() {
        let mut p = XzPoly::<f64>::zero(1);
        p.add(1, 2, CMatrix::from_element(1, 1, cplx(3.0, 1.0)));
        p.add(0, 1, CMatrix::from_element(1, 1, cplx(2.0, 0.0)));
        assert_eq!(p.eval(2.0, 0.5)[(0, 0)], cplx(3.0 * 2.0 * 0.25 + 1.0, 0.5));
        let z = p.at_x0();
        assert_eq!(z.len(), 2);
        assert_eq!(z[1][(0, 0)], cplx(2.0, 0.0));
    }

    #[test]
    fn strip_symbol_is_laplacian() {
        let op = ModelOperator::<f64>::strip_laplacian(1.0);
        op.check_leading().unwrap();
        let s = op.boundary_principal_symbol(0.3, 0.0).unwrap();
        let lap = crate::symbol::laplacian_symbol::<f64>(0, 1);
        let cv = crate::symbol::Covector { tau: 0.7, eta: vec![], zeta_prime: vec![1.3] };
        assert!((s.eval(&cv) - lap.eval(&cv)).norm() < 1e-15);
    }

    #[test]
    fn exterior_normal_matrix() {
        let op = ModelOperator::<f64>::exterior_toy(1.0);
        assert!((op.normal_matrix(0.6, 0.8)[(0, 0)] - cplx(2.0, 0.0)).norm() < 1e-15);
        let op0 = ModelOperator::<f64>::exterior_toy(0.0);
        assert_eq!(op0.normal_matrix(0.0, 0.0)[(0, 0)], cplx(0.0, 0.0));
    }

    #[test]
    fn rejects_absent_variables() {
        let mut op = ModelOperator::<f64>::strip_laplacian(1.0);
        assert!(op.add_coefficient((0, 1, 0), XzPoly::constant(1, cplx(1.0, 0.0))).is_err());
        assert!(op.add_coefficient((2, 0, 1), XzPoly::constant(1, cplx(1.0, 0.0))).is_err());
    }
}
