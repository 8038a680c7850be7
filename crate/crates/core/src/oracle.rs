//! Independent reference computations used to cross-check the main algorithms.
//!
//! Nothing here shares code paths with the contour or ODE machinery: roots come from a
//! simultaneous-iteration root finder, boundary pairings from Gauss–Legendre quadrature of
//! explicit polynomials.

use num_complex::Complex64;

use crate::error::Result;
use crate::linalg::{projector_from_pair, CMatrix, Projector, SubspaceBasis};
use crate::symbol::{PolyMatrixSymbol, TangentialCovector};

/// Roots of `Σ c_k z^k` (`c.last()` nonzero) by Durand–Kerner iteration with a Newton polish.
pub fn poly_roots(c: &[Complex64]) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = c.to_vec();
    while c.len() > 1 && c.last().map(|z| z.norm() == 0.0).unwrap_or(false) {
        c.pop();
    }
    let deg = c.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let lead = c[deg];
    let monic: Vec<Complex64> = c.iter().map(|z| z / lead).collect();
    let radius = 1.0 + monic[..deg].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..deg).map(|k| seed.powu(k as u32) * (0.5 * radius)).collect();
    let eval = |x: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a);
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for i in 0..deg {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if i != j {
                    denom *= z[i] - z[j];
                }
            }
            let step = eval(z[i]) / denom;
            z[i] -= step;
            delta = delta.max(step.norm() / (1.0 + z[i].norm()));
        }
        if delta < 1e-15 {
            break;
        }
    }
    let deriv: Vec<Complex64> = (1..=deg).map(|k| monic[k] * k as f64).collect();
    let eval_d = |x: Complex64| deriv.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a);
    for r in z.iter_mut() {
        for _ in 0..3 {
            let d = eval_d(*r);
            if d.norm() == 0.0 {
                break;
            }
            *r -= eval(*r) / d;
        }
    }
    z
}

/// Calderón projector of a scalar symbol from its roots: range spanned by the vectors
/// `(1, λ, …, λ^{m-1})` of roots with `Im λ > 0`, kernel by the remaining ones.
pub fn scalar_calderon_from_roots(sym: &PolyMatrixSymbol<f64>, xi: &TangentialCovector<f64>) -> Result<Projector<f64>> {
    assert_eq!(sym.system_size(), 1, "scalar symbols only");
    let coeffs: Vec<Complex64> = sym.principal_part().tau_coefficients(xi).iter().map(|a| a[(0, 0)]).collect();
    let roots = poly_roots(&coeffs);
    let m = roots.len();
    let vander = |rs: &[Complex64]| CMatrix::from_fn(m, rs.len(), |i, j| rs[j].powu(i as u32));
    let (up, down): (Vec<Complex64>, Vec<Complex64>) = roots.iter().partition(|r| r.im > 0.0);
    let range = SubspaceBasis::new(vander(&up), 1e-12)?;
    let kernel = SubspaceBasis::new(vander(&down), 1e-12)?;
    projector_from_pair(&range, &kernel)
}

/// Dense real polynomial in one variable, ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn eval(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &a| acc * x + a)
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly(vec![0.0]);
        }
        Poly(self.0.iter().enumerate().skip(1).map(|(k, &a)| a * k as f64).collect())
    }

    /// `j`-th derivative.
    pub fn deriv_n(&self, j: usize) -> Poly {
        (0..j).fold(self.clone(), |p, _| p.derivative())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }
}

/// Dense complex polynomial in one variable, ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct CPoly(pub Vec<Complex64>);

impl CPoly {
    pub fn eval(&self, x: f64) -> Complex64 {
        self.0.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * x + a)
    }

    pub fn derivative(&self) -> CPoly {
        if self.0.len() <= 1 {
            return CPoly(vec![Complex64::new(0.0, 0.0)]);
        }
        CPoly(self.0.iter().enumerate().skip(1).map(|(k, &a)| a * k as f64).collect())
    }

    /// `D^j = (-i d/dx)^j`.
    pub fn d_pow(&self, j: usize) -> CPoly {
        let mi = Complex64::new(0.0, -1.0);
        (0..j).fold(self.clone(), |p, _| {
            let d = p.derivative();
            CPoly(d.0.iter().map(|&c| c * mi).collect())
        })
    }

    pub fn mul(&self, other: &CPoly) -> CPoly {
        let mut out = vec![Complex64::new(0.0, 0.0); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        CPoly(out)
    }

    pub fn add(&self, other: &CPoly) -> CPoly {
        let n = self.0.len().max(other.0.len());
        let z = Complex64::new(0.0, 0.0);
        CPoly((0..n).map(|k| self.0.get(k).copied().unwrap_or(z) + other.0.get(k).copied().unwrap_or(z)).collect())
    }

    pub fn conj(&self) -> CPoly {
        CPoly(self.0.iter().map(|c| c.conj()).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }
}

/// Scalar `P = Σ_j a_j(ρ) D^j` with polynomial coefficients.
fn apply(coeffs: &[CPoly], u: &CPoly) -> CPoly {
    coeffs.iter().enumerate().fold(CPoly(vec![Complex64::new(0.0, 0.0)]), |acc, (j, a)| acc.add(&a.mul(&u.d_pow(j))))
}

/// Formal adjoint `P*φ = Σ_j D^j(conj(a_j) φ)`.
fn apply_adjoint(coeffs: &[CPoly], phi: &CPoly) -> CPoly {
    coeffs.iter().enumerate().fold(CPoly(vec![Complex64::new(0.0, 0.0)]), |acc, (j, a)| acc.add(&a.conj().mul(phi).d_pow(j)))
}

/// `∫_0^1 f conj(g)` exactly, by Gauss–Legendre with enough nodes for the degree.
fn pairing(f: &CPoly, g: &CPoly) -> Complex64 {
    let n = (f.degree() + g.degree()) / 2 + 2;
    let (x, w) = crate::linalg::quadrature::gauss_legendre_on(n, 0.0, 1.0);
    x.iter().zip(&w).map(|(&xi, &wi)| f.eval(xi) * g.eval(xi).conj() * wi).sum()
}

/// `⟨u, P*φ⟩ - ⟨Pu, φ⟩` over `[0, 1]` by exact quadrature. When `φ` vanishes to order `m` at
/// `1` only the boundary term at `ρ = 0` remains.
pub fn green_defect_lhs(coeffs: &[CPoly], u: &CPoly, phi: &CPoly) -> Complex64 {
    pairing(u, &apply_adjoint(coeffs, phi)) - pairing(&apply(coeffs, u), phi)
}

/// Boundary jet `(f, Df, …, D^{m-1} f)(0)`.
pub fn jet_at_zero(f: &CPoly, m: usize) -> Vec<Complex64> {
    (0..m).map(|l| f.d_pow(l).eval(0.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::{calderon_symbol, laplacian_symbol};

    #[test]
    fn roots_of_known_polynomial() {
        // (z - 1)(z + 2i)(z - 3 + i)
        let want = [Complex64::new(1.0, 0.0), Complex64::new(0.0, -2.0), Complex64::new(3.0, -1.0)];
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for r in want {
            let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
            for (k, a) in c.iter().enumerate() {
                next[k + 1] += a;
                next[k] -= a * r;
            }
            c = next;
        }
        let got = poly_roots(&c);
        for r in want {
            assert!(got.iter().any(|g| (g - r).norm() < 1e-12));
        }
    }

    #[test]
    fn laplacian_from_roots() {
        let xi = TangentialCovector::new(vec![], vec![0.7]);
        let c = scalar_calderon_from_roots(&laplacian_symbol(0, 1), &xi).unwrap();
        let r = calderon_symbol(&laplacian_symbol(0, 1), &xi).unwrap();
        assert!((c.matrix() - r.matrix()).norm() < 1e-12);
    }

    #[test]
    fn green_identity_laplacian() {
        // P = D²: the boundary term is (γφ)^H (-i[[0,1],[1,0]]) γu
        let c = |v: &[f64]| CPoly(v.iter().map(|&x| Complex64::new(x, 0.0)).collect());
        let coeffs = vec![c(&[0.0]), c(&[0.0]), c(&[1.0])];
        let u = c(&[1.0, 1.0]);
        let phi = c(&[1.0, -2.0, 1.0]);
        let lhs = green_defect_lhs(&coeffs, &u, &phi);
        let gu = jet_at_zero(&u, 2);
        let gp = jet_at_zero(&phi, 2);
        let i = Complex64::new(0.0, 1.0);
        let rhs = gp[0].conj() * (-i * gu[1]) + gp[1].conj() * (-i * gu[0]);
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn poly_calculus() {
        let p = Poly(vec![1.0, 2.0, 3.0]);
        assert_eq!(p.derivative(), Poly(vec![2.0, 6.0]));
        assert_eq!(p.eval(2.0), 17.0);
        assert_eq!(p.mul(&Poly(vec![0.0, 1.0])), Poly(vec![0.0, 1.0, 2.0, 3.0]));
    }
}
