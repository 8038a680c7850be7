//! Interior principal-symbol Calderón projectors and Dirichlet-to-Neumann symbols.
//!
//! A symbol is a matrix polynomial `σ(τ, η, ζ') = Σ a_{kαβ} τ^k η^α ζ'^β`. The covariable `τ`
//! is the one dual to the transversal variable `t` of the boundary; the ordinary differential
//! equation `σ(D_t, ξ') v = 0` on the half-line `t > 0` is reduced to first order in the
//! variables `V = (v, D_t v, …, D_t^{m-1} v)` and split by the sign of the imaginary part of
//! the spectrum, since `e^{iλt}` decays for `Im λ > 0`.

use std::collections::BTreeMap;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{
    gram_adjoint, idempotence_defect, identity, lu_solve, riesz_projector, scale,
    smallest_singular_value, CMatrix, Contour, ContourSpec, Lu, Projector,
};
use crate::scalar::{cabs, i_unit, Real};

/// Point of the cotangent fibre: `τ`, base covariables `η` and tangential fibre covariables `ζ'`.
#[derive(Debug, Clone, PartialEq)]
pub struct Covector<T: Real> {
    pub tau: T,
    pub eta: Vec<T>,
    pub zeta_prime: Vec<T>,
}

/// Covector with `τ` omitted; the argument of the boundary-symbol operations.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentialCovector<T: Real> {
    pub eta: Vec<T>,
    pub zeta_prime: Vec<T>,
}

impl<T: Real> TangentialCovector<T> {
    pub fn new(eta: Vec<T>, zeta_prime: Vec<T>) -> Self {
        Self { eta, zeta_prime }
    }

    pub fn norm(&self) -> T {
        self.eta.iter().chain(&self.zeta_prime).fold(T::zero(), |acc, &x| acc + x * x).sqrt()
    }

    pub fn scaled(&self, lambda: T) -> Self {
        Self {
            eta: self.eta.iter().map(|&x| x * lambda).collect(),
            zeta_prime: self.zeta_prime.iter().map(|&x| x * lambda).collect(),
        }
    }

    pub fn with_tau(&self, tau: T) -> Covector<T> {
        Covector { tau, eta: self.eta.clone(), zeta_prime: self.zeta_prime.clone() }
    }
}

impl<T: Real> Covector<T> {
    fn vars(&self) -> Vec<T> {
        let mut v = Vec::with_capacity(1 + self.eta.len() + self.zeta_prime.len());
        v.push(self.tau);
        v.extend_from_slice(&self.eta);
        v.extend_from_slice(&self.zeta_prime);
        v
    }
}

/// Matrix-valued polynomial symbol of order `m` acting on `C^N`.
///
/// Coefficients are keyed by the full exponent vector `(k, α_1..α_b, β_1..β_{f-1})`.
#[derive(Debug, Clone)]
pub struct PolyMatrixSymbol<T: Real> {
    order: usize,
    system_size: usize,
    base_dim: usize,
    tangential_dim: usize,
    coeffs: BTreeMap<Vec<usize>, CMatrix<T>>,
}

impl<T: Real> PolyMatrixSymbol<T> {
    /// Empty symbol; add terms with [`Self::add_term`] and finish with [`Self::validated`].
    pub fn new(order: usize, system_size: usize, base_dim: usize, tangential_dim: usize) -> Self {
        Self { order, system_size, base_dim, tangential_dim, coeffs: BTreeMap::new() }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn system_size(&self) -> usize {
        self.system_size
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn tangential_dim(&self) -> usize {
        self.tangential_dim
    }

    fn nvars(&self) -> usize {
        1 + self.base_dim + self.tangential_dim
    }

    /// Adds `coeff · τ^k η^α ζ'^β` to the symbol.
    pub fn add_term(&mut self, k: usize, alpha: &[usize], beta: &[usize], coeff: CMatrix<T>) -> Result<()> {
        if alpha.len() != self.base_dim || beta.len() != self.tangential_dim {
            return Err(Error::DimensionMismatch(format!(
                "multi-index lengths {}/{} for dims {}/{}",
                alpha.len(),
                beta.len(),
                self.base_dim,
                self.tangential_dim
            )));
        }
        if coeff.shape() != (self.system_size, self.system_size) {
            return Err(Error::DimensionMismatch(format!("coefficient shape {:?}", coeff.shape())));
        }
        let deg = k + alpha.iter().sum::<usize>() + beta.iter().sum::<usize>();
        if deg > self.order {
            return Err(Error::InvalidArgument(format!("term of degree {deg} exceeds order {}", self.order)));
        }
        let mut key = vec![k];
        key.extend_from_slice(alpha);
        key.extend_from_slice(beta);
        self.add_raw(key, coeff);
        Ok(())
    }

    fn add_raw(&mut self, key: Vec<usize>, coeff: CMatrix<T>) {
        self.coeffs
            .entry(key)
            .and_modify(|c| *c += &coeff)
            .or_insert(coeff);
    }

    /// Checks that `a_{m,0,0}` is invertible.
    pub fn validated(self) -> Result<Self> {
        let lead = self.leading_tau_coefficient();
        Lu::factor(&lead).map_err(|_| Error::LeadingCoefficientSingular)?;
        Ok(self)
    }

    pub fn leading_tau_coefficient(&self) -> CMatrix<T> {
        let mut key = vec![0; self.nvars()];
        key[0] = self.order;
        self.coeffs.get(&key).cloned().unwrap_or_else(|| CMatrix::zeros(self.system_size, self.system_size))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], &CMatrix<T>)> {
        self.coeffs.iter().map(|(k, v)| (k.as_slice(), v))
    }

    /// Homogeneous part of degree `m`.
    pub fn principal_part(&self) -> Self {
        let mut out = Self::new(self.order, self.system_size, self.base_dim, self.tangential_dim);
        for (key, c) in &self.coeffs {
            if key.iter().sum::<usize>() == self.order {
                out.coeffs.insert(key.clone(), c.clone());
            }
        }
        out
    }

    /// `σ(τ, η, ζ')`.
    pub fn eval(&self, xi: &Covector<T>) -> CMatrix<T> {
        let vars = xi.vars();
        assert_eq!(vars.len(), self.nvars(), "covector dimension");
        let mut out = CMatrix::zeros(self.system_size, self.system_size);
        for (key, c) in &self.coeffs {
            let mono = key.iter().zip(&vars).fold(T::one(), |acc, (&e, &x)| acc * x.powi(e as i32));
            out += c * Complex::new(mono, T::zero());
        }
        out
    }

    /// `∂_τ σ(τ, η, ζ')`.
    pub fn eval_dtau(&self, xi: &Covector<T>) -> CMatrix<T> {
        let vars = xi.vars();
        let mut out = CMatrix::zeros(self.system_size, self.system_size);
        for (key, c) in &self.coeffs {
            if key[0] == 0 {
                continue;
            }
            let mut mono = T::nat(key[0]) * vars[0].powi(key[0] as i32 - 1);
            for (&e, &x) in key.iter().zip(&vars).skip(1) {
                mono *= x.powi(e as i32);
            }
            out += c * Complex::new(mono, T::zero());
        }
        out
    }

    /// Coefficients `a_k(ξ')` of `τ^k`, `k = 0..=m`.
    pub fn tau_coefficients(&self, xi: &TangentialCovector<T>) -> Vec<CMatrix<T>> {
        let vars = xi.with_tau(T::zero()).vars();
        let mut out = vec![CMatrix::zeros(self.system_size, self.system_size); self.order + 1];
        for (key, c) in &self.coeffs {
            let mono = key.iter().zip(&vars).skip(1).fold(T::one(), |acc, (&e, &x)| acc * x.powi(e as i32));
            out[key[0]] += c * Complex::new(mono, T::zero());
        }
        out
    }

    /// Product `self · other` (orders add).
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.system_size, other.system_size);
        assert_eq!(self.nvars(), other.nvars());
        let mut out = Self::new(self.order + other.order, self.system_size, self.base_dim, self.tangential_dim);
        for (ka, a) in &self.coeffs {
            for (kb, b) in &other.coeffs {
                let key: Vec<usize> = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
                out.add_raw(key, a * b);
            }
        }
        out
    }

    /// `σ(ξ)^H` for real covariables (conjugate-transposed coefficients).
    pub fn adjoint(&self) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.values_mut() {
            *c = c.adjoint();
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EllipticityReport<T: Real> {
    pub elliptic: bool,
    pub min_sv: T,
    /// Covector on the unit sphere where the smallest singular value was attained, when not
    /// elliptic.
    pub witness: Option<Covector<T>>,
}

/// Samples the principal symbol on the unit cosphere and refines the worst sample by pattern
/// search.
pub fn ellipticity_check<T: Real>(sym: &PolyMatrixSymbol<T>, samples: usize, seed: u64) -> EllipticityReport<T> {
    let p = sym.principal_part();
    let d = sym.nvars();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let unit = |v: &[f64]| -> Vec<f64> {
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter().map(|x| x / n).collect()
    };
    let covector = |v: &[f64]| Covector {
        tau: T::lit(v[0]),
        eta: v[1..1 + sym.base_dim].iter().map(|&x| T::lit(x)).collect(),
        zeta_prime: v[1 + sym.base_dim..].iter().map(|&x| T::lit(x)).collect(),
    };
    let f = |v: &[f64]| smallest_singular_value(&p.eval(&covector(v))).as_f64();
    let mut best_v = Vec::new();
    let mut best = f64::INFINITY;
    for _ in 0..samples.max(1) {
        let raw: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let v = unit(&raw);
        let val = f(&v);
        if val < best {
            best = val;
            best_v = v;
        }
    }
    // coordinate pattern search on the sphere
    let mut step = 0.25;
    while step > 1e-12 && best > 0.0 {
        let mut improved = false;
        for i in 0..d {
            for sgn in [1.0, -1.0] {
                let mut trial = best_v.clone();
                trial[i] += sgn * step;
                let trial = unit(&trial);
                let val = f(&trial);
                if val < best {
                    best = val;
                    best_v = trial;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    let coeff_scale = sym.coeffs.values().map(|c| c.norm().as_f64()).fold(1.0, f64::max);
    let elliptic = best > 1e-8 * coeff_scale;
    EllipticityReport {
        elliptic,
        min_sv: T::lit(best),
        witness: if elliptic { None } else { Some(covector(&best_v)) },
    }
}

/// First-order companion `A` with `D_t V = A V`, so `V(t) = exp(itA) V(0)`. Uses every term
/// of the symbol.
pub fn companion_matrix<T: Real>(sym: &PolyMatrixSymbol<T>, xi: &TangentialCovector<T>) -> Result<CMatrix<T>> {
    if xi.norm() == T::zero() {
        return Err(Error::ZeroCovector);
    }
    companion_from_coefficients(&sym.tau_coefficients(xi))
}

/// Companion of `Σ_k a_k τ^k` with `a_m = coeffs[m]` invertible.
pub fn companion_from_coefficients<T: Real>(coeffs: &[CMatrix<T>]) -> Result<CMatrix<T>> {
    let m = coeffs.len() - 1;
    let n = coeffs[0].nrows();
    let lead = Lu::factor(&coeffs[m]).map_err(|_| Error::LeadingCoefficientSingular)?;
    let mut a = CMatrix::zeros(m * n, m * n);
    for j in 0..m.saturating_sub(1) {
        a.view_mut((j * n, (j + 1) * n), (n, n)).copy_from(&identity::<T>(n));
    }
    for (j, c) in coeffs.iter().take(m).enumerate() {
        let block = -lead.solve(c);
        a.view_mut(((m - 1) * n, j * n), (n, n)).copy_from(&block);
    }
    Ok(a)
}

/// Lower bound for the distance of the companion spectrum from the real axis, halved.
fn spectral_gap_estimate<T: Real>(p: &PolyMatrixSymbol<T>, xi: &TangentialCovector<T>, radius: T) -> T {
    let coeffs = p.tau_coefficients(xi);
    // Lipschitz bound of τ -> σ(τ) on |τ| <= radius
    let mut lip = T::zero();
    for (k, c) in coeffs.iter().enumerate().skip(1) {
        lip += T::nat(k) * c.norm() * radius.powi(k as i32 - 1);
    }
    let mut min_sv = T::max_value().unwrap_or_else(|| T::lit(1e300));
    for j in 0..65 {
        let tau = -radius + radius * T::lit(2.0 * j as f64 / 64.0);
        let s = smallest_singular_value(&p.eval(&xi.with_tau(tau)));
        if s < min_sv {
            min_sv = s;
        }
    }
    if lip == T::zero() {
        return T::one();
    }
    let delta = T::lit(0.5) * min_sv / lip;
    // the contour must stay inside the Cauchy disc
    if delta > radius * T::lit(0.5) {
        radius * T::lit(0.5)
    } else {
        delta
    }
}

fn half_plane_projectors<T: Real>(
    a: &CMatrix<T>,
    mut delta: T,
    radius: T,
    tol: T,
) -> Result<(Projector<T>, Projector<T>)> {
    let eye = identity::<T>(a.nrows());
    let mut last_err = Error::ContourTooClose { defect: f64::INFINITY, nodes: 0 };
    for _ in 0..20 {
        let upper = Contour::Rectangle { re_min: -radius, re_max: radius, im_min: delta, im_max: radius };
        let lower = Contour::Rectangle { re_min: -radius, re_max: radius, im_min: -radius, im_max: -delta };
        let attempt = riesz_projector(a, &ContourSpec::new(upper).with_tol(tol))
            .and_then(|cp| riesz_projector(a, &ContourSpec::new(lower).with_tol(tol)).map(|cm| (cp, cm)));
        match attempt {
            Ok((cp, cm)) => {
                let sum = cp.matrix() + cm.matrix() - &eye;
                if sum.norm() <= T::lit(10.0) * tol * scale(cp.matrix()) {
                    return Ok((cp, cm));
                }
                last_err = Error::ContourTooClose { defect: sum.norm().as_f64(), nodes: 0 };
            }
            Err(e) => last_err = e,
        }
        delta *= T::lit(0.5);
    }
    Err(last_err)
}

/// Fujiwara bound `2 max_k ‖B_{m-k}‖^{1/k}` (last term halved) on the eigenvalues of a block
/// companion matrix whose last block row is `(B_0, …, B_{m-1})`. Much tighter than a row-sum
/// norm when the low-order blocks are large, which keeps the contour short.
fn eigenvalue_bound<T: Real>(a: &CMatrix<T>, m: usize, n: usize) -> T {
    let last = n * (m - 1);
    let mut bound = T::zero();
    for k in 1..=m {
        let block = a.view((last, n * (m - k)), (n, n)).into_owned();
        let mut norm = crate::linalg::spectral_norm(&block);
        if k == m {
            norm = norm * T::lit(0.5);
        }
        let root = norm.powf(T::one() / T::nat(k));
        if root > bound {
            bound = root;
        }
    }
    T::lit(2.0) * bound
}

/// Both half-plane projectors as unit-circle Riesz projectors of the Cayley transforms
/// `(A ∓ icI)(A ± icI)^{-1}`, which map the upper (lower) half-plane into the unit disc. With
/// `c = |det A|^{1/n}`, the geometric mean of the eigenvalue moduli, eigenvalues close to the
/// real axis stay well inside or outside the circle, where the trapezoid rule converges
/// geometrically; a rectangle with uniform panels needs far more nodes near such eigenvalues.
/// `None` when a transform is singular or the quadrature does not settle.
fn cayley_projectors<T: Real>(a: &CMatrix<T>, tol: T) -> Option<(Projector<T>, Projector<T>)> {
    let n = a.nrows();
    let c = (Lu::factor(a).ok()?.log_abs_det() / T::nat(n)).exp();
    let circle = ContourSpec::new(Contour::Circle { center: Complex::new(T::zero(), T::zero()), radius: T::one() }).with_tol(tol);
    let eye = identity::<T>(n);
    let transform = |sign: T| -> Option<Projector<T>> {
        let shift = Complex::new(T::zero(), sign * c);
        let num = a - &eye * shift;
        let den = a + &eye * shift;
        // M = num den^{-1}  <=>  den^T M^T = num^T
        let m = lu_solve(&den.transpose(), &num.transpose()).ok()?.transpose();
        riesz_projector(&m, &circle).ok()
    };
    let plus = transform(T::one())?;
    let minus = transform(-T::one())?;
    let sum = plus.matrix() + minus.matrix() - &eye;
    (sum.norm() <= T::lit(10.0) * tol * scale(plus.matrix())).then_some((plus, minus))
}

fn both_projectors<T: Real>(sym: &PolyMatrixSymbol<T>, xi: &TangentialCovector<T>) -> Result<(Projector<T>, Projector<T>)> {
    let p = sym.principal_part();
    let a = companion_matrix(&p, xi)?;
    let tol = T::tol(1e-12);
    if let Some(pair) = cayley_projectors(&a, tol) {
        return Ok(pair);
    }
    let radius = T::one() + eigenvalue_bound(&a, p.order(), p.system_size());
    let delta = spectral_gap_estimate(&p, xi, radius);
    half_plane_projectors(&a, delta, radius, tol)
}

/// Calderón projector of the principal symbol at `ξ'`: the spectral projector of the companion
/// for the open upper half-plane, acting on data `(v, D_t v, …, D_t^{m-1} v)(0)`.
pub fn calderon_symbol<T: Real>(sym: &PolyMatrixSymbol<T>, xi: &TangentialCovector<T>) -> Result<Projector<T>> {
    Ok(both_projectors(sym, xi)?.0)
}

/// Lower half-plane projector; `C⁺ + C⁻ = I`.
pub fn complementary_symbol<T: Real>(sym: &PolyMatrixSymbol<T>, xi: &TangentialCovector<T>) -> Result<Projector<T>> {
    Ok(both_projectors(sym, xi)?.1)
}

/// Sign convention for the normal derivative in [`dn_symbol`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalOrientation {
    /// `∂_ν = -∂_t`, pointing out of `{t > 0}`.
    Outward,
    Inward,
}

/// Principal symbol of the Dirichlet-to-Neumann map of a scalar second-order symbol.
pub fn dn_symbol<T: Real>(
    sym: &PolyMatrixSymbol<T>,
    xi: &TangentialCovector<T>,
    orientation: NormalOrientation,
) -> Result<Complex<T>> {
    if sym.order != 2 || sym.system_size != 1 {
        return Err(Error::Unsupported("dn_symbol needs a scalar second-order symbol".into()));
    }
    let c = calderon_symbol(sym, xi)?;
    let range = c.numerical_range(T::tol(1e-8));
    if range.dim() != 1 {
        return Err(Error::GraphConditionFailed);
    }
    let v = range.basis();
    if cabs(v[(0, 0)]) <= T::tol(1e-10) * v.norm() {
        return Err(Error::GraphConditionFailed);
    }
    // range = span{(1, λ)} with λ = D_t v / v; ∂_t = i D_t
    let lambda = v[(1, 0)] / v[(0, 0)];
    let dt = i_unit::<T>() * lambda;
    Ok(match orientation {
        NormalOrientation::Outward => -dt,
        NormalOrientation::Inward => dt,
    })
}

/// `C (I + C - C*)^{-1}` with `C*` the gram-adjoint: a gram-orthogonal projector with the
/// range of `C`.
pub fn orthogonalize<T: Real>(c: &Projector<T>, gram: &CMatrix<T>) -> Result<Projector<T>> {
    let cm = c.matrix();
    let tol = T::tol(1e-9);
    if c.idem_defect() > tol * scale(cm) {
        return Err(Error::NotIdempotent { defect: c.idem_defect().as_f64() });
    }
    let cstar = gram_adjoint(cm, gram)?;
    let n = cm.nrows();
    let m = identity::<T>(n) + cm - cstar;
    // C_o = C M^{-1}  <=>  M^T C_o^T = C^T
    let cot = lu_solve(&m.transpose(), &cm.transpose()).map_err(|_| Error::NotInvertible)?;
    let co = cot.transpose();
    let defect = idempotence_defect(&co);
    Projector::certify(co, T::tol(1e-8)).map_err(|_| Error::NotIdempotent { defect: defect.as_f64() })
}

/// Scalar symbol in `τ` and one tangential covariable `s`; each `(k, j, c)` adds `c τ^k s^j`.
pub fn scalar_symbol<T: Real>(order: usize, terms: &[(usize, usize, Complex<T>)]) -> Result<PolyMatrixSymbol<T>> {
    let mut s = PolyMatrixSymbol::new(order, 1, 0, 1);
    for &(k, j, c) in terms {
        s.add_term(k, &[], &[j], CMatrix::from_element(1, 1, c))?;
    }
    s.validated()
}

/// `τ² + |ξ'|²` for `b` base and `f1` tangential covariables.
pub fn laplacian_symbol<T: Real>(base_dim: usize, tangential_dim: usize) -> PolyMatrixSymbol<T> {
    let mut s = PolyMatrixSymbol::new(2, 1, base_dim, tangential_dim);
    let one = CMatrix::from_element(1, 1, Complex::new(T::one(), T::zero()));
    s.add_raw(unit_key(1 + base_dim + tangential_dim, 0, 2), one.clone());
    for v in 1..(1 + base_dim + tangential_dim) {
        s.add_raw(unit_key(1 + base_dim + tangential_dim, v, 2), one.clone());
    }
    s
}

fn unit_key(nvars: usize, var: usize, power: usize) -> Vec<usize> {
    let mut k = vec![0; nvars];
    k[var] = power;
    k
}

fn gaussian_matrix<T: Real>(rng: &mut ChaCha8Rng, n: usize) -> CMatrix<T> {
    crate::linalg::random_complex(rng, n, n)
}

/// All exponent vectors of total degree `deg` in `nvars` variables.
fn monomials(nvars: usize, deg: usize) -> Vec<Vec<usize>> {
    if nvars == 1 {
        return vec![vec![deg]];
    }
    let mut out = Vec::new();
    for first in 0..=deg {
        for mut rest in monomials(nvars - 1, deg - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `(Σ x_i^2)^{p}` times `I_N`.
fn radial_power<T: Real>(n: usize, base_dim: usize, tangential_dim: usize, p: usize) -> PolyMatrixSymbol<T> {
    let mut r = PolyMatrixSymbol::new(0, n, base_dim, tangential_dim);
    r.add_raw(vec![0; 1 + base_dim + tangential_dim], identity::<T>(n));
    let sq = {
        let mut s = PolyMatrixSymbol::new(2, n, base_dim, tangential_dim);
        for v in 0..(1 + base_dim + tangential_dim) {
            s.add_raw(unit_key(1 + base_dim + tangential_dim, v, 2), identity::<T>(n));
        }
        s
    };
    for _ in 0..p {
        r = r.mul(&sq);
    }
    r
}

/// Seeded elliptic principal symbol of order `m` on `C^N`.
///
/// Even orders are `Q^H Q + ε|ξ|^m` with `Q` a homogeneous matrix polynomial of degree
/// `m/2` with Gaussian coefficients and `ε = 0.1`. Odd orders multiply such a factor of
/// order `m - 1` by `τ I + i ζ' H` with `H` Hermitian and invertible; this needs exactly one
/// tangential covariable and no base covariable.
pub fn random_elliptic_symbol<T: Real>(
    order: usize,
    system_size: usize,
    base_dim: usize,
    tangential_dim: usize,
    seed: u64,
) -> Result<PolyMatrixSymbol<T>> {
    if order == 0 {
        return Err(Error::InvalidArgument("order must be positive".into()));
    }
    if order % 2 == 1 && (base_dim != 0 || tangential_dim != 1) {
        return Err(Error::Unsupported("odd-order generator needs b = 0 and one tangential covariable".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nvars = 1 + base_dim + tangential_dim;
    let even = order - order % 2;
    let n = system_size;
    let mut sym = if even == 0 {
        let mut s = PolyMatrixSymbol::new(0, n, base_dim, tangential_dim);
        s.add_raw(vec![0; nvars], identity::<T>(n));
        s
    } else {
        let mut q = PolyMatrixSymbol::new(even / 2, n, base_dim, tangential_dim);
        for key in monomials(nvars, even / 2) {
            q.add_raw(key, gaussian_matrix(&mut rng, n));
        }
        let mut s = q.adjoint().mul(&q);
        let mut eps = radial_power::<T>(n, base_dim, tangential_dim, even / 2);
        for c in eps.coeffs.values_mut() {
            *c *= Complex::new(T::lit(0.1), T::zero());
        }
        for (k, c) in eps.coeffs {
            s.add_raw(k, c);
        }
        s
    };
    if order % 2 == 1 {
        let g = gaussian_matrix::<T>(&mut rng, n);
        let h = (&g + g.adjoint()) * Complex::new(T::lit(0.5), T::zero());
        // shift the spectrum away from zero
        let shift = T::lit(2.0 * h.norm().as_f64().max(1.0));
        let h = h + identity::<T>(n) * Complex::new(shift, T::zero());
        let mut f = PolyMatrixSymbol::new(1, n, 0, 1);
        f.add_raw(vec![1, 0], identity::<T>(n));
        f.add_raw(vec![0, 1], h * i_unit::<T>());
        sym = f.mul(&sym);
    }
    sym.order = order;
    sym.validated()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    fn xi(s: f64) -> TangentialCovector<f64> {
        TangentialCovector::new(vec![], vec![s])
    }

    fn laplace_c(s: f64) -> CMatrix<f64> {
        CMatrix::from_vec(2, 2, vec![cplx(0.5, 0.0), cplx(0.0, 0.5 * s), cplx(0.0, -0.5 / s), cplx(0.5, 0.0)])
    }

    #[test]
    fn ellipticity_examples() {
        let lap = laplacian_symbol::<f64>(1, 1);
        let r = ellipticity_check(&lap, 64, 1);
        assert!(r.elliptic);
        assert!((r.min_sv - 1.0).abs() < 1e-12);

        let wave = scalar_symbol::<f64>(2, &[(2, 0, cplx(1.0, 0.0)), (0, 2, cplx(-1.0, 0.0))]).unwrap();
        let r = ellipticity_check(&wave, 64, 1);
        assert!(!r.elliptic);
        let w = r.witness.unwrap();
        assert!((w.tau.abs() - w.zeta_prime[0].abs()).abs() < 1e-6);

        let cr = scalar_symbol::<f64>(1, &[(1, 0, cplx(1.0, 0.0)), (0, 1, cplx(0.0, 1.0))]).unwrap();
        let r = ellipticity_check(&cr, 64, 1);
        assert!(r.elliptic);
        assert!((r.min_sv - 1.0).abs() < 1e-12);
    }

    #[test]
    fn companion_examples() {
        let s = 1.7;
        let a = companion_matrix(&laplacian_symbol::<f64>(0, 1), &xi(s)).unwrap();
        let want = CMatrix::from_vec(2, 2, vec![cplx(0.0, 0.0), cplx(-s * s, 0.0), cplx(1.0, 0.0), cplx(0.0, 0.0)]);
        assert!((a - want).norm() < 1e-14);

        let first = scalar_symbol::<f64>(1, &[(1, 0, cplx(1.0, 0.0)), (0, 0, cplx(0.3, -0.2))]).unwrap();
        let a = companion_matrix(&first, &xi(1.0)).unwrap();
        assert!((a[(0, 0)] - cplx(-0.3, 0.2)).norm() < 1e-15);

        let m = CMatrix::from_vec(2, 2, vec![cplx(1.0, 0.0), cplx(2.0, 1.0), cplx(0.0, -1.0), cplx(3.0, 0.0)]);
        let mut block = PolyMatrixSymbol::new(1, 2, 0, 1);
        block.add_term(1, &[], &[0], identity(2)).unwrap();
        block.add_term(0, &[], &[0], m.clone()).unwrap();
        let a = companion_matrix(&block.validated().unwrap(), &xi(1.0)).unwrap();
        assert!((a + m).norm() < 1e-15);

        assert_eq!(companion_matrix(&laplacian_symbol::<f64>(0, 1), &xi(0.0)), Err(Error::ZeroCovector));
    }

    #[test]
    fn laplacian_calderon_closed_form() {
        for s in [0.25, 1.0, 4.0] {
            let c = calderon_symbol(&laplacian_symbol::<f64>(0, 1), &xi(s)).unwrap();
            assert!((c.matrix() - laplace_c(s)).norm() < 1e-10, "s={s}");
            let cm = complementary_symbol(&laplacian_symbol::<f64>(0, 1), &xi(s)).unwrap();
            let want = CMatrix::from_vec(2, 2, vec![cplx(0.5, 0.0), cplx(0.0, -0.5 * s), cplx(0.0, 0.5 / s), cplx(0.5, 0.0)]);
            assert!((cm.matrix() - want).norm() < 1e-10);
            assert!((c.matrix() + cm.matrix() - identity::<f64>(2)).norm() < 1e-10);
        }
    }

    #[test]
    fn first_order_half_plane_split() {
        let s = 2.0;
        let minus = scalar_symbol::<f64>(1, &[(1, 0, cplx(1.0, 0.0)), (0, 1, cplx(0.0, -1.0))]).unwrap();
        let c = calderon_symbol(&minus, &xi(s)).unwrap();
        assert!((c.matrix()[(0, 0)] - cplx(1.0, 0.0)).norm() < 1e-12);
        let cm = complementary_symbol(&minus, &xi(s)).unwrap();
        assert!(cm.matrix()[(0, 0)].norm() < 1e-12);

        let plus = scalar_symbol::<f64>(1, &[(1, 0, cplx(1.0, 0.0)), (0, 1, cplx(0.0, 1.0))]).unwrap();
        let c = calderon_symbol(&plus, &xi(s)).unwrap();
        assert!(c.matrix()[(0, 0)].norm() < 1e-12);
    }

    #[test]
    fn dn_examples() {
        let lap = laplacian_symbol::<f64>(0, 1);
        for s in [0.3, 1.0, 5.0] {
            let out = dn_symbol(&lap, &xi(s), NormalOrientation::Outward).unwrap();
            assert!((out - cplx(s, 0.0)).norm() < 1e-10);
            let inw = dn_symbol(&lap, &xi(s), NormalOrientation::Inward).unwrap();
            assert!((inw - cplx(-s, 0.0)).norm() < 1e-10);
        }
        let two = scalar_symbol::<f64>(2, &[(2, 0, cplx(1.0, 0.0)), (0, 2, cplx(2.0, 0.0))]).unwrap();
        let out = dn_symbol(&two, &xi(1.5), NormalOrientation::Outward).unwrap();
        assert!((out - cplx(2f64.sqrt() * 1.5, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn orthogonalize_examples() {
        let g = identity::<f64>(2);
        let c = Projector::certify(crate::linalg::from_real(2, 2, &[1.0, 1.0, 0.0, 0.0]), 1e-12).unwrap();
        let co = orthogonalize(&c, &g).unwrap();
        assert!((co.matrix() - crate::linalg::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0])).norm() < 1e-14);

        let sa = Projector::certify(crate::linalg::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]), 1e-12).unwrap();
        assert!((orthogonalize(&sa, &g).unwrap().matrix() - sa.matrix()).norm() < 1e-14);

        let zero = Projector::certify(CMatrix::<f64>::zeros(2, 2), 1e-12).unwrap();
        assert!(orthogonalize(&zero, &g).unwrap().matrix().norm() < 1e-15);
    }

    #[test]
    fn random_symbols_are_elliptic() {
        for (m, n, b, f) in [(2, 2, 1, 1), (4, 1, 0, 2), (3, 2, 0, 1), (1, 3, 0, 1)] {
            let s = random_elliptic_symbol::<f64>(m, n, b, f, 5).unwrap();
            assert_eq!(s.principal_part().terms().count(), s.terms().count());
            assert!(ellipticity_check(&s, 32, 2).elliptic, "m={m} n={n}");
        }
    }

    #[test]
    fn single_precision_closed_form() {
        let c = calderon_symbol(&laplacian_symbol::<f32>(0, 1), &TangentialCovector::new(vec![], vec![2.0f32])).unwrap();
        let want = laplace_c(2.0);
        for i in 0..2 {
            for j in 0..2 {
                let d = c.matrix()[(i, j)] - Complex::new(want[(i, j)].re as f32, want[(i, j)].im as f32);
                assert!(d.norm() < 1e-4);
            }
        }
    }
}
