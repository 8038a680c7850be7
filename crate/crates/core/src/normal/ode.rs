//! Dormand–Prince 5(4) integration of `Y' = i A(z) Y` with checkpoint re-orthonormalization.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Lu};
use crate::scalar::{i_unit, Real};

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Matrix-valued coefficient `z ↦ A(z)` together with its derivative.
pub trait CompanionField<T: Real> {
    fn dim(&self) -> usize;
    fn a(&self, z: T) -> CMatrix<T>;
    fn da(&self, z: T) -> CMatrix<T>;
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    /// Checkpoints at which the columns are re-orthonormalized.
    pub checkpoints: usize,
    /// Tolerance for the substitution residual of the interpolated solution.
    pub residual_tol: f64,
    pub min_step: f64,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self { rtol: 1e-12, checkpoints: 16, residual_tol: 1e-7, min_step: 1e-12 }
    }
}

/// Solution space of `D_z V = A(z) V` on `[z0, z1]`: column `j` is the solution with data
/// `start[:, j]` at `z0` and `end[:, j]` at `z1`.
#[derive(Debug, Clone)]
pub struct SolutionBasis<T: Real> {
    pub z0: T,
    pub z1: T,
    pub start: CMatrix<T>,
    pub end: CMatrix<T>,
    /// Largest relative substitution residual found at step midpoints.
    pub residual: T,
    pub steps: usize,
}

fn rhs<T: Real, F: CompanionField<T>>(field: &F, z: T, y: &CMatrix<T>) -> CMatrix<T> {
    field.a(z) * y * i_unit::<T>()
}

fn lit<T: Real>(x: f64) -> Complex<T> {
    Complex::new(T::lit(x), T::zero())
}

/// Relative residual `|p' - iAp|` of the quintic Hermite interpolant at the midpoint of a step.
fn midpoint_residual<T: Real, F: CompanionField<T>>(
    field: &F,
    za: T,
    ya: &CMatrix<T>,
    fa: &CMatrix<T>,
    zb: T,
    yb: &CMatrix<T>,
    fb: &CMatrix<T>,
) -> T {
    let i = i_unit::<T>();
    let h = zb - za;
    let sa = (field.da(za) * ya + field.a(za) * fa) * i;
    let sb = (field.da(zb) * yb + field.a(zb) * fb) * i;
    let hc = Complex::new(h, T::zero());
    let h2 = hc * hc;
    let t: f64 = 0.5;
    let (t2, t3, t4, t5) = (t * t, t * t * t, t.powi(4), t.powi(5));
    let hv = [
        1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5,
        t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5,
        0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5,
        0.5 * t3 - t4 + 0.5 * t5,
        -4.0 * t3 + 7.0 * t4 - 3.0 * t5,
        10.0 * t3 - 15.0 * t4 + 6.0 * t5,
    ];
    let dv = [
        -30.0 * t2 + 60.0 * t3 - 30.0 * t4,
        1.0 - 18.0 * t2 + 32.0 * t3 - 15.0 * t4,
        t - 4.5 * t2 + 6.0 * t3 - 2.5 * t4,
        1.5 * t2 - 4.0 * t3 + 2.5 * t4,
        -12.0 * t2 + 28.0 * t3 - 15.0 * t4,
        30.0 * t2 - 60.0 * t3 + 30.0 * t4,
    ];
    let parts = [ya.clone(), fa * hc, &sa * h2, &sb * h2, fb * hc, yb.clone()];
    let mut p = CMatrix::zeros(ya.nrows(), ya.ncols());
    let mut dp = CMatrix::zeros(ya.nrows(), ya.ncols());
    for k in 0..6 {
        p += &parts[k] * lit::<T>(hv[k]);
        dp += &parts[k] * lit::<T>(dv[k]);
    }
    let dp = dp / hc;
    let zm = za + h * T::lit(0.5);
    let am = field.a(zm);
    let res = &dp - &am * &p * i;
    let denom = dp.norm() + am.norm() * p.norm();
    if denom == T::zero() {
        T::zero()
    } else {
        res.norm() / denom
    }
}

fn mgs<T: Real>(y: &CMatrix<T>) -> (CMatrix<T>, CMatrix<T>) {
    let n = y.ncols();
    let mut q = y.clone();
    let mut r = CMatrix::<T>::zeros(n, n);
    for j in 0..n {
        for k in 0..j {
            let proj = q.column(k).dotc(&q.column(j));
            r[(k, j)] = proj;
            let qk = q.column(k).into_owned();
            let mut col = q.column_mut(j);
            col -= qk * proj;
        }
        let nrm = q.column(j).norm();
        r[(j, j)] = Complex::new(nrm, T::zero());
        if nrm > T::zero() {
            let mut col = q.column_mut(j);
            col /= Complex::new(nrm, T::zero());
        }
    }
    (q, r)
}

/// `y = Q R` with orthonormal `Q`, by modified Gram–Schmidt with one reorthogonalization.
fn qr<T: Real>(y: &CMatrix<T>) -> (CMatrix<T>, CMatrix<T>) {
    let (q1, r1) = mgs(y);
    let (q, r2) = mgs(&q1);
    (q, r2 * r1)
}

/// Integrates from `z0` to `z1` starting at `Y(z0) = I`.
pub fn integrate<T: Real, F: CompanionField<T>>(field: &F, z0: T, z1: T, opts: &OdeOptions) -> Result<SolutionBasis<T>> {
    let n = field.dim();
    let mut y = CMatrix::<T>::identity(n, n);
    // initial data of the current columns
    let mut x0 = CMatrix::<T>::identity(n, n);
    let len = z1 - z0;
    let rtol = T::lit(opts.rtol.max(10.0 * T::UNIT_ROUNDOFF));
    let mut h = len / T::lit(64.0);
    let mut z = z0;
    let mut residual = T::zero();
    let mut steps = 0usize;
    let mut fz = rhs(field, z, &y);
    for cp in 1..=opts.checkpoints {
        let target = z0 + len * T::nat(cp) / T::nat(opts.checkpoints);
        while (target - z) * len.signum() > T::zero() {
            let clipped = (z + h - target) * len.signum() >= T::zero();
            let hs = if clipped { target - z } else { h };
            let mut k: Vec<CMatrix<T>> = Vec::with_capacity(7);
            k.push(fz.clone());
            for s in 1..7 {
                let mut ys = y.clone();
                for (j, kj) in k.iter().enumerate().take(s) {
                    if A[s][j] != 0.0 {
                        ys += kj * Complex::new(hs * T::lit(A[s][j]), T::zero());
                    }
                }
                k.push(rhs(field, z + hs * T::lit(C[s]), &ys));
            }
            let mut y5 = y.clone();
            let mut err = CMatrix::<T>::zeros(n, n);
            for s in 0..7 {
                if B5[s] != 0.0 {
                    y5 += &k[s] * Complex::new(hs * T::lit(B5[s]), T::zero());
                }
                err += &k[s] * Complex::new(hs * T::lit(B5[s] - B4[s]), T::zero());
            }
            let scale = y.norm().max(y5.norm());
            let e = err.norm() / (rtol * scale);
            let fac = if e == T::zero() { T::lit(5.0) } else { T::lit(0.9) * e.powf(T::lit(-0.2)) };
            let fac = fac.max(T::lit(0.2)).min(T::lit(5.0));
            if e <= T::one() {
                let znew = if clipped { target } else { z + hs };
                let fnew = k[6].clone();
                let r = midpoint_residual(field, z, &y, &fz, znew, &y5, &fnew);
                if r > residual {
                    residual = r;
                }
                z = znew;
                y = y5;
                fz = fnew;
                steps += 1;
                if !clipped {
                    h = hs * fac;
                }
            } else {
                h = hs * fac;
                if !h.is_finite() || h.abs() < T::lit(opts.min_step) {
                    return Err(Error::IntegrationFailure { z: z.as_f64(), stepsize: h.as_f64() });
                }
            }
        }
        let (q, r) = qr(&y);
        let rinv = Lu::factor(&r)
            .map_err(|_| Error::IntegrationFailure { z: z.as_f64(), stepsize: h.as_f64() })?
            .solve(&CMatrix::identity(n, n));
        x0 = &x0 * &rinv;
        y = q;
        fz = rhs(field, z, &y);
    }
    if residual.as_f64() > opts.residual_tol {
        return Err(Error::IntegrationFailure { z: z1.as_f64(), stepsize: residual.as_f64() });
    }
    Ok(SolutionBasis { z0, z1, start: x0, end: y, residual, steps })
}
