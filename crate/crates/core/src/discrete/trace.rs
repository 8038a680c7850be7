//! One-sided boundary jets of grid functions by polynomial extrapolation.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{lu_solve, CMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Samples at `ρ = (offset + k) h`.
    Plus,
    /// Samples at `ρ = -(offset + k) h`.
    Minus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceReport {
    /// `(v, D_ρ v, …, D_ρ^{m-1} v)` at `ρ = 0`.
    pub jet: Vec<Complex64>,
    /// Difference between the degree `p` and `p + 1` extrapolations, with the `l`-th component
    /// scaled by `h^l`, relative to the scaled jet.
    pub stability: f64,
}

/// Weights `w[l][k]` with `Σ_k w[l][k] v(t_k) = (d/dt)^l p(0)` for the interpolant `p` of the
/// samples at the nodes `t_k` (in units of `h`).
fn derivative_weights(nodes: &[f64], m: usize) -> Result<Vec<Vec<f64>>> {
    let n = nodes.len();
    // V[k][j] = t_k^j; coefficients c = V^{-1} v, so (d/dt)^l p(0) = l! c_l
    let v = CMatrix::<f64>::from_fn(n, n, |k, j| Complex64::new(nodes[k].powi(j as i32), 0.0));
    let inv = lu_solve(&v, &CMatrix::identity(n, n))?;
    let mut out = vec![vec![0.0; n]; m];
    let mut fact = 1.0;
    for (l, row) in out.iter_mut().enumerate() {
        if l > 0 {
            fact *= l as f64;
        }
        if l < n {
            for (k, w) in row.iter_mut().enumerate() {
                *w = fact * inv[(l, k)].re;
            }
        }
    }
    Ok(out)
}

fn jet_from(samples: &[Complex64], nodes: &[f64], h: f64, m: usize) -> Result<Vec<Complex64>> {
    let w = derivative_weights(nodes, m)?;
    let mi = Complex64::new(0.0, -1.0);
    Ok((0..m)
        .map(|l| {
            let d: Complex64 = w[l].iter().zip(samples).map(|(&wk, &s)| s * wk).sum();
            d * mi.powu(l as u32) / h.powi(l as i32)
        })
        .collect())
}

/// Jet of order `m` at `ρ = 0` from `samples[k] = v(±(offset + k) h)`, extrapolating with degree
/// `p` through the first `p + 1` samples; `samples` must hold at least `p + 2` values for the
/// stability estimate.
pub fn one_sided_trace(samples: &[Complex64], h: f64, side: Side, offset: usize, p: usize, m: usize, tol: f64) -> Result<TraceReport> {
    if samples.len() < p + 2 || p + 1 < m {
        return Err(Error::InvalidArgument(format!("{} samples for degree {p}, order {m}", samples.len())));
    }
    let sign = match side {
        Side::Plus => 1.0,
        Side::Minus => -1.0,
    };
    let nodes: Vec<f64> = (0..p + 2).map(|k| sign * (offset + k) as f64).collect();
    let lo = jet_from(&samples[..p + 1], &nodes[..p + 1], h, m)?;
    let hi = jet_from(&samples[..p + 2], &nodes, h, m)?;
    let scaled = |j: &[Complex64], l: usize| j[l].norm() * h.powi(l as i32);
    let size = (0..m).map(|l| scaled(&hi, l)).fold(0.0, f64::max);
    let diff = (0..m).map(|l| (lo[l] - hi[l]).norm() * h.powi(l as i32)).fold(0.0, f64::max);
    let stability = if size == 0.0 { diff } else { diff / size };
    if stability > tol {
        return Err(Error::TraceUnstable { report: stability, tol });
    }
    Ok(TraceReport { jet: hi, stability })
}
