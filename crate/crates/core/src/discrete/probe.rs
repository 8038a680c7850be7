//! Oscillatory testing of discrete projectors against the normal family and the symbol.
//!
//! Data `e^{-iτs} ψ(s) p` is what `x²D_x = i∂_s` maps to `τ` times itself up to derivatives of
//! the envelope, so on the plateau of `ψ` the discrete projector should act like `N(C)(τ)`.

use num_complex::Complex64;

use super::calderon::DiscreteCalderon;
use super::grid::PhiGrid;
use crate::error::{Error, Result};
use crate::linalg::CMatrix;
use crate::model::ModelOperator;
use crate::normal::{normal_calderon, FibreExtension};
use crate::symbol::{calderon_symbol, TangentialCovector};

/// Bump height for probe runs. The probe error is dominated by the response to the envelope
/// ramps, which decays like `e^{-δ d}` with `δ²` the bottom of the doubled fibre spectrum; a tall
/// bump pushes `δ` towards the Dirichlet value `π/L`.
pub const PROBE_BUMP: f64 = 1000.0;

/// Smooth step from 0 at `t <= 0` to 1 at `t >= 1`.
fn smooth_step(t: f64) -> f64 {
    let f = |t: f64| if t > 0.0 { (-1.0 / t).exp() } else { 0.0 };
    let (a, b) = (f(t), f(1.0 - t));
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// `ψ = 1` on `[start + ramp, end - ramp]`, smooth ramps, zero outside `[start, end]`; errors
/// are measured on the plateau shrunk by `margin` at both ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    pub start: f64,
    pub end: f64,
    pub ramp: f64,
    pub margin: f64,
}

impl Envelope {
    pub fn value(&self, s: f64) -> f64 {
        smooth_step((s - self.start) / self.ramp) * smooth_step((self.end - s) / self.ramp)
    }

    pub fn window(&self) -> (f64, f64) {
        (self.start + self.ramp + self.margin, self.end - self.ramp - self.margin)
    }

    /// A plateau over most of `[1, S]` whose window sits far from both ramps.
    pub fn centered(s_max: f64) -> Self {
        let len = s_max - 1.0;
        Self { start: 1.0 + len / 22.0, end: s_max - len / 22.0, ramp: len * 1.5 / 11.0, margin: len * 3.0 / 11.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeReport {
    /// Largest relative sup-norm error over the unit data patterns.
    pub error: f64,
    pub tau: f64,
    pub h_s: f64,
    pub h_z: f64,
    pub window: (f64, f64),
}

/// Applies `C` to data `e^{-iτs} ψ(s) e_k` for every unit jet pattern `e_k` of the fibre data and
/// compares with `N(C)(τ) e_k` on the envelope window.
pub fn normal_probe(
    c: &DiscreteCalderon,
    op: &ModelOperator<f64>,
    grid: &PhiGrid,
    tau: f64,
    envelope: &Envelope,
    ext: &FibreExtension,
) -> Result<ProbeReport> {
    let h_z = grid.h_z().ok_or_else(|| Error::GeometryMismatch("normal probe needs an interval fibre".into()))?;
    let nc = normal_calderon(op, (tau, 0.0), ext)?;
    let normal = nc.matrix();
    let width = normal.nrows();
    let rows = c.lines;
    let (lo, hi) = envelope.window();
    let phase = |row: usize| {
        let s = grid.s(row + 1);
        Complex64::from_polar(envelope.value(s), -tau * s)
    };
    let mut worst: f64 = 0.0;
    for k in 0..width {
        let mut g = CMatrix::zeros(c.projector.dim(), 1);
        for row in 0..rows {
            let (end, l, comp) = split_pattern(c, k);
            g[(c.data_index(end, l, row, comp), 0)] = phase(row);
        }
        let v = c.projector.matrix() * g;
        let (mut diff, mut size) = (0.0f64, 0.0f64);
        for row in 0..rows {
            let s = grid.s(row + 1);
            if s < lo || s > hi {
                continue;
            }
            for j in 0..width {
                let (end, l, comp) = split_pattern(c, j);
                let expected = phase(row) * normal[(j, k)];
                diff = diff.max((v[(c.data_index(end, l, row, comp), 0)] - expected).norm());
                size = size.max(expected.norm());
            }
        }
        if size > 0.0 {
            worst = worst.max(diff / size);
        }
    }
    Ok(ProbeReport { error: worst, tau, h_s: grid.h_s(), h_z, window: (lo, hi) })
}

/// `(end, l, component)` of the `k`-th entry of a fibre data vector.
fn split_pattern(c: &DiscreteCalderon, k: usize) -> (usize, usize, usize) {
    let (m, n) = (c.order, c.system_size);
    (k / (m * n), (k / n) % m, k % n)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolProbeReport {
    pub error: f64,
    pub xi: f64,
    pub h_s: f64,
    /// Width of the Gaussian envelope.
    pub width: f64,
}

/// Applies `C` to high-frequency data `e^{iξs} exp(-((s - s_c)/w)²) e_k` on the `z = 0` line and
/// compares the `z = 0` output with the symbol projector at `(x, z) = (1/s_c, 0)`. Derivative
/// components are scaled by `1/|ξ|` so both parts of the jet weigh alike; the comparison runs
/// over `|s - s_c| <= w`.
pub fn symbol_probe(c: &DiscreteCalderon, op: &ModelOperator<f64>, grid: &PhiGrid, xi: f64, center: f64, width: f64) -> Result<SymbolProbeReport> {
    if grid.z.is_none() {
        return Err(Error::GeometryMismatch("symbol probe needs an interval fibre".into()));
    }
    let sym = op.boundary_principal_symbol(1.0 / center, 0.0)?;
    // x²D_x = i∂_s sends e^{iξs} to -ξ
    let sp = calderon_symbol(&sym, &TangentialCovector::new(vec![], vec![-xi]))?;
    let sm = sp.matrix();
    let (m, n) = (c.order, c.system_size);
    let scale = |l: usize| xi.abs().powi(-(l as i32));
    let data = |row: usize| {
        let s = grid.s(row + 1);
        Complex64::from_polar((-((s - center) / width).powi(2)).exp(), xi * s)
    };
    let mut worst: f64 = 0.0;
    for k in 0..m * n {
        let (lk, ck) = (k / n, k % n);
        let mut g = CMatrix::zeros(c.projector.dim(), 1);
        for row in 0..c.lines {
            g[(c.data_index(0, lk, row, ck), 0)] = data(row) / scale(lk);
        }
        let v = c.projector.matrix() * g;
        let (mut diff, mut size) = (0.0f64, 0.0f64);
        for row in 0..c.lines {
            if (grid.s(row + 1) - center).abs() > width {
                continue;
            }
            for j in 0..m * n {
                let (l, comp) = (j / n, j % n);
                let expected = data(row) * sm[(j, k)] * scale(l) / scale(lk);
                diff = diff.max((v[(c.data_index(0, l, row, comp), 0)] * scale(l) - expected).norm());
                size = size.max(expected.norm());
            }
        }
        if size > 0.0 {
            worst = worst.max(diff / size);
        }
    }
    Ok(SymbolProbeReport { error: worst, xi, h_s: grid.h_s(), width })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discrete::{calderon_path_spaces, DiscreteOptions, Extension};
    use crate::model::GeometryTag;

    #[test]
    fn envelope_shape() {
        let e = Envelope::centered(12.0);
        assert_eq!(e.value(1.0), 0.0);
        assert!((e.value(6.5) - 1.0).abs() < 1e-15);
        let (lo, hi) = e.window();
        assert!(lo < 6.5 && hi > 6.5);
    }

    fn strip(n: usize, bump: f64) -> (ModelOperator<f64>, PhiGrid, DiscreteCalderon) {
        let op = ModelOperator::<f64>::strip_laplacian(1.0);
        let grid = PhiGrid::new(GeometryTag::StripHyperbolic, 12.0, n, Some((1.0, n))).unwrap();
        let opts = DiscreteOptions { extension: Extension { bump_height: bump }, ..Default::default() };
        let c = calderon_path_spaces(&op, &grid, &opts).unwrap();
        (op, grid, c)
    }

    #[test]
    fn normal_probe_decreases() {
        let env = Envelope::centered(12.0);
        let ext = FibreExtension::circle(PROBE_BUMP);
        let errs: Vec<f64> = [32, 64]
            .iter()
            .map(|&n| {
                let (op, grid, c) = strip(n, PROBE_BUMP);
                normal_probe(&c, &op, &grid, 1.0, &env, &ext).unwrap().error
            })
            .collect();
        assert!(errs[1] < errs[0] && errs[1] < 5e-2, "{errs:?}");
        let (op, grid, c) = strip(32, PROBE_BUMP);
        let at_zero = normal_probe(&c, &op, &grid, 0.0, &env, &ext).unwrap();
        assert!(at_zero.error.is_finite());
    }

    #[test]
    fn symbol_probe_trend_and_zero_data() {
        let errs: Vec<f64> = [32, 64]
            .iter()
            .map(|&n| {
                let (op, grid, c) = strip(n, 1.0);
                symbol_probe(&c, &op, &grid, 8.0, 6.5, 1.5).unwrap().error
            })
            .collect();
        assert!(errs[1] < errs[0], "{errs:?}");
        let (_, _, c) = strip(16, 1.0);
        let zero = CMatrix::zeros(c.projector.dim(), 1);
        assert_eq!(c.projector.matrix() * &zero, zero);
    }
}
