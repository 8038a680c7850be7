//! Uniform grids in `s = 1/x` (and `z`), second-order stencils and banded solves.
//!
//! In `s` the φ-vector field `x²∂_x` is `-∂_s`, so `(x²D_x)^k = (i∂_s)^k` and the φ-density
//! `dx/x² dz` is `ds dz`. Both ends of the `s` range carry homogeneous Dirichlet rows: `s = S`
//! truncates the cusp, `s = 1` closes the strip away from it.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{BandedLu, BandedMatrix, CMatrix};
use crate::model::{Fibre, GeometryTag, ModelOperator};
use crate::normal::Bump;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiGrid {
    pub geometry: GeometryTag,
    /// Truncation point `S` of the `s` range `[1, S]`.
    pub s_max: f64,
    /// Number of `s` intervals.
    pub n_s: usize,
    /// Fibre length and number of `z` intervals on `[0, L]`.
    pub z: Option<(f64, usize)>,
}

impl PhiGrid {
    pub fn new(geometry: GeometryTag, s_max: f64, n_s: usize, z: Option<(f64, usize)>) -> Result<Self> {
        if s_max < 4.0 {
            return Err(Error::InvalidArgument(format!("truncation S = {s_max} below 4")));
        }
        if n_s < 16 || z.is_some_and(|(_, n)| n < 16) {
            return Err(Error::InvalidArgument("fewer than 16 nodes in a direction".into()));
        }
        if let Some((l, _)) = z {
            if l <= 0.0 {
                return Err(Error::InvalidArgument("fibre length must be positive".into()));
            }
        }
        Ok(Self { geometry, s_max, n_s, z })
    }

    /// Grid matching the operator's fibre.
    pub fn for_operator(op: &ModelOperator<f64>, s_max: f64, n_s: usize, n_z: usize) -> Result<Self> {
        let z = match op.fibre {
            Fibre::Point => None,
            Fibre::Interval { length } => Some((length, n_z)),
        };
        Self::new(op.geometry, s_max, n_s, z)
    }

    pub fn h_s(&self) -> f64 {
        (self.s_max - 1.0) / self.n_s as f64
    }

    pub fn h_z(&self) -> Option<f64> {
        self.z.map(|(l, n)| l / n as f64)
    }

    pub fn s(&self, i: usize) -> f64 {
        1.0 + i as f64 * self.h_s()
    }

    /// Volume weight of one node.
    pub fn cell(&self) -> f64 {
        self.h_s() * self.h_z().unwrap_or(1.0)
    }
}

/// Part of the (doubled) geometry an operator is assembled on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    /// The original space; the interface nodes become boundary data.
    Plus,
    /// The mirrored copy; the interface nodes become boundary data.
    Minus,
    /// Both copies glued along the interface.
    Doubled,
}

/// Sparse operator on the unknown nodes of a region, with the coupling to boundary nodes kept
/// apart so that Dirichlet problems read `A u = -B g`.
#[derive(Debug, Clone)]
pub struct GridOperator {
    pub grid: PhiGrid,
    pub region: Region,
    pub system_size: usize,
    pub dim: usize,
    pub entries: Vec<(usize, usize, Complex64)>,
    pub boundary_dim: usize,
    pub boundary: Vec<(usize, usize, Complex64)>,
    /// φ-volume weight of every unknown.
    pub gram: Vec<f64>,
    /// Unknowns lying in the original space (interface nodes included).
    pub plus: Vec<bool>,
    /// Grid coordinates `(i, j)` of each node; `j = 0` for point fibres, and `i` may be
    /// negative on the mirrored side of a point-fibre geometry.
    pub nodes: Vec<(i64, i64)>,
}

/// Minus-side extension data: mirrored coefficients plus a bump of this height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extension {
    pub bump_height: f64,
}

impl GridOperator {
    pub fn apply(&self, u: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for &(r, c, v) in &self.entries {
            out[r] += v * u[c];
        }
        out
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(|e| e.2.im == 0.0)
    }

    pub fn dense(&self) -> CMatrix<f64> {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    pub fn bandwidths(&self) -> (usize, usize) {
        self.entries.iter().fold((0, 0), |(kl, ku), &(r, c, _)| {
            if r > c {
                (kl.max(r - c), ku)
            } else {
                (kl, ku.max(c - r))
            }
        })
    }

    pub fn factor(&self) -> Result<Factored> {
        let (kl, ku) = self.bandwidths();
        if self.is_real() {
            let mut b = BandedMatrix::<f64>::zeros(self.dim, kl, ku);
            for &(r, c, v) in &self.entries {
                b.add(r, c, v.re);
            }
            Ok(Factored::Real(b.factor()?))
        } else {
            let mut b = BandedMatrix::<Complex64>::zeros(self.dim, kl, ku);
            for &(r, c, v) in &self.entries {
                b.add(r, c, v);
            }
            Ok(Factored::Complex(b.factor()?))
        }
    }

    /// Bloch slice along `s`: the unknowns of grid row `row`, with the coupling to row `row + d`
    /// weighted by `e^{-iτ d h_s}`. For `s`-independent coefficients this is the fibre operator
    /// at `τ` discretized on the same `z` grid.
    pub fn tau_slice(&self, row: i64, tau: f64) -> GridOperator {
        let keep: Vec<usize> = (0..self.nodes.len()).filter(|&k| self.nodes[k].0 == row).collect();
        let mut local = vec![usize::MAX; self.nodes.len()];
        for (new, &old) in keep.iter().enumerate() {
            local[old] = new;
        }
        let n = self.system_size;
        let h = self.grid.h_s();
        let mut entries = Vec::new();
        for &(r, c, v) in &self.entries {
            let (rn, cn) = (r / n, c / n);
            if self.nodes[rn].0 != row {
                continue;
            }
            let d = self.nodes[cn].0 - row;
            // the partner node of an s-neighbour sits on the same z line
            let target = keep.iter().position(|&k| self.nodes[k].1 == self.nodes[cn].1).expect("z line present");
            let w = Complex64::from_polar(1.0, -tau * d as f64 * h);
            entries.push((local[rn] * n + r % n, target * n + c % n, v * w));
        }
        GridOperator {
            grid: self.grid,
            region: self.region,
            system_size: n,
            dim: keep.len() * n,
            entries: merge(entries),
            boundary_dim: 0,
            boundary: Vec::new(),
            gram: keep.iter().flat_map(|&k| std::iter::repeat_n(self.gram[k * n], n)).collect(),
            plus: keep.iter().flat_map(|&k| std::iter::repeat_n(self.plus[k * n], n)).collect(),
            nodes: keep.iter().map(|&k| self.nodes[k]).collect(),
        }
    }

    /// Eigenvalue of smallest modulus of a Hermitian operator by inverse iteration; zero when
    /// the factorization breaks down.
    pub fn smallest_eigenvalue(&self, iterations: usize) -> f64 {
        let Ok(lu) = self.factor() else { return 0.0 };
        let mut v: Vec<Complex64> = (0..self.dim).map(|i| Complex64::new(1.0 + ((i * 7919) % 97) as f64 / 97.0, 0.0)).collect();
        let mut lambda = f64::INFINITY;
        for _ in 0..iterations {
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.iter_mut().for_each(|z| *z /= norm);
            let mut w = v.clone();
            lu.solve_many(&mut w, 1);
            // Rayleigh quotient of A at w: (w, v) / (w, w)
            let wv: Complex64 = w.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            let ww: f64 = w.iter().map(|z| z.norm_sqr()).sum();
            if !ww.is_finite() {
                return 0.0;
            }
            let next = wv.re / ww;
            let done = ((next - lambda) / next).abs() < 1e-12;
            lambda = next;
            v = w;
            if done {
                break;
            }
        }
        lambda
    }

    /// Index of the unknown at node `(i, j)`, component `c`.
    pub fn index_of(&self, i: i64, j: i64) -> Option<usize> {
        node_index(&self.grid, self.region, i, j).and_then(|k| match k {
            Slot::Unknown(k) => Some(k * self.system_size),
            Slot::Boundary(_) => None,
        })
    }
}

/// Banded LU in real arithmetic when the operator is real.
pub enum Factored {
    Real(BandedLu<f64>),
    Complex(BandedLu<Complex64>),
}

impl Factored {
    /// Solves in place for `nrhs` right-hand sides stored row-major.
    pub fn solve_many(&self, b: &mut [Complex64], nrhs: usize) {
        match self {
            Factored::Complex(lu) => lu.solve_many(b, nrhs),
            Factored::Real(lu) => {
                let n = lu.dim();
                if b.iter().all(|z| z.im == 0.0) {
                    let mut re: Vec<f64> = b.iter().map(|z| z.re).collect();
                    lu.solve_many(&mut re, nrhs);
                    for (z, x) in b.iter_mut().zip(re) {
                        *z = Complex64::new(x, 0.0);
                    }
                    return;
                }
                let mut split = vec![0.0; n * 2 * nrhs];
                for i in 0..n {
                    for r in 0..nrhs {
                        split[i * 2 * nrhs + r] = b[i * nrhs + r].re;
                        split[i * 2 * nrhs + nrhs + r] = b[i * nrhs + r].im;
                    }
                }
                lu.solve_many(&mut split, 2 * nrhs);
                for i in 0..n {
                    for r in 0..nrhs {
                        b[i * nrhs + r] = Complex64::new(split[i * 2 * nrhs + r], split[i * 2 * nrhs + nrhs + r]);
                    }
                }
            }
        }
    }
}

pub(super) enum Slot {
    Unknown(usize),
    Boundary(usize),
}

/// Where node `(i, j)` lives for the region, or `None` for homogeneous Dirichlet nodes.
pub(super) fn node_index(grid: &PhiGrid, region: Region, i: i64, j: i64) -> Option<Slot> {
    let n = grid.n_s as i64;
    match grid.z {
        None => {
            let inner = n - 1;
            match region {
                Region::Plus => match i {
                    0 => Some(Slot::Boundary(0)),
                    1.. if i < n => Some(Slot::Unknown((i - 1) as usize)),
                    _ => None,
                },
                Region::Minus => match i {
                    0 => Some(Slot::Boundary(0)),
                    _ if i < 0 && i > -n => Some(Slot::Unknown((-i - 1) as usize)),
                    _ => None,
                },
                Region::Doubled => (i.abs() < n).then(|| Slot::Unknown((i + inner) as usize)),
            }
        }
        Some((_, nz)) => {
            if i < 1 || i >= n {
                return None;
            }
            let nz = nz as i64;
            let row = (i - 1) as usize;
            let jj = j.rem_euclid(2 * nz);
            match region {
                Region::Plus => {
                    if jj == 0 {
                        Some(Slot::Boundary(row))
                    } else if jj == nz {
                        Some(Slot::Boundary(grid.n_s - 1 + row))
                    } else if jj < nz && j >= 0 && j <= nz {
                        Some(Slot::Unknown(row * (nz as usize - 1) + (jj - 1) as usize))
                    } else {
                        None
                    }
                }
                Region::Minus => {
                    if j == 2 * nz {
                        Some(Slot::Boundary(row))
                    } else if j == nz {
                        Some(Slot::Boundary(grid.n_s - 1 + row))
                    } else if j > nz && j < 2 * nz {
                        Some(Slot::Unknown(row * (nz as usize - 1) + (j - nz - 1) as usize))
                    } else {
                        None
                    }
                }
                Region::Doubled => Some(Slot::Unknown(row * 2 * nz as usize + jj as usize)),
            }
        }
    }
}

fn nodes_of(grid: &PhiGrid, region: Region) -> Vec<(i64, i64)> {
    let n = grid.n_s as i64;
    match grid.z {
        None => match region {
            Region::Plus => (1..n).map(|i| (i, 0)).collect(),
            Region::Minus => (1..n).map(|i| (-i, 0)).collect(),
            Region::Doubled => (-(n - 1)..n).map(|i| (i, 0)).collect(),
        },
        Some((_, nz)) => {
            let nz = nz as i64;
            let js: Vec<i64> = match region {
                Region::Plus => (1..nz).collect(),
                Region::Minus => (nz + 1..2 * nz).collect(),
                Region::Doubled => (0..2 * nz).collect(),
            };
            (1..n).flat_map(|i| js.iter().map(move |&j| (i, j))).collect()
        }
    }
}

const D1: [(i64, f64); 2] = [(-1, -0.5), (1, 0.5)];
const D2: [(i64, f64); 3] = [(-1, 1.0), (0, -2.0), (1, 1.0)];

/// `(offset, weight)` of the centered stencil for `∂^k`, unscaled by `h`.
fn stencil_1d(k: usize) -> Vec<(i64, f64)> {
    match k {
        0 => vec![(0, 1.0)],
        1 => D1.to_vec(),
        2 => D2.to_vec(),
        _ => unreachable!("orders above 2 are rejected before assembly"),
    }
}

fn i_pow(k: usize) -> Complex64 {
    Complex64::new(0.0, 1.0).powu(k as u32)
}

/// Terms `(offset_i, offset_j, block)` of the operator at node `(i, j)`.
fn node_stencil(op: &ModelOperator<f64>, grid: &PhiGrid, ext: &Extension, i: i64, j: i64) -> Vec<(i64, i64, CMatrix<f64>)> {
    let n = op.system_size;
    let hs = grid.h_s();
    let mut out = Vec::new();
    match grid.z {
        None => {
            // ρ = s - 1 = i h; the mirrored side has s = 1 + |ρ| and ∂_s = -∂_ρ
            let mirrored = i < 0;
            let x = 1.0 / (1.0 + (i.abs() as f64) * hs);
            for (&(k, _, _), poly) in op.coefficients() {
                let sign = if mirrored && k % 2 == 1 { -1.0 } else { 1.0 };
                let c = poly.eval(x, 0.0) * (i_pow(k) * sign / hs.powi(k as i32));
                for (di, w) in stencil_1d(k) {
                    out.push((di, 0, &c * Complex64::new(w, 0.0)));
                }
            }
            if mirrored && ext.bump_height != 0.0 {
                let l = grid.s_max - 1.0;
                let b = Bump { height: ext.bump_height, length: l }.value(l + (i.abs() as f64) * hs);
                out.push((0, 0, CMatrix::identity(n, n) * Complex64::new(b, 0.0)));
            }
        }
        Some((len, nz)) => {
            let hz = len / nz as f64;
            let nz = nz as i64;
            let jj = j.rem_euclid(2 * nz);
            let mirrored = jj > nz;
            let z = jj as f64 * hz;
            let x = 1.0 / grid.s(i as usize);
            for (&(k, _, beta), poly) in op.coefficients() {
                let (zc, sign) = if mirrored { (2.0 * len - z, if beta % 2 == 1 { -1.0 } else { 1.0 }) } else { (z, 1.0) };
                // (i∂_s)^k (-i∂_z)^β
                let scale = i_pow(k) * i_pow(beta).conj() * sign / (hs.powi(k as i32) * hz.powi(beta as i32));
                let c = poly.eval(x, zc) * scale;
                for (di, ws) in stencil_1d(k) {
                    for (dj, wz) in stencil_1d(beta) {
                        out.push((di, dj, &c * Complex64::new(ws * wz, 0.0)));
                    }
                }
            }
            if mirrored && ext.bump_height != 0.0 {
                let b = Bump { height: ext.bump_height, length: len }.value(z);
                out.push((0, 0, CMatrix::identity(n, n) * Complex64::new(b, 0.0)));
            }
        }
    }
    out
}

fn check_supported(op: &ModelOperator<f64>, grid: &PhiGrid) -> Result<()> {
    if op.order > 2 || op.base_dim != 0 {
        return Err(Error::Unsupported("grid operators need order <= 2 and no base variable".into()));
    }
    let fibre_ok = match (op.fibre, grid.z) {
        (Fibre::Point, None) => true,
        (Fibre::Interval { length }, Some((l, _))) => (length - l).abs() < 1e-12,
        _ => false,
    };
    if !fibre_ok || op.geometry != grid.geometry {
        return Err(Error::GeometryMismatch(format!("{} operator on {} grid", op.geometry.name(), grid.geometry.name())));
    }
    Ok(())
}

/// Assembles `op` on a region of the (doubled) grid; the mirrored side uses `ext`.
pub fn assemble(op: &ModelOperator<f64>, grid: &PhiGrid, region: Region, ext: &Extension) -> Result<GridOperator> {
    check_supported(op, grid)?;
    let n = op.system_size;
    let nodes = nodes_of(grid, region);
    let boundary_nodes = match (grid.z, region) {
        (_, Region::Doubled) => 0,
        (None, _) => 1,
        (Some(_), _) => 2 * (grid.n_s - 1),
    };
    let mut entries = Vec::new();
    let mut boundary = Vec::new();
    for (row_node, &(i, j)) in nodes.iter().enumerate() {
        for (di, dj, block) in node_stencil(op, grid, ext, i, j) {
            let target = node_index(grid, region, i + di, j + dj);
            for a in 0..n {
                for b in 0..n {
                    let v = block[(a, b)];
                    if v == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    match target {
                        Some(Slot::Unknown(k)) => entries.push((row_node * n + a, k * n + b, v)),
                        Some(Slot::Boundary(k)) => boundary.push((row_node * n + a, k * n + b, v)),
                        None => {}
                    }
                }
            }
        }
    }
    let entries = merge(entries);
    let boundary = merge(boundary);
    let zn = grid.z.map(|(_, nz)| nz as i64);
    let plus = nodes
        .iter()
        .flat_map(|&(i, j)| {
            let p = match zn {
                None => i >= 0,
                Some(nz) => j.rem_euclid(2 * nz) <= nz,
            };
            std::iter::repeat_n(p, n)
        })
        .collect();
    Ok(GridOperator {
        grid: *grid,
        region,
        system_size: n,
        dim: nodes.len() * n,
        entries,
        boundary_dim: boundary_nodes * n,
        boundary,
        gram: vec![grid.cell(); nodes.len() * n],
        plus,
        nodes,
    })
}

fn merge(mut e: Vec<(usize, usize, Complex64)>) -> Vec<(usize, usize, Complex64)> {
    e.sort_by_key(|&(r, c, _)| (r, c));
    let mut out: Vec<(usize, usize, Complex64)> = Vec::with_capacity(e.len());
    for (r, c, v) in e {
        match out.last_mut() {
            Some(last) if last.0 == r && last.1 == c => last.2 += v,
            _ => out.push((r, c, v)),
        }
    }
    out.retain(|e| e.2 != Complex64::new(0.0, 0.0));
    out
}

/// `op` on the original space, with the interface as boundary data.
pub fn discretize(op: &ModelOperator<f64>, grid: &PhiGrid) -> Result<GridOperator> {
    assemble(op, grid, Region::Plus, &Extension { bump_height: 0.0 })
}

/// `op` on the doubled space: mirrored coefficients plus the bump on the minus side.
pub fn double_geometry(op: &ModelOperator<f64>, grid: &PhiGrid, ext: &Extension) -> Result<GridOperator> {
    assemble(op, grid, Region::Doubled, ext)
}
