//! Discrete Calderón projectors: from the two one-sided solution spaces, and (in 1-D) from the
//! jump formula `Ĉ = γ₊ (P̂ + Π)⁻¹ γ* 𝒥`.

use num_complex::Complex64;

use super::grid::{assemble, node_index, Extension, GridOperator, PhiGrid, Region, Slot};
use super::jump::{jump_operator, JumpOperator};
use super::trace::{one_sided_trace, Side};
use crate::error::{Error, Result};
use crate::linalg::{direct_sum_check, projector_from_pair, CMatrix, Projector, SubspaceBasis};
use crate::model::ModelOperator;

/// Right-hand sides solved together against one factorization.
const CHUNK: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteOptions {
    pub extension: Extension,
    /// Extrapolation degree of the one-sided traces; `m + 1` when unset.
    pub trace_degree: Option<usize>,
    pub trace_tol: f64,
    /// Relative rank tolerance of the data spaces.
    pub rank_tol: f64,
}

impl Default for DiscreteOptions {
    fn default() -> Self {
        Self { extension: Extension { bump_height: 1.0 }, trace_degree: None, trace_tol: 1e-2, rank_tol: 1e-10 }
    }
}

#[derive(Debug, Clone)]
pub struct DiscreteCalderon {
    pub projector: Projector<f64>,
    /// Smallest singular value of the stacked orthonormal bases of `B⁺` and `B⁻`.
    pub gap: Option<f64>,
    /// Worst trace stability report over all extracted jets.
    pub trace_stability: f64,
    pub order: usize,
    pub system_size: usize,
    /// Number of boundary lines per fibre end (1 for point fibres).
    pub lines: usize,
}

impl DiscreteCalderon {
    /// Index of component `c` of `D^l u` at boundary line `row` of fibre end `end`.
    pub fn data_index(&self, end: usize, l: usize, row: usize, c: usize) -> usize {
        ((end * self.order + l) * self.lines + row) * self.system_size + c
    }
}

/// A place where a jet is read: `(end, row)` of the data vector and the nodes walked into the
/// region from the interface.
struct Port {
    end: usize,
    row: usize,
    start: (i64, i64),
    step: (i64, i64),
    side: Side,
}

fn ports(grid: &PhiGrid, region: Region) -> Vec<Port> {
    match grid.z {
        None => {
            let (step, side) = match region {
                Region::Minus => ((-1, 0), Side::Minus),
                _ => ((1, 0), Side::Plus),
            };
            vec![Port { end: 0, row: 0, start: (0, 0), step, side }]
        }
        Some((_, nz)) => {
            let nz = nz as i64;
            let mut out = Vec::new();
            for row in 0..grid.n_s - 1 {
                let i = row as i64 + 1;
                let (at0, atl) = match region {
                    Region::Minus => (
                        Port { end: 0, row, start: (i, 2 * nz), step: (0, -1), side: Side::Minus },
                        Port { end: 1, row, start: (i, nz), step: (0, 1), side: Side::Plus },
                    ),
                    _ => (
                        Port { end: 0, row, start: (i, 0), step: (0, 1), side: Side::Plus },
                        Port { end: 1, row, start: (i, nz), step: (0, -1), side: Side::Minus },
                    ),
                };
                out.push(at0);
                out.push(atl);
            }
            out
        }
    }
}

fn check_order(op: &ModelOperator<f64>) -> Result<usize> {
    match op.order {
        1 | 2 => Ok(op.order),
        m => Err(Error::Unsupported(format!("discrete projectors need order 1 or 2, got {m}"))),
    }
}

/// Jets at every port of the solutions with unit boundary data, one column per boundary
/// unknown; returns the columns and the worst trace stability.
fn side_space(op: &ModelOperator<f64>, grid: &PhiGrid, region: Region, opts: &DiscreteOptions) -> Result<(CMatrix<f64>, f64)> {
    let m = check_order(op)?;
    let n = op.system_size;
    let g = assemble(op, grid, region, &opts.extension)?;
    let lu = g.factor()?;
    let p = opts.trace_degree.unwrap_or(m + 1);
    let h = grid.h_z().unwrap_or(grid.h_s());
    let ports = ports(grid, region);
    let lines = grid.z.map_or(1, |_| grid.n_s - 1);
    let data_dim = 2.min(ports.len()) * m * lines * n;
    let nb = g.boundary_dim;
    // unit data on a single boundary line varies on the grid scale along it, so in 2-D the
    // stability of individual columns is recorded rather than enforced
    let tol = if grid.z.is_some() { f64::INFINITY } else { opts.trace_tol };
    let mut out = CMatrix::zeros(data_dim, nb);
    let mut worst: f64 = 0.0;
    let mut b0 = 0;
    while b0 < nb {
        let nrhs = CHUNK.min(nb - b0);
        let mut rhs = vec![Complex64::new(0.0, 0.0); g.dim * nrhs];
        for &(r, c, v) in &g.boundary {
            if (b0..b0 + nrhs).contains(&c) {
                rhs[r * nrhs + c - b0] -= v;
            }
        }
        lu.solve_many(&mut rhs, nrhs);
        for r in 0..nrhs {
            let b = b0 + r;
            let sample = |node: (i64, i64), comp: usize| match node_index(grid, region, node.0, node.1) {
                Some(Slot::Unknown(k)) => rhs[(k * n + comp) * nrhs + r],
                Some(Slot::Boundary(k)) if k * n + comp == b => Complex64::new(1.0, 0.0),
                _ => Complex64::new(0.0, 0.0),
            };
            for port in &ports {
                for comp in 0..n {
                    let samples: Vec<Complex64> = (0..p as i64 + 2)
                        .map(|k| sample((port.start.0 + k * port.step.0, port.start.1 + k * port.step.1), comp))
                        .collect();
                    let rep = one_sided_trace(&samples, h, port.side, 0, p, m, tol)?;
                    worst = worst.max(rep.stability);
                    for (l, v) in rep.jet.iter().enumerate() {
                        out[(((port.end * m + l) * lines + port.row) * n + comp, b)] = *v;
                    }
                }
            }
        }
        b0 += nrhs;
    }
    Ok((out, worst))
}

/// `B⁺` from the original side, `B⁻` from the mirrored side with the extension, and the
/// projection onto the first along the second.
pub fn calderon_path_spaces(op: &ModelOperator<f64>, grid: &PhiGrid, opts: &DiscreteOptions) -> Result<DiscreteCalderon> {
    let m = check_order(op)?;
    let (plus, s1) = side_space(op, grid, Region::Plus, opts)?;
    let (minus, s2) = side_space(op, grid, Region::Minus, opts)?;
    let plus = SubspaceBasis::from_span(&plus, opts.rank_tol)?;
    let minus = SubspaceBasis::from_span(&minus, opts.rank_tol)?;
    let report = direct_sum_check(&plus, &minus, opts.rank_tol)?;
    let projector = projector_from_pair(&plus, &minus)?;
    Ok(DiscreteCalderon {
        projector,
        gap: Some(report.gap),
        trace_stability: s1.max(s2),
        order: m,
        system_size: op.system_size,
        lines: grid.z.map_or(1, |_| grid.n_s - 1),
    })
}

/// Taylor coefficients in `ρ = s - 1` of the coefficients `A_k(ρ) = (-1)^k a_k(1/(1+ρ))` of
/// `P = Σ A_k D_ρ^k` at the collar of a point-fibre operator, up to `ρ^order`.
pub fn collar_jets(op: &ModelOperator<f64>) -> Result<Vec<Vec<CMatrix<f64>>>> {
    if op.fibre_dim() != 0 || op.base_dim != 0 {
        return Err(Error::Unsupported("collar jets need a point fibre and no base variable".into()));
    }
    let (m, n) = (op.order, op.system_size);
    let mut jets = vec![vec![CMatrix::<f64>::zeros(n, n); m + 1]; m + 1];
    for (&(k, _, _), poly) in op.coefficients() {
        let sign = if k % 2 == 1 { -1.0 } else { 1.0 };
        for (&(d, zd), c) in poly.terms() {
            if zd != 0 {
                continue;
            }
            // (1+ρ)^{-d} = Σ_r (-1)^r C(d+r-1, r) ρ^r
            let mut coef = 1.0;
            for r in 0..=m {
                if r > 0 {
                    coef *= -((d + r - 1) as f64) / r as f64;
                }
                if d == 0 && r > 0 {
                    break;
                }
                jets[k][r] += c * Complex64::new(sign * coef, 0.0);
            }
        }
    }
    Ok(jets)
}

/// Jump operator of the doubled 1-D operator at the interface.
pub fn collar_jump(op: &ModelOperator<f64>) -> Result<JumpOperator> {
    jump_operator(&collar_jets(op)?)
}

/// `Ĉ U = γ₊ (P̂ + Π)⁻¹ γ* 𝒥 U` column by column on a 1-D grid. `γ*` places `U_0 δ` as a
/// Kronecker delta of weight `1/h` and `U_1 D_ρδ` as the centered difference
/// `±i U_1/(2h²)` at `ρ = ±h`, so that the grid pairing reproduces `U_0 φ(0) + U_1 (D_ρφ)(0)`
/// to second order. The trace skips the interface node, where the solution jumps.
pub fn calderon_path_jump(op: &ModelOperator<f64>, grid: &PhiGrid, opts: &DiscreteOptions) -> Result<DiscreteCalderon> {
    let m = check_order(op)?;
    if grid.z.is_some() {
        return Err(Error::Unsupported("the jump formula is discretized in 1-D only".into()));
    }
    let n = op.system_size;
    let j = collar_jump(op)?.matrix();
    let dbl: GridOperator = assemble(op, grid, Region::Doubled, &opts.extension)?;
    let lu = dbl.factor()?;
    let h = grid.h_s();
    let p = opts.trace_degree.unwrap_or(m + 1);
    let dim = m * n;
    let at = |i: i64| dbl.index_of(i, 0).expect("interface neighbours are unknowns");
    let mut rhs = vec![Complex64::new(0.0, 0.0); dbl.dim * dim];
    for col in 0..dim {
        let ju = j.column(col);
        for c in 0..n {
            rhs[(at(0) + c) * dim + col] += ju[c] / h;
            if m == 2 {
                let w = Complex64::new(0.0, 1.0) * ju[n + c] / (2.0 * h * h);
                rhs[(at(1) + c) * dim + col] += w;
                rhs[(at(-1) + c) * dim + col] -= w;
            }
        }
    }
    lu.solve_many(&mut rhs, dim);
    let mut c_mat = CMatrix::zeros(dim, dim);
    let mut worst: f64 = 0.0;
    for col in 0..dim {
        for c in 0..n {
            let samples: Vec<Complex64> = (1..p as i64 + 3).map(|i| rhs[(at(i) + c) * dim + col]).collect();
            let rep = one_sided_trace(&samples, h, Side::Plus, 1, p, m, opts.trace_tol)?;
            worst = worst.max(rep.stability);
            for (l, v) in rep.jet.iter().enumerate() {
                c_mat[(l * n + c, col)] = *v;
            }
        }
    }
    let idem = crate::linalg::idempotence_defect(&c_mat);
    // the discrete Ĉ is a projector only up to discretization error
    let projector = Projector::certify(c_mat, idem.max(f64::MIN_POSITIVE))?;
    Ok(DiscreteCalderon { projector, gap: None, trace_stability: worst, order: m, system_size: n, lines: 1 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Fibre, GeometryTag, XzPoly};

    pub(crate) fn toy(c: f64) -> ModelOperator<f64> {
        ModelOperator::halfline_toy(c)
    }

    #[test]
    fn jets_of_toy() {
        let jets = collar_jets(&toy(1.0)).unwrap();
        // 1 + x² = 2 - 2ρ + 3ρ² + …
        let a0: Vec<f64> = jets[0].iter().map(|c| c[(0, 0)].re).collect();
        assert_eq!(a0, vec![2.0, -2.0, 3.0]);
        assert_eq!(jets[2][0][(0, 0)].re, 1.0);
    }

    #[test]
    fn path_agreement_1d() {
        let op = toy(1.0);
        let opts = DiscreteOptions::default();
        let gaps: Vec<f64> = [256, 512, 1024]
            .iter()
            .map(|&n| {
                let grid = PhiGrid::new(GeometryTag::HalfLineToy, 5.0, n, None).unwrap();
                let a = calderon_path_spaces(&op, &grid, &opts).unwrap();
                let b = calderon_path_jump(&op, &grid, &opts).unwrap();
                (a.projector.matrix() - b.projector.matrix()).norm()
            })
            .collect();
        let slope = (gaps[0] / gaps[2]).log2() / 2.0;
        assert!(gaps[2] <= 1e-5 && slope >= 1.7, "{gaps:?}");
    }

    #[test]
    fn jump_projector_is_idempotent_on_fine_grid() {
        let grid = PhiGrid::new(GeometryTag::HalfLineToy, 5.0, 4096, None).unwrap();
        let c = calderon_path_jump(&toy(1.0), &grid, &DiscreteOptions::default()).unwrap();
        assert!(c.projector.idem_defect() <= 1e-6);
        let col = c.projector.matrix().column(0).into_owned();
        let again = c.projector.matrix() * &col;
        assert!((again - col).norm() <= 1e-6);
    }

    #[test]
    fn decaying_solution_is_reproduced() {
        // plus-side discrete solution with u(0) = 1, read off with the same trace
        let op = toy(2.0);
        let grid = PhiGrid::new(GeometryTag::HalfLineToy, 6.0, 512, None).unwrap();
        let opts = DiscreteOptions::default();
        let (jets, _) = side_space(&op, &grid, Region::Plus, &opts).unwrap();
        let spaces = calderon_path_spaces(&op, &grid, &opts).unwrap();
        let jump = calderon_path_jump(&op, &grid, &opts).unwrap();
        let col = jets.column(0).into_owned();
        assert!((spaces.projector.matrix() * &col - &col).norm() <= 1e-10 * col.norm());
        assert!((jump.projector.matrix() * &col - &col).norm() <= 1e-3 * col.norm());
        let zero = CMatrix::<f64>::zeros(2, 1);
        assert_eq!(jump.projector.matrix() * &zero, zero);
    }

    #[test]
    fn decoupled_system_gives_block_projector() {
        let mut op = ModelOperator::new(2, 2, 0, Fibre::Point, GeometryTag::HalfLineToy);
        op.add_coefficient((2, 0, 0), XzPoly::constant(2, Complex64::new(1.0, 0.0))).unwrap();
        let mut q = XzPoly::zero(2);
        q.add(0, 0, CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![Complex64::new(1.0, 0.0), Complex64::new(4.0, 0.0)])));
        op.add_coefficient((0, 0, 0), q).unwrap();
        let grid = PhiGrid::new(GeometryTag::HalfLineToy, 6.0, 256, None).unwrap();
        let c = calderon_path_spaces(&op, &grid, &DiscreteOptions::default()).unwrap();
        let mtx = c.projector.matrix();
        for (a, b) in [(0, 1), (0, 3), (2, 1), (2, 3)] {
            assert!(mtx[(a, b)].norm() < 1e-12 && mtx[(b, a)].norm() < 1e-12);
        }
        for comp in 0..2 {
            let idx = [c.data_index(0, 0, 0, comp), c.data_index(0, 1, 0, comp)];
            let block = CMatrix::from_fn(2, 2, |r, s| mtx[(idx[r], idx[s])]);
            assert!(crate::linalg::idempotence_defect(&block) < 1e-10);
        }
    }

    #[test]
    fn strip_projector_has_half_rank() {
        let op = ModelOperator::<f64>::strip_laplacian(1.0);
        let grid = PhiGrid::new(GeometryTag::StripHyperbolic, 4.0, 16, Some((1.0, 16))).unwrap();
        let c = calderon_path_spaces(&op, &grid, &DiscreteOptions::default()).unwrap();
        assert_eq!(c.projector.dim(), 4 * 15);
        assert_eq!(c.projector.rank(1e-8), 2 * 15);
        assert!(c.projector.idem_defect() < 1e-8);
        assert!(c.gap.unwrap() > 1e-3);
    }

    #[test]
    fn jump_path_rejects_strip() {
        let op = ModelOperator::<f64>::strip_laplacian(1.0);
        let grid = PhiGrid::new(GeometryTag::StripHyperbolic, 4.0, 16, Some((1.0, 16))).unwrap();
        assert!(matches!(calderon_path_jump(&op, &grid, &DiscreteOptions::default()), Err(Error::Unsupported(_))));
    }
}
