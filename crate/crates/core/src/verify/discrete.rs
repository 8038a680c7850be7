//! Finite-difference checks: path agreement, the jump operator, probes and one-sided traces.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{row, run_check, sci, Criterion, Ctx, Measured, Suite, SuiteOutcome, Table, COLUMNS};
use crate::discrete::{
    calderon_path_jump, calderon_path_spaces, jump_operator, normal_probe, one_sided_trace, symbol_probe,
    DiscreteCalderon, DiscreteOptions, Envelope, Extension, PhiGrid, Side, PROBE_BUMP,
};
use crate::error::Error;
use crate::linalg::CMatrix;
use crate::model::{GeometryTag, ModelOperator};
use crate::normal::FibreExtension;
use crate::oracle::{green_defect_lhs, jet_at_zero, CPoly};

pub(super) fn run(ctx: &Ctx) -> SuiteOutcome {
    let mut table = Table::new("discrete", &COLUMNS);
    let criteria = vec![
        path_agreement(ctx, &mut table),
        green_identity(ctx, &mut table),
        normal_probe_trend(ctx, &mut table),
        trace_stability(ctx, &mut table),
    ];
    SuiteOutcome { suite: Suite::Discrete, criteria, table }
}

const TOY_S: f64 = 5.0;
const TOY_GRIDS: [usize; 3] = [256, 512, 1024];
const TOY_IDEMPOTENCE_GRID: usize = 4096;

fn path_agreement(ctx: &Ctx, table: &mut Table) -> Criterion {
    let tol = ctx.tol(1e-5);
    let idem_tol = ctx.tol(1e-6);
    run_check("path-agreement", Suite::Discrete, tol, || {
        let op = ModelOperator::<f64>::halfline_toy(1.0);
        let opts = DiscreteOptions::default();
        let mut gaps = Vec::new();
        let mut idem: f64 = 0.0;
        for n in TOY_GRIDS {
            let grid = PhiGrid::new(GeometryTag::HalfLineToy, TOY_S, n, None)?;
            let a = calderon_path_spaces(&op, &grid, &opts)?;
            let b = calderon_path_jump(&op, &grid, &opts)?;
            let gap = (a.projector.matrix() - b.projector.matrix()).norm();
            let case = format!("n_s={n}");
            row(table, "path-agreement", case.clone(), "h_s", grid.h_s());
            row(table, "path-agreement", case.clone(), "gap", gap);
            row(table, "path-agreement", case.clone(), "idempotence_spaces", a.projector.idem_defect());
            row(table, "path-agreement", case, "idempotence_jump", b.projector.idem_defect());
            idem = idem.max(a.projector.idem_defect());
            gaps.push(gap);
        }
        let grid = PhiGrid::new(GeometryTag::HalfLineToy, TOY_S, TOY_IDEMPOTENCE_GRID, None)?;
        let fine = calderon_path_jump(&op, &grid, &opts)?;
        row(table, "path-agreement", format!("n_s={TOY_IDEMPOTENCE_GRID}"), "idempotence_jump", fine.projector.idem_defect());
        idem = idem.max(fine.projector.idem_defect());
        let slope = (gaps[0] / gaps[2]).log2() / 2.0;
        row(table, "path-agreement", "fit", "slope", slope);
        let finest = gaps[2];
        Ok(Measured {
            value: finest,
            passed: finest <= tol && slope >= 1.7 && idem <= idem_tol,
            detail: format!("slope {slope:.3} (>= 1.7); idempotence {} (tol {})", sci(idem), sci(idem_tol)),
        })
    })
}

fn random_cpoly(rng: &mut ChaCha8Rng, deg: usize, size: f64) -> CPoly {
    CPoly((0..=deg).map(|_| Complex64::new(rng.random_range(-size..size), rng.random_range(-size..size))).collect())
}

/// `⟨u, P*φ⟩ - ⟨Pu, φ⟩ = (γφ)^H J γu` for `φ` vanishing to order `m` at `ρ = 1`.
fn green_identity(ctx: &Ctx, table: &mut Table) -> Criterion {
    let tol = ctx.tol(1e-6);
    run_check("green-identity", Suite::Discrete, tol, || {
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed(6));
        let mut worst: f64 = 0.0;
        for i in 0..20usize {
            let m = 1 + i % 3;
            let mut coeffs: Vec<CPoly> = (0..m).map(|_| random_cpoly(&mut rng, 2, 1.0)).collect();
            let mut lead = random_cpoly(&mut rng, 2, 0.3);
            lead.0[0] = Complex64::new(1.0, 0.0);
            coeffs.push(lead);
            let u = random_cpoly(&mut rng, 4, 1.0);
            let vanish = (0..m).fold(CPoly(vec![Complex64::new(1.0, 0.0)]), |acc, _| {
                acc.mul(&CPoly(vec![Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0)]))
            });
            let phi = vanish.mul(&random_cpoly(&mut rng, 3, 1.0));
            let jets: Vec<Vec<CMatrix<f64>>> =
                coeffs.iter().map(|a| a.0.iter().map(|&c| CMatrix::from_element(1, 1, c)).collect()).collect();
            let j = jump_operator(&jets)?.matrix();
            let gu = CMatrix::from_column_slice(m, 1, &jet_at_zero(&u, m));
            let gp = CMatrix::from_column_slice(m, 1, &jet_at_zero(&phi, m));
            let rhs = (gp.adjoint() * &j * gu)[(0, 0)];
            let lhs = green_defect_lhs(&coeffs, &u, &phi);
            let err = (lhs - rhs).norm();
            row(table, "green-identity", format!("m={m},i={i}"), "pairing_defect", err);
            worst = worst.max(err);
        }
        Ok(Measured { value: worst, passed: worst <= tol, detail: "20 pairs, orders 1 to 3, variable leading coefficient".into() })
    })
}

const STRIP_S: f64 = 12.0;
const PROBE_GRIDS: [usize; 3] = [64, 128, 256];

fn strip_calderon(op: &ModelOperator<f64>, s_max: f64, n_s: usize, n_z: usize) -> crate::Result<(PhiGrid, DiscreteCalderon)> {
    let grid = PhiGrid::new(GeometryTag::StripHyperbolic, s_max, n_s, Some((1.0, n_z)))?;
    let opts = DiscreteOptions { extension: Extension { bump_height: PROBE_BUMP }, ..Default::default() };
    let c = calderon_path_spaces(op, &grid, &opts)?;
    Ok((grid, c))
}

fn normal_probe_trend(ctx: &Ctx, table: &mut Table) -> Criterion {
    let tol = ctx.tol(5e-2);
    run_check("normal-probe", Suite::Discrete, tol, || {
        let op = ModelOperator::<f64>::strip_laplacian(1.0);
        let env = Envelope::centered(STRIP_S);
        let ext = FibreExtension::circle(PROBE_BUMP);
        let mut errs = Vec::new();
        for n in PROBE_GRIDS {
            let (grid, c) = strip_calderon(&op, STRIP_S, n, n)?;
            let case = format!("n={n}");
            row(table, "normal-probe", case.clone(), "idempotence", c.projector.idem_defect());
            row(table, "normal-probe", case.clone(), "trace_stability", c.trace_stability);
            let e = normal_probe(&c, &op, &grid, 1.0, &env, &ext)?.error;
            row(table, "normal-probe", format!("n={n},tau=1"), "probe_error", e);
            errs.push(e);
            for tau in std::iter::once(0.0).chain(ctx.params.taus()) {
                let r = normal_probe(&c, &op, &grid, tau, &env, &ext)?;
                row(table, "normal-probe", format!("n={n},tau={tau}"), "probe_error", r.error);
            }
            let sp = symbol_probe(&c, &op, &grid, ctx.params.xi, 0.5 * (1.0 + STRIP_S), 1.5)?;
            row(table, "symbol-probe", format!("n={n},xi={}", ctx.params.xi), "probe_error", sp.error);
        }
        // same step, fibre grid and envelope with the s-interval doubled
        let coarse = PROBE_GRIDS[0];
        let long_s = 2.0 * STRIP_S - 1.0;
        let (grid, c) = strip_calderon(&op, long_s, 2 * coarse, coarse)?;
        let long = normal_probe(&c, &op, &grid, 1.0, &env, &ext)?.error;
        row(table, "normal-probe", format!("n={coarse},S={long_s}"), "probe_error", long);
        row(table, "normal-probe", format!("n={coarse}"), "truncation_sensitivity", (long - errs[0]).abs());
        let decreasing = errs[1] < errs[0] && errs[2] < errs[1];
        let finest = errs[2];
        Ok(Measured {
            value: finest,
            passed: decreasing && finest <= tol,
            detail: format!(
                "errors {} / {} / {} on n = 64/128/256 at S = 12; {}",
                sci(errs[0]),
                sci(errs[1]),
                sci(errs[2]),
                if decreasing { "decreasing" } else { "NOT decreasing" }
            ),
        })
    })
}

fn sample(f: &dyn Fn(f64) -> Complex64, h: f64, side: Side, offset: usize, count: usize) -> Vec<Complex64> {
    let sign = if side == Side::Plus { 1.0 } else { -1.0 };
    (0..count).map(|k| f(sign * (offset + k) as f64 * h)).collect()
}

fn trace_stability(ctx: &Ctx, table: &mut Table) -> Criterion {
    run_check("trace-stability", Suite::Discrete, 0.0, || {
        let funcs: [(&str, Box<dyn Fn(f64) -> Complex64>); 3] = [
            ("exp", Box::new(|x: f64| Complex64::new((-(1.0 + x)).exp(), 0.0))),
            ("osc", Box::new(|x: f64| Complex64::new((2.0 * x).cos(), x.sin()))),
            ("rational", Box::new(|x: f64| Complex64::new(1.0 / (2.0 + x), 0.0))),
        ];
        let hs = [0.1, 0.05, 0.025];
        let mut worst_margin = f64::INFINITY;
        for (name, f) in &funcs {
            for side in [Side::Plus, Side::Minus] {
                for offset in [0, 1] {
                    for m in 1..=3usize {
                        let p = m + 1;
                        let mut reports = Vec::new();
                        for h in hs {
                            let s = sample(f.as_ref(), h, side, offset, p + 2);
                            reports.push(one_sided_trace(&s, h, side, offset, p, m, f64::INFINITY)?.stability);
                        }
                        let rate = reports.windows(2).map(|w| (w[0] / w[1]).log2()).fold(f64::INFINITY, f64::min);
                        let case = format!("{name},{side:?},offset={offset},m={m}");
                        row(table, "trace-stability", case, "rate", rate);
                        worst_margin = worst_margin.min(rate - m as f64);
                    }
                }
            }
        }
        // interface value taken from the other side of a jump
        let h = 0.01;
        let mut s = sample(&|x: f64| Complex64::new(x.cos(), 0.0), h, Side::Minus, 0, 5);
        s[0] = Complex64::new(3.0, 0.0);
        let jump = one_sided_trace(&s, h, Side::Minus, 0, 3, 2, ctx.tol(1e-3));
        let raised = matches!(jump, Err(Error::TraceUnstable { .. }));
        if let Err(Error::TraceUnstable { report, .. }) = jump {
            row(table, "trace-stability", "jump", "report", report);
        }
        Ok(Measured {
            value: worst_margin,
            passed: worst_margin >= 0.0 && raised,
            detail: format!(
                "smallest observed rate minus m (>= 0) over smooth data; jump {}",
                if raised { "raised TraceUnstable" } else { "NOT detected" }
            ),
        })
    })
}
