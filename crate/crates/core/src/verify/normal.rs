//! Normal-family checks on the strip and unique continuation for seeded fibre ODEs.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{row, run_check, sci, Criterion, Ctx, Measured, Suite, SuiteOutcome, Table, COLUMNS};
use crate::error::Error;
use crate::linalg::{random_complex, spectral_norm, subspace_distance, CMatrix, SubspaceBasis};
use crate::model::ModelOperator;
use crate::normal::{boundary_data_space, normal_calderon, normal_operator, normal_split, ucp_check, FibreExtension, FibreODE};

pub(super) fn run(ctx: &Ctx) -> SuiteOutcome {
    let mut table = Table::new("normal", &COLUMNS);
    let criteria = vec![strip_family(ctx, &mut table), unique_continuation(ctx, &mut table)];
    SuiteOutcome { suite: Suite::Normal, criteria, table }
}

/// Data `[u(0), Du(0), u(L), Du(L)]` of `cosh(τz)` and `sinh(τz)/τ`.
fn cosh_sinh(tau: f64, l: f64) -> crate::Result<SubspaceBasis<f64>> {
    let (c, s) = ((tau * l).cosh(), (tau * l).sinh());
    let z = |re: f64, im: f64| Complex64::new(re, im);
    let b = CMatrix::from_row_slice(4, 2, &[z(1.0, 0.0), z(0.0, 0.0), z(0.0, 0.0), z(0.0, -1.0), z(c, 0.0), z(s / tau, 0.0), z(0.0, -tau * s), z(0.0, -c)]);
    SubspaceBasis::new(b, 1e-10)
}

fn strip_family(ctx: &Ctx, table: &mut Table) -> Criterion {
    let tol = ctx.tol(1e-8);
    run_check("normal-family", Suite::Normal, tol, || {
        let strip = ModelOperator::<f64>::strip_laplacian(1.0);
        let ext = FibreExtension::default();
        let mut dist: f64 = 0.0;
        for tau in [0.5, 1.0, 2.0] {
            let b = boundary_data_space(&normal_operator(&strip, (tau, 0.0))?)?;
            let d = subspace_distance(&b, &cosh_sinh(tau, 1.0)?);
            row(table, "normal-family", format!("tau={tau}"), "cosh_sinh_distance", d);
            dist = dist.max(d);
        }
        let mut taus = vec![0.5, 1.0, 2.0];
        taus.extend(ctx.params.taus());
        let mut idem: f64 = 0.0;
        for &tau in &taus {
            let c = normal_calderon(&strip, (tau, 0.0), &ext)?;
            row(table, "normal-family", format!("tau={tau}"), "idempotence", c.idem_defect());
            idem = idem.max(c.idem_defect());
        }
        let off = normal_calderon(&strip, (0.0, 0.0), &FibreExtension::circle(0.0));
        let off_detected = matches!(off, Err(Error::NotComplementary { .. }));
        let off_gap = normal_split(&strip, (0.0, 0.0), &FibreExtension::circle(0.0))?.gap;
        let on_gap = normal_split(&strip, (0.0, 0.0), &FibreExtension::circle(1.0))?.gap;
        row(table, "normal-family", "tau=0,bump=0", "gap", off_gap);
        row(table, "normal-family", "tau=0,bump=1", "gap", on_gap);
        Ok(Measured {
            value: dist.max(idem),
            passed: dist <= tol && idem <= tol && off_detected && on_gap > 0.05,
            detail: format!(
                "cosh/sinh {} idempotence {} over {} tau; bump off at tau=0 {} (gap {}); bump on gap {} (> 5e-2)",
                sci(dist),
                sci(idem),
                taus.len(),
                if off_detected { "rejected" } else { "NOT rejected" },
                sci(off_gap),
                sci(on_gap)
            ),
        })
    })
}

/// Seeded ODE of order `m` with an `I + small` leading coefficient and polynomial lower terms.
fn seeded_ode(rng: &mut ChaCha8Rng, order: usize, n: usize) -> crate::Result<FibreODE<f64>> {
    let length: f64 = rng.random_range(0.5..1.5);
    let mu = (rng.random_range(-2.0..2.0), 0.0);
    let mut coeffs = Vec::with_capacity(order + 1);
    for _ in 0..order {
        let deg = rng.random_range(0..3);
        coeffs.push((0..=deg).map(|_| random_complex::<f64, _>(rng, n, n) * Complex64::new(0.5, 0.0)).collect::<Vec<_>>());
    }
    let r = random_complex::<f64, _>(rng, n, n);
    let r = &r * Complex64::new(0.3 / (length * spectral_norm(&r)), 0.0);
    coeffs.push(vec![CMatrix::identity(n, n), r]);
    FibreODE::new(order, n, length, mu, coeffs)
}

fn unique_continuation(ctx: &Ctx, table: &mut Table) -> Criterion {
    run_check("unique-continuation", Suite::Normal, 0.0, || {
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed(5));
        let (mut worst, mut min_sv) = (0usize, f64::INFINITY);
        for i in 0..50usize {
            let order = 1 + i % 3;
            let n = 1 + (i / 3) % 2;
            let ode = seeded_ode(&mut rng, order, n)?;
            for (kind, o) in [("ode", ode.clone()), ("adjoint", ode.adjoint()?)] {
                let r = ucp_check(&o)?;
                let case = format!("{kind},m={order},N={n},i={i}");
                row(table, "unique-continuation", case.clone(), "dim_shadow", r.dim_shadow as f64);
                row(table, "unique-continuation", case, "min_sv", r.min_sv);
                worst = worst.max(r.dim_shadow);
                min_sv = min_sv.min(r.min_sv);
            }
        }
        Ok(Measured {
            value: worst as f64,
            passed: worst == 0,
            detail: format!("largest shadow dimension over 50 ODEs and adjoints; smallest conditioning {}", sci(min_sv)),
        })
    })
}
