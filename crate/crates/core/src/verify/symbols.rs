//! Interior symbol checks: DN symbol, closed forms, complementarity, orthogonalization.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{row, run_check, Criterion, Ctx, Measured, Suite, SuiteOutcome, Table, COLUMNS};
use crate::linalg::{
    gram_adjoint, idempotence_defect, identity, projector_from_pair, random_complex, subspace_distance, CMatrix,
    SubspaceBasis,
};
use crate::oracle::scalar_calderon_from_roots;
use crate::symbol::{
    calderon_symbol, complementary_symbol, dn_symbol, laplacian_symbol, orthogonalize, random_elliptic_symbol,
    NormalOrientation, TangentialCovector,
};

pub(super) fn run(ctx: &Ctx) -> SuiteOutcome {
    let mut table = Table::new("symbol", &COLUMNS);
    let criteria = vec![dn(ctx, &mut table), closed_form(ctx, &mut table), complementarity(ctx, &mut table), orthogonalization(ctx, &mut table)];
    SuiteOutcome { suite: Suite::Symbol, criteria, table }
}

/// Random covector with every component of size at least 0.1.
fn covector(rng: &mut ChaCha8Rng, b: usize, f: usize) -> TangentialCovector<f64> {
    let mut draw = |n: usize| -> Vec<f64> {
        (0..n)
            .map(|_| {
                let x: f64 = rng.random_range(0.1..3.0);
                if rng.random_bool(0.5) {
                    x
                } else {
                    -x
                }
            })
            .collect()
    };
    let eta = draw(b);
    TangentialCovector::new(eta, draw(f))
}

fn dn(ctx: &Ctx, table: &mut Table) -> Criterion {
    let tol = ctx.tol(1e-10);
    run_check("dn-symbol", Suite::Symbol, tol, || {
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed(1));
        let mut worst: f64 = 0.0;
        for i in 0..50 {
            let (b, f) = (i % 2, 1 + (i / 2) % 2);
            let xi = covector(&mut rng, b, f);
            let got = dn_symbol(&laplacian_symbol::<f64>(b, f), &xi, NormalOrientation::Outward)?;
            let err = (got - Complex64::new(xi.norm(), 0.0)).norm();
            row(table, "dn-symbol", format!("{i}"), "abs_error", err);
            worst = worst.max(err);
        }
        Ok(Measured { value: worst, passed: worst <= tol, detail: "50 covectors, b <= 1, up to 2 fibre directions".into() })
    })
}

fn laplace_closed_form(s: f64) -> CMatrix<f64> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.0, -0.5 / s), c(0.0, 0.5 * s), c(0.5, 0.0)])
}

fn closed_form(ctx: &Ctx, table: &mut Table) -> Criterion {
    let tol = ctx.tol(1e-10);
    let oracle_tol = ctx.tol(1e-8);
    run_check("calderon-closed-form", Suite::Symbol, tol, || {
        let lap = laplacian_symbol::<f64>(0, 1);
        let (mut closed, mut oracle): (f64, f64) = (0.0, 0.0);
        for s in [0.25, 1.0, 4.0] {
            let xi = TangentialCovector::new(vec![], vec![s]);
            let c = calderon_symbol(&lap, &xi)?;
            let e1 = (c.matrix() - laplace_closed_form(s)).norm();
            let e2 = (c.matrix() - scalar_calderon_from_roots(&lap, &xi)?.matrix()).norm();
            row(table, "calderon-closed-form", format!("s={s}"), "closed_form_error", e1);
            row(table, "calderon-closed-form", format!("s={s}"), "root_oracle_error", e2);
            closed = closed.max(e1);
            oracle = oracle.max(e2);
        }
        Ok(Measured {
            value: closed,
            passed: closed <= tol && oracle <= oracle_tol,
            detail: format!("root oracle {} (tol {})", super::sci(oracle), super::sci(oracle_tol)),
        })
    })
}

fn complementarity(ctx: &Ctx, table: &mut Table) -> Criterion {
    let tol = ctx.tol(1e-9);
    run_check("complementarity", Suite::Symbol, tol, || {
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed(2));
        let mut worst: f64 = 0.0;
        for i in 0..200usize {
            let order = 1 + i % 4;
            let n = 1 + (i / 4) % 3;
            let (b, f) = if order % 2 == 1 { (0, 1) } else { [(0, 1), (1, 1), (0, 2)][(i / 12) % 3] };
            let sym = random_elliptic_symbol::<f64>(order, n, b, f, ctx.seed(10_000 + i as u64))?;
            let xi = covector(&mut rng, b, f);
            let plus = calderon_symbol(&sym, &xi)?;
            let minus = complementary_symbol(&sym, &xi)?;
            let err = (plus.matrix() + minus.matrix() - identity::<f64>(order * n)).norm();
            row(table, "complementarity", format!("m={order},N={n},b={b},f={f},i={i}"), "sum_defect", err);
            worst = worst.max(err);
        }
        Ok(Measured { value: worst, passed: worst <= tol, detail: "200 symbols, m <= 4, N <= 3".into() })
    })
}

fn random_gram(rng: &mut ChaCha8Rng, n: usize) -> CMatrix<f64> {
    let a = random_complex::<f64, _>(rng, n, n);
    let g = a.adjoint() * &a / Complex64::new(n as f64, 0.0) + identity::<f64>(n);
    (&g + g.adjoint()) * Complex64::new(0.5, 0.0)
}

fn orthogonalization(ctx: &Ctx, table: &mut Table) -> Criterion {
    let tol = ctx.tol(1e-9);
    run_check("orthogonalization", Suite::Symbol, tol, || {
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed(3));
        let mut worst: f64 = 0.0;
        for i in 0..100usize {
            let n = 2 + i % 5;
            let k = rng.random_range(1..n);
            let range = SubspaceBasis::new(random_complex::<f64, _>(&mut rng, n, k), 1e-10)?;
            let kernel = SubspaceBasis::new(random_complex::<f64, _>(&mut rng, n, n - k), 1e-10)?;
            let c = projector_from_pair(&range, &kernel)?;
            let gram = random_gram(&mut rng, n);
            let co = orthogonalize(&c, &gram)?;
            let m = co.matrix();
            let idem = idempotence_defect(m);
            let adj = (gram_adjoint(m, &gram)? - m).norm();
            let dist = subspace_distance(&co.numerical_range(1e-8), &range);
            let case = format!("n={n},k={k},i={i}");
            row(table, "orthogonalization", case.clone(), "idempotence", idem);
            row(table, "orthogonalization", case.clone(), "gram_adjoint", adj);
            row(table, "orthogonalization", case, "range_distance", dist);
            worst = worst.max(idem).max(adj).max(dist);
        }
        Ok(Measured { value: worst, passed: worst <= tol, detail: "100 oblique projectors with random grams".into() })
    })
}
