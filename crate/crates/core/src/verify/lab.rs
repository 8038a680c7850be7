//! Finite-dimensional extension algebra: inversion lemma, augmentation, modification and the
//! complement in the minus side.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{row, run_check, sci, Criterion, Ctx, Measured, Suite, SuiteOutcome, Table, COLUMNS};
use crate::extension::{
    augment, boundary_space, check_inversion_lemma, complement_in_minus, complement_instance, gram_complement,
    identity_instance, lemma_instance, modify_shadow, seeded_instance, AbstractBVP, InstanceShape, RangeRelation,
};
use crate::linalg::{
    block_diag, direct_sum_check, idempotence_defect, identity, null_space, projector_from_pair, random_complex,
    subspace_distance, SubspaceBasis,
};

pub(super) fn run(ctx: &Ctx) -> SuiteOutcome {
    let mut table = Table::new("lab", &COLUMNS);
    let criteria = vec![inversion(ctx, &mut table), algebra(ctx, &mut table)];
    SuiteOutcome { suite: Suite::Lab, criteria, table }
}

const RELATIONS: [RangeRelation; 3] = [RangeRelation::DirectSum, RangeRelation::Sum, RangeRelation::Deficient];

fn relation_name(r: RangeRelation) -> &'static str {
    match r {
        RangeRelation::DirectSum => "direct_sum",
        RangeRelation::Sum => "sum",
        RangeRelation::Deficient => "deficient",
    }
}

fn inversion(ctx: &Ctx, table: &mut Table) -> Criterion {
    let margin = ctx.tol(1e-8);
    run_check("inversion-lemma", Suite::Lab, margin, || {
        let mut wrong = 0usize;
        let mut total = 0usize;
        for i in 0..500u64 {
            let rel = RELATIONS[(i % 3) as usize];
            let n = 2 + ((i / 3) % 6) as usize;
            let inst = lemma_instance::<f64>(rel, n, ctx.seed(20_000 + i))?;
            let (ok, sr, si) = check_inversion_lemma(&inst, margin)?;
            let case = format!("{},n={n},i={i}", relation_name(rel));
            row(table, "inversion-lemma", case.clone(), "smin_real", sr);
            row(table, "inversion-lemma", case, "smin_imag", si);
            wrong += usize::from(!ok);
            total += 1;
        }
        // the remark T = Π = I: only the imaginary perturbation is predicted invertible
        for n in 1..=4 {
            let (ok, sr, si) = check_inversion_lemma(&identity_instance::<f64>(n), margin)?;
            let case = format!("identity,n={n}");
            row(table, "inversion-lemma", case.clone(), "smin_real", sr);
            row(table, "inversion-lemma", case, "smin_imag", si);
            wrong += usize::from(!ok || (si - 2f64.sqrt()).abs() > 1e-12);
            total += 1;
        }
        Ok(Measured {
            value: wrong as f64,
            passed: wrong == 0,
            detail: format!("{wrong} of {total} instances misclassified; tolerance is the singular-value margin"),
        })
    })
}

struct Family {
    distance: f64,
    failures: usize,
}

fn algebra(ctx: &Ctx, table: &mut Table) -> Criterion {
    let tol = ctx.tol(1e-10);
    run_check("extension-algebra", Suite::Lab, tol, || {
        let a = augmentation(ctx, table)?;
        let m = modification(ctx, table)?;
        let c = complement(ctx, table)?;
        let worst = a.distance.max(m.distance).max(c.distance);
        let failures = a.failures + m.failures + c.failures;
        Ok(Measured {
            value: worst,
            passed: worst <= tol && failures == 0,
            detail: format!(
                "distances: augment {} modification {} complement {}; structural failures {failures}",
                sci(a.distance),
                sci(m.distance),
                sci(c.distance)
            ),
        })
    })
}

/// `C = π C̄ ι` with `C̄` the orthogonal Calderón projector of the augmented problem; its range
/// must be `ker T` (boundary data = full values).
fn augmentation(ctx: &Ctx, table: &mut Table) -> crate::Result<Family> {
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed(4));
    let mut fam = Family { distance: 0.0, failures: 0 };
    for i in 0..100usize {
        let r = 1 + i % 3;
        let c = r + 1 + (i / 3) % 3;
        let t = random_complex::<f64, _>(&mut rng, r, c);
        let aug = augment(&t);
        let bt = SubspaceBasis::from_span(&null_space(&t, 1e-8), 1e-8)?;
        let bts = SubspaceBasis::from_span(&null_space(&t.adjoint(), 1e-8), 1e-8)?;
        let bbar = SubspaceBasis::from_span(&block_diag(bt.basis(), bts.basis()), 1e-8)?;
        let cbar = projector_from_pair(&bbar, &gram_complement(&bbar, &identity(r + c)))?;
        let cm = &aug.pi * cbar.matrix() * &aug.iota;
        let idem = idempotence_defect(&cm);
        let dist = subspace_distance(&SubspaceBasis::from_span(&cm, 1e-8)?, &bt);
        let case = format!("r={r},c={c},i={i}");
        row(table, "augment", case.clone(), "idempotence", idem);
        row(table, "augment", case, "range_distance", dist);
        fam.distance = fam.distance.max(dist).max(idem);
    }
    Ok(fam)
}

/// Adding `Π_sh` keeps the boundary space and leaves no shadow solutions.
fn modification(ctx: &Ctx, table: &mut Table) -> crate::Result<Family> {
    let mut fam = Family { distance: 0.0, failures: 0 };
    for i in 0..100usize {
        let p = 3 + i % 4;
        let q = 1 + (i / 4) % 3;
        let r = 1 + i % 2;
        let e = (i / 2) % 2;
        let k = (i / 8) % (q + 1);
        let d = e.max(1);
        let shape = InstanceShape { p, q, r, e, k, d };
        let b = seeded_instance::<f64>(shape, ctx.seed(30_000 + i as u64))?;
        let m = modify_shadow(&b)?;
        let bm = AbstractBVP::with_sides(m.t_mod.clone(), b.gamma.clone(), b.gram.clone(), b.plus.clone())?;
        let dist = subspace_distance(&boundary_space(&b)?, &boundary_space(&bm)?);
        let left = modify_shadow(&bm)?.shadow_dim;
        let case = format!("p={p},q={q},r={r},e={e},k={k},d={d},i={i}");
        row(table, "modification", case.clone(), "boundary_distance", dist);
        row(table, "modification", case.clone(), "shadow_before", m.shadow_dim as f64);
        row(table, "modification", case, "shadow_after", left as f64);
        fam.distance = fam.distance.max(dist);
        fam.failures += usize::from(left != 0 || m.shadow_dim != r);
    }
    Ok(fam)
}

/// `W = χ²K` complements `K^⊥`.
fn complement(ctx: &Ctx, table: &mut Table) -> crate::Result<Family> {
    let mut fam = Family { distance: 0.0, failures: 0 };
    for i in 0..100usize {
        let p = 2 + i % 3;
        let q = 2 + (i / 3) % 4;
        let k = 1 + (i / 12) % q;
        let (kb, b, chi) = complement_instance::<f64>(p, q, k, ctx.seed(40_000 + i as u64))?;
        let w = complement_in_minus(&kb, &b, &chi)?;
        let mut scaled = kb.basis().clone();
        for (r, &c) in chi.iter().enumerate() {
            scaled.row_mut(r).scale_mut(c * c);
        }
        let want = SubspaceBasis::from_span(&scaled, 1e-10)?;
        let dist = subspace_distance(&w, &want);
        let gap = direct_sum_check(&w, &gram_complement(&kb, &b.gram), 1e-8)?;
        let case = format!("p={p},q={q},k={k},i={i}");
        row(table, "complement", case.clone(), "distance", dist);
        row(table, "complement", case, "direct_sum_gap", gap.gap);
        fam.distance = fam.distance.max(dist);
        fam.failures += usize::from(!gap.is_direct_sum || w.dim() != k);
    }
    Ok(fam)
}
