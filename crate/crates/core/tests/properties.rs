use num_complex::Complex64;
use proptest::prelude::*;

use phi_calderon::discrete::{jump_operator, matrix_from_text, matrix_to_text};
use phi_calderon::linalg::{gram_adjoint, idempotence_defect, subspace_distance, CMatrix, SubspaceBasis};
use phi_calderon::oracle::{green_defect_lhs, jet_at_zero, scalar_calderon_from_roots, CPoly};
use phi_calderon::symbol::{calderon_symbol, dn_symbol, laplacian_symbol, orthogonalize, NormalOrientation, TangentialCovector};

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn cmatrix(rows: usize, cols: usize) -> impl Strategy<Value = CMatrix<f64>> {
    prop::collection::vec(complex(), rows * cols).prop_map(move |v| CMatrix::from_vec(rows, cols, v))
}

fn cpoly(len: usize) -> impl Strategy<Value = CPoly> {
    prop::collection::vec(complex(), len).prop_map(CPoly)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laplacian_projector_matches_roots(s in 0.05..20.0f64, sign in prop::bool::ANY) {
        let sym = laplacian_symbol::<f64>(0, 1);
        let xi = TangentialCovector::new(vec![], vec![if sign { s } else { -s }]);
        let c = calderon_symbol(&sym, &xi).unwrap();
        let oracle = scalar_calderon_from_roots(&sym, &xi).unwrap();
        let diff = (c.matrix() - oracle.matrix()).norm() / oracle.matrix().norm();
        prop_assert!(diff < 1e-12, "diff {diff}");
        prop_assert!(idempotence_defect(c.matrix()) < 1e-12);
    }

    #[test]
    fn dn_symbol_is_homogeneous(s in 0.1..10.0f64, lambda in 0.1..10.0f64) {
        let sym = laplacian_symbol::<f64>(0, 1);
        let xi = TangentialCovector::new(vec![], vec![s]);
        let a = dn_symbol(&sym, &xi, NormalOrientation::Outward).unwrap();
        let b = dn_symbol(&sym, &xi.scaled(lambda), NormalOrientation::Outward).unwrap();
        prop_assert!((b - a * lambda).norm() < 1e-10 * (1.0 + b.norm()));
    }

    #[test]
    fn orthogonalized_projector_is_self_adjoint(
        a in cmatrix(4, 2), k in cmatrix(4, 2), r in cmatrix(4, 4),
    ) {
        let range = SubspaceBasis::new(a, 1e-8);
        let kernel = SubspaceBasis::new(k, 1e-8);
        prop_assume!(range.is_ok() && kernel.is_ok());
        let Ok(c) = phi_calderon::linalg::projector_from_pair(&range.unwrap(), &kernel.unwrap()) else {
            return Ok(());
        };
        prop_assume!(c.matrix().norm() < 1e3);
        let gram = r.adjoint() * &r + CMatrix::identity(4, 4);
        let co = orthogonalize(&c, &gram).unwrap();
        let m = co.matrix();
        prop_assert!(idempotence_defect(m) < 1e-9);
        let adj = gram_adjoint(m, &gram).unwrap();
        prop_assert!((&adj - m).norm() < 1e-8 * (1.0 + m.norm()));
        // same range: C C_o = C_o and C_o C = C
        prop_assert!((c.matrix() * m - m).norm() < 1e-8 * (1.0 + m.norm()) * c.matrix().norm());
        prop_assert!((m * c.matrix() - c.matrix()).norm() < 1e-8 * (1.0 + m.norm()) * c.matrix().norm());
    }

    #[test]
    fn subspace_distance_is_a_symmetric_unit_quantity(a in cmatrix(5, 2), b in cmatrix(5, 3)) {
        let (Ok(u), Ok(v)) = (SubspaceBasis::from_span(&a, 1e-8), SubspaceBasis::from_span(&b, 1e-8)) else {
            return Ok(());
        };
        let d = subspace_distance(&u, &v);
        prop_assert!((d - subspace_distance(&v, &u)).abs() < 1e-12);
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&d));
        prop_assert!(subspace_distance(&u, &u) < 1e-10);
    }

    #[test]
    fn green_identity_for_polynomials(
        m in 1usize..4, lower in cpoly(3), lead in cpoly(2), u in cpoly(5), q in cpoly(3),
    ) {
        let mut coeffs: Vec<CPoly> = (0..m).map(|l| CPoly(lower.0.iter().map(|c| c * (l as f64 + 1.0)).collect())).collect();
        let mut lead = CPoly(lead.0.iter().map(|c| c * 0.3).collect());
        lead.0[0] = Complex64::new(1.0, 0.0);
        coeffs.push(lead);
        let one = Complex64::new(1.0, 0.0);
        let phi = (0..m).fold(q, |acc, _| acc.mul(&CPoly(vec![one, -one])));
        let jets: Vec<Vec<CMatrix<f64>>> =
            coeffs.iter().map(|a| a.0.iter().map(|&c| CMatrix::from_element(1, 1, c)).collect()).collect();
        let j = jump_operator(&jets).unwrap().matrix();
        let gu = CMatrix::from_column_slice(m, 1, &jet_at_zero(&u, m));
        let gp = CMatrix::from_column_slice(m, 1, &jet_at_zero(&phi, m));
        let rhs = (gp.adjoint() * &j * gu)[(0, 0)];
        let lhs = green_defect_lhs(&coeffs, &u, &phi);
        prop_assert!((lhs - rhs).norm() < 1e-9 * (1.0 + lhs.norm()), "{lhs} vs {rhs}");
    }

    #[test]
    fn matrix_text_round_trip(rows in 1usize..5, cols in 1usize..5, seed in cmatrix(4, 4)) {
        let m = CMatrix::from_fn(rows, cols, |i, j| seed[(i, j)] * 1e3f64.powi(i as i32 - 2));
        let back = matrix_from_text(&matrix_to_text(&m)).unwrap();
        prop_assert_eq!(back, m);
    }
}

