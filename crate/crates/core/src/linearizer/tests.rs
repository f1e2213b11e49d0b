use super::golden::{general_form, golden_pullback};
use super::*;
use crate::srpoly::compose;

fn spec(ws: &[i64]) -> WeightSpec {
    WeightSpec::from_ints(ws).unwrap()
}

fn entries(b: &MonomialBasis) -> Vec<Vec<u32>> {
    b.entries().iter().map(|a| a.0.clone()).collect()
}

const A: [f64; 7] = [1.0, 2.0, 0.5, -1.0, 3.0, 0.0, 1.0];
const B: [f64; 4] = [2.0, -1.0, 1.0, 0.5];
const C: [f64; 2] = [1.0, 2.0];

#[test]
fn basis_examples() {
    let b = monomial_basis(&spec(&[-3, -2, -1])).unwrap();
    assert_eq!(
        entries(&b),
        vec![vec![1, 0, 0], vec![0, 1, 1], vec![0, 0, 3], vec![0, 1, 0], vec![0, 0, 2], vec![0, 0, 1], vec![0, 0, 0]]
    );
    assert_eq!(entries(&monomial_basis(&spec(&[-1])).unwrap()), vec![vec![1], vec![0]]);
    assert_eq!(
        entries(&monomial_basis(&spec(&[-2, -1])).unwrap()),
        vec![vec![1, 0], vec![0, 2], vec![0, 1], vec![0, 0]]
    );
    assert!(monomial_basis(&spec(&[-1, 0])).is_err());
}

#[test]
fn basis_enumeration_matches_brute_force() {
    let ws = spec(&[-4, -3, -1]);
    let b = monomial_basis(&ws).unwrap();
    let mut count = 0;
    for i in 0..5i64 {
        for j in 0..5i64 {
            for k in 0..5i64 {
                if -4 * i - 3 * j - k >= -4 {
                    count += 1;
                    assert!(b.position(&MultiIndex(vec![i as u32, j as u32, k as u32])).is_some());
                }
            }
        }
    }
    assert_eq!(b.len(), count);
    assert_eq!(b.entries()[b.constant_index()], MultiIndex::zero(3));
}

#[test]
fn pullback_identity_and_diagonal() {
    let ws = spec(&[-3, -2, -1]);
    assert_eq!(pullback_matrix(&PolyMap::identity(&ws)).unwrap(), DMatrix::identity(7, 7));
    let (a1, b1, c1) = (2.0, -0.5, 3.0);
    let f = PolyMap::from_terms(&ws, &ws, [(0, vec![1, 0, 0], a1), (1, vec![0, 1, 0], b1), (2, vec![0, 0, 1], c1)]).unwrap();
    let d = DMatrix::from_diagonal(&DVector::from_vec(vec![a1, b1 * c1, c1 * c1 * c1, b1, c1 * c1, c1, 1.0]));
    assert_eq!(pullback_matrix(&f).unwrap(), d);
}

#[test]
fn golden_instance() {
    let f = general_form(&A, &B, &C);
    let m = pullback_matrix(&f).unwrap();
    // Row z^2, column yz: b2 c1 + b3 c0.
    assert_eq!(m[(4, 1)], B[2] * C[1] + B[3] * C[0]);
    assert_eq!(m[(4, 1)], 2.5);
    let expected = golden_pullback(&A, &B, &C);
    assert!((&m - &expected).amax() < 1e-12);
    assert_eq!(linearize(&f).unwrap().matrix, m.transpose());
    let report = check_structure(&linearize(&f).unwrap());
    assert!(report.is_block_triangular());
    assert_eq!(report.constant_row_defect, 0.0);
    assert!(golden::check(&f, 1e-12).unwrap().passed);
}

#[test]
fn golden_check_rejects_foreign_terms() {
    let mut f = general_form(&A, &B, &C);
    f.add_term(1, MultiIndex(vec![0, 0, 1]), 0.0).unwrap();
    assert!(golden::check(&f, 1e-12).is_ok());
    f.add_term(2, MultiIndex(vec![0, 0, 0]), 0.0).unwrap();
    let ws = spec(&[-3, -2, -1]);
    let g = PolyMap::from_terms(&ws, &ws, [(0, vec![0, 0, 1], 1.0), (1, vec![0, 1, 0], 1.0), (2, vec![0, 1, 0], 1.0)]);
    assert!(g.is_ok());
    assert!(pullback_matrix(&g.unwrap()).is_err());
}

#[test]
fn embed_and_project_examples() {
    let b = monomial_basis(&spec(&[-3, -2, -1])).unwrap();
    assert_eq!(embed(&b, &[0.0; 3]).unwrap().as_slice(), &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    let e = embed(&b, &[1.0, 2.0, 3.0]).unwrap();
    assert_eq!(e.as_slice(), &[1.0, 6.0, 27.0, 2.0, 9.0, 3.0, 1.0]);
    assert_eq!(project(&b, &e).unwrap(), vec![1.0, 2.0, 3.0]);
    let mut constant = DVector::zeros(7);
    constant[6] = 1.0;
    assert_eq!(project(&b, &constant).unwrap(), vec![0.0; 3]);
    assert!(embed(&b, &[1.0]).is_err());
}

#[test]
fn embedding_is_equivariant_on_the_golden_instance() {
    let f = general_form(&A, &B, &C);
    let l = linearize(&f).unwrap();
    let v = [0.3, -1.2, 0.7];
    let lhs = embed(&l.basis_tgt, &f.evaluate(&v).unwrap()).unwrap();
    let rhs = &l.matrix * embed(&l.basis_src, &v).unwrap();
    assert!((lhs - rhs).amax() < 1e-12);
}

#[test]
fn inner_product_conventions() {
    let b = monomial_basis(&spec(&[-3, -2, -1])).unwrap();
    let e0 = embed(&b, &[0.0; 3]).unwrap();
    assert_eq!(e0.norm(), 1.0);
    // Derivative of the embedding at 0 by central differences is an isometry.
    let h = 1e-6;
    let mut jac = DMatrix::zeros(b.len(), 3);
    for i in 0..3 {
        let mut p = [0.0; 3];
        let mut m = [0.0; 3];
        p[i] = h;
        m[i] = -h;
        let col = (embed(&b, &p).unwrap() - embed(&b, &m).unwrap()) / (2.0 * h);
        jac.set_column(i, &col);
    }
    assert!((jac.transpose() * &jac - DMatrix::<f64>::identity(3, 3)).amax() < 1e-9);
    // The derivative lands in the subspace with vanishing constant coordinate.
    assert!(jac.row(b.constant_index()).amax() == 0.0);
}

#[test]
fn functoriality_small() {
    let f = general_form(&A, &B, &C);
    let g = general_form(&[0.5, -1.0, 2.0, 0.0, 1.0, -2.0, 0.25], &[1.0, 3.0, 0.0, -1.0], &[-0.5, 0.5]);
    let lgf = linearize(&compose(&g, &f).unwrap()).unwrap().matrix;
    let prod = linearize(&g).unwrap().matrix * linearize(&f).unwrap().matrix;
    assert!((lgf - prod).amax() < 1e-12);
}

#[test]
fn centered_maps_fix_the_constant_line() {
    let f = general_form(&[0.0, 2.0, 0.5, -1.0, 3.0, 1.0, 1.0], &[0.0, -1.0, 1.0, 0.5], &[0.0, 2.0]);
    let l = linearize(&f).unwrap();
    let k = l.basis_src.constant_index();
    let col: Vec<f64> = l.matrix.column(k).iter().copied().collect();
    assert_eq!(col, vec![0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
}

#[test]
fn identity_structure_report() {
    let l = linearize(&PolyMap::identity(&spec(&[-3, -2, -1]))).unwrap();
    let r = check_structure(&l);
    assert_eq!(r.triangularity_violations, 0);
    assert_eq!(r.nilpotency_defect, Some(0.0));
    assert_eq!(r.constant_row_defect, 0.0);
}

#[test]
fn serializes_basis_and_matrix() {
    let l = linearize(&PolyMap::identity(&spec(&[-1]))).unwrap();
    assert_eq!(serde_json::to_string(&l).unwrap(), r#"{"basis":[[1],[0]],"matrix":[[1.0,0.0],[0.0,1.0]]}"#);
}
