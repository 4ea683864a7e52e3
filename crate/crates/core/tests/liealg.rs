mod common;

use common::{block_diag, normalize_line, oracle_lines, random_lorentz, random_structured, rotation};
use confwave::liealg::{
    eigenspace_decompose, grade_so, invariant_null_lines, jordan_decompose, sigma_b_spectrum,
    LieAlgebra, MatrixAlgebra, MinkowskiFrame, SigmaBranch,
};
use nalgebra::{DMatrix, DVector};

fn close(a: &DMatrix<f64>, b: &DMatrix<f64>, tol: f64) -> bool {
    (a - b).amax() <= tol
}

#[test]
fn jordan_of_a_boost() {
    let f = MinkowskiFrame::new(4).unwrap();
    let b = f.boost(0.5, 1.0);
    let j = jordan_decompose(&b).unwrap();
    let id = DMatrix::identity(4, 4);
    assert!(close(&j.b_h, &b, 1e-12));
    assert!(close(&j.b_e, &id, 1e-12));
    assert!(close(&j.b_u, &id, 1e-12));
    assert!(j.is_hyperbolic() && j.is_semisimple());
    assert!((j.b_h[(0, 0)] - 1.5f64.exp()).abs() < 1e-12);
    assert!((j.b_h[(1, 1)] - (-0.5f64).exp()).abs() < 1e-12);
}

#[test]
fn jordan_of_a_scaled_rotation() {
    let b = rotation(0.7) * 2.0;
    let j = jordan_decompose(&b).unwrap();
    assert!(close(&j.b_h, &(DMatrix::identity(2, 2) * 2.0), 1e-12));
    assert!(close(&j.b_e, &rotation(0.7), 1e-12));
    assert!(j.is_semisimple() && !j.is_hyperbolic());
}

#[test]
fn jordan_of_a_shear() {
    let b = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 2.0]);
    let j = jordan_decompose(&b).unwrap();
    assert!(close(&j.b_s, &(DMatrix::identity(2, 2) * 2.0), 1e-12));
    assert!(close(&j.b_u, &DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]), 1e-12));
    assert!(!j.is_semisimple());
}

#[test]
fn jordan_of_a_conjugated_mixed_block() {
    let r = rotation(1.1);
    let shear = DMatrix::from_row_slice(2, 2, &[-2.0, 1.0, 0.0, -2.0]);
    let b0 = block_diag(&[&r * 3.0, shear]);
    let p = DMatrix::from_row_slice(
        4,
        4,
        &[1.0, 0.2, -0.1, 0.3, 0.0, 1.0, 0.4, -0.2, 0.1, 0.0, 1.0, 0.5, -0.3, 0.2, 0.0, 1.0],
    );
    let pi = p.clone().try_inverse().unwrap();
    let b = &p * &b0 * &pi;
    let j = jordan_decompose(&b).unwrap();
    let conj = |m: DMatrix<f64>| &p * m * &pi;
    let i2 = DMatrix::identity(2, 2);
    let expect_u = conj(block_diag(&[i2.clone(), DMatrix::from_row_slice(2, 2, &[1.0, -0.5, 0.0, 1.0])]));
    let expect_h = conj(block_diag(&[&i2 * 3.0, &i2 * 2.0]));
    let expect_e = conj(block_diag(&[r, -&i2]));
    assert!(close(&j.b_u, &expect_u, 1e-9));
    assert!(close(&j.b_h, &expect_h, 1e-9));
    assert!(close(&j.b_e, &expect_e, 1e-9));
    assert!(j.reconstruction_error(&b) < 1e-10);
    assert!(j.commutation_defect() < 1e-9);
    assert!(j.nilpotency_defect() < 1e-9);
}

#[test]
fn jordan_reconstructs_random_matrices() {
    let mut rng = common::rng(2024);
    for case in 0..200 {
        let b = random_structured(&mut rng);
        let j = jordan_decompose(&b).unwrap_or_else(|e| panic!("case {case}: {e}"));
        assert!(j.reconstruction_error(&b) < 1e-10, "case {case}: {:e}", j.reconstruction_error(&b));
        // B_s is its own semisimple part
        let js = jordan_decompose(&j.b_s).unwrap();
        assert!(close(&js.b_s, &j.b_s, 1e-8 * j.b_s.amax().max(1.0)), "case {case}");
        assert!(close(&js.b_u, &DMatrix::identity(b.nrows(), b.nrows()), 1e-8), "case {case}");
    }
}

#[test]
fn so_grading_dimensions() {
    for n in 1..=5 {
        let f = MinkowskiFrame::new(n + 2).unwrap();
        let g = grade_so(&f);
        assert_eq!(g.dims(), (n, 1 + n * (n - 1) / 2, n), "n = {n}");
        if n <= 3 {
            assert!(g.bracket_residual(&f) < 1e-10);
        }
        for x in g.minus.iter().chain(&g.zero).chain(&g.plus) {
            assert!(f.co_defect(x) < 1e-12 && x.trace().abs() < 1e-12);
        }
    }
}

#[test]
fn tangent_representation_of_the_boost_generator() {
    // B = ½·Id + A acting on R^{n+2}, viewed as a derivation of the abelian algebra
    let n = 3;
    let f = MinkowskiFrame::new(n + 2).unwrap();
    let b = DMatrix::identity(n + 2, n + 2) * 0.5 + f.grading_element();
    let dec = eigenspace_decompose(&LieAlgebra::abelian(n + 2), &b).unwrap();
    let spectrum: Vec<(f64, usize)> = dec.spectrum.clone();
    assert_eq!(spectrum.len(), 3);
    for ((mu, k), (emu, ek)) in spectrum.iter().zip([(-0.5, 1), (0.5, n), (1.5, 1)]) {
        assert!((mu - emu).abs() < 1e-12);
        assert_eq!(*k, ek);
    }
    assert_eq!(dec.total_dim(), n + 2);
}

#[test]
fn heisenberg_weight_gradings() {
    let h = LieAlgebra::heisenberg(2);
    let standard = DMatrix::from_diagonal(&DVector::from_vec(vec![-2.0, -1.0, -1.0, -1.0, -1.0]));
    let dec = eigenspace_decompose(&h, &standard).unwrap();
    assert_eq!(dec.spectrum.iter().map(|s| s.1).collect::<Vec<_>>(), vec![1, 4]);
    assert!(dec.derivation_defect < 1e-14 && dec.grading_residual < 1e-12);

    // p weights 1, q weights ½, z weights 3/2
    let skew = DMatrix::from_diagonal(&DVector::from_vec(vec![1.5, 1.0, 1.0, 0.5, 0.5]));
    let dec = eigenspace_decompose(&h, &skew).unwrap();
    assert_eq!(dec.spectrum.len(), 3);
    assert!(dec.grading_residual < 1e-12);
    assert_eq!(dec.component(1.5).unwrap().dim(), 1);

    // not a derivation: the defect is reported
    let bad = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 1.0, 1.0, 1.0, 1.0]));
    assert!(eigenspace_decompose(&h, &bad).unwrap().derivation_defect > 0.5);
}

#[test]
fn sigma_spectra() {
    let merged = |a: f64| sigma_b_spectrum(a).values;
    assert_eq!(merged(0.5), vec![(-1.0, 1), (-0.5, 1), (0.0, 1), (0.5, 1), (1.0, 1), (1.5, 1)]);
    assert_eq!(merged(1.0), vec![(-1.0, 1), (0.0, 2), (1.0, 2), (2.0, 1)]);
    assert_eq!(merged(2.0), vec![(-1.0, 1), (0.0, 1), (1.0, 2), (2.0, 1), (3.0, 1)]);
    assert_eq!(merged(7.0), vec![(-1.0, 1), (0.0, 1), (1.0, 1), (6.0, 1), (7.0, 1), (8.0, 1)]);
    for a in [0.5, 1.0, 2.0] {
        assert!(sigma_b_spectrum(a).is_special());
    }
    assert_eq!(sigma_b_spectrum(7.0).branch, SigmaBranch::ConformallyFlat);
}

#[test]
fn null_lines_match_the_oracle() {
    let f = MinkowskiFrame::new(4).unwrap();
    let a = f.grading_element();
    let so = f.so_basis();
    let g = grade_so(&f);
    // rotation in the transverse plane
    let r23 = so[5].clone();
    let cases: Vec<(Vec<DMatrix<f64>>, usize)> = vec![
        (vec![a.clone()], 2),
        (vec![a.clone(), r23.clone()], 2),
        (vec![&a + &r23 * 0.7], 2),
        (vec![&a * 0.3 + &g.plus[0] + &r23], 2),
        (vec![g.plus[0].clone(), g.plus[1].clone()], 1),
        (g.parabolic_plus(), 1),
        (g.parabolic_minus(), 1),
        (so.clone(), 0),
        (vec![a.clone(), DMatrix::identity(4, 4)], 2),
    ];
    let mut rng = common::rng(11);
    for (i, (basis, count)) in cases.iter().enumerate() {
        for conj in 0..3 {
            let l = if conj == 0 { DMatrix::identity(4, 4) } else { random_lorentz(&f, &mut rng) };
            let li = l.clone().try_inverse().unwrap();
            let b: Vec<DMatrix<f64>> = basis.iter().map(|x| &l * x * &li).collect();
            let got = invariant_null_lines(&b, &f, 5).unwrap();
            assert_eq!(got.len(), *count, "case {i}, conjugate {conj}");
            // dimension ≤ 6 algebras: brute force applies
            if b.len() <= 6 {
                let want = oracle_lines(&b, &f);
                assert_eq!(want.len(), *count, "oracle, case {i}, conjugate {conj}: {want:?}");
                for v in &got {
                    let v = normalize_line(v);
                    assert!(want.iter().any(|w| (w - &v).amax() < 1e-4), "case {i}, conjugate {conj}: {v}");
                }
            }
        }
    }
}

#[test]
fn matrix_algebra_of_the_parabolic_is_closed() {
    let f = MinkowskiFrame::new(5).unwrap();
    let g = grade_so(&f);
    let alg = MatrixAlgebra::new(f, g.parabolic_plus()).unwrap();
    assert_eq!(alg.dim(), 1 + 3 + 3);
    let lines = invariant_null_lines(alg.basis(), &f, 42).unwrap();
    assert_eq!(lines.len(), 1);
}

