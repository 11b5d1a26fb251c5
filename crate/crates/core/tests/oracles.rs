//! Known values checked against independent closed forms.

use maxrep::hyperbolic::{octagon_hyperbolization, trace2, translation_length_h, BoundaryPoint, TangentTriple};
use maxrep::linalg::{complex_spectrum, max_abs};
use maxrep::max_reps::{
    attracting_lagrangian, boundary_map, j_of_u, toledo, translation_length_sp, Embedding, LengthOptions, MaximalRep,
};
use maxrep::surface_group::parse_word;
use maxrep::symplectic::{d_sp, CompatibleJ, Lagrangian, SymplecticMatrix};
use maxrep::{Mat2, Tolerances};
use nalgebra::{DMatrix, DVector};

fn tol() -> Tolerances {
    Tolerances::default()
}

// [DERIVED] regular octagon with interior angles π/4: every side pairing has
// |tr| = 2 + √2, hence translation length 2 acosh(1 + √2/2).
#[test]
fn octagon_generators_have_the_regular_length() {
    let h = octagon_hyperbolization::<f64>(&tol());
    let ell = 2.0 * (1.0 + 2f64.sqrt() / 2.0).acosh();
    for m in h.images() {
        assert!((trace2(m).abs() - (2.0 + 2f64.sqrt())).abs() < 1e-12);
        assert!((translation_length_h(m, &tol()).unwrap() - ell).abs() < 1e-10);
    }
}

// [DERIVED] block arithmetic: diag(e, 1/e) lands on the diagonal of each plane.
#[test]
fn diagonal_embedding_of_a_diagonal_matrix() {
    let e = std::f64::consts::E;
    let m = Embedding::<f64>::diagonal(2).apply(&Mat2::new(e, 0.0, 0.0, 1.0 / e));
    let expected = DMatrix::from_diagonal(&DVector::from_vec(vec![e, e, 1.0 / e, 1.0 / e]));
    assert!(max_abs(&(m - expected)) < 1e-15);
}

// [DERIVED] action on x³, x²y, xy², y³: eigenvalues t³, t, 1/t, 1/t³.
#[test]
fn irreducible_embedding_spectrum() {
    let t = 1.7f64;
    let m = Embedding::<f64>::irreducible(2).apply(&Mat2::new(t, 0.0, 0.0, 1.0 / t));
    let mut moduli: Vec<f64> = complex_spectrum(&m).iter().map(|z| z.re).collect();
    moduli.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let expected = [t.powi(-3), 1.0 / t, t, t.powi(3)];
    for (a, b) in moduli.iter().zip(expected) {
        assert!((a - b).abs() < 1e-12 * b.max(1.0));
    }
    assert!(SymplecticMatrix::new(m, &tol()).is_ok());
}

// [DERIVED] direct spectrum of diag(2, 3, 1/2, 1/3).
#[test]
fn attracting_lagrangian_of_a_diagonal_matrix() {
    let m = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 3.0, 0.5, 1.0 / 3.0]));
    let l = attracting_lagrangian(&SymplecticMatrix::new(m, &tol()).unwrap(), &tol()).unwrap();
    assert!(l.distance(&Lagrangian::standard_minus(2)) < 1e-12);
}

// [DERIVED] winding of the Fuchsian lift is 2g - 2 per plane, and the
// irreducible image of a Fuchsian group is maximal as well.
#[test]
fn toledo_values() {
    let h = octagon_hyperbolization::<f64>(&tol());
    for n in 1..=3 {
        let rep = MaximalRep::compose(&h, &Embedding::diagonal(n), &tol()).unwrap();
        let t = toledo(&rep, &tol()).unwrap();
        assert_eq!(t.value, 2 * n as i64);
        assert!(t.residual <= 1e-3);
        assert_eq!(rep.toledo_cache(), Some(2 * n as i64));
    }
    let mut irr = MaximalRep::compose(&h, &Embedding::irreducible(2), &tol()).unwrap();
    assert_eq!(irr.toledo_value(&tol()).unwrap(), 4);
    assert!(irr.is_maximal(&tol()).unwrap());
    assert_eq!(toledo(&MaximalRep::<f64>::trivial(2, 2), &tol()).unwrap().value, 0);
}

// [DERIVED] n = 1: (0, -1, ∞) gives F = [e₂ | e₁], T⁻ = T⁺ = -1 and J = -Ω.
#[test]
fn complex_structure_of_the_standard_triple() {
    let h = octagon_hyperbolization::<f64>(&tol());
    let rep = MaximalRep::compose(&h, &Embedding::diagonal(1), &tol()).unwrap();
    let phi = boundary_map(&rep, &tol()).unwrap();
    let u = TangentTriple::new(BoundaryPoint::Finite(0.0), BoundaryPoint::Finite(-1.0), BoundaryPoint::Infinity).unwrap();
    let j = j_of_u(&phi, &u, &tol()).unwrap();
    assert!(max_abs(&(j.matrix() - CompatibleJ::<f64>::base(1).matrix())) < 1e-14);
}

// [DERIVED] diagonal(2): φ(x) = span{(x, 0, 1, 0), (0, x, 0, 1)}.
#[test]
fn diagonal_boundary_map() {
    let h = octagon_hyperbolization::<f64>(&tol());
    let rep = MaximalRep::compose(&h, &Embedding::diagonal(2), &tol()).unwrap();
    let phi = boundary_map(&rep, &tol()).unwrap();
    let x = 0.37;
    let expected = DMatrix::from_row_slice(4, 2, &[x, 0.0, 0.0, x, 1.0, 0.0, 0.0, 1.0]);
    let l = Lagrangian::new(&expected, &tol()).unwrap();
    assert!(phi.at(BoundaryPoint::Finite(x)).unwrap().distance(&l) < 1e-12);
    let a1 = parse_word(2, "a1").unwrap();
    let plus = phi.fixed_lagrangians(&a1).unwrap().1;
    let spectral = attracting_lagrangian(&rep.evaluate(&a1).unwrap(), &tol()).unwrap();
    assert!(plus.distance(&spectral) < 1e-7);
}

// [DERIVED] for symplectic g, d_Sp(J₀, g J₀ g⁻¹) = 2 log σmax(g); for
// g = diag(e^a, e^b, e^-a, e^-b) that is 2 max(|a|, |b|).
#[test]
fn displacement_of_a_diagonal_element() {
    let (a, b) = (0.8f64, -0.3f64);
    let g = DMatrix::from_diagonal(&DVector::from_vec(vec![a.exp(), b.exp(), (-a).exp(), (-b).exp()]));
    let g = SymplecticMatrix::new(g, &tol()).unwrap();
    let j0 = CompatibleJ::<f64>::base(2);
    let moved = maxrep::symplectic::push_j(&g, &j0, &tol()).unwrap();
    assert!((d_sp(&j0, &moved).unwrap() - 2.0 * a.abs().max(b.abs())).abs() < 1e-12);
}

// [DERIVED] with A = e^{ℓ/2} I the restricted displacement at Z = I and the
// determinant bound are both ℓ; for the irreducible image the spectral
// radius of the expanding block, e^{3ℓ/2}, forces 3ℓ.
#[test]
fn translation_lengths_of_compositions() {
    let h = octagon_hyperbolization::<f64>(&tol());
    let diag = MaximalRep::compose(&h, &Embedding::diagonal(2), &tol()).unwrap();
    let irr = MaximalRep::compose(&h, &Embedding::irreducible(2), &tol()).unwrap();
    let opts = LengthOptions::default();
    for text in ["a1", "b1,b2", "a1,b1,-a2", "b2,b2,a1,-b1"] {
        let w = parse_word(2, text).unwrap();
        let ell = h.translation_length(&w, &tol()).unwrap();
        let d = translation_length_sp(&diag, &w, &tol(), &opts).unwrap();
        assert!((d.value - ell).abs() < 1e-6, "{text}");
        let i = translation_length_sp(&irr, &w, &tol(), &opts).unwrap();
        assert!((i.value - 3.0 * ell).abs() < 1e-6, "{text}: {} vs {}", i.value, 3.0 * ell);
        assert!(i.value >= 2.0 * ell - 1e-6);
    }
}

// [DERIVED] translation length of a semisimple isometry is homogeneous:
// tr(γ^k) = k tr(γ).
#[test]
fn translation_length_is_homogeneous_in_powers() {
    let h = octagon_hyperbolization::<f64>(&tol());
    let opts = LengthOptions::default();
    for e in [Embedding::diagonal(2), Embedding::irreducible(2)] {
        let rep = MaximalRep::compose(&h, &e, &tol()).unwrap();
        for text in ["a1", "b1,-a2"] {
            let w = parse_word(2, text).unwrap();
            let one = translation_length_sp(&rep, &w, &tol(), &opts).unwrap().value;
            for k in 2..=4 {
                let many = translation_length_sp(&rep, &w.pow(k), &tol(), &opts).unwrap().value;
                assert!((many - k as f64 * one).abs() < 1e-6 * k as f64 * one, "{text}^{k}: {many} vs {}", k as f64 * one);
            }
        }
    }
}
