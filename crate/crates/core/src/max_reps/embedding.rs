//! Homomorphisms `SL(2,R) -> Sp(2n,R)` that turn a hyperbolization into a
//! maximal representation, and the induced maps on boundary points.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::hyperbolic::{BoundaryPoint, Mat2};
use crate::scalar::{lit, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    Diagonal,
    Irreducible,
    User,
}

impl Construction {
    pub fn as_str(&self) -> &'static str {
        match self {
            Construction::Diagonal => "diagonal",
            Construction::Irreducible => "irreducible",
            Construction::User => "user",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "diagonal" => Some(Construction::Diagonal),
            "irreducible" => Some(Construction::Irreducible),
            "user" => Some(Construction::User),
            _ => None,
        }
    }
}

/// Either `n` copies of the standard representation in the symplectic planes
/// `(e_k, e_{n+k})`, or the irreducible representation on binary forms of
/// degree `2n - 1`, written in a symplectic basis of its invariant form.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding<T: Real> {
    kind: Construction,
    n: usize,
    /// Columns: the symplectic basis in monomial coordinates (irreducible
    /// only).
    basis: DMatrix<T>,
    basis_inv: DMatrix<T>,
}

fn binomial(d: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (d - i) as f64 / (i + 1) as f64)
}

fn poly_mul<T: Real>(p: &[T], q: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); p.len() + q.len() - 1];
    for (i, &a) in p.iter().enumerate() {
        for (j, &b) in q.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// Coefficients of `u^{d-k} w^k` in the monomials `X^{d-j} Y^j`, where the
/// linear forms are given by their `(X, Y)` coefficients.
fn monomial_product<T: Real>(u: [T; 2], w: [T; 2], d: usize, k: usize) -> Vec<T> {
    let mut p = vec![T::one()];
    for _ in 0..d - k {
        p = poly_mul(&p, &u);
    }
    for _ in 0..k {
        p = poly_mul(&p, &w);
    }
    p
}

/// The invariant pairing on degree-`d` forms (`d` odd):
/// `B(X^{d-k} Y^k, X^k Y^{d-k}) = (-1)^k / C(d, k)`, all other pairs zero.
pub fn binary_form_pairing<T: Real>(d: usize) -> DMatrix<T> {
    DMatrix::from_fn(d + 1, d + 1, |j, k| {
        if j + k == d {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            lit(sign / binomial(d, j))
        } else {
            T::zero()
        }
    })
}

impl<T: Real> Embedding<T> {
    pub fn diagonal(n: usize) -> Self {
        assert!(n > 0);
        Self {
            kind: Construction::Diagonal,
            n,
            basis: DMatrix::identity(2 * n, 2 * n),
            basis_inv: DMatrix::identity(2 * n, 2 * n),
        }
    }

    pub fn irreducible(n: usize) -> Self {
        assert!(n > 0);
        let d = 2 * n - 1;
        let pairing = binary_form_pairing::<f64>(d);
        // The invariant pairing is only defined up to sign. Taking (-1)^(n+1)
        // times it makes positive boundary triples maximal (rather than
        // anti-maximal) and the Toledo invariant +n(2g-2), as for the
        // diagonal embedding.
        let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
        // f_i = e_i / sqrt|β_i| and f_{n+i} = sign(β_i) e_{d-i} / sqrt|β_i|
        // give <f_i, f_{n+i}> = 1
        let mut basis = DMatrix::<f64>::zeros(2 * n, 2 * n);
        for i in 0..n {
            let beta = sign * pairing[(i, d - i)];
            let s = 1.0 / beta.abs().sqrt();
            basis[(i, i)] = s;
            basis[(d - i, n + i)] = beta.signum() * s;
        }
        let basis_inv = basis.clone().try_inverse().expect("diagonal-like basis change");
        Self {
            kind: Construction::Irreducible,
            n,
            basis: basis.map(lit),
            basis_inv: basis_inv.map(lit),
        }
    }

    pub fn kind(&self) -> Construction {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Image of an SL(2,R) matrix.
    pub fn apply(&self, g: &Mat2<T>) -> DMatrix<T> {
        let n = self.n;
        match self.kind {
            Construction::Diagonal => {
                let mut m = DMatrix::zeros(2 * n, 2 * n);
                for k in 0..n {
                    m[(k, k)] = g[(0, 0)];
                    m[(k, n + k)] = g[(0, 1)];
                    m[(n + k, k)] = g[(1, 0)];
                    m[(n + k, n + k)] = g[(1, 1)];
                }
                m
            }
            Construction::Irreducible => {
                // (ρ(g) p)(X, Y) = p(aX + cY, bX + dY)
                let d = 2 * n - 1;
                let u = [g[(0, 0)], g[(1, 0)]];
                let w = [g[(0, 1)], g[(1, 1)]];
                let mut m = DMatrix::zeros(d + 1, d + 1);
                for k in 0..=d {
                    let col = monomial_product(u, w, d, k);
                    for (j, c) in col.into_iter().enumerate() {
                        m[(j, k)] = c;
                    }
                }
                &self.basis_inv * m * &self.basis
            }
            Construction::User => unreachable!("user representations have no embedding"),
        }
    }

    /// Basis of the Lagrangian attached to a boundary point: the line
    /// `(x, 1)` pushed through the embedding.
    pub fn boundary_basis(&self, x: BoundaryPoint<T>) -> DMatrix<T> {
        let n = self.n;
        let (o, z) = (T::one(), T::zero());
        match self.kind {
            Construction::Diagonal => {
                let mut b = DMatrix::zeros(2 * n, n);
                for k in 0..n {
                    match x {
                        BoundaryPoint::Finite(x) => {
                            b[(k, k)] = x;
                            b[(n + k, k)] = o;
                        }
                        BoundaryPoint::Infinity => b[(k, k)] = o,
                    }
                }
                b
            }
            Construction::Irreducible => {
                // forms divisible by ℓ^n, ℓ the linear form vanishing at x:
                // span{ℓ^{d-j} w^j : j < n}
                let d = 2 * n - 1;
                // w ⟂ ℓ and both of unit length, so the basis stays well
                // conditioned for large |x|
                let (l, w) = match x {
                    BoundaryPoint::Finite(x) => {
                        let r = (x * x + o).sqrt();
                        ([x / r, o / r], [-o / r, x / r])
                    }
                    BoundaryPoint::Infinity => ([o, z], [z, o]),
                };
                let mut b = DMatrix::zeros(d + 1, n);
                for j in 0..n {
                    for (i, c) in monomial_product(l, w, d, j).into_iter().enumerate() {
                        b[(i, j)] = c;
                    }
                }
                &self.basis_inv * b
            }
            Construction::User => unreachable!("user representations have no boundary map"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, omega};
    use crate::symplectic::{is_symplectic, Lagrangian};
    use crate::tolerances::Tolerances;

    fn random_sl2(seed: u64) -> Mat2<f64> {
        let a = 1.0 + (seed as f64 * 0.37).sin() * 0.5;
        let b = (seed as f64 * 1.3).cos();
        let c = (seed as f64 * 0.7).sin() * 0.8;
        Mat2::new(a, b, c, (1.0 + b * c) / a)
    }

    #[test]
    fn pairing_is_invariant() {
        // B(ρ_e(g) p, ρ_e(g) q) = B(p, q) in monomial coordinates
        for n in 1..=4 {
            let e = Embedding::<f64>::irreducible(n);
            let d = 2 * n - 1;
            let g = random_sl2(n as u64);
            let m = &e.basis * e.apply(&g) * &e.basis_inv;
            let b = binary_form_pairing::<f64>(d);
            assert!(max_abs(&(m.transpose() * &b * &m - &b)) < 1e-10, "n = {n}");
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            assert!(max_abs(&(e.basis.transpose() * &b * &e.basis * sign - omega::<f64>(n))) < 1e-12);
        }
    }

    #[test]
    fn embeddings_are_symplectic_homomorphisms() {
        for n in 1..=3 {
            for e in [Embedding::<f64>::diagonal(n), Embedding::irreducible(n)] {
                let (g, h) = (random_sl2(3), random_sl2(11));
                let lhs = e.apply(&(g * h));
                let rhs = e.apply(&g) * e.apply(&h);
                assert!(max_abs(&(lhs - rhs)) < 1e-8);
                assert!(is_symplectic(&e.apply(&g), 1e-9).unwrap());
            }
        }
    }

    #[test]
    fn n1_is_identity() {
        let g = random_sl2(5);
        for e in [Embedding::<f64>::diagonal(1), Embedding::irreducible(1)] {
            assert!(max_abs(&(e.apply(&g) - DMatrix::from_row_slice(2, 2, g.transpose().as_slice()))) < 1e-14);
        }
    }

    #[test]
    fn diagonal_of_hyperbolic() {
        let e = std::f64::consts::E;
        let m = Embedding::<f64>::diagonal(2).apply(&Mat2::new(e, 0.0, 0.0, 1.0 / e));
        let expected = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![e, e, 1.0 / e, 1.0 / e]));
        assert!(max_abs(&(m - expected)) < 1e-15);
    }

    #[test]
    fn irreducible_spectrum() {
        let t = 1.7f64;
        let m = Embedding::<f64>::irreducible(2).apply(&Mat2::new(t, 0.0, 0.0, 1.0 / t));
        let mut eig: Vec<f64> = (0..4).map(|i| m[(i, i)]).collect();
        eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let want = [t.powi(-3), 1.0 / t, t, t.powi(3)];
        for (a, b) in eig.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(max_abs(&(&m - DMatrix::from_diagonal(&m.diagonal()))) < 1e-15);
    }

    #[test]
    fn boundary_lagrangians() {
        let tol = Tolerances::default();
        for n in 1..=3 {
            for e in [Embedding::<f64>::diagonal(n), Embedding::irreducible(n)] {
                for x in [BoundaryPoint::Finite(0.3), BoundaryPoint::Finite(-2.0), BoundaryPoint::Infinity] {
                    assert!(Lagrangian::new(&e.boundary_basis(x), &tol).is_ok());
                }
            }
        }
        let d = Embedding::<f64>::diagonal(2).boundary_basis(BoundaryPoint::Finite(0.5));
        assert_eq!(d, DMatrix::from_row_slice(4, 2, &[0.5, 0.0, 0.0, 0.5, 1.0, 0.0, 0.0, 1.0]));
    }
}
