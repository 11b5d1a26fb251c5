//! Lagrangian subspaces, frames `L₋ ⊕ L₊`, graph maps and Lagrangian
//! triples.

use nalgebra::DMatrix;

use super::{half_dim, SymplecticError};
use crate::linalg::{max_abs, min_singular_value, omega, orthonormalize, singular_extremes, sym_eigenvalues, symmetrize};
use crate::scalar::{to_f64, Real};
use crate::tolerances::Tolerances;

/// An `n`-dimensional isotropic subspace of `R^{2n}`, stored by an
/// orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Lagrangian<T: Real> {
    basis: DMatrix<T>,
}

fn isotropy<T: Real>(b: &DMatrix<T>) -> T {
    max_abs(&(b.transpose() * omega::<T>(b.nrows() / 2) * b))
}

fn check_shape<T: Real>(b: &DMatrix<T>) -> Result<usize, SymplecticError> {
    let n = half_dim(b.nrows(), b.nrows())?;
    if b.ncols() != n {
        return Err(SymplecticError::DimensionMismatch(b.ncols(), n));
    }
    Ok(n)
}

/// Orthonormalizes after checking the rank.
fn checked_orthonormal<T: Real>(b: &DMatrix<T>, tol: &Tolerances) -> Result<DMatrix<T>, SymplecticError> {
    check_shape(b)?;
    let (smax, smin) = singular_extremes(b);
    let rel = to_f64(smin / smax.max(T::default_epsilon()));
    if rel <= tol.rank {
        return Err(SymplecticError::RankDeficient(rel));
    }
    Ok(orthonormalize(b))
}

/// Isotropy test for a full-rank `2n x n` basis; the residual is measured on
/// the orthonormalized basis so it does not depend on scaling.
pub fn is_lagrangian<T: Real>(b: &DMatrix<T>, tol: &Tolerances) -> Result<bool, SymplecticError> {
    let q = checked_orthonormal(b, tol)?;
    Ok(to_f64(isotropy(&q)) <= tol.isotropy)
}

impl<T: Real> Lagrangian<T> {
    pub fn new(basis: &DMatrix<T>, tol: &Tolerances) -> Result<Self, SymplecticError> {
        let q = checked_orthonormal(basis, tol)?;
        let res = to_f64(isotropy(&q));
        if res > tol.isotropy {
            return Err(SymplecticError::NotIsotropic(res));
        }
        Ok(Self { basis: q })
    }

    /// `span(e₁, ..., e_n)`.
    /// Like [`Lagrangian::new`], but a basis whose isotropy residual lies
    /// between the tolerance and `slack` is snapped to the nearest
    /// Lagrangian: writing the orthonormal basis as `X + iY`, that is the
    /// unitary polar factor. Used for subspaces computed from badly
    /// conditioned matrices, whose accuracy is limited by the conditioning.
    pub fn nearest(basis: &DMatrix<T>, slack: f64, tol: &Tolerances) -> Result<Self, SymplecticError> {
        let q = checked_orthonormal(basis, tol)?;
        let res = to_f64(isotropy(&q));
        if res <= tol.isotropy {
            return Ok(Self { basis: q });
        }
        if res > slack.max(tol.isotropy) {
            return Err(SymplecticError::NotIsotropic(res));
        }
        let n = q.ncols();
        let z = DMatrix::from_fn(n, n, |i, j| nalgebra::Complex::new(q[(i, j)], q[(n + i, j)]));
        let svd = z.svd(true, true);
        let (u, vt) = match (svd.u, svd.v_t) {
            (Some(u), Some(vt)) => (u, vt),
            _ => return Err(SymplecticError::NotIsotropic(res)),
        };
        let w = u * vt;
        let basis = DMatrix::from_fn(2 * n, n, |i, j| if i < n { w[(i, j)].re } else { w[(i - n, j)].im });
        Ok(Self { basis })
    }

    pub fn standard_minus(n: usize) -> Self {
        Self {
            basis: DMatrix::identity(2 * n, n),
        }
    }

    /// `span(e_{n+1}, ..., e_{2n})`.
    pub fn standard_plus(n: usize) -> Self {
        let mut b = DMatrix::zeros(2 * n, n);
        b.view_mut((n, 0), (n, n)).fill_with_identity();
        Self { basis: b }
    }

    /// Graph `{(x, S x)}` of a symmetric matrix over `span(e₁..e_n)`.
    pub fn graph(s: &DMatrix<T>, tol: &Tolerances) -> Result<Self, SymplecticError> {
        let n = s.nrows();
        let mut b = DMatrix::zeros(2 * n, n);
        b.view_mut((0, 0), (n, n)).fill_with_identity();
        b.view_mut((n, 0), (n, n)).copy_from(s);
        Self::new(&b, tol)
    }

    pub fn n(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &DMatrix<T> {
        &self.basis
    }

    pub fn isotropy_residual(&self) -> T {
        isotropy(&self.basis)
    }

    /// `g · L`. Symplectic maps preserve the Lagrangian property, so only the
    /// rank is rechecked.
    pub fn image(&self, g: &DMatrix<T>, tol: &Tolerances) -> Result<Self, SymplecticError> {
        Ok(Self {
            basis: checked_orthonormal(&(g * &self.basis), tol)?,
        })
    }

    /// Sine of the largest principal angle to `other`.
    pub fn distance(&self, other: &Self) -> T {
        let p = &self.basis;
        let resid = &other.basis - p * (p.transpose() * &other.basis);
        singular_extremes(&resid).0
    }

    pub fn approx_eq(&self, other: &Self, tol: &Tolerances) -> bool {
        to_f64(self.distance(other)) <= tol.lagrangian_equal
    }
}

/// `L₁ ∩ L₂ = 0`, decided by the smallest singular value of `[L₁ | L₂]`.
pub fn transverse<T: Real>(l1: &Lagrangian<T>, l2: &Lagrangian<T>, tol: &Tolerances) -> bool {
    to_f64(transversality(l1, l2)) > tol.transverse
}

fn transversality<T: Real>(l1: &Lagrangian<T>, l2: &Lagrangian<T>) -> T {
    let m = DMatrix::from_fn(2 * l1.n(), 2 * l1.n(), |i, j| {
        if j < l1.n() {
            l1.basis[(i, j)]
        } else {
            l2.basis[(i, j - l1.n())]
        }
    });
    min_singular_value(&m)
}

/// A splitting `R^{2n} = L₋ ⊕ L₊` with chosen bases `P` of `L₋` and `Q` of
/// `L₊`. Coordinates are taken with respect to `F = [P | Q]`;
/// `W = Pᵀ Ω Q` is the pairing between the two halves.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame<T: Real> {
    minus: Lagrangian<T>,
    plus: Lagrangian<T>,
    f: DMatrix<T>,
    f_inv: DMatrix<T>,
    w: DMatrix<T>,
    w_inv: DMatrix<T>,
}

impl<T: Real> Frame<T> {
    /// Frame with the orthonormal bases of the two Lagrangians.
    pub fn new(minus: &Lagrangian<T>, plus: &Lagrangian<T>, tol: &Tolerances) -> Result<Self, SymplecticError> {
        Self::from_bases(minus.basis(), plus.basis(), tol)
    }

    /// Frame with arbitrary full-rank bases `P`, `Q`.
    pub fn from_bases(p: &DMatrix<T>, q: &DMatrix<T>, tol: &Tolerances) -> Result<Self, SymplecticError> {
        let minus = Lagrangian::new(p, tol)?;
        let plus = Lagrangian::new(q, tol)?;
        if minus.n() != plus.n() {
            return Err(SymplecticError::DimensionMismatch(minus.n(), plus.n()));
        }
        let sigma = to_f64(transversality(&minus, &plus));
        if sigma <= tol.transverse {
            return Err(SymplecticError::NotTransverse(sigma));
        }
        let n = minus.n();
        let mut f = DMatrix::zeros(2 * n, 2 * n);
        f.view_mut((0, 0), (2 * n, n)).copy_from(p);
        f.view_mut((0, n), (2 * n, n)).copy_from(q);
        let f_inv = f.clone().try_inverse().ok_or(SymplecticError::NotTransverse(0.0))?;
        let w = p.transpose() * omega::<T>(n) * q;
        let w_inv = w.clone().try_inverse().ok_or(SymplecticError::NotTransverse(0.0))?;
        Ok(Self {
            minus,
            plus,
            f,
            f_inv,
            w,
            w_inv,
        })
    }

    pub fn standard(n: usize) -> Self {
        Self::from_bases(
            Lagrangian::standard_minus(n).basis(),
            Lagrangian::standard_plus(n).basis(),
            &Tolerances::default(),
        )
        .expect("standard frame")
    }

    pub fn n(&self) -> usize {
        self.w.nrows()
    }

    pub fn minus(&self) -> &Lagrangian<T> {
        &self.minus
    }

    pub fn plus(&self) -> &Lagrangian<T> {
        &self.plus
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.f
    }

    pub fn inverse_matrix(&self) -> &DMatrix<T> {
        &self.f_inv
    }

    pub fn pairing(&self) -> &DMatrix<T> {
        &self.w
    }

    pub(crate) fn pairing_inverse(&self) -> &DMatrix<T> {
        &self.w_inv
    }

    /// `F⁻¹ M F`.
    pub fn to_frame(&self, m: &DMatrix<T>) -> DMatrix<T> {
        &self.f_inv * m * &self.f
    }

    /// `F M F⁻¹`.
    pub fn from_frame(&self, m: &DMatrix<T>) -> DMatrix<T> {
        &self.f * m * &self.f_inv
    }

    /// `(T⁻, T⁺)` with `L₀ = {P x + Q T⁻ x} = {P T⁺ y + Q y}`.
    pub fn graph_map(&self, l0: &Lagrangian<T>, tol: &Tolerances) -> Result<(DMatrix<T>, DMatrix<T>), SymplecticError> {
        for other in [&self.minus, &self.plus] {
            let sigma = to_f64(transversality(l0, other));
            if sigma <= tol.transverse {
                return Err(SymplecticError::NotTransverse(sigma));
            }
        }
        let n = self.n();
        let c = &self.f_inv * l0.basis();
        let x = c.rows(0, n).into_owned();
        let y = c.rows(n, n).into_owned();
        let x_inv = x.clone().try_inverse().ok_or(SymplecticError::NotTransverse(0.0))?;
        let y_inv = y.clone().try_inverse().ok_or(SymplecticError::NotTransverse(0.0))?;
        Ok((&y * x_inv, &x * y_inv))
    }

    /// `J_{L₀} = F [[0, -T⁺], [T⁻, 0]] F⁻¹`: the complex structure that
    /// exchanges `L₋` and `L₊` and is determined by `L₀`.
    pub fn triple_j(&self, l0: &Lagrangian<T>, tol: &Tolerances) -> Result<DMatrix<T>, SymplecticError> {
        let (tm, tp) = self.graph_map(l0, tol)?;
        Ok(self.from_frame(&block_antidiag(&tm, &tp)))
    }
}

/// `[[0, -T⁺], [T⁻, 0]]`.
pub(crate) fn block_antidiag<T: Real>(tm: &DMatrix<T>, tp: &DMatrix<T>) -> DMatrix<T> {
    let n = tm.nrows();
    let mut b = DMatrix::zeros(2 * n, 2 * n);
    b.view_mut((0, n), (n, n)).copy_from(&(-tp));
    b.view_mut((n, 0), (n, n)).copy_from(tm);
    b
}

/// Graph maps of `L₀` with respect to the frame `(L₋, L₊)` with orthonormal
/// bases.
pub fn graph_map<T: Real>(
    minus: &Lagrangian<T>,
    plus: &Lagrangian<T>,
    l0: &Lagrangian<T>,
    tol: &Tolerances,
) -> Result<(DMatrix<T>, DMatrix<T>), SymplecticError> {
    Frame::new(minus, plus, tol)?.graph_map(l0, tol)
}

/// Complex-structure candidate of a pairwise transverse triple.
pub fn triple_j<T: Real>(
    minus: &Lagrangian<T>,
    l0: &Lagrangian<T>,
    plus: &Lagrangian<T>,
    tol: &Tolerances,
) -> Result<DMatrix<T>, SymplecticError> {
    Frame::new(minus, plus, tol)?.triple_j(l0, tol)
}

/// Maximality of a triple and the signature `p - q` of `<·, J_{L₀} ·>`;
/// the triple is maximal iff the signature is `2n`.
///
/// In the frame the form is congruent to `diag(W T⁻, Wᵀ T⁺)` and
/// `Wᵀ T⁺ = Wᵀ (W T⁻)⁻¹ W`, so the signature is twice that of the `n x n`
/// form `W T⁻`. Working with the small block avoids the squared
/// conditioning of the full form.
pub fn is_maximal_triple<T: Real>(
    minus: &Lagrangian<T>,
    l0: &Lagrangian<T>,
    plus: &Lagrangian<T>,
    tol: &Tolerances,
) -> Result<(bool, i64), SymplecticError> {
    let frame = Frame::new(minus, plus, tol)?;
    let (tm, _) = frame.graph_map(l0, tol)?;
    let z = symmetrize(&(frame.pairing() * tm));
    let eig = sym_eigenvalues(&z);
    let n = minus.n();
    let scale = eig.iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
    let thr = T::default_epsilon() * scale * T::from_usize(100 * n).unwrap_or(T::one());
    let pos = eig.iter().filter(|&&x| x > thr).count() as i64;
    let neg = eig.iter().filter(|&&x| x < -thr).count() as i64;
    let sig = 2 * (pos - neg);
    Ok((sig == 2 * n as i64, sig))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn lag(rows: &[f64], n: usize) -> Lagrangian<f64> {
        Lagrangian::new(&DMatrix::from_row_slice(2 * n, n, rows), &tol()).unwrap()
    }

    #[test]
    fn standard_pair_is_transverse() {
        let a = Lagrangian::<f64>::standard_minus(3);
        let b = Lagrangian::<f64>::standard_plus(3);
        assert!(is_lagrangian(a.basis(), &tol()).unwrap());
        assert!(transverse(&a, &b, &tol()));
        assert!(!transverse(&a, &a, &tol()));
    }

    #[test]
    fn non_isotropic_plane_rejected() {
        // span(e1, e3) in R^4 pairs e1 with e3
        let b = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        assert!(!is_lagrangian(&b, &tol()).unwrap());
        assert!(matches!(Lagrangian::new(&b, &tol()), Err(SymplecticError::NotIsotropic(_))));
        let flat = DMatrix::from_row_slice(4, 2, &[1.0, 2.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(is_lagrangian(&flat, &tol()), Err(SymplecticError::RankDeficient(_))));
    }

    #[test]
    fn graph_map_n1() {
        let (tm, tp) = graph_map(
            &Lagrangian::standard_minus(1),
            &Lagrangian::standard_plus(1),
            &lag(&[1.0, 1.0], 1),
            &tol(),
        )
        .unwrap();
        assert!((tm[(0, 0)] - 1.0).abs() < 1e-15);
        assert!((tp[(0, 0)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tilted_plus_has_large_graph_map() {
        let eps = 1e-4;
        let l0 = lag(&[eps, 1.0], 1);
        let (tm, _) = graph_map(&Lagrangian::standard_minus(1), &Lagrangian::standard_plus(1), &l0, &tol()).unwrap();
        assert!((tm[(0, 0)] - 1.0 / eps).abs() < 1e-6);
    }

    #[test]
    fn triples_n1() {
        let m = Lagrangian::standard_minus(1);
        let p = Lagrangian::standard_plus(1);
        assert_eq!(is_maximal_triple(&m, &lag(&[1.0, 1.0], 1), &p, &tol()).unwrap(), (true, 2));
        assert_eq!(is_maximal_triple(&m, &lag(&[1.0, -1.0], 1), &p, &tol()).unwrap(), (false, -2));
        assert!(is_maximal_triple(&m, &m, &p, &tol()).is_err());
    }

    #[test]
    fn mixed_graph_has_signature_zero() {
        let s = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let l0 = Lagrangian::graph(&s, &tol()).unwrap();
        let r = is_maximal_triple(&Lagrangian::standard_minus(2), &l0, &Lagrangian::standard_plus(2), &tol()).unwrap();
        assert_eq!(r, (false, 0));
    }

    #[test]
    fn distance_between_lines() {
        let a = lag(&[1.0, 0.0], 1);
        let b = lag(&[1.0, 1.0], 1);
        assert!((a.distance(&b) - 0.5f64.sqrt()).abs() < 1e-12);
        assert!(a.distance(&a) < 1e-15);
    }
}
