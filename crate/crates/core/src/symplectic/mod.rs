//! The symplectic group, its symmetric space of compatible complex structures
//! with the operator-norm distance, Lagrangians, and the parallel-set model
//! of positive definite forms with its causal structure.
//!
//! Conventions: `Ω = [[0, I], [-I, 0]]`, `<x, y> = xᵀ Ω y`, and the form of a
//! complex structure is `Q_J = Ω J`, which must be symmetric positive
//! definite. The base point is `J₀ = -Ω` (so `Q_{J₀} = I`).

mod lagrangian;
mod siegel;

pub use lagrangian::{graph_map, is_lagrangian, is_maximal_triple, transverse, triple_j, Frame, Lagrangian};
pub use siegel::{
    causal_length, check_causal_bound, d_proof, d_y, gl_embed, in_cone, relative_spectrum, y_embed, y_project,
    CausalCurve, CausalLength, CausalMetric, CausalReport, PosDefForm, CAUSAL_DEPTH,
};

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use thiserror::Error;

use crate::linalg::{asymmetry, complex_det, max_abs, omega, polar, sym_eigenvalues, symmetrize};
use crate::scalar::{lit, to_f64, Real};
use crate::tolerances::Tolerances;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymplecticError {
    #[error("matrix of size {0}x{1} is not square of even dimension")]
    OddDimension(usize, usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("matrix is not symplectic (residual {0:e})")]
    NotSymplectic(f64),
    #[error("not a compatible complex structure: {0}")]
    NotCompatible(String),
    #[error("form is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("form is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("basis is rank deficient (smallest singular value {0:e})")]
    RankDeficient(f64),
    #[error("subspace is not isotropic (residual {0:e})")]
    NotIsotropic(f64),
    #[error("subspaces are not transverse (smallest singular value {0:e})")]
    NotTransverse(f64),
    #[error("complex structure does not exchange the frame Lagrangians (block mass {0:e})")]
    NotInParallelSet(f64),
    #[error("samples {0} and {1} violate the cone order")]
    NonCausal(usize, usize),
    #[error("curve needs at least two samples")]
    ShortCurve,
    #[error("polar decomposition failed")]
    PolarFailed,
}

fn half_dim(rows: usize, cols: usize) -> Result<usize, SymplecticError> {
    if rows != cols || !rows.is_multiple_of(2) || rows == 0 {
        return Err(SymplecticError::OddDimension(rows, cols));
    }
    Ok(rows / 2)
}

/// `(R^{2n}, Ω)` with the standard form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SymplecticSpace {
    pub n: usize,
}

impl SymplecticSpace {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "half-dimension must be positive");
        Self { n }
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn omega<T: Real>(&self) -> DMatrix<T> {
        omega(self.n)
    }

    /// `<x, y> = xᵀ Ω y` on column blocks.
    pub fn pairing<T: Real>(&self, x: &DMatrix<T>, y: &DMatrix<T>) -> DMatrix<T> {
        x.transpose() * self.omega::<T>() * y
    }
}

/// `||Mᵀ Ω M - Ω||` entrywise.
pub fn symplectic_residual<T: Real>(m: &DMatrix<T>) -> Result<T, SymplecticError> {
    let n = half_dim(m.nrows(), m.ncols())?;
    let w = omega::<T>(n);
    Ok(max_abs(&(m.transpose() * &w * m - &w)))
}

pub fn is_symplectic<T: Real>(m: &DMatrix<T>, tol: f64) -> Result<bool, SymplecticError> {
    Ok(to_f64(symplectic_residual(m)?) <= tol)
}

/// An element of `Sp(2n, R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix<T: Real> {
    g: DMatrix<T>,
}

impl<T: Real> SymplecticMatrix<T> {
    /// Validates with the absolute tolerance `tol.symplectic`.
    pub fn new(g: DMatrix<T>, tol: &Tolerances) -> Result<Self, SymplecticError> {
        let res = to_f64(symplectic_residual(&g)?);
        if res > tol.symplectic {
            return Err(SymplecticError::NotSymplectic(res));
        }
        Ok(Self { g })
    }

    /// Validates relative to the size of `g`: the residual of a product of
    /// many symplectic matrices grows with `||g||^2` even in exact-ish
    /// arithmetic, so long words are checked against `tol * max(1, ||g||^2)`.
    pub fn new_relative(g: DMatrix<T>, tol: &Tolerances) -> Result<Self, SymplecticError> {
        let res = to_f64(symplectic_residual(&g)?);
        let scale = to_f64(max_abs(&g)).powi(2).max(1.0);
        if res > tol.symplectic * scale {
            return Err(SymplecticError::NotSymplectic(res));
        }
        Ok(Self { g })
    }

    pub(crate) fn from_trusted(g: DMatrix<T>) -> Self {
        Self { g }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            g: DMatrix::identity(2 * n, 2 * n),
        }
    }

    pub fn n(&self) -> usize {
        self.g.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.g
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.g
    }

    /// `g⁻¹ = -Ω gᵀ Ω`, exact for symplectic `g`.
    pub fn inverse(&self) -> Self {
        let w = omega::<T>(self.n());
        Self {
            g: -(&w * self.g.transpose() * &w),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self { g: &self.g * &other.g }
    }

    pub fn residual(&self) -> T {
        symplectic_residual(&self.g).expect("validated dimension")
    }
}

/// A complex structure `J` compatible with `Ω`: `J² = -I` and `Ω J`
/// symmetric positive definite. These are the points of the symmetric space
/// of `Sp(2n, R)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatibleJ<T: Real> {
    j: DMatrix<T>,
}

impl<T: Real> CompatibleJ<T> {
    pub fn new(j: DMatrix<T>, tol: &Tolerances) -> Result<Self, SymplecticError> {
        let n = half_dim(j.nrows(), j.ncols())?;
        let id = DMatrix::<T>::identity(2 * n, 2 * n);
        let scale = max_abs(&j).max(T::one());
        let sq = to_f64(max_abs(&(&j * &j + &id)) / scale);
        if sq > tol.compatible_j {
            return Err(SymplecticError::NotCompatible(format!("||J^2 + I|| = {sq:e}")));
        }
        let q = omega::<T>(n) * &j;
        let asym = to_f64(asymmetry(&q) / scale);
        if asym > tol.compatible_j {
            return Err(SymplecticError::NotCompatible(format!("Omega J asymmetric by {asym:e}")));
        }
        let min = to_f64(sym_eigenvalues(&q)[0]);
        if min <= tol.positive_definite {
            return Err(SymplecticError::NotPositiveDefinite(min));
        }
        Ok(Self { j })
    }

    /// `J₀ = -Ω`, the structure with `Q = I`.
    pub fn base(n: usize) -> Self {
        Self { j: -omega::<T>(n) }
    }

    pub fn n(&self) -> usize {
        self.j.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.j
    }

    /// `Q_J = Ω J`, symmetrized.
    pub fn form(&self) -> DMatrix<T> {
        symmetrize(&(omega::<T>(self.n()) * &self.j))
    }

    /// Structure with form `Q`: `J = -Ω Q`.
    pub fn from_form(q: &DMatrix<T>, tol: &Tolerances) -> Result<Self, SymplecticError> {
        let n = half_dim(q.nrows(), q.ncols())?;
        Self::new(-(omega::<T>(n) * q), tol)
    }
}

/// `g(J) = g⁻¹ J g`. This is a right action: `act(gh, J) = act(h, act(g, J))`.
pub fn act_on_j<T: Real>(
    g: &SymplecticMatrix<T>,
    j: &CompatibleJ<T>,
    tol: &Tolerances,
) -> Result<CompatibleJ<T>, SymplecticError> {
    check_same(g.n(), j.n())?;
    CompatibleJ::new(g.inverse().matrix() * j.matrix() * g.matrix(), tol)
}

/// Left action `g · J = g J g⁻¹`, the convention under which the complex
/// structures built from a boundary map are equivariant.
pub fn push_j<T: Real>(
    g: &SymplecticMatrix<T>,
    j: &CompatibleJ<T>,
    tol: &Tolerances,
) -> Result<CompatibleJ<T>, SymplecticError> {
    act_on_j(&g.inverse(), j, tol)
}

fn check_same(a: usize, b: usize) -> Result<(), SymplecticError> {
    if a != b {
        return Err(SymplecticError::DimensionMismatch(a, b));
    }
    Ok(())
}

/// Eigenvalues of `Q₁⁻¹ Q₂` for symmetric positive definite `Q₁, Q₂`,
/// ascending. Computed as the spectrum of `L⁻¹ Q₂ L⁻ᵀ` with `Q₁ = L Lᵀ`.
pub fn generalized_spectrum<T: Real>(q1: &DMatrix<T>, q2: &DMatrix<T>) -> Vec<T> {
    let l = q1
        .clone()
        .cholesky()
        .expect("positive definite form")
        .l();
    let linv = l.clone().try_inverse().expect("invertible Cholesky factor");
    let m = &linv * q2 * linv.transpose();
    sym_eigenvalues(&m).iter().copied().collect()
}

/// `d_Sp(J₁, J₂) = |log ||Id||_{J₁,J₂}| + |log ||Id||_{J₂,J₁}|` where the
/// operator norms are `√λmax` and `1/√λmin` for the spectrum of `Q₁⁻¹ Q₂`.
pub fn d_sp<T: Real>(j1: &CompatibleJ<T>, j2: &CompatibleJ<T>) -> Result<T, SymplecticError> {
    check_same(j1.n(), j2.n())?;
    let spec = generalized_spectrum(&j1.form(), &j2.form());
    let half = lit::<T>(0.5);
    let lmin = spec[0];
    let lmax = spec[spec.len() - 1];
    Ok((half * lmax.ln()).abs() + (half * lmin.ln()).abs())
}

/// Orthogonal factor `U` of the polar decomposition `g = U P` and the
/// determinant of `U = [[X, -Y], [Y, X]]` as the unitary `X + iY`.
pub fn unitary_part<T: Real>(g: &SymplecticMatrix<T>) -> Result<(DMatrix<T>, Complex<T>), SymplecticError> {
    let (u, _) = polar(g.matrix()).ok_or(SymplecticError::PolarFailed)?;
    let det = det_c(&u);
    Ok((u, det))
}

/// `det(X + iY)` for an orthogonal-symplectic `U = [[X, -Y], [Y, X]]`. The
/// blocks are averaged, so small departures from the structure are
/// projected away.
pub fn det_c<T: Real>(u: &DMatrix<T>) -> Complex<T> {
    let n = u.nrows() / 2;
    let half = lit::<T>(0.5);
    let x = (u.view((0, 0), (n, n)) + u.view((n, n), (n, n))) * half;
    let y = (u.view((n, 0), (n, n)) - u.view((0, n), (n, n))) * half;
    complex_det(&x, &y)
}

/// Random symplectic matrices for sampling: products of a block
/// `diag(A, A⁻ᵀ)` and two shears with symmetric entries of size `scale`.
pub fn random_symplectic<T: Real, R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> SymplecticMatrix<T> {
    let mut sym = || {
        let s = DMatrix::<f64>::from_fn(n, n, |_, _| rng.random_range(-scale..scale));
        symmetrize(&s)
    };
    let s1 = sym();
    let s2 = sym();
    let a = DMatrix::<f64>::identity(n, n) + sym();
    let a = if a.determinant().abs() < 1e-3 {
        DMatrix::identity(n, n)
    } else {
        a
    };
    let a_inv_t = a.clone().try_inverse().expect("checked determinant").transpose();
    let mut diag = DMatrix::<f64>::zeros(2 * n, 2 * n);
    diag.view_mut((0, 0), (n, n)).copy_from(&a);
    diag.view_mut((n, n), (n, n)).copy_from(&a_inv_t);
    let shear = |s: &DMatrix<f64>, upper: bool| {
        let mut m = DMatrix::<f64>::identity(2 * n, 2 * n);
        if upper {
            m.view_mut((0, n), (n, n)).copy_from(s);
        } else {
            m.view_mut((n, 0), (n, n)).copy_from(s);
        }
        m
    };
    let g = shear(&s1, true) * diag * shear(&s2, false);
    SymplecticMatrix::from_trusted(g.map(lit::<T>))
}

/// Random compatible complex structure `g · J₀`.
pub fn random_compatible_j<T: Real, R: Rng + ?Sized>(n: usize, scale: f64, rng: &mut R) -> CompatibleJ<T> {
    // g J₀ g⁻¹ has form g⁻ᵀ g⁻¹
    let ginv = random_symplectic::<T, _>(n, scale, rng).inverse().into_matrix();
    let q = symmetrize(&(ginv.transpose() * &ginv));
    CompatibleJ { j: -(omega::<T>(n) * q) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn symplectic_examples() {
        let id = DMatrix::<f64>::identity(2, 2);
        assert!(is_symplectic(&id, 1e-9).unwrap());
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 0.5]));
        assert!(is_symplectic(&d, 1e-9).unwrap());
        let d2 = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 2.0]));
        assert!(!is_symplectic(&d2, 1e-9).unwrap());
        assert!(is_symplectic(&DMatrix::<f64>::identity(3, 3), 1e-9).is_err());
    }

    #[test]
    fn base_point_has_identity_form() {
        let j = CompatibleJ::<f64>::base(3);
        assert_eq!(j.form(), DMatrix::identity(6, 6));
        assert!(CompatibleJ::new(j.matrix().clone(), &tol()).is_ok());
        // Ω itself squares to -I but has form -I
        assert!(matches!(
            CompatibleJ::new(omega::<f64>(2), &tol()),
            Err(SymplecticError::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn action_law_is_right_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = random_symplectic::<f64, _>(2, 0.5, &mut rng);
        let h = random_symplectic::<f64, _>(2, 0.5, &mut rng);
        let j = random_compatible_j::<f64, _>(2, 0.5, &mut rng);
        let lhs = act_on_j(&g.mul(&h), &j, &tol()).unwrap();
        let rhs = act_on_j(&h, &act_on_j(&g, &j, &tol()).unwrap(), &tol()).unwrap();
        assert!(max_abs(&(lhs.matrix() - rhs.matrix())) < 1e-9);
    }

    #[test]
    fn d_sp_on_block_forms() {
        // Q = diag(Z, Z⁻¹) with Z = diag(e⁴, e²)
        let e = std::f64::consts::E;
        let q = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![e.powi(4), e * e, e.powi(-4), e.powi(-2)]));
        let j = CompatibleJ::from_form(&q, &tol()).unwrap();
        let d = d_sp(&CompatibleJ::base(2), &j).unwrap();
        assert!((d - 4.0).abs() < 1e-12, "{d}");
        assert!(d_sp(&j, &j).unwrap() < 1e-12);
    }

    #[test]
    fn rotation_has_unit_phase() {
        let th = 0.7f64;
        let r = DMatrix::from_row_slice(2, 2, &[th.cos(), -th.sin(), th.sin(), th.cos()]);
        let g = SymplecticMatrix::new(r.clone(), &tol()).unwrap();
        let (u, det) = unitary_part(&g).unwrap();
        assert!(max_abs(&(u - r)) < 1e-12);
        assert!((det - Complex::new(th.cos(), th.sin())).norm() < 1e-12);
    }

    #[test]
    fn positive_diagonal_has_trivial_unitary_part() {
        let e = std::f64::consts::E;
        let g = SymplecticMatrix::new(DMatrix::from_row_slice(2, 2, &[e, 0.0, 0.0, 1.0 / e]), &tol()).unwrap();
        let (u, det) = unitary_part(&g).unwrap();
        assert!(max_abs(&(u - DMatrix::identity(2, 2))) < 1e-12);
        assert!((det - Complex::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn inverse_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_symplectic::<f64, _>(3, 0.8, &mut rng);
        let prod = g.mul(&g.inverse());
        assert!(max_abs(&(prod.matrix() - DMatrix::identity(6, 6))) < 1e-10);
        assert!(g.residual() < 1e-10);
    }
}
