//! Attracting Lagrangians, the equivariant boundary map and the complex
//! structures `J(u)` it produces.

use nalgebra::DMatrix;

use super::{Embedding, MaximalRep, RepError};
use crate::hyperbolic::{fixed_points, BoundaryPoint, Hyperbolization, Mat2, TangentTriple};
use crate::scalar::{to_f64, Real};
use crate::surface_group::Word;
use crate::symplectic::{is_maximal_triple, CompatibleJ, Frame, Lagrangian, SymplecticMatrix};
use crate::linalg::{complex_spectrum, dominant_subspace, max_abs};

const ISOTROPY_SLACK_CAP: f64 = 1e-5;
use crate::tolerances::Tolerances;

/// Fails when some eigenvalue of `m` has modulus in `[1 - p, 1 + p]`.
pub fn check_proximal<T: Real>(m: &SymplecticMatrix<T>, tol: &Tolerances) -> Result<(), RepError> {
    for z in complex_spectrum(m.matrix()) {
        let modulus = to_f64(z.norm_sqr().sqrt());
        if (modulus - 1.0).abs() <= tol.proximal {
            return Err(RepError::NotProximal { modulus });
        }
    }
    Ok(())
}

/// Span of the generalized eigenvectors of `m` with `|λ| > 1`.
pub fn attracting_lagrangian<T: Real>(m: &SymplecticMatrix<T>, tol: &Tolerances) -> Result<Lagrangian<T>, RepError> {
    check_proximal(m, tol)?;
    let basis = dominant_subspace(m.matrix(), m.n()).ok_or(RepError::NotProximal { modulus: 1.0 })?;
    // eigenspaces are only as accurate as ε·cond(m), and cond(m) = ‖m‖²
    let scale = to_f64(max_abs(m.matrix())).max(1.0);
    let slack = (tol.isotropy * scale * scale).min(ISOTROPY_SLACK_CAP);
    Ok(Lagrangian::nearest(&basis, slack, tol)?)
}

/// Attracting Lagrangian of `m⁻¹`.
pub fn repelling_lagrangian<T: Real>(m: &SymplecticMatrix<T>, tol: &Tolerances) -> Result<Lagrangian<T>, RepError> {
    attracting_lagrangian(&m.inverse(), tol)
}

/// `φ = C ∘ ê ∘ φ_Fuchs` for a representation `C (e ∘ h) C⁻¹`.
#[derive(Debug, Clone)]
pub struct BoundaryMap<T: Real> {
    embedding: Embedding<T>,
    conjugator: DMatrix<T>,
    base: Hyperbolization<T>,
    tol: Tolerances,
}

pub fn boundary_map<T: Real>(rep: &MaximalRep<T>, tol: &Tolerances) -> Result<BoundaryMap<T>, RepError> {
    match (rep.embedding(), rep.base_hyperbolization()) {
        (Some(e), Some(h)) => Ok(BoundaryMap {
            embedding: e.clone(),
            conjugator: rep.conjugator().clone(),
            base: h.clone(),
            tol: tol.clone(),
        }),
        _ => Err(RepError::Unsupported(rep.construction().as_str())),
    }
}

impl<T: Real> BoundaryMap<T> {
    pub fn n(&self) -> usize {
        self.embedding.n()
    }

    pub fn base(&self) -> &Hyperbolization<T> {
        &self.base
    }

    pub fn at(&self, x: BoundaryPoint<T>) -> Result<Lagrangian<T>, RepError> {
        let b = &self.conjugator * self.embedding.boundary_basis(x);
        Ok(Lagrangian::new(&b, &self.tol)?)
    }

    /// `C e(m) C⁻¹`: the symplectic matrix with `φ(m x) = lift(m) φ(x)` for
    /// every `m ∈ SL(2,R)`, not only for elements of the surface group.
    pub fn lift(&self, m: &Mat2<T>) -> SymplecticMatrix<T> {
        let c = SymplecticMatrix::from_trusted(self.conjugator.clone());
        let e = SymplecticMatrix::from_trusted(self.embedding.apply(m));
        c.mul(&e).mul(&c.inverse())
    }

    /// `(φ(γ⁻), φ(γ⁺))` for the fixed points of `h(γ)`.
    pub fn fixed_lagrangians(&self, w: &Word) -> Result<(Lagrangian<T>, Lagrangian<T>), RepError> {
        let m = self.base.evaluate(w)?;
        let (minus, plus) = fixed_points(&m, &self.tol)?;
        Ok((self.at(minus)?, self.at(plus)?))
    }

    /// Frame `(φ(γ⁻), φ(γ⁺))` with orthonormal bases.
    pub fn axis_frame(&self, w: &Word) -> Result<Frame<T>, RepError> {
        let (minus, plus) = self.fixed_lagrangians(w)?;
        Ok(Frame::new(&minus, &plus, &self.tol)?)
    }
}

/// `J(u)`: the complex structure of the triple `(φ(u₋), φ(u₀), φ(u₊))`.
pub fn j_of_u<T: Real>(phi: &BoundaryMap<T>, u: &TangentTriple<T>, tol: &Tolerances) -> Result<CompatibleJ<T>, RepError> {
    let minus = phi.at(u.minus)?;
    let zero = phi.at(u.zero)?;
    let plus = phi.at(u.plus)?;
    let (maximal, signature) = is_maximal_triple(&minus, &zero, &plus, tol)?;
    if !maximal {
        return Err(RepError::NonMaximalTriple { signature });
    }
    let frame = Frame::new(&minus, &plus, tol)?;
    Ok(CompatibleJ::new(frame.triple_j(&zero, tol)?, tol)?)
}
