use maxrep::hyperbolic::{axis_tangent_triple, inv_sl2};
use maxrep::max_reps::j_of_u;
use maxrep::surface_group::Word;
use maxrep::linalg::{jacobi_singular_values, max_abs};
use maxrep::symplectic::y_project;
use maxrep::{BoundaryMap, CompatibleJ, Frame, Mat2, PosDefForm, SymplecticMatrix, TangentTriple, Tolerances};
use nalgebra::DMatrix;

use crate::LabError;

/// One word `γ` moved into good position: `η` sends the foot of the axis
/// tangent triple `u` of `h(γ)` to `i`, and everything is computed for
/// `v = η u` and `lift(η) ρ(γ) lift(η)⁻¹`. Since `φ(ηx) = lift(η) φ(x)`,
/// all distances, spectra and cone relations equal those of `(u, ρ(γ))`.
#[derive(Debug, Clone)]
pub struct CentredCase {
    pub word: Word,
    /// `tr_h(γ)`, which is also `d(p, γp)` for the foot `p` of `u`.
    pub ell: f64,
    pub recentring: Mat2,
    pub triple: TangentTriple,
    /// `lift(η) ρ(γ) lift(η)⁻¹`.
    pub rho: SymplecticMatrix,
    /// `(φ(γ⁻), φ(γ⁺))` after recentring.
    pub frame: Frame,
    /// `J(v)`.
    pub j: CompatibleJ,
    /// `J(v)` in the y-model of the frame.
    pub z0: PosDefForm,
    /// `ρ(γ) J(v) = y(Bᵀ z0 B)`.
    pub z1: PosDefForm,
    /// `B` with `ρ(γ)·y(Z) = y(Bᵀ Z B)`.
    pub action: DMatrix<f64>,
    /// `B⁻¹`, the block of `ρ(γ)` on the repelling Lagrangian.
    pub contraction: DMatrix<f64>,
    /// Relative distance between `z1` and the y-model of `ρ(γ) J ρ(γ)⁻¹`
    /// computed directly.
    pub action_residual: f64,
}

pub fn centred_case(phi: &BoundaryMap, w: &Word, tol: &Tolerances) -> Result<CentredCase, LabError> {
    let h = phi.base();
    let m = h.evaluate(w)?;
    let ell = h.translation_length(w, tol)?;
    let u = axis_tangent_triple(&m, tol)?;
    let eta = u.recentering();
    let v = u.map(&eta);
    let rho = phi.lift(&(eta * m * inv_sl2(&eta)));
    let frame = Frame::new(&phi.at(v.minus)?, &phi.at(v.plus)?, tol)?;
    let j = j_of_u(phi, &v, tol)?;
    let z0 = y_project(&j, &frame, tol)?;

    let n = frame.n();
    let block = frame.to_frame(rho.matrix()).view((0, 0), (n, n)).into_owned();
    let action = block
        .clone()
        .try_inverse()
        .ok_or_else(|| LabError::NotHyperbolic(w.to_string()))?;
    let z1 = z0.congruence(&action);
    // ρ(γ) J ρ(γ)⁻¹ has entries of size e^{tr_ρ}, and `J² + I` only vanishes
    // to ε times that; compare it with the restricted action without
    // asking for a certified complex structure.
    let pushed = frame.to_frame(&(rho.matrix() * j.matrix() * rho.inverse().matrix()));
    let direct = frame.pairing() * pushed.view((n, 0), (n, n));
    let action_residual = max_abs(&(direct - z1.matrix())) / max_abs(z1.matrix()).max(1.0);
    Ok(CentredCase {
        word: w.clone(),
        ell,
        recentring: eta,
        triple: v,
        rho,
        frame,
        j,
        z0,
        z1,
        action,
        contraction: block,
        action_residual,
    })
}

impl CentredCase {
    /// `d_Sp(J(u), ρ(γ) J(u))`.
    pub fn displacement(&self) -> f64 {
        congruence_distance(&self.z0, &self.action, &self.contraction)
    }
}

/// `d_y(Z, Bᵀ Z B)` for `B` with inverse `B⁻¹`. With `Z = Rᵀ R` the
/// relative spectrum is that of `MᵀM`, `M = R B R⁻¹`, so the distance is
/// `2 log max(σmax(M), σmax(M⁻¹))`. Largest singular values stay accurate
/// where the spectrum of a strongly graded `Bᵀ Z B` cannot be resolved.
pub fn congruence_distance(z: &PosDefForm, b: &DMatrix<f64>, b_inv: &DMatrix<f64>) -> f64 {
    let r = z.matrix().clone().cholesky().expect("positive definite form").l().transpose();
    let r_inv = r.clone().try_inverse().expect("invertible Cholesky factor");
    let top = |m: &DMatrix<f64>| *jacobi_singular_values(&(&r * m * &r_inv)).last().expect("nonempty");
    2.0 * top(b).ln().max(top(b_inv).ln()).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use maxrep::hyperbolic::octagon_hyperbolization;
    use maxrep::max_reps::boundary_map;
    use maxrep::surface_group::parse_word;
    use maxrep::symplectic::d_y;
    use maxrep::{Embedding, MaximalRep};

    // diagonal: J(v) is n copies of the base point and the recentred element
    // n copies of diag(e^{ℓ/2}, e^{-ℓ/2}), so the displacement is ℓ.
    // irreducible: J(v) is not fixed by the image of SO(2), and only the
    // translation length 3ℓ bounds the displacement from below.
    #[test]
    fn displacement_along_the_axis() {
        let tol = Tolerances::default();
        let h = octagon_hyperbolization(&tol);
        for (e, exact) in [(Embedding::diagonal(2), true), (Embedding::irreducible(2), false)] {
            let rep = MaximalRep::compose(&h, &e, &tol).unwrap();
            let phi = boundary_map(&rep, &tol).unwrap();
            for text in ["a1", "a1,b2,-a2,b1,b1"] {
                let w = parse_word(2, text).unwrap();
                let c = centred_case(&phi, &w, &tol).unwrap();
                assert!(c.action_residual < 1e-6, "{text}: {:e}", c.action_residual);
                let d = c.displacement();
                if exact {
                    assert!((d - c.ell).abs() < 1e-9 * d, "{text}: {d} vs {}", c.ell);
                } else {
                    assert!(d >= 3.0 * c.ell - 1e-9 * d, "{text}: {d} vs {}", 3.0 * c.ell);
                }
                let p = c.triple.base_point();
                assert!(p.re.abs() < 1e-9 && (p.im - 1.0).abs() < 1e-9);
            }
        }
    }

    // [DERIVED] on a mildly graded pair the direct relative spectrum is exact
    // enough to serve as the oracle
    #[test]
    fn congruence_distance_matches_the_spectrum() {
        let tol = Tolerances::default();
        let z = PosDefForm::new(DMatrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]), &tol).unwrap();
        let b = DMatrix::from_row_slice(2, 2, &[1.5, 0.2, -0.4, 0.7]);
        let b_inv = b.clone().try_inverse().unwrap();
        let direct = d_y(&z, &z.congruence(&b));
        assert!((congruence_distance(&z, &b, &b_inv) - direct).abs() < 1e-12);
        assert_eq!(congruence_distance(&z, &DMatrix::identity(2, 2), &DMatrix::identity(2, 2)), 0.0);
    }
}
