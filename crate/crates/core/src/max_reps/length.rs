//! Translation lengths `tr_ρ(γ) = inf_J d_Sp(J, ρ(γ)·J)`, minimized over the
//! parallel set of the attracting/repelling frame, and over the whole
//! symmetric space for cross-checks.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{attracting_lagrangian, check_proximal, repelling_lagrangian, MaximalRep, RepError};
use crate::hyperbolic::{axis_tangent_triple, inv_sl2, is_hyperbolic};
use crate::linalg::{jacobi_singular_values, max_abs, spd_log, sym_exp, symmetrize};
use crate::optimize::{nelder_mead, Minimum, NelderMeadOptions};
use crate::scalar::{lit, to_f64, Real};
use crate::surface_group::Word;
use crate::symplectic::{d_sp, push_j, CompatibleJ, Frame, SymplecticMatrix};
use crate::tolerances::Tolerances;

/// Slack allowed below the determinant lower bound before the minimizer is
/// declared broken.
pub const LOWER_BOUND_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct LengthOptions {
    /// Prescribed starts: the identity plus `starts - 1` random congruences.
    pub starts: usize,
    /// Extra start at the eigenbasis of the restricted action, when it is
    /// real and simple.
    pub spectral_start: bool,
    /// Restarts of the simplex from its own optimum.
    pub polish_rounds: usize,
    pub simplex: NelderMeadOptions,
    pub seed: u64,
}

impl Default for LengthOptions {
    fn default() -> Self {
        Self {
            starts: 20,
            spectral_start: true,
            polish_rounds: 4,
            simplex: NelderMeadOptions::default(),
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranslationLength {
    /// Best displacement found.
    pub value: f64,
    /// `(1/n) |log det(AᵀA)|`, a certified lower bound.
    pub lower_bound: f64,
    /// `max(2 log ρ(A⁻¹), 2 log ρ(A))`, also a lower bound.
    pub spectral_bound: f64,
    /// Displacement at the start `Z = I`.
    pub identity_value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

impl TranslationLength {
    fn zero() -> Self {
        Self {
            value: 0.0,
            lower_bound: 0.0,
            spectral_bound: 0.0,
            identity_value: 0.0,
            evaluations: 0,
            converged: true,
        }
    }

    /// Largest certified lower bound.
    pub fn best_bound(&self) -> f64 {
        self.lower_bound.max(self.spectral_bound)
    }
}

fn sym_from_params<T: Real>(x: &[T], n: usize) -> DMatrix<T> {
    let mut s = DMatrix::zeros(n, n);
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            s[(i, j)] = x[k];
            s[(j, i)] = x[k];
            k += 1;
        }
    }
    s
}

fn params_from_sym<T: Real>(s: &DMatrix<T>) -> Vec<T> {
    let n = s.nrows();
    let mut x = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            x.push(s[(i, j)]);
        }
    }
    x
}

/// `d_y(Z, Bᵀ Z B)` with `Z = exp(S)`: with `R = exp(S/2)` the relative
/// spectrum is the squared singular values of `R B R⁻¹`.
fn restricted_displacement<T: Real>(s: &DMatrix<T>, b: &DMatrix<T>) -> T {
    let half = lit::<T>(0.5);
    let r = sym_exp(&(s * half));
    let r_inv = sym_exp(&(s * -half));
    let c = &r * b * r_inv;
    let sv = jacobi_singular_values(&c);
    let two = lit::<T>(2.0);
    (two * sv[sv.len() - 1].ln()).max(-(two * sv[0].ln())).max(T::zero())
}

/// Expanding action `B` of `M` on `L₊`, written through the frame pairing
/// so that the form on `L₋` transforms by `Z ↦ Bᵀ Z B` up to inversion.
///
/// Only the expanding block is read off `F⁻¹ M F`: its entries are as large
/// as `M` itself, so the relative error stays at machine precision even for
/// long words, while the contracting block would be swamped.
fn restricted_action<T: Real>(m: &SymplecticMatrix<T>, tol: &Tolerances) -> Result<DMatrix<T>, RepError> {
    let n = m.n();
    let minus = repelling_lagrangian(m, tol)?;
    let plus = attracting_lagrangian(m, tol)?;
    let frame = Frame::new(&minus, &plus, tol)?;
    let mq = m.matrix() * plus.basis();
    let d = (frame.inverse_matrix() * mq).rows(n, n).into_owned();
    // AᵀWD = W, so A⁻¹ = W⁻ᵀ Dᵀ Wᵀ
    let w = frame.pairing();
    let w_inv_t = w
        .clone()
        .try_inverse()
        .ok_or(RepError::Minimizer("singular frame pairing".into()))?
        .transpose();
    Ok(w_inv_t * d.transpose() * w.transpose())
}

/// Eigenvector start `Z = V⁻ᵀ V⁻¹`, for which `d_y(Z, BᵀZB)` equals the
/// spectral bound. Skipped unless the spectrum is real and simple.
fn spectral_start<T: Real>(b: &DMatrix<T>) -> Option<DMatrix<T>> {
    let n = b.nrows();
    let eig = b.clone().complex_eigenvalues();
    let scale = to_f64(max_abs(b)).max(1.0);
    let mut reals = Vec::with_capacity(n);
    for z in eig.iter() {
        if to_f64(z.im).abs() > 1e-10 * scale {
            return None;
        }
        reals.push(z.re);
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let gap = to_f64((reals[i] - reals[j]).abs());
            if gap < 1e-8 * to_f64(reals[i].abs().max(reals[j].abs())) {
                return None;
            }
        }
    }
    let mut v = DMatrix::zeros(n, n);
    for (k, &lambda) in reals.iter().enumerate() {
        let shifted = b - DMatrix::identity(n, n) * lambda;
        let svd = shifted.svd(false, true);
        let vt = svd.v_t?;
        let mut idx = 0;
        for i in 1..n {
            if svd.singular_values[i] < svd.singular_values[idx] {
                idx = i;
            }
        }
        v.set_column(k, &vt.row(idx).transpose());
    }
    let v_inv = v.try_inverse()?;
    let z = symmetrize(&(v_inv.transpose() * &v_inv));
    let det = z.determinant();
    if det.partial_cmp(&T::zero()) != Some(std::cmp::Ordering::Greater) {
        return None;
    }
    // unit determinant keeps the log parameters of moderate size
    let z = z / det.powf(T::one() / lit::<T>(n as f64));
    Some(spd_log(&z))
}

fn polish<T: Real>(f: &impl Fn(&[T]) -> T, x0: &[T], opts: &LengthOptions) -> Minimum<T> {
    let mut best = nelder_mead(f, x0, &opts.simplex);
    let mut evaluations = best.evaluations;
    for _ in 0..opts.polish_rounds {
        let again = nelder_mead(f, &best.x, &opts.simplex);
        evaluations += again.evaluations;
        let gain = to_f64(best.value - again.value);
        if again.value < best.value {
            best = again;
        }
        if gain < opts.simplex.min_improvement {
            break;
        }
    }
    best.evaluations = evaluations;
    best
}

/// Translation length of a single symplectic matrix.
pub fn translation_length_matrix<T: Real>(
    m: &SymplecticMatrix<T>,
    tol: &Tolerances,
    opts: &LengthOptions,
) -> Result<TranslationLength, RepError> {
    let n = m.n();
    let id = DMatrix::<T>::identity(2 * n, 2 * n);
    if to_f64(max_abs(&(m.matrix() - &id))) <= tol.relator_rep {
        return Ok(TranslationLength::zero());
    }
    check_proximal(m, tol)?;
    let b = restricted_action(m, tol)?;

    let bb = b.transpose() * &b;
    let lower_bound = to_f64(bb.determinant()).ln().abs() / n as f64;
    let moduli: Vec<f64> = b
        .clone()
        .complex_eigenvalues()
        .iter()
        .map(|z| to_f64(z.norm_sqr().sqrt()))
        .collect();
    let rho = moduli.iter().cloned().fold(0.0, f64::max);
    let rho_min = moduli.iter().cloned().fold(f64::INFINITY, f64::min);
    let spectral_bound = (2.0 * rho.ln()).max(-2.0 * rho_min.ln()).max(0.0);

    let f = |x: &[T]| restricted_displacement(&sym_from_params(x, n), &b);
    let dim = n * (n + 1) / 2;
    let mut starts: Vec<Vec<T>> = vec![vec![T::zero(); dim]];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 1..opts.starts {
        let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0)) + DMatrix::identity(n, n);
        let z = symmetrize(&(g.transpose() * &g));
        if z.determinant() <= 1e-8 {
            continue;
        }
        starts.push(params_from_sym(&spd_log(&z).map(lit::<T>)));
    }
    if opts.spectral_start {
        if let Some(s) = spectral_start(&b) {
            starts.push(params_from_sym(&s));
        }
    }

    let identity_value = to_f64(f(&starts[0]));
    let mut best: Option<Minimum<T>> = None;
    let mut evaluations = 0;
    for x0 in &starts {
        let run = polish(&f, x0, opts);
        evaluations += run.evaluations;
        if best.as_ref().is_none_or(|b| run.value < b.value) {
            best = Some(run);
        }
    }
    let best = best.expect("at least the identity start");
    let value = to_f64(best.value);
    if !value.is_finite() || value < lower_bound - LOWER_BOUND_SLACK {
        return Err(RepError::Minimizer(format!(
            "restricted minimum {value} below the determinant bound {lower_bound}"
        )));
    }
    Ok(TranslationLength {
        value,
        lower_bound,
        spectral_bound,
        identity_value,
        evaluations,
        converged: best.converged,
    })
}

/// `tr_ρ(w)`, computed on a well-conditioned conjugate.
///
/// `w` is first replaced by its conjugacy normal form. For a composition
/// `C (e ∘ h) C⁻¹` the element is further conjugated by `C e(η)⁻¹`, with `η`
/// moving the axis of `h(w)` through `i`: the matrix then has norm close to
/// its spectral radius, whereas `ρ(w)` for a long word can have entries many
/// orders of magnitude larger than its eigenvalues.
pub fn translation_length_sp<T: Real>(
    rep: &MaximalRep<T>,
    w: &Word,
    tol: &Tolerances,
    opts: &LengthOptions,
) -> Result<TranslationLength, RepError> {
    let w = w.conjugacy_normal_form();
    if let (Some(e), Some(h)) = (rep.embedding(), rep.base_hyperbolization()) {
        let hm = h.evaluate(&w)?;
        if is_hyperbolic(&hm, tol.hyperbolic_margin) {
            let eta = axis_tangent_triple(&hm, tol)?.recentering();
            let centred = eta * hm * inv_sl2(&eta);
            let m = SymplecticMatrix::from_trusted(e.apply(&centred));
            return translation_length_matrix(&m, tol, opts);
        }
    }
    translation_length_matrix(&rep.evaluate(&w)?, tol, opts)
}

/// `d_Sp(J, g·J)`.
pub fn displacement_sp<T: Real>(g: &SymplecticMatrix<T>, j: &CompatibleJ<T>, tol: &Tolerances) -> Result<T, RepError> {
    let moved = push_j(g, j, tol)?;
    Ok(d_sp(j, &moved)?)
}

/// `X = [[A, B], [B, -A]]` with `A`, `B` symmetric: the symmetric elements
/// of `sp(2n)`, so that `exp(X)` runs over the positive symplectic matrices.
fn hamiltonian_from_params<T: Real>(x: &[T], n: usize) -> DMatrix<T> {
    let k = n * (n + 1) / 2;
    let a = sym_from_params(&x[..k], n);
    let b = sym_from_params(&x[k..], n);
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&a);
    m.view_mut((0, n), (n, n)).copy_from(&b);
    m.view_mut((n, 0), (n, n)).copy_from(&b);
    m.view_mut((n, n), (n, n)).copy_from(&(-a));
    m
}

/// `inf_J d_Sp(J, M·J)` over the whole symmetric space, with
/// `J = exp(X) J₀ exp(-X)` and `d_Sp(J, M·J) = 2 log σmax(exp(-X) M exp(X))`.
/// Starts at `X = 0` and `starts - 1` random points of size `spread`.
pub fn unrestricted_translation_length<T: Real>(
    m: &SymplecticMatrix<T>,
    starts: usize,
    spread: f64,
    opts: &LengthOptions,
) -> Minimum<T> {
    let n = m.n();
    let dim = n * (n + 1);
    let f = |x: &[T]| {
        let h = hamiltonian_from_params(x, n);
        let g = sym_exp(&h);
        let g_inv = sym_exp(&(-h));
        let c = g_inv * m.matrix() * g;
        let sv = jacobi_singular_values(&c);
        lit::<T>(2.0) * sv[sv.len() - 1].ln()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xa77a);
    let mut best: Option<Minimum<T>> = None;
    for s in 0..starts.max(1) {
        let x0: Vec<T> = if s == 0 {
            vec![T::zero(); dim]
        } else {
            (0..dim).map(|_| lit(rng.random_range(-spread..spread))).collect()
        };
        let run = polish(&f, &x0, opts);
        if best.as_ref().is_none_or(|b| run.value < b.value) {
            best = Some(run);
        }
    }
    best.expect("at least one start")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperbolic::octagon_hyperbolization;
    use crate::max_reps::Embedding;
    use crate::surface_group::parse_word;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn hamiltonian_exp_is_symplectic() {
        let x = [0.3, -0.2, 0.5, 0.1, 0.7, -0.4];
        let g = sym_exp(&hamiltonian_from_params(&x, 2));
        assert!(SymplecticMatrix::new(g, &tol()).is_ok());
    }

    #[test]
    fn diagonal_matches_hyperbolic_length() {
        let h = octagon_hyperbolization::<f64>(&tol());
        let rep = MaximalRep::compose(&h, &Embedding::diagonal(2), &tol()).unwrap();
        for text in ["a1", "a1,b2", "b1,-a2,b2,b2"] {
            let w = parse_word(2, text).unwrap();
            let ell = h.translation_length(&w, &tol()).unwrap();
            let r = translation_length_sp(&rep, &w, &tol(), &LengthOptions::default()).unwrap();
            assert!((r.value - ell).abs() < 1e-6, "{text}: {} vs {ell}", r.value);
            assert!((r.lower_bound - ell).abs() < 1e-6);
        }
    }

    #[test]
    fn irreducible_is_three_ell() {
        let h = octagon_hyperbolization::<f64>(&tol());
        let rep = MaximalRep::compose(&h, &Embedding::irreducible(2), &tol()).unwrap();
        let w = parse_word(2, "a1,b1").unwrap();
        let ell = h.translation_length(&w, &tol()).unwrap();
        let r = translation_length_sp(&rep, &w, &tol(), &LengthOptions::default()).unwrap();
        assert!((r.value - 3.0 * ell).abs() < 1e-6, "{} vs {}", r.value, 3.0 * ell);
        assert!((r.lower_bound - 2.0 * ell).abs() < 1e-6);
    }

    #[test]
    fn identity_word_is_zero() {
        let h = octagon_hyperbolization::<f64>(&tol());
        let rep = MaximalRep::compose(&h, &Embedding::diagonal(2), &tol()).unwrap();
        let r = translation_length_sp(&rep, &Word::identity(2), &tol(), &LengthOptions::default()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn unrestricted_agrees() {
        let h = octagon_hyperbolization::<f64>(&tol());
        let rep = MaximalRep::compose(&h, &Embedding::irreducible(2), &tol()).unwrap();
        let w = parse_word(2, "a1,-b2").unwrap();
        let m = rep.evaluate(&w).unwrap();
        let restricted = translation_length_matrix(&m, &tol(), &LengthOptions::default()).unwrap();
        let free = unrestricted_translation_length(&m, 8, 0.5, &LengthOptions::default());
        assert!((free.value - restricted.value).abs() < 1e-3, "{} vs {}", free.value, restricted.value);
    }
}
