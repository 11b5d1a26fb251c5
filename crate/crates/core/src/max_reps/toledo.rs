//! Toledo invariant by lifting the relator to the universal cover of
//! `Sp(2n, R)` and reading off the winding of `det_C` of the unitary polar
//! factor along the lifted loop.
//!
//! For `g = [[A, B], [C, D]]` write `g_c = ½(A + D) + ½i(C - B)` and
//! `g_a = ½(A - D) + ½i(C + B)`, so that `g v = g_c v + g_a v̄` on `C^n`.
//! The phase of `det g_c` equals that of the unitary polar factor, and along
//! a product it splits as
//!
//! `arg det (gh)_c = arg det g_c + arg det h_c + Σ_k arg(1 + z_k)`,
//!
//! with `z_k` the eigenvalues of `g_c⁻¹ g_a conj(h_a) h_c⁻¹`, all inside the
//! unit disk. Each correction term therefore has a principal value that is
//! continuous along any path, and the argument along the concatenated
//! generator paths is tracked exactly rather than by sampling.

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use serde::Serialize;

use super::{MaximalRep, RepError};
use crate::linalg::{omega, polar};
use crate::scalar::{lit, to_f64, Real};
use crate::surface_group::Presentation;
use crate::tolerances::Tolerances;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToledoResult {
    pub value: i64,
    /// Unrounded winding, in units of `π`, sign-corrected.
    pub raw: f64,
    /// `|raw - value|`.
    pub residual: f64,
    /// Number of letters of the relator, one lifted path each.
    pub steps: usize,
    /// Largest `|z_k|` met in a correction term; values close to 1 mean
    /// the product passed near the Maslov cycle of the base point.
    pub max_correction_modulus: f64,
}

type CMat<T> = DMatrix<Complex<T>>;

/// Complex-linear and antilinear parts of a real `2n × 2n` matrix.
fn complex_parts<T: Real>(g: &DMatrix<T>) -> (CMat<T>, CMat<T>) {
    let n = g.nrows() / 2;
    let half = lit::<T>(0.5);
    let c = DMatrix::from_fn(n, n, |i, j| {
        Complex::new(
            (g[(i, j)] + g[(n + i, n + j)]) * half,
            (g[(n + i, j)] - g[(i, n + j)]) * half,
        )
    });
    let a = DMatrix::from_fn(n, n, |i, j| {
        Complex::new(
            (g[(i, j)] - g[(n + i, n + j)]) * half,
            (g[(n + i, j)] + g[(i, n + j)]) * half,
        )
    });
    (c, a)
}

/// Rotation angles of the unitary polar factor of `g`, each in `(-π, π]`:
/// the shortest rotation from `I`. Their sum is the argument gained along
/// the polar path `U_t P^t`, since `det (P^t)_c > 0`.
fn polar_angles<T: Real>(g: &DMatrix<T>) -> Result<Vec<T>, RepError> {
    let (u, _) = polar(g).ok_or_else(|| RepError::Minimizer("polar decomposition failed".into()))?;
    let (uc, _) = complex_parts(&u);
    let schur = nalgebra::Schur::try_new(uc, T::default_epsilon(), 10_000)
        .ok_or_else(|| RepError::Minimizer("unitary factor could not be diagonalized".into()))?;
    let (_, t) = schur.unpack();
    Ok((0..t.nrows()).map(|k| t[(k, k)].im.atan2(t[(k, k)].re)).collect())
}

/// A point of the universal cover: the matrix together with a continuous
/// choice of `arg det g_c`.
#[derive(Debug, Clone)]
struct Lift<T: Real> {
    c: CMat<T>,
    a: CMat<T>,
    matrix: DMatrix<T>,
    theta: T,
}

impl<T: Real> Lift<T> {
    fn identity(n: usize) -> Self {
        let m = DMatrix::identity(2 * n, 2 * n);
        let (c, a) = complex_parts(&m);
        Self { c, a, matrix: m, theta: T::zero() }
    }

    fn along_polar_path(g: &DMatrix<T>) -> Result<Self, RepError> {
        let theta = polar_angles(g)?.into_iter().fold(T::zero(), |acc, x| acc + x);
        let (c, a) = complex_parts(g);
        Ok(Self { c, a, matrix: g.clone(), theta })
    }

    /// The lift of `g⁻¹` along the reversed path: `(g⁻¹)_c = g_c*`.
    fn inverse(&self) -> Self {
        let w = omega::<T>(self.c.nrows());
        let inv = -(&w * self.matrix.transpose() * &w);
        let (c, a) = complex_parts(&inv);
        Self { c, a, matrix: inv, theta: -self.theta }
    }

    /// Product in the universal cover, with the largest correction modulus.
    fn mul(&self, other: &Self) -> Result<(Self, T), RepError> {
        let singular = || RepError::Minimizer("complex-linear part is singular".into());
        let ci = self.c.clone().try_inverse().ok_or_else(singular)?;
        let hi = other.c.clone().try_inverse().ok_or_else(singular)?;
        let z = ci * &self.a * other.a.map(|x| x.conj()) * hi;
        let schur = nalgebra::Schur::try_new(z, T::default_epsilon(), 10_000)
            .ok_or_else(|| RepError::Minimizer("correction term did not converge".into()))?;
        let (_, t) = schur.unpack();
        let mut eta = T::zero();
        let mut worst = T::zero();
        for k in 0..t.nrows() {
            let w = t[(k, k)];
            worst = worst.max(w.norm_sqr().sqrt());
            let one_plus = Complex::new(T::one() + w.re, w.im);
            eta += one_plus.im.atan2(one_plus.re);
        }
        let matrix = &self.matrix * &other.matrix;
        let (c, a) = complex_parts(&matrix);
        Ok((Self { c, a, matrix, theta: self.theta + other.theta + eta }, worst))
    }

    /// Principal argument of `det g_c`, for closing the loop.
    fn principal_arg(&self) -> T {
        let d = self.c.clone().determinant();
        d.im.atan2(d.re)
    }
}

/// Toledo invariant with every generator lifted along its polar path.
pub fn toledo<T: Real>(rep: &MaximalRep<T>, tol: &Tolerances) -> Result<ToledoResult, RepError> {
    winding(rep, tol, &vec![0; rep.images().len()])
}

/// Toledo invariant after adding between `-turns` and `turns` extra full
/// rotations to the path of each generator, chosen at random. Every
/// generator occurs in the relator with total exponent zero, so the result
/// must not change.
pub fn toledo_with_perturbations<T: Real, R: Rng + ?Sized>(
    rep: &MaximalRep<T>,
    tol: &Tolerances,
    turns: i64,
    rng: &mut R,
) -> Result<ToledoResult, RepError> {
    let extra: Vec<i64> = (0..rep.images().len()).map(|_| rng.random_range(-turns..=turns)).collect();
    winding(rep, tol, &extra)
}

fn winding<T: Real>(rep: &MaximalRep<T>, tol: &Tolerances, extra_turns: &[i64]) -> Result<ToledoResult, RepError> {
    rep.check_relator(tol)?;
    let two_pi = T::two_pi();
    let lifts = rep
        .images()
        .iter()
        .zip(extra_turns)
        .map(|(g, &k)| {
            let mut l = Lift::along_polar_path(g.matrix())?;
            l.theta += two_pi * lit::<T>(k as f64);
            Ok(l)
        })
        .collect::<Result<Vec<_>, RepError>>()?;
    let inverses: Vec<Lift<T>> = lifts.iter().map(Lift::inverse).collect();
    let relator = Presentation::new(rep.genus())?.relator().clone();

    let mut acc = Lift::identity(rep.n());
    let mut worst = T::zero();
    for &letter in relator.letters() {
        let idx = (letter.unsigned_abs() - 1) as usize;
        let step = if letter > 0 { &lifts[idx] } else { &inverses[idx] };
        let (next, w) = acc.mul(step)?;
        worst = worst.max(w);
        acc = next;
    }
    // ρ(R) is within the relator tolerance of I: close the loop
    let total = to_f64(acc.theta - acc.principal_arg());
    let raw = -total / std::f64::consts::PI;
    let value = raw.round();
    let res = (raw - value).abs();
    if res > tol.winding || !raw.is_finite() {
        return Err(RepError::NonIntegralWinding { raw });
    }
    let value = value as i64;
    let bound = rep.milnor_wood_bound();
    if value.abs() > bound {
        return Err(RepError::MilnorWood { value, bound });
    }
    Ok(ToledoResult {
        value,
        raw,
        residual: res,
        steps: relator.letters().len(),
        max_correction_modulus: to_f64(worst),
    })
}
