//! The parallel set `Y_{L₋,L₊}` modelled by positive definite forms on `L₋`,
//! its distances, cone order and causal curves.

use nalgebra::DMatrix;
use serde::Serialize;

use super::lagrangian::block_antidiag;
use super::{generalized_spectrum, CompatibleJ, Frame, SymplecticError, SymplecticMatrix};
use crate::linalg::{asymmetry, max_abs, sym_eigenvalues, symmetrize};
use crate::scalar::{lit, to_f64, Real};
use crate::tolerances::Tolerances;

/// Symmetric positive definite `n x n` matrix: a point of `Y_{L₋,s}` in a
/// fixed basis of `L₋`.
#[derive(Debug, Clone, PartialEq)]
pub struct PosDefForm<T: Real> {
    z: DMatrix<T>,
}

impl<T: Real> PosDefForm<T> {
    pub fn new(z: DMatrix<T>, tol: &Tolerances) -> Result<Self, SymplecticError> {
        if z.nrows() != z.ncols() || z.nrows() == 0 {
            return Err(SymplecticError::DimensionMismatch(z.nrows(), z.ncols()));
        }
        let scale = max_abs(&z).max(T::one());
        let asym = to_f64(asymmetry(&z) / scale);
        if asym > tol.form_symmetry {
            return Err(SymplecticError::NotSymmetric(asym));
        }
        let z = symmetrize(&z);
        let min = to_f64(sym_eigenvalues(&z)[0]);
        if min <= tol.positive_definite {
            return Err(SymplecticError::NotPositiveDefinite(min));
        }
        Ok(Self { z })
    }

    pub(crate) fn from_trusted(z: DMatrix<T>) -> Self {
        Self { z: symmetrize(&z) }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            z: DMatrix::identity(n, n),
        }
    }

    pub fn n(&self) -> usize {
        self.z.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.z
    }

    /// `Aᵀ Z A`, the action of `GL(L₋)`.
    pub fn congruence(&self, a: &DMatrix<T>) -> Self {
        Self::from_trusted(a.transpose() * &self.z * a)
    }

    pub fn inverse(&self) -> Self {
        Self::from_trusted(self.z.clone().try_inverse().expect("positive definite"))
    }
}

/// Complex structure of `Y_{L₋,L₊}` with form `Z` on `L₋`: in the frame,
/// `T⁻ = W⁻¹ Z` and `T⁺ = Z⁻¹ W`. In the standard frame this is
/// `[[0, -Z⁻¹], [Z, 0]]`, whose form is `diag(Z, Z⁻¹)`.
pub fn y_embed<T: Real>(
    z: &PosDefForm<T>,
    frame: &Frame<T>,
    tol: &Tolerances,
) -> Result<CompatibleJ<T>, SymplecticError> {
    if z.n() != frame.n() {
        return Err(SymplecticError::DimensionMismatch(z.n(), frame.n()));
    }
    let tm = frame.pairing_inverse() * z.matrix();
    let z_inv = z.inverse();
    let tp = z_inv.matrix() * frame.pairing();
    CompatibleJ::new(frame.from_frame(&block_antidiag(&tm, &tp)), tol)
}

/// Inverse of [`y_embed`]; fails when `J` does not exchange the two frame
/// Lagrangians.
pub fn y_project<T: Real>(
    j: &CompatibleJ<T>,
    frame: &Frame<T>,
    tol: &Tolerances,
) -> Result<PosDefForm<T>, SymplecticError> {
    if j.n() != frame.n() {
        return Err(SymplecticError::DimensionMismatch(j.n(), frame.n()));
    }
    let n = frame.n();
    let b = frame.to_frame(j.matrix());
    let diag_mass = max_abs(&b.view((0, 0), (n, n)).into_owned()).max(max_abs(&b.view((n, n), (n, n)).into_owned()));
    let rel = to_f64(diag_mass / max_abs(&b).max(T::one()));
    if rel > tol.frame_block {
        return Err(SymplecticError::NotInParallelSet(rel));
    }
    let z = frame.pairing() * b.view((n, 0), (n, n));
    PosDefForm::new(z, tol)
}

/// Symplectic matrix acting on `L₋` by `A` and preserving `L₊`:
/// `F diag(A, W⁻¹ A⁻ᵀ W) F⁻¹`. Under `g⁻¹ J g` it sends the form `Z` to
/// `Aᵀ Z A`.
pub fn gl_embed<T: Real>(a: &DMatrix<T>, frame: &Frame<T>) -> Option<SymplecticMatrix<T>> {
    let n = frame.n();
    let a_inv_t = a.clone().try_inverse()?.transpose();
    let d = frame.pairing_inverse() * a_inv_t * frame.pairing();
    let mut m = DMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    m.view_mut((n, n), (n, n)).copy_from(&d);
    Some(SymplecticMatrix::from_trusted(frame.from_frame(&m)))
}

/// Ascending eigenvalues of `Z⁻¹ Z'`.
pub fn relative_spectrum<T: Real>(z: &PosDefForm<T>, z2: &PosDefForm<T>) -> Vec<T> {
    generalized_spectrum(z.matrix(), z2.matrix())
}

/// Distance of the parallel set induced by `d_Sp`:
/// `log max(λmax(Z⁻¹Z'), λmax(Z'⁻¹Z))`.
pub fn d_y<T: Real>(z: &PosDefForm<T>, z2: &PosDefForm<T>) -> T {
    let s = relative_spectrum(z, z2);
    s[s.len() - 1].ln().max(-s[0].ln()).max(T::zero())
}

/// `|log λmax| + |log λmin|` of `Z⁻¹Z'`.
pub fn d_proof<T: Real>(z: &PosDefForm<T>, z2: &PosDefForm<T>) -> T {
    let s = relative_spectrum(z, z2);
    s[s.len() - 1].ln().abs() + s[0].ln().abs()
}

/// `Z' ∈ Ω_Z`, i.e. `Z' - Z` positive definite with the given margin.
pub fn in_cone<T: Real>(z: &PosDefForm<T>, z2: &PosDefForm<T>, margin: f64) -> bool {
    to_f64(sym_eigenvalues(&(z2.matrix() - z.matrix()))[0]) > margin
}

/// Piecewise-linear curve through samples that increase in the cone order.
#[derive(Debug, Clone, PartialEq)]
pub struct CausalCurve<T: Real> {
    samples: Vec<PosDefForm<T>>,
}

impl<T: Real> CausalCurve<T> {
    pub fn new(samples: Vec<PosDefForm<T>>, tol: &Tolerances) -> Result<Self, SymplecticError> {
        if samples.len() < 2 {
            return Err(SymplecticError::ShortCurve);
        }
        let n = samples[0].n();
        for (i, pair) in samples.windows(2).enumerate() {
            if pair[1].n() != n {
                return Err(SymplecticError::DimensionMismatch(n, pair[1].n()));
            }
            if !in_cone(&pair[0], &pair[1], tol.cone_margin) {
                return Err(SymplecticError::NonCausal(i, i + 1));
            }
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[PosDefForm<T>] {
        &self.samples
    }

    pub fn n(&self) -> usize {
        self.samples[0].n()
    }

    pub fn start(&self) -> &PosDefForm<T> {
        &self.samples[0]
    }

    pub fn end(&self) -> &PosDefForm<T> {
        &self.samples[self.samples.len() - 1]
    }

    /// Joins two curves whose endpoints coincide.
    pub fn concat(&self, other: &Self, tol: &Tolerances) -> Result<Self, SymplecticError> {
        let mut s = self.samples.clone();
        s.extend(other.samples.iter().skip(1).cloned());
        Self::new(s, tol)
    }
}

/// Which distance is summed along a causal curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalMetric {
    /// `d_y`, the restriction of the operator-norm distance.
    Literal,
    /// `|log λmax| + |log λmin|`.
    Proof,
}

impl CausalMetric {
    pub fn distance<T: Real>(self, z: &PosDefForm<T>, z2: &PosDefForm<T>) -> T {
        match self {
            CausalMetric::Literal => d_y(z, z2),
            CausalMetric::Proof => d_proof(z, z2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CausalLength {
    pub length: f64,
    /// Polygonal sums at the refinement depths visited, starting at 0.
    pub sums: Vec<f64>,
    /// Sums never decreased under refinement (up to rounding).
    pub monotone: bool,
    /// `L_k + (L_k - L_{k-1}) / 3`, assuming second-order convergence.
    pub extrapolated: f64,
}

/// Polygonal length of a causal curve, refined dyadically (each segment
/// split into `2^k` pieces) up to `max_depth`; the reported length is the
/// largest sum. Refinement stops early once two successive refinements leave
/// the sum unchanged to `1e-13` relative. Along a straight causal segment
/// both metrics telescope, so piecewise-linear curves usually stop at depth 2.
pub fn causal_length<T: Real>(curve: &CausalCurve<T>, metric: CausalMetric, max_depth: u32) -> CausalLength {
    let mut sums: Vec<f64> = Vec::with_capacity(max_depth as usize + 1);
    for depth in 0..=max_depth {
        if let [.., a, b, c] = sums[..] {
            let settled = |x: f64, y: f64| (x - y).abs() <= 1e-13 * y.abs().max(1.0);
            if settled(a, b) && settled(b, c) {
                break;
            }
        }
        let pieces = 1usize << depth;
        let mut total = T::zero();
        for pair in curve.samples.windows(2) {
            let (a, b) = (pair[0].matrix(), pair[1].matrix());
            let step = (b - a) / lit::<T>(pieces as f64);
            let mut prev = pair[0].clone();
            for k in 1..=pieces {
                let next = if k == pieces {
                    pair[1].clone()
                } else {
                    PosDefForm::from_trusted(a + &step * lit::<T>(k as f64))
                };
                total += metric.distance(&prev, &next);
                prev = next;
            }
        }
        sums.push(to_f64(total));
    }
    let monotone = sums
        .windows(2)
        .all(|w| w[1] >= w[0] - 1e-12 * w[0].abs().max(1.0));
    let length = sums.iter().copied().fold(0.0, f64::max);
    let extrapolated = match sums.len() {
        0 | 1 => length,
        k => sums[k - 1] + (sums[k - 1] - sums[k - 2]) / 3.0,
    };
    CausalLength {
        length,
        sums,
        monotone,
        extrapolated,
    }
}

/// Outcome of comparing `length(f)` with `n d(f(0), f(1))`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CausalReport {
    pub metric: CausalMetric,
    pub length: f64,
    pub bound: f64,
    /// `bound - length`.
    pub margin: f64,
    pub monotone: bool,
    pub pass: bool,
}

pub const CAUSAL_DEPTH: u32 = 10;

/// Checks `length(f) <= n d(f(0), f(1))` with slack `slack`.
pub fn check_causal_bound<T: Real>(curve: &CausalCurve<T>, metric: CausalMetric, depth: u32, slack: f64) -> CausalReport {
    let len = causal_length(curve, metric, depth);
    let bound = curve.n() as f64 * to_f64(metric.distance(curve.start(), curve.end()));
    let margin = bound - len.length;
    CausalReport {
        metric,
        length: len.length,
        bound,
        margin,
        monotone: len.monotone,
        pass: margin >= -slack,
    }
}
