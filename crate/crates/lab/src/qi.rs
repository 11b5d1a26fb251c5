use maxrep::max_reps::{boundary_map, translation_length_sp, LengthOptions, RepError};
use maxrep::surface_group::Word;
use maxrep::{MaximalRep, Tolerances};
use rayon::prelude::*;
use serde::Serialize;

use crate::{centred_case, LabError};

/// One row of the scatter of `tr_h` against `tr_ρ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QiSample {
    pub word: String,
    pub letters: usize,
    pub tr_h: f64,
    pub tr_rho: f64,
    /// `d_Sp(J(u), ρ(γ) J(u))` for the axis tangent triple `u` of `γ`,
    /// evaluated in the y-model of the axis frame.
    pub d_j: f64,
}

/// Smallest `A ≥ 1`, then smallest `B ≥ 0`, with
/// `A⁻¹ tr_h - B ≤ tr_ρ ≤ A tr_h + B` on every sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QiEstimate {
    pub a: f64,
    pub b: f64,
    pub samples: usize,
    /// Words dropped because `ρ(γ)` had spectrum too close to the unit circle.
    pub skipped: usize,
    /// `max (A⁻¹ tr_h - B - tr_ρ)`; non-positive by construction.
    pub max_lower_violation: f64,
    /// `max (tr_ρ - A tr_h - B)`; non-positive by construction.
    pub max_upper_violation: f64,
    pub ratio_min: f64,
    pub ratio_max: f64,
    /// Extremes of `tr_h / d_J`, the constant of the strong quasi-isometry
    /// along axes.
    pub lemma_ratio_min: f64,
    pub lemma_ratio_max: f64,
}

fn extremes(values: impl Iterator<Item = f64>) -> (f64, f64) {
    values.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)))
}

/// Fits `(A, B)` to the samples. The slope covers every sample with both
/// lengths positive, so only samples where one side vanishes reach the
/// offset. With positive lengths throughout, `A` and `B` are both
/// non-decreasing as samples are added.
pub fn fit_qi(samples: &[QiSample], skipped: usize) -> QiEstimate {
    let positive = || samples.iter().filter(|s| s.tr_h > 0.0 && s.tr_rho > 0.0);
    // a few ulps of headroom so that rounding in A·tr_h never shows up as a
    // violation
    let a = positive()
        .map(|s| (s.tr_rho / s.tr_h).max(s.tr_h / s.tr_rho) * (1.0 + 4.0 * f64::EPSILON))
        .fold(1.0, f64::max);
    let b = samples
        .iter()
        .filter(|s| !(s.tr_h > 0.0 && s.tr_rho > 0.0))
        .map(|s| (s.tr_rho - a * s.tr_h).max(s.tr_h / a - s.tr_rho))
        .fold(0.0, f64::max);
    let lower = samples.iter().map(|s| s.tr_h / a - b - s.tr_rho).fold(f64::NEG_INFINITY, f64::max);
    let upper = samples.iter().map(|s| s.tr_rho - a * s.tr_h - b).fold(f64::NEG_INFINITY, f64::max);
    let (ratio_min, ratio_max) = extremes(positive().map(|s| s.tr_rho / s.tr_h));
    let (lemma_ratio_min, lemma_ratio_max) = extremes(samples.iter().filter(|s| s.d_j > 0.0).map(|s| s.tr_h / s.d_j));
    QiEstimate {
        a,
        b,
        samples: samples.len(),
        skipped,
        max_lower_violation: lower,
        max_upper_violation: upper,
        ratio_min,
        ratio_max,
        lemma_ratio_min,
        lemma_ratio_max,
    }
}

fn sample(rep: &MaximalRep, phi: &maxrep::BoundaryMap, w: &Word, tol: &Tolerances, opts: &LengthOptions) -> Result<QiSample, LabError> {
    let case = centred_case(phi, w, tol)?;
    let d_j = case.displacement();
    let tr_rho = translation_length_sp(rep, w, tol, opts)?.value;
    Ok(QiSample {
        word: w.to_string(),
        letters: w.len(),
        tr_h: case.ell,
        tr_rho,
        d_j,
    })
}

/// Samples `(tr_h, tr_ρ, d_J)` on the given words and fits the
/// quasi-isometry constants. Needs a representation with a boundary map.
pub fn qi_estimate(
    rep: &MaximalRep,
    words: &[Word],
    tol: &Tolerances,
    opts: &LengthOptions,
) -> Result<(QiEstimate, Vec<QiSample>), LabError> {
    let phi = boundary_map(rep, tol).map_err(|_| LabError::Unsupported(rep.construction().as_str().into()))?;
    let rows = words
        .par_iter()
        .map(|w| match sample(rep, &phi, w, tol, opts) {
            Err(LabError::Rep(RepError::NotProximal { .. })) => Ok(None),
            other => other.map(Some),
        })
        .collect::<Result<Vec<_>, LabError>>()?;
    let skipped = rows.iter().filter(|r| r.is_none()).count();
    let samples: Vec<QiSample> = rows.into_iter().flatten().collect();
    Ok((fit_qi(&samples, skipped), samples))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(tr_h: f64, tr_rho: f64) -> QiSample {
        QiSample {
            word: String::new(),
            letters: 1,
            tr_h,
            tr_rho,
            d_j: tr_rho,
        }
    }

    #[test]
    fn proportional_samples_need_no_offset() {
        let fit = fit_qi(&[s(1.0, 2.0), s(3.0, 6.0), s(0.5, 1.0)], 0);
        assert!((fit.a - 2.0).abs() < 1e-14);
        assert_eq!(fit.b, 0.0);
        assert!(fit.max_upper_violation <= 0.0 && fit.max_lower_violation <= 0.0);
    }

    #[test]
    fn vanishing_lengths_go_into_the_offset() {
        let fit = fit_qi(&[s(1.0, 1.5), s(2.0, 0.0)], 0);
        assert!((fit.a - 1.5).abs() < 1e-14);
        assert!((fit.b - 2.0 / 1.5).abs() < 1e-14);
        assert!(fit.max_lower_violation <= 0.0 && fit.max_upper_violation <= 0.0);
    }

    #[test]
    fn trivial_rep_is_rejected() {
        let tol = Tolerances::default();
        let rep = MaximalRep::trivial(2, 2);
        let err = qi_estimate(&rep, &[], &tol, &LengthOptions::default()).unwrap_err();
        assert!(matches!(err, LabError::Unsupported(_)));
    }
}
