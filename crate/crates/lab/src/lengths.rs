use maxrep::max_reps::{translation_length_sp, LengthOptions};
use maxrep::surface_group::{CurveSystem, Word};
use maxrep::symplectic::{d_sp, push_j};
use maxrep::{CompatibleJ, Hyperbolization, MaximalRep, Tolerances};
use rayon::prelude::*;
use serde::Serialize;

use crate::LabError;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LengthSource {
    Hyperbolization { name: String },
    Representation { construction: String, n: usize },
}

/// Translation lengths of the curves of a system, in system order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthVector {
    pub labels: Vec<String>,
    pub values: Vec<f64>,
    pub source: LengthSource,
}

impl LengthVector {
    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

fn check_genus(rep: u32, input: u32) -> Result<(), LabError> {
    if rep != input {
        return Err(LabError::GenusMismatch { rep, input });
    }
    Ok(())
}

pub fn length_vector_h(h: &Hyperbolization, system: &CurveSystem, tol: &Tolerances) -> Result<LengthVector, LabError> {
    check_genus(h.genus(), system.genus())?;
    let values = system
        .words()
        .iter()
        .map(|w| h.translation_length(w, tol))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(LengthVector {
        labels: system.labels().to_vec(),
        values,
        source: LengthSource::Hyperbolization { name: h.name().to_string() },
    })
}

pub fn length_vector_rep(
    rep: &MaximalRep,
    system: &CurveSystem,
    tol: &Tolerances,
    opts: &LengthOptions,
) -> Result<LengthVector, LabError> {
    check_genus(rep.genus(), system.genus())?;
    let values = system
        .words()
        .par_iter()
        .map(|w| Ok(translation_length_sp(rep, w, tol, opts)?.value))
        .collect::<Result<Vec<_>, LabError>>()?;
    Ok(LengthVector {
        labels: system.labels().to_vec(),
        values,
        source: LengthSource::Representation {
            construction: rep.construction().as_str().to_string(),
            n: rep.n(),
        },
    })
}

/// Upper comparison `tr_ρ ≤ L tr_h + B₀`, in two forms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UpperLipschitz {
    /// `max_s d_Sp(J₀, ρ(s) J₀) / min_s tr_h(s)` over the generators.
    pub generator_estimate: f64,
    /// Smallest `B₀ ≥ 0` making the generator estimate hold on the sample.
    pub generator_offset: f64,
    /// `max tr_ρ / tr_h` over the sample.
    pub fitted: f64,
    /// Smallest `B₀ ≥ 0` for the fitted slope; zero up to rounding.
    pub fitted_offset: f64,
    pub samples: usize,
}

fn offset(pairs: &[(f64, f64)], slope: f64) -> f64 {
    pairs.iter().map(|&(x, y)| y - slope * x).fold(0.0, f64::max)
}

pub fn upper_lipschitz(
    rep: &MaximalRep,
    h: &Hyperbolization,
    words: &[Word],
    tol: &Tolerances,
    opts: &LengthOptions,
) -> Result<UpperLipschitz, LabError> {
    check_genus(rep.genus(), h.genus())?;
    let j0 = CompatibleJ::base(rep.n());
    let mut reach: f64 = 0.0;
    for g in rep.images() {
        reach = reach.max(d_sp(&j0, &push_j(g, &j0, tol)?)?);
    }
    let shortest = (1..=2 * h.genus() as i32)
        .map(|s| Word::generator(h.genus(), s).map_err(LabError::from))
        .map(|w| Ok(h.translation_length(&w?, tol)?))
        .collect::<Result<Vec<f64>, LabError>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let generator_estimate = reach / shortest;

    let pairs = words
        .par_iter()
        .map(|w| {
            let x = h.translation_length(w, tol)?;
            let y = translation_length_sp(rep, w, tol, opts)?.value;
            Ok((x, y))
        })
        .collect::<Result<Vec<_>, LabError>>()?;
    let fitted = pairs
        .iter()
        .filter(|p| p.0 > 0.0)
        .map(|&(x, y)| y / x)
        .fold(0.0, f64::max);
    Ok(UpperLipschitz {
        generator_estimate,
        generator_offset: offset(&pairs, generator_estimate),
        fitted,
        fitted_offset: offset(&pairs, fitted),
        samples: pairs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use maxrep::hyperbolic::octagon_hyperbolization;
    use maxrep::surface_group::curve_system;
    use maxrep::Embedding;

    #[test]
    fn octagon_vector_is_positive() {
        let tol = Tolerances::default();
        let h = octagon_hyperbolization(&tol);
        let v = length_vector_h(&h, &curve_system(2).unwrap(), &tol).unwrap();
        assert_eq!(v.values.len(), 9);
        assert!(v.values.iter().all(|&x| x > 0.0 && x.is_finite()));
    }

    #[test]
    fn trivial_rep_has_zero_slope() {
        let tol = Tolerances::default();
        let h = octagon_hyperbolization(&tol);
        let rep = MaximalRep::trivial(2, 2);
        let words = crate::sample_words(&h, 5, 4, 1, &tol).unwrap();
        let u = upper_lipschitz(&rep, &h, &words, &tol, &LengthOptions::default()).unwrap();
        assert_eq!(u.fitted, 0.0);
        assert_eq!(u.generator_estimate, 0.0);
        assert_eq!(u.fitted_offset, 0.0);
    }

    #[test]
    fn genus_is_checked() {
        let tol = Tolerances::default();
        let h = octagon_hyperbolization(&tol);
        let rep = MaximalRep::compose(&h, &Embedding::diagonal(1), &tol).unwrap();
        let three = MaximalRep::trivial(3, 1);
        let err = upper_lipschitz(&three, &h, &[], &tol, &LengthOptions::default()).unwrap_err();
        assert!(matches!(err, LabError::GenusMismatch { rep: 3, input: 2 }));
        assert!(upper_lipschitz(&rep, &h, &[], &tol, &LengthOptions::default()).is_ok());
    }
}
