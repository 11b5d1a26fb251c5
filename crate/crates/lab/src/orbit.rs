use maxrep::max_reps::{translation_length_sp, LengthOptions};
use maxrep::surface_group::{CurveSystem, Twist, Word};
use maxrep::{MaximalRep, Tolerances};
use rayon::prelude::*;
use serde::Serialize;

use crate::LabError;

/// Words longer than this abort the probe.
pub const MAX_WORD_LETTERS: usize = 1_000_000;

/// Largest `k₀` for which eventual growth still counts as divergence.
const DIVERGENCE_START: usize = 3;

/// Length vectors of `γ ↦ ρ(ψ^{-k} γ)` for `k = 0..=k_max`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitProbe {
    pub twist: String,
    pub labels: Vec<String>,
    pub ks: Vec<u32>,
    pub sums: Vec<f64>,
    /// `per_curve[k][i] = tr_ρ(ψ^{-k} γ_i)`.
    pub per_curve: Vec<Vec<f64>>,
    /// Letters of `ψ^{-k} γ_i`.
    pub word_lengths: Vec<Vec<usize>>,
    /// First `k` after which the sums increase strictly, if any.
    pub increasing_from: Option<u32>,
    pub final_over_initial: f64,
    pub diverges: bool,
}

fn increasing_from(sums: &[f64]) -> Option<u32> {
    let mut k0 = sums.len().saturating_sub(1);
    while k0 > 0 && sums[k0 - 1] < sums[k0] {
        k0 -= 1;
    }
    // a single point is not a trend
    (k0 + 1 < sums.len()).then_some(k0 as u32)
}

pub fn orbit_probe(
    rep: &MaximalRep,
    twist: &Twist,
    system: &CurveSystem,
    k_max: u32,
    tol: &Tolerances,
    opts: &LengthOptions,
) -> Result<OrbitProbe, LabError> {
    if rep.genus() != system.genus() || rep.genus() != twist.forward.genus() {
        let input = if rep.genus() != system.genus() { system.genus() } else { twist.forward.genus() };
        return Err(LabError::GenusMismatch { rep: rep.genus(), input });
    }
    let words: Vec<Vec<Word>> = (0..=k_max)
        .map(|k| {
            system
                .words()
                .iter()
                .map(|w| twist.apply_power(-(k as i64), w, MAX_WORD_LETTERS))
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<_, _>>()?;
    let tasks: Vec<(usize, usize)> = (0..words.len())
        .flat_map(|k| (0..system.len()).map(move |i| (k, i)))
        .collect();
    let flat = tasks
        .par_iter()
        .map(|&(k, i)| Ok(translation_length_sp(rep, &words[k][i], tol, opts)?.value))
        .collect::<Result<Vec<f64>, LabError>>()?;
    let per_curve: Vec<Vec<f64>> = flat.chunks(system.len().max(1)).map(<[f64]>::to_vec).collect();
    let sums: Vec<f64> = per_curve.iter().map(|row| row.iter().sum()).collect();
    let from = increasing_from(&sums);
    let ratio = sums.last().copied().unwrap_or(0.0) / sums[0];
    let diverges = from.is_some_and(|k| k as usize <= DIVERGENCE_START) && ratio >= 2.0;
    Ok(OrbitProbe {
        twist: twist.label.clone(),
        labels: system.labels().to_vec(),
        ks: (0..=k_max).collect(),
        sums,
        per_curve,
        word_lengths: words.iter().map(|row| row.iter().map(Word::len).collect()).collect(),
        increasing_from: from,
        final_over_initial: ratio,
        diverges,
    })
}
