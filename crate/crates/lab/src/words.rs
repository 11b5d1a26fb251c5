use maxrep::hyperbolic::trace2;
use maxrep::surface_group::Word;
use maxrep::{Hyperbolization, Tolerances};
use rand::Rng;

use crate::{task_rng, LabError};

/// Draws reduced words, replaces them by the normal form of their
/// conjugacy class and keeps those whose hyperbolic trace has not been seen
/// before. The output for `count` is a prefix of the output for any larger
/// count with the same seed.
#[derive(Debug, Clone, PartialEq)]
pub struct WordSampler {
    pub max_len: usize,
    /// Draws allowed per requested word before giving up.
    pub tries_per_word: usize,
    /// Relative gap under which two traces count as equal.
    pub trace_gap: f64,
}

impl Default for WordSampler {
    fn default() -> Self {
        Self {
            max_len: 8,
            tries_per_word: 200,
            trace_gap: 1e-9,
        }
    }
}

fn random_reduced_word(genus: u32, len: usize, rng: &mut impl Rng) -> Word {
    let gens = 2 * genus as i32;
    let mut letters: Vec<i32> = Vec::with_capacity(len);
    while letters.len() < len {
        let g = rng.random_range(1..=gens);
        let l = if rng.random::<bool>() { g } else { -g };
        if letters.last() != Some(&-l) {
            letters.push(l);
        }
    }
    Word::new(genus, letters).expect("letters are in range")
}

impl WordSampler {
    pub fn sample(&self, h: &Hyperbolization, count: usize, seed: u64, tol: &Tolerances) -> Result<Vec<Word>, LabError> {
        let mut rng = task_rng(seed, 0x5a3d);
        let mut out: Vec<Word> = Vec::with_capacity(count);
        let mut traces: Vec<f64> = Vec::with_capacity(count);
        let budget = count * self.tries_per_word;
        let mut tries = 0;
        while out.len() < count {
            if tries >= budget {
                return Err(LabError::SamplerExhausted {
                    wanted: count,
                    found: out.len(),
                    tries,
                });
            }
            tries += 1;
            let len = rng.random_range(1..=self.max_len.max(1));
            let w = random_reduced_word(h.genus(), len, &mut rng).conjugacy_normal_form();
            if w.is_empty() {
                continue;
            }
            let t = trace2(&h.evaluate(&w)?).abs();
            // trivial in the group, or an accident of the presentation
            if t <= 2.0 + tol.hyperbolic_margin {
                continue;
            }
            if traces.iter().any(|&s| (s - t).abs() <= self.trace_gap * t) {
                continue;
            }
            traces.push(t);
            out.push(w);
        }
        Ok(out)
    }
}

/// [`WordSampler::sample`] with the default sampler and the given length
/// budget.
pub fn sample_words(h: &Hyperbolization, count: usize, max_len: usize, seed: u64, tol: &Tolerances) -> Result<Vec<Word>, LabError> {
    WordSampler {
        max_len,
        ..WordSampler::default()
    }
    .sample(h, count, seed, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use maxrep::hyperbolic::octagon_hyperbolization;

    #[test]
    fn samples_are_distinct_classes_within_budget() {
        let tol = Tolerances::default();
        let h = octagon_hyperbolization(&tol);
        let words = sample_words(&h, 40, 8, 3, &tol).unwrap();
        assert_eq!(words.len(), 40);
        for w in &words {
            assert!(!w.is_empty() && w.len() <= 8);
            assert!(w.is_cyclically_reduced());
            assert_eq!(&w.conjugacy_normal_form(), w);
        }
        let short = sample_words(&h, 10, 8, 3, &tol).unwrap();
        assert_eq!(&words[..10], &short[..]);
    }

    #[test]
    fn impossible_requests_fail() {
        let tol = Tolerances::default();
        let h = octagon_hyperbolization(&tol);
        // every side pairing of the regular octagon has the same trace
        let err = sample_words(&h, 9, 1, 1, &tol).unwrap_err();
        assert!(matches!(err, LabError::SamplerExhausted { .. }));
    }
}
