//! Lab operations against independent evaluations.

use maxrep::hyperbolic::{octagon_hyperbolization, translation_length_h};
use maxrep::max_reps::LengthOptions;
use maxrep::surface_group::{builtin_twist, curve_system, Word};
use maxrep::{Embedding, Hyperbolization, MaximalRep, Tolerances};
use maxrep_lab::*;
use proptest::prelude::*;
use std::sync::OnceLock;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn octagon() -> &'static Hyperbolization {
    static H: OnceLock<Hyperbolization> = OnceLock::new();
    H.get_or_init(|| octagon_hyperbolization(&Tolerances::default()))
}

fn rep(e: Embedding) -> MaximalRep {
    MaximalRep::compose(octagon(), &e, &tol()).unwrap()
}

fn words(count: usize, seed: u64) -> Vec<Word> {
    sample_words(octagon(), count, 8, seed, &tol()).unwrap()
}

// [DERIVED] tr_ρ = tr_h for the diagonal embedding.
#[test]
fn diagonal_length_vector_is_the_hyperbolic_one() {
    let sys = curve_system(2).unwrap();
    let h = length_vector_h(octagon(), &sys, &tol()).unwrap();
    let r = length_vector_rep(&rep(Embedding::diagonal(2)), &sys, &tol(), &LengthOptions::default()).unwrap();
    assert_eq!(h.values.len(), 9);
    for (label, (a, b)) in sys.labels().iter().zip(h.values.iter().zip(&r.values)) {
        assert!(*a > 0.0);
        assert!((a - b).abs() < 1e-6, "{label}: {a} vs {b}");
    }
}

// [DERIVED] slopes: 1 for the diagonal embedding, at most 2n - 1 = 3 for
// the irreducible one; the generator estimate must also hold with its
// reported offset.
#[test]
fn upper_lipschitz_constants() {
    let ws = words(30, 5);
    let opts = LengthOptions::default();
    let d = upper_lipschitz(&rep(Embedding::diagonal(2)), octagon(), &ws, &tol(), &opts).unwrap();
    assert!(d.fitted <= 1.0 + 1e-3, "{d:?}");
    assert!(d.fitted_offset <= 1e-9);
    let i = upper_lipschitz(&rep(Embedding::irreducible(2)), octagon(), &ws, &tol(), &opts).unwrap();
    assert!(i.fitted <= 3.0 + 1e-3, "{i:?}");
    assert!(i.fitted >= 2.0);
    assert!(i.generator_estimate > 0.0 && i.generator_offset >= 0.0);
}

#[test]
fn qi_fits() {
    let ws = words(40, 9);
    let opts = LengthOptions::default();
    let (d, samples) = qi_estimate(&rep(Embedding::diagonal(2)), &ws, &tol(), &opts).unwrap();
    assert_eq!(samples.len() + d.skipped, 40);
    assert!(d.a <= 1.001 && d.b <= 1e-3, "{d:?}");
    let (i, _) = qi_estimate(&rep(Embedding::irreducible(2)), &ws, &tol(), &opts).unwrap();
    assert!(i.a >= 1.0 && i.a <= 3.0 + 1e-6 && i.b.is_finite(), "{i:?}");
    assert!(i.max_lower_violation <= 0.0 && i.max_upper_violation <= 0.0);
    // d_J = tr_h along the axis for the diagonal embedding
    for s in &samples {
        assert!((s.d_j - s.tr_h).abs() < 1e-6 * s.tr_h, "{}", s.word);
    }
}

// [DERIVED] the diagonal probe is the hyperbolic one, evaluated here
// directly on the twisted words.
#[test]
fn twist_orbit_diverges() {
    let sys = curve_system(2).unwrap();
    let twist = builtin_twist(2, "a1").unwrap();
    let p = orbit_probe(&rep(Embedding::diagonal(2)), &twist, &sys, 10, &tol(), &LengthOptions::default()).unwrap();
    for (k, row) in p.per_curve.iter().enumerate() {
        let expected: f64 = sys
            .words()
            .iter()
            .map(|w| {
                let moved = twist.apply_power(-(k as i64), w, MAX_WORD_LETTERS).unwrap();
                translation_length_h(&octagon().evaluate(&moved).unwrap(), &tol()).unwrap()
            })
            .sum();
        assert!((row.iter().sum::<f64>() - expected).abs() < 1e-5 * expected, "k = {k}");
    }
    assert!(p.increasing_from.is_some_and(|k| k <= 3), "{:?}", p.sums);
    assert!(p.final_over_initial >= 2.0);
    assert!(p.diverges);
}

#[test]
fn identity_orbit_is_constant() {
    let sys = curve_system(2).unwrap();
    let id = builtin_twist(2, "identity").unwrap();
    let p = orbit_probe(&rep(Embedding::diagonal(2)), &id, &sys, 4, &tol(), &LengthOptions::default()).unwrap();
    assert!(p.sums.iter().all(|&s| s == p.sums[0]));
    assert!(!p.diverges);
    assert_eq!(p.increasing_from, None);
}

#[test]
fn small_suite_passes_for_both_embeddings() {
    let config = LemmaConfig {
        cone_samples: 30,
        attainment_words: 5,
        causal_curves: 50,
        ..LemmaConfig::default()
    };
    for e in [Embedding::diagonal(2), Embedding::irreducible(2)] {
        let r = lemma_suite(&rep(e), &config, 11, &tol(), &LengthOptions::default()).unwrap();
        assert!(r.passed, "{:?}", r.cone.failures.first().or(r.attainment.failures.first()));
        assert_eq!(r.checks, 30 + 5 + 50);
        assert_eq!(r.cone.comparison.a_double_prime, 2.0);
        assert!(r.cone.worst_growth_step > 0.0);
    }
}

#[test]
fn causal_suite_passes_both_conventions() {
    let config = LemmaConfig {
        causal_curves: 300,
        ..LemmaConfig::default()
    };
    let r = causal_suite(&config, 4, &tol()).unwrap();
    assert_eq!(r.passed, 300);
    assert!(r.worst_margin_literal >= -1e-9 && r.worst_margin_proof >= -1e-9);
}

#[test]
fn reports_do_not_depend_on_the_worker_count() {
    let config = LemmaConfig {
        cone_samples: 12,
        attainment_words: 3,
        causal_curves: 40,
        ..LemmaConfig::default()
    };
    let irr = rep(Embedding::irreducible(2));
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let suite = lemma_suite(&irr, &config, 21, &tol(), &LengthOptions::default()).unwrap();
            let (qi, samples) = qi_estimate(&irr, &words(10, 21), &tol(), &LengthOptions::default()).unwrap();
            serde_json::to_string(&(suite, qi, samples)).unwrap()
        })
    };
    let one = run(1);
    assert_eq!(one, run(8));
    assert_eq!(one, run(1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn qi_fit_is_monotone_in_the_budget(seed in any::<u64>(), small in 3usize..10, extra in 1usize..10) {
        let irr = rep(Embedding::irreducible(2));
        let ws = words(small + extra, seed);
        let opts = LengthOptions::default();
        let (big, samples) = qi_estimate(&irr, &ws, &tol(), &opts).unwrap();
        let part = fit_qi(&samples[..small], 0);
        prop_assert!(part.a <= big.a && part.b <= big.b);
    }
}
