//! Symbolic model of the closed surface group
//! `< a1, b1, ..., ag, bg | [a1,b1]...[ag,bg] >`, its automorphisms given by
//! substitution tables, Dehn twists, and curve systems.

mod automorphism;
mod word;

use automorphism::header_genus;
pub use automorphism::{
    load_twists, parse_table, twist_from_file, verify_automorphism, Automorphism, Certificate, Twist,
    DEFAULT_CONJUGATOR_DEPTH,
};
pub use word::{free_reduce, generator_label, parse_generator, parse_word, Letter, Word};

use thiserror::Error;

use crate::table::{TableError, TableFile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GroupError {
    #[error("letter {letter} out of range for genus {genus}")]
    IndexOutOfRange { letter: i32, genus: u32 },
    #[error("unsupported genus {0}")]
    BadGenus(u32),
    #[error("no built-in data for genus {0}; supply tables instead")]
    UnsupportedGenus(u32),
    #[error("words belong to different genera")]
    GenusMismatch,
    #[error("substitution table has {0} images, expected one per generator")]
    IncompleteTable(usize),
    #[error("relator image is not conjugate to the relator with a conjugator of length <= {0}")]
    NoConjugatorFound(usize),
    #[error("tables for `{0}` are not mutually inverse")]
    NotInverse(String),
    #[error("curve system needs {expected} curves, got {got}")]
    WrongCurveCount { expected: usize, got: usize },
    #[error("curve `{0}` is trivial")]
    TrivialCurve(String),
    #[error("word exceeded {0} letters")]
    WordTooLong(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Table(#[from] TableError),
}

/// Standard presentation of the genus-`g` surface group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    genus: u32,
    relator: Word,
}

impl Presentation {
    pub fn new(genus: u32) -> Result<Self, GroupError> {
        if genus < 1 {
            return Err(GroupError::BadGenus(genus));
        }
        let mut letters = Vec::with_capacity(4 * genus as usize);
        for i in 0..genus as i32 {
            let (a, b) = (2 * i + 1, 2 * i + 2);
            letters.extend_from_slice(&[a, b, -a, -b]);
        }
        Ok(Self {
            genus,
            relator: Word::new(genus, letters)?,
        })
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    /// `[a1,b1]...[ag,bg]` with `[a,b] = a b a^-1 b^-1`.
    pub fn relator(&self) -> &Word {
        &self.relator
    }

    pub fn generator_labels(&self) -> Vec<String> {
        (1..=2 * self.genus).map(generator_label).collect()
    }

    /// Euler characteristic `2 - 2g`.
    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64
    }
}

const GENUS2_TWISTS: &str = include_str!("../../data/genus2_twists.txt");
const GENUS2_CURVES: &str = include_str!("../../data/genus2_curves.txt");

/// Certified Dehn twists along each `a_i` and `b_i`. Only genus 2 is built
/// in.
pub fn builtin_twists(genus: u32) -> Result<Vec<Twist>, GroupError> {
    if genus != 2 {
        return Err(GroupError::UnsupportedGenus(genus));
    }
    load_twists(GENUS2_TWISTS, DEFAULT_CONJUGATOR_DEPTH)
}

/// Looks up a built-in twist by label (`a1`, `b2`, ...) or `identity`.
pub fn builtin_twist(genus: u32, label: &str) -> Result<Twist, GroupError> {
    if label == "identity" || label == "id" {
        return Ok(Twist::identity(genus));
    }
    builtin_twists(genus)?
        .into_iter()
        .find(|t| t.label == label)
        .ok_or_else(|| GroupError::Parse(format!("no built-in twist `{label}`")))
}

/// `9g - 9` labelled curves whose lengths pin down a point of Teichmüller
/// space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveSystem {
    genus: u32,
    labels: Vec<String>,
    words: Vec<Word>,
}

impl CurveSystem {
    pub fn expected_len(genus: u32) -> usize {
        (9 * genus as usize).saturating_sub(9)
    }

    pub fn new(genus: u32, labels: Vec<String>, words: Vec<Word>) -> Result<Self, GroupError> {
        let expected = Self::expected_len(genus);
        if words.len() != expected || labels.len() != expected {
            return Err(GroupError::WrongCurveCount {
                expected,
                got: words.len(),
            });
        }
        for (label, w) in labels.iter().zip(&words) {
            if w.genus() != genus {
                return Err(GroupError::GenusMismatch);
            }
            if w.is_empty() {
                return Err(GroupError::TrivialCurve(label.clone()));
            }
        }
        Ok(Self { genus, labels, words })
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Word)> {
        self.labels.iter().map(String::as_str).zip(self.words.iter())
    }
}

/// Reads a user curve system: header `genus: g` and a `[curves]` section with
/// exactly `9g - 9` `label: word` entries.
pub fn load_curve_system(text: &str) -> Result<CurveSystem, GroupError> {
    let file = TableFile::parse(text)?;
    let genus = header_genus(&file)?;
    let section = file
        .section("curves")
        .ok_or_else(|| TableError::MissingSection("curves".into()))?;
    let mut labels = Vec::new();
    let mut words = Vec::new();
    for (label, value) in section.entries() {
        labels.push(label.to_string());
        words.push(parse_word(genus, value)?);
    }
    CurveSystem::new(genus, labels, words)
}

/// Built-in curve system: pants curves `alpha_i`, seams `beta_i`, and the
/// twisted seams `T_{alpha_i}(beta_i)`.
pub fn curve_system(genus: u32) -> Result<CurveSystem, GroupError> {
    if genus != 2 {
        return Err(GroupError::UnsupportedGenus(genus));
    }
    let file = TableFile::parse(GENUS2_CURVES)?;
    let base = file
        .section("curves")
        .ok_or_else(|| TableError::MissingSection("curves".into()))?;
    let lookup = |label: &str| -> Result<Word, GroupError> {
        let (_, w) = base
            .entries()
            .find(|(k, _)| *k == label)
            .ok_or_else(|| GroupError::Parse(format!("missing curve `{label}`")))?;
        parse_word(genus, w)
    };
    let separating = twist_from_file(&file, genus, "twist_alpha3", DEFAULT_CONJUGATOR_DEPTH)?;
    let twists = [
        builtin_twist(genus, "a1")?,
        builtin_twist(genus, "a2")?,
        separating,
    ];
    let mut labels = Vec::new();
    let mut words = Vec::new();
    for i in 1..=3 {
        labels.push(format!("alpha{i}"));
        words.push(lookup(&format!("alpha{i}"))?);
    }
    for i in 1..=3 {
        labels.push(format!("beta{i}"));
        words.push(lookup(&format!("beta{i}"))?);
    }
    for (i, twist) in twists.iter().enumerate() {
        labels.push(format!("T(beta{})", i + 1));
        words.push(twist.forward.apply(&words[3 + i])?);
    }
    CurveSystem::new(genus, labels, words)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relator_genus_two() {
        let p = Presentation::new(2).unwrap();
        assert_eq!(p.relator().letters(), &[1, 2, -1, -2, 3, 4, -3, -4]);
        assert_eq!(free_reduce(2, p.relator().letters()).unwrap().len(), 8);
        assert!(p.relator().is_cyclically_reduced());
    }

    #[test]
    fn four_certified_twists_in_genus_two() {
        let twists = builtin_twists(2).unwrap();
        assert_eq!(twists.len(), 4);
        for t in &twists {
            assert!(t.forward.certificate().orientation_preserving());
            assert!(t.forward.certificate().conjugator.len() <= DEFAULT_CONJUGATOR_DEPTH);
        }
        let a1 = builtin_twist(2, "a1").unwrap();
        let squared = a1.forward.compose(&a1.forward).unwrap();
        assert!(squared.certificate().orientation_preserving());
    }

    #[test]
    fn other_genus_has_no_builtins() {
        assert_eq!(builtin_twists(3).unwrap_err(), GroupError::UnsupportedGenus(3));
        assert_eq!(curve_system(3).unwrap_err(), GroupError::UnsupportedGenus(3));
    }

    #[test]
    fn builtin_curve_system() {
        let cs = curve_system(2).unwrap();
        assert_eq!(cs.len(), 9);
        assert_eq!(
            cs.labels(),
            &["alpha1", "alpha2", "alpha3", "beta1", "beta2", "beta3", "T(beta1)", "T(beta2)", "T(beta3)"]
        );
        for w in cs.words() {
            assert!(!w.is_empty());
            assert_eq!(free_reduce(2, w.letters()).unwrap(), *w);
        }
        assert_eq!(cs.words()[6], parse_word(2, "b1,a1").unwrap());
    }

    #[test]
    fn user_curve_system_length_checked() {
        let mut text = String::from("genus: 2\n[curves]\n");
        for i in 0..8 {
            text.push_str(&format!("c{i}: a1,b{}\n", 1 + i % 2));
        }
        assert_eq!(
            load_curve_system(&text).unwrap_err(),
            GroupError::WrongCurveCount { expected: 9, got: 8 }
        );
        text.push_str("c8: b2\n");
        assert_eq!(load_curve_system(&text).unwrap().len(), 9);
    }
}
