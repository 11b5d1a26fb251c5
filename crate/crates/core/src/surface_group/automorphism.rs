use std::collections::BTreeMap;

use super::word::{generator_label, parse_generator, parse_word, Word};
use super::{GroupError, Presentation};
use crate::table::TableFile;

/// Default maximal conjugator length accepted by [`verify_automorphism`].
pub const DEFAULT_CONJUGATOR_DEPTH: usize = 8;

/// Proof that a substitution table sends the relator `R` to
/// `conjugator * R^exponent * conjugator^-1` in the free group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub conjugator: Word,
    /// `+1` or `-1`.
    pub exponent: i8,
}

impl Certificate {
    /// Exponent `+1`: the table induces an orientation-preserving mapping
    /// class.
    pub fn orientation_preserving(&self) -> bool {
        self.exponent == 1
    }
}

/// Endomorphism of the free group on the standard generators whose image of
/// the surface relator is certified to be a conjugate of `R^{+-1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automorphism {
    genus: u32,
    images: Vec<Word>,
    certificate: Certificate,
}

/// Finds the shortest `c` with `w = c * r * c^-1` in the free group, if any.
/// `r` must be cyclically reduced.
fn shortest_conjugator(w: &Word, r: &Word) -> Option<Word> {
    let (u, core) = w.cyclic_reduction();
    if core.len() != r.len() {
        return None;
    }
    if r.is_empty() {
        return Some(Word::identity(w.genus()));
    }
    let n = r.len();
    let mut best: Option<Word> = None;
    for s in 0..n {
        if core != r.rotate(s) {
            continue;
        }
        // r = p q and core = q p = p^-1 r p = q r q^-1
        let p = Word::new(r.genus(), r.letters()[..s].to_vec()).ok()?;
        let q = Word::new(r.genus(), r.letters()[s..].to_vec()).ok()?;
        for c in [u.mul(&p.inverse()), u.mul(&q)] {
            debug_assert_eq!(r.conjugate_by(&c), *w);
            if best.as_ref().is_none_or(|b| c.len() < b.len()) {
                best = Some(c);
            }
        }
    }
    best
}

/// Certifies a substitution table (one image per generator, in generator
/// order) as an automorphism of the surface group.
pub fn verify_automorphism(images: Vec<Word>, max_conjugator: usize) -> Result<Automorphism, GroupError> {
    let genus = images.first().map(|w| w.genus()).ok_or(GroupError::IncompleteTable(0))?;
    if images.len() != 2 * genus as usize || images.iter().any(|w| w.genus() != genus) {
        return Err(GroupError::IncompleteTable(images.len()));
    }
    let relator = Presentation::new(genus)?.relator().clone();
    let image = relator.substitute(&images);
    for exponent in [1i8, -1] {
        let target = if exponent == 1 { relator.clone() } else { relator.inverse() };
        if let Some(c) = shortest_conjugator(&image, &target) {
            if c.len() <= max_conjugator {
                return Ok(Automorphism {
                    genus,
                    images,
                    certificate: Certificate {
                        conjugator: c,
                        exponent,
                    },
                });
            }
        }
    }
    Err(GroupError::NoConjugatorFound(max_conjugator))
}

impl Automorphism {
    pub fn identity(genus: u32) -> Self {
        let images = (1..=2 * genus as i32)
            .map(|g| Word::generator(genus, g).expect("generator in range"))
            .collect();
        verify_automorphism(images, 0).expect("identity certifies")
    }

    /// Certifies a table given as generator -> image; omitted generators are
    /// fixed.
    pub fn from_map(genus: u32, map: &BTreeMap<u32, Word>, max_conjugator: usize) -> Result<Self, GroupError> {
        let mut images = Vec::with_capacity(2 * genus as usize);
        for g in 1..=2 * genus {
            match map.get(&g) {
                Some(w) if w.genus() == genus => images.push(w.clone()),
                Some(_) => return Err(GroupError::GenusMismatch),
                None => images.push(Word::generator(genus, g as i32)?),
            }
        }
        if let Some(&bad) = map.keys().find(|&&g| g == 0 || g > 2 * genus) {
            return Err(GroupError::IndexOutOfRange {
                letter: bad as i32,
                genus,
            });
        }
        verify_automorphism(images, max_conjugator)
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    pub fn certificate(&self) -> &Certificate {
        &self.certificate
    }

    /// `w -> psi(w)`: substitute and freely reduce.
    pub fn apply(&self, w: &Word) -> Result<Word, GroupError> {
        if w.genus() != self.genus {
            return Err(GroupError::GenusMismatch);
        }
        Ok(w.substitute(&self.images))
    }

    /// `self ∘ first`, i.e. `w -> self(first(w))`. The composite is
    /// re-certified; the conjugator bound is only used as a sanity limit.
    pub fn compose(&self, first: &Automorphism) -> Result<Automorphism, GroupError> {
        if self.genus != first.genus {
            return Err(GroupError::GenusMismatch);
        }
        let images = first.images.iter().map(|w| w.substitute(&self.images)).collect();
        verify_automorphism(images, usize::MAX)
    }

    /// `self^k` for `k >= 0`.
    pub fn power(&self, k: u32) -> Result<Automorphism, GroupError> {
        let mut out = Automorphism::identity(self.genus);
        for _ in 0..k {
            out = self.compose(&out)?;
        }
        Ok(out)
    }

    /// True when `self ∘ other` fixes every generator.
    pub fn is_inverse_of(&self, other: &Automorphism) -> bool {
        self.genus == other.genus
            && other
                .images
                .iter()
                .enumerate()
                .all(|(i, w)| w.substitute(&self.images).letters() == [(i + 1) as i32])
    }

    /// Renders the non-trivial part of the table as `gen: word` lines.
    pub fn table_lines(&self) -> Vec<(String, String)> {
        self.images
            .iter()
            .enumerate()
            .filter(|(i, w)| w.letters() != [(*i + 1) as i32])
            .map(|(i, w)| (generator_label(i as u32 + 1), w.to_string()))
            .collect()
    }
}

/// Reads a substitution table from `gen: word` entries.
pub fn parse_table<'a>(
    genus: u32,
    entries: impl Iterator<Item = (&'a str, &'a str)>,
) -> Result<BTreeMap<u32, Word>, GroupError> {
    let mut map = BTreeMap::new();
    for (key, value) in entries {
        let g = parse_generator(key).ok_or_else(|| GroupError::Parse(format!("unknown generator `{key}`")))?;
        if g > 2 * genus {
            return Err(GroupError::IndexOutOfRange {
                letter: g as i32,
                genus,
            });
        }
        if map.insert(g, parse_word(genus, value)?).is_some() {
            return Err(GroupError::Parse(format!("generator `{key}` listed twice")));
        }
    }
    Ok(map)
}

/// A mapping class given by a certified automorphism together with a
/// certified inverse.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Twist {
    pub label: String,
    pub forward: Automorphism,
    pub inverse: Automorphism,
}

impl Twist {
    pub fn new(label: impl Into<String>, forward: Automorphism, inverse: Automorphism) -> Result<Self, GroupError> {
        let label = label.into();
        if !forward.is_inverse_of(&inverse) || !inverse.is_inverse_of(&forward) {
            return Err(GroupError::NotInverse(label));
        }
        Ok(Self { label, forward, inverse })
    }

    pub fn identity(genus: u32) -> Self {
        let id = Automorphism::identity(genus);
        Self {
            label: "identity".into(),
            forward: id.clone(),
            inverse: id,
        }
    }

    /// `psi^k` for any integer `k` (negative powers use the inverse table).
    pub fn power(&self, k: i64) -> Result<Automorphism, GroupError> {
        let base = if k < 0 { &self.inverse } else { &self.forward };
        base.power(k.unsigned_abs() as u32)
    }

    /// Applies `psi^k` to a word, one substitution at a time.
    pub fn apply_power(&self, k: i64, w: &Word, max_letters: usize) -> Result<Word, GroupError> {
        let base = if k < 0 { &self.inverse } else { &self.forward };
        let mut out = w.clone();
        for _ in 0..k.unsigned_abs() {
            out = base.apply(&out)?;
            if out.len() > max_letters {
                return Err(GroupError::WordTooLong(max_letters));
            }
        }
        Ok(out)
    }
}

/// Builds the twist stored in sections `[name]` and `[name.inverse]`.
pub fn twist_from_file(file: &TableFile, genus: u32, name: &str, max_conjugator: usize) -> Result<Twist, GroupError> {
    let forward = file
        .section(name)
        .ok_or_else(|| GroupError::Parse(format!("missing section `[{name}]`")))?;
    let inv_name = format!("{name}.inverse");
    let inverse = file
        .section(&inv_name)
        .ok_or_else(|| GroupError::Parse(format!("section `{name}` has no `[{inv_name}]`")))?;
    let forward = Automorphism::from_map(genus, &parse_table(genus, forward.entries())?, max_conjugator)?;
    let inverse = Automorphism::from_map(genus, &parse_table(genus, inverse.entries())?, max_conjugator)?;
    Twist::new(name, forward, inverse)
}

pub(crate) fn header_genus(file: &TableFile) -> Result<u32, GroupError> {
    file.require_header("genus")?
        .parse()
        .ok()
        .filter(|&g| g > 0)
        .ok_or_else(|| GroupError::Parse("genus must be a positive integer".into()))
}

/// Loads every `[name]` / `[name.inverse]` section pair from a table file.
pub fn load_twists(text: &str, max_conjugator: usize) -> Result<Vec<Twist>, GroupError> {
    let file = TableFile::parse(text)?;
    let genus = header_genus(&file)?;
    file.sections
        .iter()
        .filter(|s| !s.name.ends_with(".inverse"))
        .map(|s| twist_from_file(&file, genus, &s.name, max_conjugator))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn word(s: &str) -> Word {
        parse_word(2, s).unwrap()
    }

    fn twist_a1() -> Automorphism {
        let mut m = BTreeMap::new();
        m.insert(2, word("b1,a1"));
        Automorphism::from_map(2, &m, DEFAULT_CONJUGATOR_DEPTH).unwrap()
    }

    #[test]
    fn identity_has_empty_conjugator() {
        let id = Automorphism::identity(2);
        assert!(id.certificate().conjugator.is_empty());
        assert!(id.certificate().orientation_preserving());
        let w = word("a1,b2,-a2");
        assert_eq!(id.apply(&w).unwrap(), w);
    }

    #[test]
    fn twist_substitution() {
        let t = twist_a1();
        assert_eq!(t.apply(&word("b1")).unwrap(), word("b1,a1"));
        assert_eq!(t.apply(&word("a1")).unwrap(), word("a1"));
    }

    #[test]
    fn squaring_map_is_rejected() {
        let mut m = BTreeMap::new();
        m.insert(1, word("a1,a1"));
        assert_eq!(
            Automorphism::from_map(2, &m, 64),
            Err(GroupError::NoConjugatorFound(64))
        );
    }

    #[test]
    fn conjugation_needs_enough_depth() {
        // inner automorphism by a word of length 3
        let eta = word("a2,b1,a1");
        let images: Vec<Word> = (1..=4).map(|g| Word::generator(2, g).unwrap().conjugate_by(&eta)).collect();
        assert_eq!(
            verify_automorphism(images.clone(), 2),
            Err(GroupError::NoConjugatorFound(2))
        );
        let cert = verify_automorphism(images, 8).unwrap();
        assert_eq!(cert.certificate().conjugator, eta);
    }

    #[test]
    fn orientation_reversal_detected() {
        // a1 <-> b1 swaps the commutator for its inverse
        let mut m = BTreeMap::new();
        m.insert(1, word("b1"));
        m.insert(2, word("a1"));
        m.insert(3, word("b2"));
        m.insert(4, word("a2"));
        let psi = Automorphism::from_map(2, &m, 8).unwrap();
        assert_eq!(psi.certificate().exponent, -1);
        assert!(!psi.certificate().orientation_preserving());
    }

    #[test]
    fn composition_certifies() {
        let t = twist_a1();
        let t2 = t.compose(&t).unwrap();
        assert_eq!(t2.apply(&word("b1")).unwrap(), word("b1,a1,a1"));
        for w in ["b1", "a2,b1", "-b1,a1,b2"] {
            let w = word(w);
            assert_eq!(t2.apply(&w).unwrap(), t.apply(&t.apply(&w).unwrap()).unwrap());
        }
    }

    #[test]
    fn inverse_pair() {
        let mut m = BTreeMap::new();
        m.insert(2, word("b1,-a1"));
        let inv = Automorphism::from_map(2, &m, 8).unwrap();
        let tw = Twist::new("a1", twist_a1(), inv).unwrap();
        let w = word("b1,b2,a1");
        let there = tw.apply_power(3, &w, 1000).unwrap();
        assert_eq!(tw.apply_power(-3, &there, 1000).unwrap(), w);
        assert!(Twist::new("bad", twist_a1(), twist_a1()).is_err());
    }

    #[test]
    fn word_growth_guard() {
        let mut m = BTreeMap::new();
        m.insert(2, word("b1,-a1"));
        let inv = Automorphism::from_map(2, &m, 8).unwrap();
        let tw = Twist::new("a1", twist_a1(), inv).unwrap();
        assert_eq!(
            tw.apply_power(50, &word("b1"), 10),
            Err(GroupError::WordTooLong(10))
        );
    }
}
