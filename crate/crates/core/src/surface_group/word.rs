use std::fmt;
use std::str::FromStr;

use super::GroupError;

/// A signed generator index: `+k` is the k-th generator, `-k` its inverse.
/// Generators are numbered `a1 = 1, b1 = 2, a2 = 3, b2 = 4, ...`.
pub type Letter = i32;

/// Freely reduced word in the standard generators of the genus-`g` surface
/// group. Construction always reduces, so two words are equal as group
/// elements of the free group iff they compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    genus: u32,
    letters: Vec<Letter>,
}

fn check_letter(genus: u32, l: Letter) -> Result<(), GroupError> {
    let max = 2 * genus as i64;
    if l == 0 || (l as i64).abs() > max {
        return Err(GroupError::IndexOutOfRange { letter: l, genus });
    }
    Ok(())
}

/// Free reduction of a letter sequence with a stack.
fn reduce_letters(letters: impl IntoIterator<Item = Letter>) -> Vec<Letter> {
    let mut out: Vec<Letter> = Vec::new();
    for l in letters {
        if out.last() == Some(&-l) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Freely reduces `letters`, rejecting indices outside the genus.
pub fn free_reduce(genus: u32, letters: &[Letter]) -> Result<Word, GroupError> {
    Word::new(genus, letters.to_vec())
}

impl Word {
    pub fn new(genus: u32, letters: Vec<Letter>) -> Result<Self, GroupError> {
        if genus == 0 {
            return Err(GroupError::BadGenus(genus));
        }
        for &l in &letters {
            check_letter(genus, l)?;
        }
        Ok(Self {
            genus,
            letters: reduce_letters(letters),
        })
    }

    pub(crate) fn from_reduced_unchecked(genus: u32, letters: Vec<Letter>) -> Self {
        debug_assert_eq!(reduce_letters(letters.clone()), letters);
        Self { genus, letters }
    }

    pub fn identity(genus: u32) -> Self {
        Self {
            genus,
            letters: Vec::new(),
        }
    }

    pub fn generator(genus: u32, letter: Letter) -> Result<Self, GroupError> {
        Self::new(genus, vec![letter])
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Self {
            genus: self.genus,
            letters: self.letters.iter().rev().map(|l| -l).collect(),
        }
    }

    /// Product `self * other`, freely reduced.
    pub fn mul(&self, other: &Word) -> Self {
        assert_eq!(self.genus, other.genus, "genus mismatch in word product");
        Self {
            genus: self.genus,
            letters: reduce_letters(self.letters.iter().chain(other.letters.iter()).copied()),
        }
    }

    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::identity(self.genus);
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn conjugate_by(&self, eta: &Word) -> Self {
        eta.mul(self).mul(&eta.inverse())
    }

    /// Splits `self = u * core * u^-1` with `core` cyclically reduced.
    pub fn cyclic_reduction(&self) -> (Word, Word) {
        let l = &self.letters;
        let mut k = 0;
        while 2 * k + 1 < l.len() && l[k] == -l[l.len() - 1 - k] {
            k += 1;
        }
        let u = Word::from_reduced_unchecked(self.genus, l[..k].to_vec());
        let core = Word::from_reduced_unchecked(self.genus, l[k..l.len() - k].to_vec());
        (u, core)
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&f), Some(&l)) => self.letters.len() == 1 || f != -l,
            _ => true,
        }
    }

    /// Cyclic rotation: moves the first `s` letters to the end.
    pub fn rotate(&self, s: usize) -> Self {
        let n = self.letters.len();
        if n == 0 {
            return self.clone();
        }
        let s = s % n;
        let mut v = self.letters[s..].to_vec();
        v.extend_from_slice(&self.letters[..s]);
        Word::new(self.genus, v).expect("rotation keeps letters in range")
    }

    /// Canonical representative of the free-group conjugacy class: the
    /// lexicographically smallest rotation of the cyclic reduction.
    pub fn conjugacy_normal_form(&self) -> Self {
        let (_, core) = self.cyclic_reduction();
        (0..core.len().max(1))
            .map(|s| core.rotate(s))
            .min()
            .unwrap_or(core)
    }

    pub fn substitute(&self, images: &[Word]) -> Self {
        let mut letters = Vec::new();
        for &l in &self.letters {
            let img = &images[(l.unsigned_abs() - 1) as usize];
            if l > 0 {
                letters.extend_from_slice(&img.letters);
            } else {
                letters.extend(img.letters.iter().rev().map(|x| -x));
            }
        }
        Word {
            genus: self.genus,
            letters: reduce_letters(letters),
        }
    }

    /// Exponent sum of each generator (the image in the abelianization).
    pub fn abelianization(&self) -> Vec<i64> {
        let mut v = vec![0i64; 2 * self.genus as usize];
        for &l in &self.letters {
            v[(l.unsigned_abs() - 1) as usize] += l.signum() as i64;
        }
        v
    }
}

/// `a1`, `b1`, ... for a positive index.
pub fn generator_label(index: u32) -> String {
    let handle = index.div_ceil(2);
    if index % 2 == 1 {
        format!("a{handle}")
    } else {
        format!("b{handle}")
    }
}

/// Parses `a3` / `b3` into the generator index.
pub fn parse_generator(label: &str) -> Option<u32> {
    let label = label.trim();
    let (kind, num) = label.split_at(label.char_indices().nth(1).map(|(i, _)| i)?);
    let handle: u32 = num.parse().ok()?;
    if handle == 0 {
        return None;
    }
    match kind {
        "a" => Some(2 * handle - 1),
        "b" => Some(2 * handle),
        _ => None,
    }
}

fn parse_letter(token: &str) -> Option<Letter> {
    let t = token.trim();
    let (sign, body) = if let Some(rest) = t.strip_prefix('-') {
        (-1, rest)
    } else if let Some(rest) = t.strip_suffix("^-1") {
        (-1, rest)
    } else if let Some(first) = t.chars().next().filter(|c| matches!(c, 'A' | 'B')) {
        // capital letter = inverse
        let lower = first.to_ascii_lowercase();
        let idx = parse_generator(&format!("{lower}{}", &t[1..]))?;
        return Some(-(idx as Letter));
    } else {
        (1, t)
    };
    parse_generator(body).map(|i| sign * i as Letter)
}

/// Parses a comma-separated word such as `b1,a1,-b1` (also `a1^-1` or `A1`).
/// The empty string and `e` denote the identity.
pub fn parse_word(genus: u32, text: &str) -> Result<Word, GroupError> {
    let text = text.trim();
    if text.is_empty() || text == "e" || text == "1" {
        return Ok(Word::identity(genus));
    }
    let mut letters = Vec::new();
    for tok in text.split(',') {
        let l = parse_letter(tok).ok_or_else(|| GroupError::Parse(format!("bad letter `{}`", tok.trim())))?;
        letters.push(l);
    }
    Word::new(genus, letters)
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "e");
        }
        for (i, &l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if l < 0 {
                write!(f, "-")?;
            }
            write!(f, "{}", generator_label(l.unsigned_abs()))?;
        }
        Ok(())
    }
}

/// Parses with the genus inferred from the largest index (at least 2).
impl FromStr for Word {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let probe = parse_word(u32::MAX / 4, s)?;
        let max = probe.letters.iter().map(|l| l.unsigned_abs()).max().unwrap_or(0);
        parse_word(max.div_ceil(2).max(2), s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(letters: &[Letter]) -> Word {
        Word::new(2, letters.to_vec()).unwrap()
    }

    #[test]
    fn cancels_adjacent_inverse_pair() {
        assert!(w(&[1, -1]).is_empty());
    }

    #[test]
    fn cancels_inner_pair() {
        assert_eq!(w(&[1, 2, -2, 1]).letters(), &[1, 1]);
    }

    #[test]
    fn out_of_range_index_rejected() {
        assert!(matches!(
            Word::new(2, vec![5]),
            Err(GroupError::IndexOutOfRange { letter: 5, genus: 2 })
        ));
        assert!(Word::new(2, vec![0]).is_err());
    }

    #[test]
    fn cyclic_reduction_splits_conjugator() {
        let x = w(&[2, 1, 3, -2]);
        let (u, core) = x.cyclic_reduction();
        assert_eq!(u.letters(), &[2]);
        assert_eq!(core.letters(), &[1, 3]);
        assert_eq!(core.conjugate_by(&u), x);
    }

    #[test]
    fn conjugacy_normal_form_is_class_invariant() {
        let x = w(&[1, 2, 3]);
        let eta = w(&[4, -1]);
        assert_eq!(
            x.conjugacy_normal_form(),
            x.conjugate_by(&eta).conjugacy_normal_form()
        );
    }

    #[test]
    fn parse_and_display() {
        let x = parse_word(2, "b1, a1, -b2, A2, a1^-1").unwrap();
        assert_eq!(x.letters(), &[2, 1, -4, -3, -1]);
        assert_eq!(x.to_string(), "b1,a1,-b2,-a2,-a1");
        assert_eq!(parse_word(2, "e").unwrap(), Word::identity(2));
        assert!(parse_word(2, "c1").is_err());
        assert!(parse_word(2, "a3").is_err());
        let y: Word = "a3,b1".parse().unwrap();
        assert_eq!(y.genus(), 3);
    }

    #[test]
    fn labels() {
        assert_eq!(generator_label(1), "a1");
        assert_eq!(generator_label(4), "b2");
        assert_eq!(parse_generator("b2"), Some(4));
        assert_eq!(parse_generator("a0"), None);
    }
}
