//! Letters, reduced words in a free group, monoid words, ShortLex order,
//! text and JSON encodings, subword avoidance and the Nielsen automorphism
//! with its frequency windows.

mod avoid;
mod nielsen;
mod sample;

pub use avoid::{count_avoiding, count_occurrences, AvoidMode, AvoidanceCounts, SubwordBound};
pub use nielsen::{
    apply_nielsen, apply_nielsen_inverse, stretch_bound, stretch_threshold, z_membership,
    FrequencyWindow, ZParams,
};
pub use sample::{
    calibrate_l, letter_frequency_report, sample_reduced, sample_rng, Calibration,
    FrequencyReport,
};

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A generator `a_k` (positive) or its inverse (negative).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "i32", into = "i32")]
pub struct Letter(i32);

impl Letter {
    pub fn new(v: i32) -> Result<Letter> {
        if v == 0 {
            return Err(Error::Parse("letter 0".into()));
        }
        Ok(Letter(v))
    }

    pub fn pos(k: u32) -> Letter {
        Letter(k as i32)
    }

    pub fn value(self) -> i32 {
        self.0
    }

    pub fn inverse(self) -> Letter {
        Letter(-self.0)
    }

    pub fn generator(self) -> u32 {
        self.0.unsigned_abs()
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// Position in the fixed order `a1 < A1 < a2 < A2 < ...`.
    pub fn index(self) -> usize {
        2 * (self.generator() as usize - 1) + usize::from(self.0 < 0)
    }

    pub fn from_index(i: usize) -> Letter {
        let k = (i / 2 + 1) as i32;
        Letter(if i % 2 == 0 { k } else { -k })
    }
}

impl TryFrom<i32> for Letter {
    type Error = Error;
    fn try_from(v: i32) -> Result<Letter> {
        Letter::new(v)
    }
}

impl From<Letter> for i32 {
    fn from(l: Letter) -> i32 {
        l.0
    }
}

impl PartialOrd for Letter {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Letter {
    fn cmp(&self, other: &Self) -> Ordering {
        self.index().cmp(&other.index())
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 > 0 {
            write!(f, "a{}", self.0)
        } else {
            write!(f, "A{}", -self.0)
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct Alphabet {
    pub rank: u32,
}

impl Alphabet {
    pub fn new(rank: u32) -> Result<Alphabet> {
        if rank == 0 {
            return Err(Error::Rank { rank, min: 1 });
        }
        Ok(Alphabet { rank })
    }

    /// Number of signed letters, `2r`.
    pub fn size(self) -> usize {
        2 * self.rank as usize
    }

    pub fn contains(self, l: Letter) -> bool {
        l.generator() <= self.rank
    }

    pub fn check(self, l: Letter) -> Result<()> {
        if self.contains(l) {
            Ok(())
        } else {
            Err(Error::LetterOutOfRange { letter: l.0 as i64, rank: self.rank })
        }
    }

    pub fn letters(self) -> impl Iterator<Item = Letter> {
        (0..self.size()).map(Letter::from_index)
    }

    pub fn positive(self) -> impl Iterator<Item = Letter> {
        (1..=self.rank).map(Letter::pos)
    }
}

fn shortlex(a: &[Letter], b: &[Letter]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// A freely reduced word. Constructors reject or reduce, so the invariant
/// that no letter is followed by its inverse always holds.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GroupWord(Vec<Letter>);

impl GroupWord {
    pub fn empty() -> GroupWord {
        GroupWord(Vec::new())
    }

    /// Free reduction of an arbitrary letter sequence.
    pub fn reduce(letters: impl IntoIterator<Item = Letter>) -> GroupWord {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        GroupWord(out)
    }

    /// Like [`GroupWord::reduce`] but also checks letters against the alphabet.
    pub fn from_letters(letters: &[i32], alphabet: Alphabet) -> Result<GroupWord> {
        let ls = letters
            .iter()
            .map(|&v| {
                let l = Letter::new(v)?;
                alphabet.check(l)?;
                Ok(l)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GroupWord::reduce(ls))
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> GroupWord {
        GroupWord(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn mul(&self, other: &GroupWord) -> GroupWord {
        GroupWord::reduce(self.0.iter().chain(other.0.iter()).copied())
    }

    pub fn pow(&self, n: i64) -> GroupWord {
        let base = if n < 0 { self.inverse() } else { self.clone() };
        let mut out = GroupWord::empty();
        for _ in 0..n.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.0.first(), self.0.last()) {
            (Some(&a), Some(&b)) => self.0.len() == 1 || a != b.inverse(),
            _ => true,
        }
    }

    /// Splits `g = u w u^-1` with `w` cyclically reduced. Errors on the
    /// empty word.
    pub fn cyclic_decompose(&self) -> Result<(GroupWord, GroupWord)> {
        if self.is_empty() {
            return Err(Error::EmptyWord);
        }
        let n = self.0.len();
        let mut k = 0;
        while 2 * (k + 1) < n + 1 && self.0[k] == self.0[n - 1 - k].inverse() {
            k += 1;
        }
        let u = GroupWord(self.0[..k].to_vec());
        let w = GroupWord(self.0[k..n - k].to_vec());
        Ok((u, w))
    }

    pub fn max_generator(&self) -> u32 {
        self.0.iter().map(|l| l.generator()).max().unwrap_or(0)
    }

    pub fn to_ints(&self) -> Vec<i32> {
        self.0.iter().map(|l| l.0).collect()
    }

    pub fn parse(text: &str, alphabet: Alphabet) -> Result<GroupWord> {
        let ls = parse_letters(text)?;
        for &l in &ls {
            alphabet.check(l)?;
        }
        let w = GroupWord::reduce(ls.iter().copied());
        Ok(w)
    }

    /// Parses and insists the input was already reduced.
    pub fn parse_reduced(text: &str, alphabet: Alphabet) -> Result<GroupWord> {
        let ls = parse_letters(text)?;
        let w = GroupWord::parse(text, alphabet)?;
        if w.len() != ls.len() {
            return Err(Error::Parse(format!("word {text:?} is not freely reduced")));
        }
        Ok(w)
    }
}

impl PartialOrd for GroupWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for GroupWord {
    fn cmp(&self, other: &Self) -> Ordering {
        shortlex(&self.0, &other.0)
    }
}

impl fmt::Display for GroupWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_letters(f, &self.0)
    }
}

/// A word in the positive letters only.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MonoidWord(Vec<Letter>);

impl MonoidWord {
    pub fn empty() -> MonoidWord {
        MonoidWord(Vec::new())
    }

    pub fn new(letters: Vec<Letter>, alphabet: Alphabet) -> Result<MonoidWord> {
        for &l in &letters {
            alphabet.check(l)?;
            if !l.is_positive() {
                return Err(Error::Parse(format!("inverse letter {l} in a monoid word")));
            }
        }
        Ok(MonoidWord(letters))
    }

    /// From generator indices `1..=r`; panics on zero.
    pub fn from_gens(gens: &[u32]) -> MonoidWord {
        assert!(gens.iter().all(|&g| g > 0), "generator index 0");
        MonoidWord(gens.iter().map(|&g| Letter::pos(g)).collect())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn gens(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().map(|l| l.generator())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, g: u32) {
        self.0.push(Letter::pos(g));
    }

    pub fn pushed(&self, g: u32) -> MonoidWord {
        let mut w = self.clone();
        w.push(g);
        w
    }

    pub fn concat(&self, other: &MonoidWord) -> MonoidWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        MonoidWord(v)
    }

    pub fn starts_with(&self, prefix: &MonoidWord) -> bool {
        self.0.starts_with(&prefix.0)
    }

    pub fn prefix(&self, n: usize) -> MonoidWord {
        MonoidWord(self.0[..n].to_vec())
    }

    /// The word with its first `n` letters removed.
    pub fn suffix(&self, n: usize) -> MonoidWord {
        MonoidWord(self.0[n..].to_vec())
    }

    pub fn parse(text: &str, alphabet: Alphabet) -> Result<MonoidWord> {
        MonoidWord::new(parse_letters(text)?, alphabet)
    }

    /// All words of length exactly `n` over `r` letters, in ShortLex order.
    pub fn all_of_length(r: u32, n: usize) -> Vec<MonoidWord> {
        let mut out = vec![MonoidWord::empty()];
        for _ in 0..n {
            out = out.iter().flat_map(|w| (1..=r).map(move |g| w.pushed(g))).collect();
        }
        out
    }

    /// All words of length at most `n`, in ShortLex order.
    pub fn ball(r: u32, n: usize) -> Vec<MonoidWord> {
        (0..=n).flat_map(|k| MonoidWord::all_of_length(r, k)).collect()
    }
}

impl PartialOrd for MonoidWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MonoidWord {
    fn cmp(&self, other: &Self) -> Ordering {
        shortlex(&self.0, &other.0)
    }
}

impl fmt::Display for MonoidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_letters(f, &self.0)
    }
}

fn write_letters(f: &mut fmt::Formatter<'_>, ls: &[Letter]) -> fmt::Result {
    for (i, l) in ls.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{l}")?;
    }
    Ok(())
}

/// Accepts `a1 a2 A1`, the short forms `a b A` (letter k of the Latin
/// alphabet is generator k), or a JSON array of signed integers.
pub fn parse_letters(text: &str) -> Result<Vec<Letter>> {
    let t = text.trim();
    if t.starts_with('[') {
        let ints: Vec<i32> =
            serde_json::from_str(t).map_err(|e| Error::Parse(format!("{t:?}: {e}")))?;
        return ints.into_iter().map(Letter::new).collect();
    }
    t.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|tok| !tok.is_empty())
        .map(parse_token)
        .collect()
}

fn parse_token(tok: &str) -> Result<Letter> {
    let bad = || Error::Parse(format!("bad letter token {tok:?}"));
    let mut chars = tok.chars();
    let c = chars.next().ok_or_else(bad)?;
    if !c.is_ascii_alphabetic() {
        return Err(bad());
    }
    let rest = chars.as_str();
    let k: i32 = if rest.is_empty() {
        (c.to_ascii_lowercase() as u8 - b'a' + 1) as i32
    } else {
        if c.to_ascii_lowercase() != 'a' {
            return Err(bad());
        }
        let k: i32 = rest.parse().map_err(|_| bad())?;
        if k <= 0 {
            return Err(bad());
        }
        k
    };
    Ok(Letter(if c.is_ascii_uppercase() { -k } else { k }))
}
