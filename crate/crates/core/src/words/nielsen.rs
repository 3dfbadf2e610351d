use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::{Alphabet, GroupWord, Letter};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// `a1 -> a1`, `a2 -> a1 a2`, other generators fixed; result reduced.
pub fn apply_nielsen(w: &GroupWord) -> GroupWord {
    substitute(w, Letter::pos(1))
}

/// The inverse automorphism, `a2 -> A1 a2`.
pub fn apply_nielsen_inverse(w: &GroupWord) -> GroupWord {
    substitute(w, Letter::pos(1).inverse())
}

fn substitute(w: &GroupWord, prefix: Letter) -> GroupWord {
    let a2 = Letter::pos(2);
    GroupWord::reduce(w.letters().iter().flat_map(|&l| {
        if l == a2 {
            vec![prefix, a2]
        } else if l == a2.inverse() {
            vec![a2.inverse(), prefix.inverse()]
        } else {
            vec![l]
        }
    }))
}

/// Window half-width and the first prefix length it applies from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZParams {
    #[serde(with = "crate::rational::serde_str")]
    pub epsilon: Rational,
    pub l: usize,
}

/// Incremental frequency test: after each pushed letter, reports whether
/// every letter and every reduced two-letter word has frequency strictly
/// within `epsilon` of its uniform value in the current prefix.
#[derive(Clone, Debug)]
pub struct FrequencyWindow {
    size: usize,
    p: i128,
    q: i128,
    singles: Vec<i128>,
    pairs: Vec<i128>,
    last: Option<usize>,
    len: i128,
}

impl FrequencyWindow {
    pub fn new(r: u32, epsilon: &Rational) -> Result<FrequencyWindow> {
        let alphabet = Alphabet::new(r)?;
        let size = alphabet.size();
        let small = |x: &BigInt| x.to_i64().map(i128::from);
        let (p, q) = match (small(epsilon.numer()), small(epsilon.denom())) {
            (Some(p), Some(q)) if p > 0 => (p, q),
            _ => {
                return Err(Error::Input(format!(
                    "epsilon must be a positive rational with 64-bit parts, got {}",
                    rational::format(epsilon)
                )))
            }
        };
        Ok(FrequencyWindow {
            size,
            p,
            q,
            singles: vec![0; size],
            pairs: vec![0; size * size],
            last: None,
            len: 0,
        })
    }

    pub fn push(&mut self, l: Letter) {
        let i = l.index();
        self.singles[i] += 1;
        if let Some(j) = self.last {
            self.pairs[j * self.size + i] += 1;
        }
        self.last = Some(i);
        self.len += 1;
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Whether the current prefix lies in every window.
    pub fn in_window(&self) -> bool {
        let m = self.len;
        if m == 0 {
            return false;
        }
        let s = self.size as i128;
        // |c/m - 1/s| < p/q  <=>  |s c - m| q < s p m
        let ok = |count: i128, s: i128| (s * count - m).abs() * self.q < s * self.p * m;
        if !self.singles.iter().all(|&c| ok(c, s)) {
            return false;
        }
        let t = s * (s - 1);
        for a in 0..self.size {
            for b in 0..self.size {
                if Letter::from_index(a) == Letter::from_index(b).inverse() {
                    continue;
                }
                if !ok(self.pairs[a * self.size + b], t) {
                    return false;
                }
            }
        }
        true
    }
}

/// Whether every prefix of length at least `l` lies in the frequency
/// windows. Errors when `w` is shorter than `l`.
pub fn z_membership(w: &GroupWord, r: u32, p: &ZParams) -> Result<bool> {
    if w.len() < p.l {
        return Err(Error::Precondition(format!(
            "word length {} below window start {}",
            w.len(),
            p.l
        )));
    }
    let mut win = FrequencyWindow::new(r, &p.epsilon)?;
    for (i, &l) in w.letters().iter().enumerate() {
        win.push(l);
        if i + 1 >= p.l.max(1) && !win.in_window() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Largest window half-width for which the stretch factor exceeds one:
/// `(2r-3) / (6 r (2r-1))`.
pub fn stretch_threshold(r: u32) -> Rational {
    let r = r as i64;
    rational::rat(2 * r - 3, 6 * r * (2 * r - 1))
}

/// Guaranteed stretch `1 + (2r-3)/(r(2r-1)) - 6 epsilon` of the Nielsen
/// image of a word whose letter and pair frequencies are in the window.
pub fn stretch_bound(r: u32, epsilon: &Rational) -> Rational {
    let ri = r as i64;
    rational::int(1) + rational::rat(2 * ri - 3, ri * (2 * ri - 1)) - rational::int(6) * epsilon
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn w(v: &[i32]) -> GroupWord {
        GroupWord::from_letters(v, Alphabet::new(2).unwrap()).unwrap()
    }

    #[test]
    fn nielsen_images() {
        assert_eq!(apply_nielsen(&w(&[2])).to_ints(), vec![1, 2]);
        assert_eq!(apply_nielsen(&w(&[-1, 2])).to_ints(), vec![2]);
        assert_eq!(apply_nielsen(&w(&[-2, 1])).to_ints(), vec![-2]);
        let x = w(&[1, 2, -1, -2, 2, 2, -1]);
        assert_eq!(apply_nielsen_inverse(&apply_nielsen(&x)), x);
    }

    #[test]
    fn threshold_for_two_generators() {
        assert_eq!(stretch_threshold(2), rat(1, 36));
        assert_eq!(stretch_bound(2, &rat(1, 100)), rat(7, 6) - rat(6, 100));
    }

    #[test]
    fn constant_word_fails() {
        let p = ZParams { epsilon: rat(1, 10), l: 4 };
        assert!(!z_membership(&w(&[1; 12]), 2, &p).unwrap());
        assert!(z_membership(&w(&[1, 1]), 2, &p).is_err());
    }
}
