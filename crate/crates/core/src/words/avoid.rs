use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{Alphabet, Letter};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AvoidMode {
    Monoid,
    Group,
}

/// Overlapping occurrences of `u` as a factor of `w`.
pub fn count_occurrences(w: &[Letter], u: &[Letter]) -> usize {
    if u.is_empty() || u.len() > w.len() {
        return 0;
    }
    w.windows(u.len()).filter(|win| *win == u).count()
}

/// `C = r^(m-1)` and `r'^m = r^m - 1` for a forbidden monoid word of
/// length `m`: at most `C r'^k` words of length `k` avoid it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubwordBound {
    pub c: BigUint,
    pub m: usize,
    pub base: BigUint,
}

impl SubwordBound {
    /// `count^m <= C^m base^k`, the bound with the `m`-th root cleared.
    pub fn holds(&self, k: usize, count: &BigUint) -> bool {
        num_traits::pow(count.clone(), self.m)
            <= num_traits::pow(self.c.clone(), self.m) * num_traits::pow(self.base.clone(), k)
    }

    pub fn rate(&self) -> f64 {
        let b: f64 = self.base.to_string().parse().unwrap_or(f64::NAN);
        b.powf(1.0 / self.m as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AvoidanceCounts {
    pub mode: AvoidMode,
    pub rank: u32,
    /// Words of length exactly `k` that avoid `u`.
    pub sphere: Vec<BigUint>,
    /// Words of length at most `k` that avoid `u`.
    pub ball: Vec<BigUint>,
    pub bound: Option<SubwordBound>,
}

impl AvoidanceCounts {
    /// First `k >= 1` where the per-length count breaks the bound.
    pub fn bound_violation(&self) -> Option<usize> {
        let b = self.bound.as_ref()?;
        (1..self.sphere.len()).find(|&k| !b.holds(k, &self.sphere[k]))
    }
}

/// Counts words avoiding `u` as a factor, by dynamic programming over the
/// prefix automaton of `u` (and the last letter, for reduced words).
pub fn count_avoiding(u: &[Letter], n: usize, mode: AvoidMode, r: u32) -> Result<AvoidanceCounts> {
    let alphabet = Alphabet::new(r)?;
    if u.is_empty() {
        return Err(Error::EmptyWord);
    }
    for (i, &l) in u.iter().enumerate() {
        alphabet.check(l)?;
        match mode {
            AvoidMode::Monoid if !l.is_positive() => {
                return Err(Error::Parse(format!("inverse letter {l} in a monoid word")))
            }
            AvoidMode::Group if i > 0 && u[i - 1] == l.inverse() => {
                return Err(Error::Parse("forbidden word is not reduced".into()))
            }
            _ => {}
        }
    }
    let letters: Vec<Letter> = match mode {
        AvoidMode::Monoid => alphabet.positive().collect(),
        AvoidMode::Group => alphabet.letters().collect(),
    };
    let delta = prefix_automaton(u, &letters);
    let m = u.len();
    let nl = letters.len();
    // state index: matched * (nl + 1) + last, with last == nl meaning none
    let width = nl + 1;
    let mut cur = vec![BigUint::zero(); m * width];
    cur[nl] = BigUint::one();
    let mut sphere = vec![BigUint::one()];
    for _ in 1..=n {
        let mut next = vec![BigUint::zero(); m * width];
        for s in 0..m {
            for last in 0..width {
                let c = &cur[s * width + last];
                if c.is_zero() {
                    continue;
                }
                for (xi, &x) in letters.iter().enumerate() {
                    if mode == AvoidMode::Group && last < nl && letters[last] == x.inverse() {
                        continue;
                    }
                    let t = delta[s][xi];
                    if t < m {
                        next[t * width + xi] += c;
                    }
                }
            }
        }
        sphere.push(next.iter().sum());
        cur = next;
    }
    let mut ball = Vec::with_capacity(sphere.len());
    let mut acc = BigUint::zero();
    for s in &sphere {
        acc += s;
        ball.push(acc.clone());
    }
    let bound = match mode {
        AvoidMode::Monoid => Some(SubwordBound {
            c: num_traits::pow(BigUint::from(r), m - 1),
            m,
            base: num_traits::pow(BigUint::from(r), m) - BigUint::one(),
        }),
        AvoidMode::Group => None,
    };
    Ok(AvoidanceCounts { mode, rank: r, sphere, ball, bound })
}

/// `delta[s][x]`: length of the longest prefix of `u` that is a suffix of
/// `u[..s] x`. Reaching `u.len()` means an occurrence.
fn prefix_automaton(u: &[Letter], letters: &[Letter]) -> Vec<Vec<usize>> {
    let m = u.len();
    let mut fail = vec![0usize; m + 1];
    let mut k = 0;
    for i in 1..m {
        while k > 0 && u[i] != u[k] {
            k = fail[k];
        }
        if u[i] == u[k] {
            k += 1;
        }
        fail[i + 1] = k;
    }
    (0..m)
        .map(|s| {
            letters
                .iter()
                .map(|&x| {
                    let mut t = s;
                    loop {
                        if u[t] == x {
                            break t + 1;
                        }
                        if t == 0 {
                            break 0;
                        }
                        t = fail[t];
                    }
                })
                .collect()
        })
        .collect()
}
