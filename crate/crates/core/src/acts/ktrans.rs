use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{check_property_dagger, Act};
use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::words::MonoidWord;

/// `x^2 (yx)^t y^2` over the first two letters.
pub fn marker(t: u64) -> Vec<u8> {
    let mut w = vec![1, 1];
    w.extend([2, 1].repeat(t as usize));
    w.extend([2, 2]);
    w
}

/// Every `q >= 1` with `w[q-1] = w[q] = 2`, eight letters at a time.
fn yy_ends(w: &[u8]) -> Vec<usize> {
    const LO: u64 = 0x7f7f_7f7f_7f7f_7f7f;
    const HI: u64 = 0x8080_8080_8080_8080;
    const TWOS: u64 = 0x0202_0202_0202_0202;
    let mut out = Vec::new();
    let mut carry = false;
    let chunks = w.chunks_exact(8);
    let tail = chunks.remainder();
    for (c, chunk) in chunks.enumerate() {
        let v = u64::from_le_bytes(chunk.try_into().expect("eight bytes")) ^ TWOS;
        // high bit of each byte set iff the letter is 2
        let eq = !(((v & LO) + LO) | v) & HI;
        if carry && eq & 0x80 != 0 {
            out.push(8 * c);
        }
        let mut pairs = eq & (eq >> 8);
        while pairs != 0 {
            let bit = pairs.trailing_zeros() as usize;
            out.push(8 * c + bit / 8 + 1);
            pairs &= pairs - 1;
        }
        carry = eq >> 63 != 0;
    }
    let base = w.len() - tail.len();
    for (i, &x) in tail.iter().enumerate() {
        let is2 = x == 2;
        if carry && is2 {
            out.push(base + i);
        }
        carry = is2;
    }
    out
}

/// One enumerated tuple `(v_1..v_k; v'_1..v'_k)` with its marker exponent.
/// Inactive tuples have an entry that is not a state and add no rules.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tuple {
    pub sources: Vec<Vec<u8>>,
    pub targets: Vec<Vec<u8>>,
    pub t: u64,
    pub active: bool,
}

impl Tuple {
    pub fn k(&self) -> usize {
        self.sources.len()
    }

    pub fn max_len(&self) -> usize {
        self.sources.iter().chain(&self.targets).map(Vec::len).max().unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Lookup {
    /// Not a word `v(i,j) w_i`.
    Free,
    /// `v(i,j) w_i` for tuple index `i` (from 0) and entry `j`.
    Rule(usize, usize),
    /// Could be a forbidden word of a tuple beyond the budget.
    Unknown,
}

/// The act on words with no prefix of the form `v(i,j) w_i`, where a
/// letter completing such a word sends it to `v'(i,j)` instead.
#[derive(Clone, Debug)]
pub struct KTransitiveAct {
    r: u32,
    tuples: Vec<Tuple>,
    by_t: HashMap<u64, usize>,
}

/// Lists the first `budget` tuples: ordered by `max(k, L)`, then `L`, then
/// `k`, where `L` is the longest entry, then lexicographically in ShortLex
/// over sources and targets. Sources are nonempty and pairwise distinct.
fn enumerate(r: u32, budget: usize) -> Vec<(Vec<Vec<u8>>, Vec<Vec<u8>>)> {
    let mut out = Vec::with_capacity(budget);
    let mut size = 1;
    while out.len() < budget {
        for len in 1..=size {
            for k in 1..=size {
                if len.max(k) != size {
                    continue;
                }
                let words: Vec<Vec<u8>> = MonoidWord::ball(r, len)
                    .iter()
                    .map(|w| w.gens().map(|g| g as u8).collect())
                    .collect();
                let ns = words.len() - 1;
                if ns < k {
                    continue;
                }
                let mut digits = vec![0usize; 2 * k];
                'odometer: loop {
                    let src: Vec<usize> = digits[..k].iter().map(|d| d + 1).collect();
                    let tgt = &digits[k..];
                    let distinct = (0..k).all(|a| (a + 1..k).all(|b| src[a] != src[b]));
                    let long = src.iter().chain(tgt).any(|&i| words[i].len() == len);
                    if distinct && long {
                        out.push((
                            src.iter().map(|&i| words[i].clone()).collect(),
                            tgt.iter().map(|&i| words[i].clone()).collect(),
                        ));
                        if out.len() == budget {
                            return out;
                        }
                    }
                    for p in (0..2 * k).rev() {
                        let limit = if p < k { ns } else { words.len() };
                        digits[p] += 1;
                        if digits[p] < limit {
                            continue 'odometer;
                        }
                        digits[p] = 0;
                    }
                    break;
                }
            }
        }
        size += 1;
    }
    out
}

/// Builds the act from the first `budget` tuples, marker exponents chosen
/// increasing and minimal with `|w_i| >= i + k(i)`.
pub fn build_k_transitive(r: u32, budget: usize) -> Result<KTransitiveAct> {
    if r < 2 {
        return Err(Error::Rank { rank: r, min: 2 });
    }
    if r > 255 {
        return Err(Error::Input("rank too large for the word encoding".into()));
    }
    if budget == 0 {
        return Err(Error::Precondition("tuple budget must be positive".into()));
    }
    let mut act = KTransitiveAct { r, tuples: Vec::with_capacity(budget), by_t: HashMap::new() };
    let mut prev: Option<u64> = None;
    for (idx, (sources, targets)) in enumerate(r, budget).into_iter().enumerate() {
        let i = idx as u64 + 1;
        let need = (i + sources.len() as u64).saturating_sub(4).div_ceil(2);
        let t = prev.map_or(need, |p| need.max(p + 1));
        prev = Some(t);
        let mut active = true;
        for w in sources.iter().chain(&targets) {
            active &= act.is_state(w)?;
        }
        act.by_t.insert(t, idx);
        act.tuples.push(Tuple { sources, targets, t, active });
    }
    let probe: Vec<MonoidWord> = act
        .tuples
        .iter()
        .take(32)
        .map(|tp| MonoidWord::from_gens(&marker(tp.t).iter().map(|&g| g as u32).collect::<Vec<_>>()))
        .collect();
    if !check_property_dagger(&probe) {
        return Err(Error::Postcondition("marker words overlap".into()));
    }
    Ok(act)
}

impl KTransitiveAct {
    pub fn tuples(&self) -> &[Tuple] {
        &self.tuples
    }

    pub fn budget(&self) -> usize {
        self.tuples.len()
    }

    /// Words up to this length are classified exactly: a tuple beyond the
    /// budget has index above it, so its forbidden words are longer.
    pub fn exact_length(&self) -> usize {
        self.tuples.len() + 2
    }

    /// Classifies the word `a b`.
    pub fn lookup(&self, a: &[u8], b: &[u8]) -> Lookup {
        let n = a.len() + b.len();
        let at = |k: usize| if k < a.len() { a[k] } else { b[k - a.len()] };
        if n < 4 || at(n - 1) != 2 || at(n - 2) != 2 {
            return Lookup::Free;
        }
        let mut pos = n - 2;
        let mut t = 0u64;
        if pos > a.len() {
            let head = &b[..pos - a.len()];
            let wide = head.rchunks_exact(8).take_while(|c| *c == [2, 1, 2, 1, 2, 1, 2, 1]).count();
            let rest = &head[..head.len() - 8 * wide];
            let run = 4 * wide + rest.rchunks_exact(2).take_while(|c| *c == [2, 1]).count();
            t += run as u64;
            pos -= 2 * run;
        }
        loop {
            if pos < 2 {
                return Lookup::Free;
            }
            match (at(pos - 2), at(pos - 1)) {
                (1, 1) => break,
                (2, 1) => {
                    t += 1;
                    pos -= 2;
                }
                _ => return Lookup::Free,
            }
        }
        let start = pos - 2;
        let Some(&idx) = self.by_t.get(&t) else {
            let last = self.tuples.last().map_or(0, |tp| tp.t);
            return if t > last && n > self.exact_length() { Lookup::Unknown } else { Lookup::Free };
        };
        let tuple = &self.tuples[idx];
        if !tuple.active {
            return Lookup::Free;
        }
        for (j, v) in tuple.sources.iter().enumerate() {
            if v.len() == start && (0..start).all(|k| at(k) == v[k]) {
                return Lookup::Rule(idx, j);
            }
        }
        Lookup::Free
    }

    /// Whether no prefix of `w` is forbidden, judged by the tuples listed
    /// so far.
    fn is_state(&self, w: &[u8]) -> Result<bool> {
        for n in 1..=w.len() {
            match self.lookup(&w[..n], &[]) {
                Lookup::Free => {}
                Lookup::Rule(..) => return Ok(false),
                Lookup::Unknown => {
                    return Err(Error::Budget(format!("prefix of length {n} is unknown at this budget")))
                }
            }
        }
        Ok(true)
    }

    /// Applies `w` to the state `s` letter by letter.
    pub fn apply_bytes(&self, s: &[u8], w: &[u8]) -> Result<Vec<u8>> {
        self.apply_at(s, w, &yy_ends(w))
    }

    /// As [`apply_bytes`](Self::apply_bytes), given every `q` with
    /// `w[q-1] = w[q] = y`: only there, or where `w` meets the state,
    /// can a forbidden word end.
    fn apply_at(&self, s: &[u8], w: &[u8], ends: &[usize]) -> Result<Vec<u8>> {
        let mut base = s.to_vec();
        let mut from = 0;
        let mut k = 0;
        let mut seam = true;
        loop {
            let q = if seam && from < w.len() && w[from] == 2 && base.last() == Some(&2) {
                from
            } else {
                while k < ends.len() && ends[k] <= from {
                    k += 1;
                }
                match ends.get(k) {
                    Some(&q) => {
                        k += 1;
                        q
                    }
                    None => break,
                }
            };
            seam = false;
            match self.lookup(&base, &w[from..=q]) {
                Lookup::Free => {}
                Lookup::Rule(i, j) => {
                    base = self.tuples[i].targets[j].clone();
                    from = q + 1;
                    seam = true;
                }
                Lookup::Unknown => {
                    return Err(Error::Budget(format!(
                        "a word of length {} is unknown at tuple budget {}",
                        base.len() + q + 1 - from,
                        self.budget()
                    )))
                }
            }
        }
        base.extend_from_slice(&w[from..]);
        Ok(base)
    }

    /// The marker of tuple `i` (from 0) and whether it carries every
    /// source to its target.
    pub fn transitivity_witness(&self, i: usize) -> Result<(MonoidWord, bool)> {
        let tuple = self
            .tuples
            .get(i)
            .ok_or_else(|| Error::Budget(format!("tuple {i} beyond budget {}", self.budget())))?;
        let w = marker(tuple.t);
        let mut ok = tuple.active;
        for (v, v2) in tuple.sources.iter().zip(&tuple.targets) {
            ok &= &self.apply_bytes(v, &w)? == v2;
        }
        let word = MonoidWord::from_gens(&w.iter().map(|&g| g as u32).collect::<Vec<_>>());
        Ok((word, ok))
    }

    /// Checks the witnesses of every tuple satisfying `select`, returning
    /// how many were checked; fails on the first bad one.
    pub fn verify_witnesses(&self, select: impl Fn(&Tuple) -> bool + Sync, exec: Exec) -> Result<usize> {
        let chosen: Vec<usize> = (0..self.tuples.len()).filter(|&i| select(&self.tuples[i])).collect();
        let results = par::map(exec, &chosen, |&i| -> Result<bool> {
            let tuple = &self.tuples[i];
            let w = marker(tuple.t);
            let ends = yy_ends(&w);
            let mut ok = tuple.active;
            for (v, v2) in tuple.sources.iter().zip(&tuple.targets) {
                ok &= &self.apply_at(v, &w, &ends)? == v2;
            }
            Ok(ok)
        });
        for (&i, res) in chosen.iter().zip(results) {
            if !res? {
                return Err(Error::Postcondition(format!("witness of tuple {i} fails")));
            }
        }
        Ok(chosen.len())
    }

    pub fn plan(&self) -> PlanJson {
        let word = |w: &Vec<u8>| MonoidWord::from_gens(&w.iter().map(|&g| g as u32).collect::<Vec<_>>()).to_string();
        PlanJson {
            r: self.r,
            budget: self.tuples.len(),
            tuples: self
                .tuples
                .iter()
                .map(|tp| TupleJson {
                    sources: tp.sources.iter().map(word).collect(),
                    targets: tp.targets.iter().map(word).collect(),
                    t: tp.t,
                    active: tp.active,
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TupleJson {
    pub sources: Vec<String>,
    pub targets: Vec<String>,
    /// Marker `x^2 (yx)^t y^2`.
    pub t: u64,
    pub active: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlanJson {
    pub r: u32,
    pub budget: usize,
    pub tuples: Vec<TupleJson>,
}

impl Act for KTransitiveAct {
    type State = MonoidWord;

    fn rank(&self) -> u32 {
        self.r
    }

    fn generators(&self) -> Vec<MonoidWord> {
        vec![MonoidWord::empty()]
    }

    fn act(&self, s: &MonoidWord, g: u32) -> Result<MonoidWord> {
        if g == 0 || g > self.r {
            return Err(Error::LetterOutOfRange { letter: g as i64, rank: self.r });
        }
        let bytes: Vec<u8> = s.gens().map(|x| x as u8).collect();
        let out = self.apply_bytes(&bytes, &[g as u8])?;
        Ok(MonoidWord::from_gens(&out.iter().map(|&x| x as u32).collect::<Vec<_>>()))
    }

    fn apply(&self, s: &MonoidWord, w: &MonoidWord) -> Result<MonoidWord> {
        let bytes: Vec<u8> = s.gens().map(|x| x as u8).collect();
        let wb: Vec<u8> = w.gens().map(|x| x as u8).collect();
        let out = self.apply_bytes(&bytes, &wb)?;
        Ok(MonoidWord::from_gens(&out.iter().map(|&x| x as u32).collect::<Vec<_>>()))
    }
}
