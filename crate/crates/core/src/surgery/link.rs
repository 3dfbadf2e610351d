use std::collections::HashSet;

use super::{attachment_length, check_epsilon, drop_bound_sq, Builder};
use crate::error::{Error, Result};
use crate::growth::{LazyCosetGraph, Node};
use crate::rational::{self, Rational};
use crate::stallings::CoreAutomaton;
use crate::words::{sample_reduced, sample_rng, GroupWord};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Linking {
    pub core: CoreAutomaton,
    /// `H' g_i b = H' g'_i` for every `i`.
    pub b: GroupWord,
    pub m: usize,
    pub l: usize,
    pub attempts: usize,
    pub delta: Rational,
}

impl Linking {
    pub fn summary(&self) -> String {
        format!(
            "|b|={} m={} l={} attempts={} delta={}",
            self.b.len(),
            self.m,
            self.l,
            self.attempts,
            rational::format(&self.delta)
        )
    }
}

const ATTEMPTS_PER_LENGTH: usize = 64;
const DOUBLINGS: usize = 6;

/// Finds `b` and a larger subgroup `H'` with `H' g_i b = H' g'_i` for all
/// `i`, lowering the deficit by at most `epsilon`. Random words `w`, `w'`
/// of length `m` are drawn until the paths they trace from the `2k`
/// cosets end in long, pairwise disjoint forest tails; the tail ends are
/// then glued in pairs and `b = w w'^-1`.
pub fn link_tuples(
    core: &CoreAutomaton,
    from: &[GroupWord],
    to: &[GroupWord],
    epsilon: &Rational,
    seed: u64,
) -> Result<Linking> {
    if from.len() != to.len() || from.is_empty() {
        return Err(Error::Precondition("tuples must be nonempty and of equal length".into()));
    }
    for x in from.iter().chain(to) {
        for &l in x.letters() {
            core.alphabet().check(l)?;
        }
    }
    let graph = LazyCosetGraph::new(core);
    let vs: Vec<Node> = from.iter().map(|g| graph.trace(g)).collect();
    let ws: Vec<Node> = to.iter().map(|g| graph.trace(g)).collect();
    for side in [&vs, &ws] {
        let distinct: HashSet<&Node> = side.iter().collect();
        if distinct.len() != side.len() {
            return Err(Error::Precondition("cosets within a tuple must be pairwise distinct".into()));
        }
    }
    if vs == ws {
        return Ok(Linking {
            core: core.clone(),
            b: GroupWord::empty(),
            m: 0,
            l: 0,
            attempts: 0,
            delta: Rational::from_integer(0.into()),
        });
    }
    let def = check_epsilon(core, epsilon)?;
    let k = from.len();
    let r = core.rank();
    let l = attachment_length(r, k, epsilon);
    let reach = vs.iter().chain(&ws).map(|v| v.depth()).max().unwrap_or(0) + core.diameter();
    let mut m = (8 * l).max(4 * reach).max(8);
    let mut attempts = 0usize;
    for _ in 0..=DOUBLINGS {
        for _ in 0..ATTEMPTS_PER_LENGTH {
            let mut rng = sample_rng(seed, attempts as u64);
            attempts += 1;
            let w = sample_reduced(m, r, &mut rng);
            let w2 = sample_reduced(m, r, &mut rng);
            if w.letters().last() == w2.letters().last() {
                continue;
            }
            let paths: Vec<Vec<Node>> = vs
                .iter()
                .map(|v| graph.path(v, &w))
                .chain(ws.iter().map(|v| graph.path(v, &w2)))
                .collect();
            if !generic(&paths, m / 4 + 1) {
                continue;
            }
            let mut b = Builder::new(core);
            let mut ends = Vec::new();
            for (i, v) in vs.iter().chain(&ws).enumerate() {
                let label = if i < k { &w } else { &w2 };
                b.add_forest_path(v);
                ends.push(b.add_path(v, label));
            }
            for i in 0..k {
                b.identify(&ends[i], &ends[k + i]);
            }
            let new = b.fold()?;
            let bword = w.mul(&w2.inverse());
            let delta = &def - new.deficit();
            verify(core, &new, from, to, &bword, &delta, epsilon, k, l)?;
            return Ok(Linking { core: new, b: bword, m, l, attempts, delta });
        }
        m *= 2;
    }
    Err(Error::Budget(format!("no generic pair of words after {attempts} draws")))
}

/// Each path ends with `tail` steps moving outward in the forest, and
/// those tail vertices meet no other path.
fn generic(paths: &[Vec<Node>], tail: usize) -> bool {
    let mut tails: Vec<HashSet<&Node>> = Vec::with_capacity(paths.len());
    for p in paths {
        if p.len() <= tail {
            return false;
        }
        let t = &p[p.len() - tail - 1..];
        for pair in t.windows(2) {
            if pair[0].depth() == 0 || pair[1].depth() != pair[0].depth() + 1 {
                return false;
            }
        }
        tails.push(t.iter().collect());
    }
    for (i, t) in tails.iter().enumerate() {
        for (j, p) in paths.iter().enumerate() {
            if i != j && p.iter().any(|v| t.contains(v)) {
                return false;
            }
        }
    }
    true
}

#[allow(clippy::too_many_arguments)]
fn verify(
    old: &CoreAutomaton,
    new: &CoreAutomaton,
    from: &[GroupWord],
    to: &[GroupWord],
    b: &GroupWord,
    delta: &Rational,
    epsilon: &Rational,
    k: usize,
    l: usize,
) -> Result<()> {
    let g = LazyCosetGraph::new(new);
    for (x, y) in from.iter().zip(to) {
        if g.trace(&x.mul(b)) != g.trace(y) {
            return Err(Error::Postcondition("linked cosets do not coincide".into()));
        }
    }
    old.embed_check(new).map_err(|_| Error::Postcondition("old core does not embed".into()))?;
    let zero = Rational::from_integer(0.into());
    let kk = rational::int((k * k) as i64);
    if delta < &zero || delta > epsilon || delta * delta > kk * drop_bound_sq(new.rank(), l) {
        return Err(Error::Postcondition(format!("deficit drop {} too large", rational::format(delta))));
    }
    if new.deficit() <= zero {
        return Err(Error::Postcondition("deficit vanished".into()));
    }
    Ok(())
}
