use std::collections::HashSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{GrowthSeries, SeriesKind};
use crate::error::{Error, Result};
use crate::par::{self, Exec};
use crate::rational::{self, Rational};
use crate::stallings::CoreAutomaton;
use crate::words::{GroupWord, Letter};

/// A vertex of the full coset graph: a core vertex, or a vertex of the
/// tree hanging off core vertex `root`, reached by the reduced `path`
/// that leaves the core with a missing letter.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Node {
    Core(u32),
    Forest { root: u32, path: Vec<Letter> },
}

impl Node {
    /// Distance from the core; zero for core vertices.
    pub fn depth(&self) -> usize {
        match self {
            Node::Core(_) => 0,
            Node::Forest { path, .. } => path.len(),
        }
    }

    pub fn root(&self) -> usize {
        match self {
            Node::Core(v) => *v as usize,
            Node::Forest { root, .. } => *root as usize,
        }
    }
}

/// The coset graph of the subgroup, generated on demand from its core.
#[derive(Clone, Copy, Debug)]
pub struct LazyCosetGraph<'a> {
    pub core: &'a CoreAutomaton,
}

impl<'a> LazyCosetGraph<'a> {
    pub fn new(core: &'a CoreAutomaton) -> Self {
        LazyCosetGraph { core }
    }

    pub fn base(&self) -> Node {
        Node::Core(0)
    }

    pub fn step(&self, node: &Node, l: Letter) -> Node {
        match node {
            Node::Core(v) => match self.core.target(*v as usize, l) {
                Some(t) => Node::Core(t as u32),
                None => Node::Forest { root: *v, path: vec![l] },
            },
            Node::Forest { root, path } => {
                let mut path = path.clone();
                if path.last() == Some(&l.inverse()) {
                    path.pop();
                    if path.is_empty() {
                        return Node::Core(*root);
                    }
                } else {
                    path.push(l);
                }
                Node::Forest { root: *root, path }
            }
        }
    }

    pub fn read(&self, from: &Node, w: &GroupWord) -> Node {
        w.letters().iter().fold(from.clone(), |n, &l| self.step(&n, l))
    }

    /// The coset `H w` as a vertex.
    pub fn trace(&self, w: &GroupWord) -> Node {
        self.read(&self.base(), w)
    }

    /// Every vertex along the path labelled `w` from `from`, both ends
    /// included.
    pub fn path(&self, from: &Node, w: &GroupWord) -> Vec<Node> {
        let mut out = vec![from.clone()];
        for &l in w.letters() {
            let next = self.step(out.last().expect("nonempty"), l);
            out.push(next);
        }
        out
    }

    pub fn neighbours(&self, node: &Node) -> Vec<Node> {
        self.core.alphabet().letters().map(|l| self.step(node, l)).collect()
    }
}

fn geometric(q: u64, k: usize) -> BigUint {
    // 1 + q + ... + q^(k-1)
    if q == 1 {
        return BigUint::from(k);
    }
    (num_traits::pow(BigUint::from(q), k) - BigUint::one()) / BigUint::from(q - 1)
}

/// Ball sizes of the coset graph from the closed form
/// `g(n) = #(B(n) in C) + sum_{|v| < n} def(v) (1 + q + ... + q^(n-|v|-1))`
/// with `q = 2r - 1`.
pub fn growth_series(core: &CoreAutomaton, n_max: usize) -> GrowthSeries {
    let q = 2 * core.rank() as u64 - 1;
    let dist = core.distances();
    let g = (0..=n_max)
        .map(|n| {
            let mut total = BigUint::zero();
            for (v, &d) in dist.iter().enumerate() {
                if d <= n {
                    total += BigUint::one();
                }
                let def = core.vertex_deficit(v);
                if d < n && def > 0 {
                    total += BigUint::from(def) * geometric(q, n - d);
                }
            }
            total
        })
        .collect();
    GrowthSeries::new(SeriesKind::Group, core.rank(), g)
}

/// Ball sizes by explicit breadth-first search of the coset graph.
pub fn growth_series_explicit(core: &CoreAutomaton, n_max: usize, budget: usize) -> Result<GrowthSeries> {
    growth_series_explicit_with(core, n_max, budget, Exec::auto())
}

pub fn growth_series_explicit_with(
    core: &CoreAutomaton,
    n_max: usize,
    budget: usize,
    exec: Exec,
) -> Result<GrowthSeries> {
    let graph = LazyCosetGraph::new(core);
    let mut seen: HashSet<Node> = HashSet::from([graph.base()]);
    let mut frontier = vec![graph.base()];
    let mut g = vec![BigUint::one()];
    for _ in 1..=n_max {
        let candidates = par::flat_map(exec, &frontier, |v| graph.neighbours(v));
        let mut next = Vec::new();
        for c in candidates {
            if !seen.contains(&c) {
                seen.insert(c.clone());
                next.push(c);
            }
        }
        if seen.len() > budget {
            return Err(Error::Budget(format!("ball exceeds {budget} vertices")));
        }
        g.push(BigUint::from(seen.len()));
        frontier = next;
    }
    Ok(GrowthSeries::new(SeriesKind::Group, core.rank(), g))
}

/// `g(n) = coefficient (2r-1)^n + f(n)` with `f` settling to a constant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LeadingTerm {
    /// `def / (2r - 2)`.
    #[serde(with = "rational::serde_str")]
    pub coefficient: Rational,
    #[serde(with = "rational::serde_vec")]
    pub f: Vec<Rational>,
    /// `f(n)` for every `n` at least the core radius:
    /// `#V - (sum_v def(v)) / (2r-2)`.
    #[serde(with = "rational::serde_str")]
    pub f_limit: Rational,
    /// `max |f(n)|` over the computed range.
    #[serde(with = "rational::serde_str")]
    pub bound: Rational,
    pub settled_from: usize,
}

pub fn leading_term(core: &CoreAutomaton, n_max: usize) -> Result<LeadingTerm> {
    if core.rank() < 2 {
        return Err(Error::Rank { rank: core.rank(), min: 2 });
    }
    let q = rational::int(2 * core.rank() as i64 - 1);
    let coefficient = core.deficit() / rational::int(2 * core.rank() as i64 - 2);
    let series = growth_series(core, n_max);
    let f: Vec<Rational> = series
        .g
        .iter()
        .enumerate()
        .map(|(n, g)| rational::from_uint(g) - &coefficient * rational::pow(&q, n as i64))
        .collect();
    let raw: usize = (0..core.num_vertices()).map(|v| core.vertex_deficit(v)).sum();
    let f_limit = rational::int(core.num_vertices() as i64)
        - rational::rat(raw as i64, 2 * core.rank() as i64 - 2);
    let settled_from = core.diameter();
    for (n, x) in f.iter().enumerate().skip(settled_from) {
        if *x != f_limit {
            return Err(Error::Postcondition(format!("f({n}) = {} differs from its limit", rational::format(x))));
        }
    }
    let bound = f.iter().map(rational::abs).max().unwrap_or_else(Rational::zero);
    Ok(LeadingTerm { coefficient, f, f_limit, bound, settled_from })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthVerdict {
    pub maximal: bool,
    /// `c = def / (2r-1)` with `g(n) >= c (2r-1)^n` for `n >= 1`.
    #[serde(with = "rational::serde_str_opt")]
    pub certificate: Option<Rational>,
    #[serde(with = "rational::serde_vec")]
    pub alpha: Vec<Rational>,
    /// `g(N) / g(N-1)`, an estimate of the exponential growth rate.
    pub rate_estimate: f64,
}

/// Maximal growth holds exactly when the deficit is positive; the
/// certificate is checked against the series up to `n_max`.
pub fn classify(core: &CoreAutomaton, n_max: usize) -> Result<GrowthVerdict> {
    if core.rank() < 2 {
        return Err(Error::Rank { rank: core.rank(), min: 2 });
    }
    let series = growth_series(core, n_max);
    let q = rational::int(2 * core.rank() as i64 - 1);
    let def = core.deficit();
    let maximal = !def.is_zero();
    let certificate = if maximal {
        let c = &def / &q;
        for n in 1..=n_max {
            if rational::from_uint(&series.g[n]) < &c * rational::pow(&q, n as i64) {
                return Err(Error::Postcondition(format!("lower bound fails at n = {n}")));
            }
        }
        Some(c)
    } else {
        None
    };
    let alpha = (0..=n_max).map(|n| series.alpha(n)).collect();
    let rate_estimate = if n_max >= 1 {
        rational::to_f64(&(rational::from_uint(&series.g[n_max]) / rational::from_uint(&series.g[n_max - 1])))
    } else {
        f64::NAN
    };
    Ok(GrowthVerdict { maximal, certificate, alpha, rate_estimate })
}

/// Smallest `m > 0` with `H x g^m = H x`, searching up to `max`.
pub fn orbit_length(core: &CoreAutomaton, x: &GroupWord, g: &GroupWord, max: usize) -> Option<usize> {
    let graph = LazyCosetGraph::new(core);
    let start = graph.trace(x);
    let mut cur = start.clone();
    for m in 1..=max {
        cur = graph.read(&cur, g);
        if cur == start {
            return Some(m);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::words::Alphabet;

    fn core(ws: &[&[i32]]) -> CoreAutomaton {
        let a = Alphabet::new(2).unwrap();
        let gens: Vec<GroupWord> = ws.iter().map(|w| GroupWord::from_letters(w, a).unwrap()).collect();
        CoreAutomaton::build(&gens, 2).unwrap()
    }

    fn nums(s: &GrowthSeries) -> Vec<u64> {
        s.g.iter().map(|x| x.to_string().parse().unwrap()).collect()
    }

    #[test]
    fn reference_series() {
        assert_eq!(nums(&growth_series(&core(&[]), 4)), vec![1, 5, 17, 53, 161]);
        assert_eq!(nums(&growth_series(&core(&[&[1]]), 4)), vec![1, 3, 9, 27, 81]);
        assert_eq!(nums(&growth_series(&core(&[&[1, 2, -1]]), 4)), vec![1, 5, 15, 45, 135]);
        assert_eq!(nums(&growth_series(&core(&[&[1], &[2]]), 3)), vec![1, 1, 1, 1]);
    }

    #[test]
    fn explicit_agrees() {
        for c in [core(&[]), core(&[&[1, 2, -1]]), core(&[&[1, 1], &[2, 1, 2]])] {
            for exec in [Exec::Sequential, Exec::Parallel] {
                let e = growth_series_explicit_with(&c, 6, 1 << 20, exec).unwrap();
                assert_eq!(e, growth_series(&c, 6));
            }
        }
    }

    #[test]
    fn leading_terms() {
        let t = leading_term(&core(&[&[1, 2, -1]]), 8).unwrap();
        assert_eq!(t.coefficient, rat(5, 3));
        assert_eq!(t.f_limit, rat(0, 1));
        assert_eq!(t.f[0], rat(-2, 3));
        let t = leading_term(&core(&[]), 8).unwrap();
        assert_eq!(t.f_limit, rat(-1, 1));
        assert_eq!(t.bound, rat(1, 1));
    }

    #[test]
    fn verdicts() {
        let v = classify(&core(&[&[1, 2, -1]]), 10).unwrap();
        assert!(v.maximal);
        assert_eq!(v.certificate, Some(rat(10, 9)));
        let v = classify(&core(&[&[1, 1], &[2], &[1, 2, -1]]), 10).unwrap();
        assert!(!v.maximal && v.certificate.is_none());
    }

    #[test]
    fn orbits() {
        let c = core(&[&[1, 1, 1]]);
        let a = GroupWord::reduce([Letter::pos(1)]);
        assert_eq!(orbit_length(&c, &GroupWord::empty(), &a, 10), Some(3));
        let b = GroupWord::reduce([Letter::pos(2)]);
        assert_eq!(orbit_length(&c, &GroupWord::empty(), &b, 10), None);
    }
}
