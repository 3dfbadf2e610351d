//! Core automata: the finite folded graph that carries a finitely
//! generated subgroup of a free group, built by folding a wedge of loops
//! and trimming hanging trees.

mod fold;
mod json;

pub use fold::{fold_graph, fold_graph_identified};
pub(crate) use fold::canonical;
pub use json::CoreJson;

use std::collections::VecDeque;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::words::{Alphabet, GroupWord, Letter};

/// A based, folded, trimmed automaton over the signed letters of a free
/// group of rank `r`. Vertex 0 is the base and vertices are numbered in
/// breadth-first order from it, so equal automata are equal as values.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CoreAutomaton {
    rank: u32,
    delta: Vec<Option<u32>>,
}

/// A positive-letter edge `src --letter--> dst`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub letter: Letter,
    pub dst: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Embedding {
    /// `map[v]` is the image of vertex `v`.
    pub map: Vec<usize>,
}

impl CoreAutomaton {
    /// Core of the subgroup generated by `gens`.
    pub fn build(gens: &[GroupWord], r: u32) -> Result<CoreAutomaton> {
        let alphabet = Alphabet::new(r)?;
        let mut edges = Vec::new();
        let mut n = 1usize;
        for g in gens {
            for &l in g.letters() {
                alphabet.check(l)?;
            }
            let ls = g.letters();
            if ls.is_empty() {
                continue;
            }
            let mut prev = 0usize;
            for (i, &l) in ls.iter().enumerate() {
                let next = if i + 1 == ls.len() {
                    0
                } else {
                    n += 1;
                    n - 1
                };
                edges.push((prev, l, next));
                prev = next;
            }
        }
        fold_graph(r, n, 0, &edges)
    }

    /// The core of the trivial subgroup: a single vertex and no edges.
    pub fn trivial(r: u32) -> Result<CoreAutomaton> {
        Alphabet::new(r)?;
        Ok(CoreAutomaton { rank: r, delta: vec![None; 2 * r as usize] })
    }

    pub(crate) fn from_table(rank: u32, delta: Vec<Option<u32>>) -> CoreAutomaton {
        CoreAutomaton { rank, delta }
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn alphabet(&self) -> Alphabet {
        Alphabet { rank: self.rank }
    }

    pub fn base(&self) -> usize {
        0
    }

    fn width(&self) -> usize {
        2 * self.rank as usize
    }

    pub fn num_vertices(&self) -> usize {
        self.delta.len() / self.width()
    }

    pub fn target(&self, v: usize, l: Letter) -> Option<usize> {
        if l.generator() > self.rank {
            return None;
        }
        self.delta[v * self.width() + l.index()].map(|t| t as usize)
    }

    /// `adj[v][l.index()]`, the table form used by graph surgery.
    pub fn adjacency(&self) -> Vec<Vec<Option<usize>>> {
        self.delta.chunks(self.width()).map(|row| row.iter().map(|t| t.map(|t| t as usize)).collect()).collect()
    }

    pub fn degree(&self, v: usize) -> usize {
        let w = self.width();
        self.delta[v * w..(v + 1) * w].iter().filter(|t| t.is_some()).count()
    }

    /// Missing letters at `v`: `2r - degree(v)`.
    pub fn vertex_deficit(&self, v: usize) -> usize {
        self.width() - self.degree(v)
    }

    /// Positive-letter edges, sorted.
    pub fn edges(&self) -> Vec<Edge> {
        let mut out = Vec::new();
        for v in 0..self.num_vertices() {
            for k in 1..=self.rank {
                let l = Letter::pos(k);
                if let Some(t) = self.target(v, l) {
                    out.push(Edge { src: v, letter: l, dst: t });
                }
            }
        }
        out
    }

    /// Breadth-first distances from the base, following letters in order.
    pub fn distances(&self) -> Vec<usize> {
        self.bfs().0
    }

    /// Distances and, for each non-base vertex, the tree edge
    /// `(parent, letter)` that first reached it.
    fn bfs(&self) -> (Vec<usize>, Vec<Option<(usize, Letter)>>) {
        let n = self.num_vertices();
        let mut dist = vec![usize::MAX; n];
        let mut parent = vec![None; n];
        dist[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for l in self.alphabet().letters() {
                if let Some(t) = self.target(v, l) {
                    if dist[t] == usize::MAX {
                        dist[t] = dist[v] + 1;
                        parent[t] = Some((v, l));
                        queue.push_back(t);
                    }
                }
            }
        }
        (dist, parent)
    }

    /// Largest distance from the base.
    pub fn diameter(&self) -> usize {
        self.distances().into_iter().max().unwrap_or(0)
    }

    /// The ShortLex-least geodesic from the base to each vertex.
    pub fn vertex_words(&self) -> Vec<GroupWord> {
        let (dist, parent) = self.bfs();
        let mut order: Vec<usize> = (0..dist.len()).collect();
        order.sort_by_key(|&v| dist[v]);
        let mut words = vec![GroupWord::empty(); dist.len()];
        for v in order {
            if let Some((p, l)) = parent[v] {
                let mut ls = words[p].letters().to_vec();
                ls.push(l);
                words[v] = GroupWord::reduce(ls);
            }
        }
        words
    }

    /// `sum_v (2r - deg v) (2r-1)^(-|v|)`.
    pub fn deficit(&self) -> Rational {
        let q = rational::int(2 * self.rank as i64 - 1);
        let dist = self.distances();
        let mut total = Rational::zero();
        for (v, &d) in dist.iter().enumerate() {
            let def = self.vertex_deficit(v);
            if def > 0 {
                total += rational::int(def as i64) * rational::pow(&q, -(d as i64));
            }
        }
        total
    }

    /// Vertex reached by reading `w` from `v`, if the path stays in the core.
    pub fn read(&self, v: usize, w: &GroupWord) -> Option<usize> {
        let mut cur = v;
        for &l in w.letters() {
            cur = self.target(cur, l)?;
        }
        Some(cur)
    }

    pub fn membership(&self, w: &GroupWord) -> bool {
        self.read(0, w) == Some(0)
    }

    /// Free basis read off the breadth-first spanning tree: one generator
    /// per positive edge outside the tree.
    pub fn schreier_basis(&self) -> Vec<GroupWord> {
        let (_, parent) = self.bfs();
        let words = self.vertex_words();
        let mut out = Vec::new();
        for e in self.edges() {
            let tree = parent[e.dst] == Some((e.src, e.letter))
                || parent[e.src] == Some((e.dst, e.letter.inverse()));
            if !tree {
                out.push(words[e.src].mul(&GroupWord::reduce([e.letter])).mul(&words[e.dst].inverse()));
            }
        }
        out
    }

    /// Rank of the subgroup: positive edges minus vertices plus one.
    pub fn subgroup_rank(&self) -> usize {
        self.edges().len() + 1 - self.num_vertices()
    }

    /// `Some(#V)` when every star is full, else `None` (infinite index).
    pub fn index(&self) -> Option<usize> {
        let full = (0..self.num_vertices()).all(|v| self.degree(v) == self.width());
        full.then(|| self.num_vertices())
    }

    /// Checks the structural invariants; every constructor already
    /// guarantees them, so this is for tests and loaders.
    pub fn validate(&self) -> Result<()> {
        let n = self.num_vertices();
        for v in 0..n {
            for l in self.alphabet().letters() {
                if let Some(t) = self.target(v, l) {
                    if t >= n || self.target(t, l.inverse()) != Some(v) {
                        return Err(Error::InvalidCore(format!("edge {v} {l} {t} has no inverse")));
                    }
                }
            }
            if v != 0 && self.degree(v) < 2 {
                return Err(Error::InvalidCore(format!("vertex {v} has degree {}", self.degree(v))));
            }
        }
        if self.distances().contains(&usize::MAX) {
            return Err(Error::InvalidCore("not connected".into()));
        }
        Ok(())
    }

    /// Injective label-preserving map into `sup` sending base to base, as
    /// when `sup` is obtained from `self` by attaching new paths.
    pub fn embed_check(&self, sup: &CoreAutomaton) -> Result<Embedding> {
        self.propagate(sup, true)
    }

    /// Label-preserving map into `sup` sending base to base, not
    /// necessarily injective. Exists exactly when the subgroup of `self`
    /// is contained in that of `sup`.
    pub fn morphism_to(&self, sup: &CoreAutomaton) -> Result<Embedding> {
        self.propagate(sup, false)
    }

    fn propagate(&self, sup: &CoreAutomaton, injective: bool) -> Result<Embedding> {
        if self.rank != sup.rank {
            return Err(Error::Precondition("ranks differ".into()));
        }
        let n = self.num_vertices();
        let mut map = vec![usize::MAX; n];
        let mut used = vec![usize::MAX; sup.num_vertices()];
        map[0] = 0;
        used[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for l in self.alphabet().letters() {
                let Some(t) = self.target(v, l) else { continue };
                let Some(img) = sup.target(map[v], l) else {
                    return Err(Error::Embedding(v, map[v]));
                };
                if map[t] == usize::MAX {
                    if injective && used[img] != usize::MAX {
                        return Err(Error::Embedding(t, img));
                    }
                    map[t] = img;
                    used[img] = t;
                    queue.push_back(t);
                } else if map[t] != img {
                    return Err(Error::Embedding(t, img));
                }
            }
        }
        Ok(Embedding { map })
    }

    pub fn to_json(&self) -> CoreJson {
        CoreJson {
            r: self.rank,
            base: 0,
            edges: self.edges().iter().map(|e| [e.src as i64, e.letter.value() as i64, e.dst as i64]).collect(),
        }
    }

    pub fn from_json(j: &CoreJson) -> Result<CoreAutomaton> {
        json::load(j)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("core serializes")
    }

    pub fn from_json_str(s: &str) -> Result<CoreAutomaton> {
        let j: CoreJson = serde_json::from_str(s).map_err(|e| Error::Input(e.to_string()))?;
        CoreAutomaton::from_json(&j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn words(ws: &[&[i32]]) -> Vec<GroupWord> {
        ws.iter().map(|w| GroupWord::from_letters(w, Alphabet::new(2).unwrap()).unwrap()).collect()
    }

    #[test]
    fn conjugate_of_generator() {
        let c = CoreAutomaton::build(&words(&[&[1, 2, -1]]), 2).unwrap();
        assert_eq!(c.num_vertices(), 2);
        assert_eq!(c.deficit(), rat(10, 3));
        assert_eq!(c.subgroup_rank(), 1);
        assert_eq!(c.index(), None);
        assert_eq!(c.schreier_basis(), words(&[&[1, 2, -1]]));
        c.validate().unwrap();
    }

    #[test]
    fn standard_examples() {
        let triv = CoreAutomaton::build(&[], 2).unwrap();
        assert_eq!(triv.deficit(), rat(4, 1));
        let a = CoreAutomaton::build(&words(&[&[1]]), 2).unwrap();
        assert_eq!(a.deficit(), rat(2, 1));
        let all = CoreAutomaton::build(&words(&[&[1], &[2]]), 2).unwrap();
        assert_eq!(all.deficit(), rat(0, 1));
        assert_eq!(all.index(), Some(1));
    }

    #[test]
    fn folding_merges_and_trims() {
        // a b A and a b b A share the prefix a; a a A folds to a
        let c = CoreAutomaton::build(&words(&[&[1, 2, -1], &[1, 2, 2, -1]]), 2).unwrap();
        assert_eq!(c, CoreAutomaton::build(&words(&[&[1, 2, -1]]), 2).unwrap());
        let c = CoreAutomaton::build(&words(&[&[1, 1, -1]]), 2).unwrap();
        assert_eq!(c, CoreAutomaton::build(&words(&[&[1]]), 2).unwrap());
    }

    #[test]
    fn index_two() {
        let c = CoreAutomaton::build(&words(&[&[1, 1], &[2], &[1, 2, -1]]), 2).unwrap();
        assert_eq!(c.index(), Some(2));
        assert_eq!(c.subgroup_rank(), 3);
        assert!(c.membership(&words(&[&[1, 2, 1]])[0]));
        assert!(!c.membership(&words(&[&[1]])[0]));
    }

    #[test]
    fn embedding() {
        let small = CoreAutomaton::build(&words(&[&[1, 1]]), 2).unwrap();
        let big = CoreAutomaton::build(&words(&[&[1]]), 2).unwrap();
        assert!(small.morphism_to(&big).is_ok());
        assert!(small.embed_check(&big).is_err());
        assert!(big.morphism_to(&small).is_err());
        let conj = CoreAutomaton::build(&words(&[&[1, 2, -1]]), 2).unwrap();
        let more = CoreAutomaton::build(&words(&[&[1, 2, -1], &[2]]), 2).unwrap();
        assert_eq!(conj.embed_check(&more).unwrap().map, vec![0, 1]);
    }

    #[test]
    fn json_round_trip() {
        let c = CoreAutomaton::build(&words(&[&[1, 2, -1], &[2, 2, 1]]), 2).unwrap();
        let back = CoreAutomaton::from_json_str(&c.to_json_string()).unwrap();
        assert_eq!(back, c);
    }
}
