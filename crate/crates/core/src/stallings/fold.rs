use std::collections::VecDeque;

use super::CoreAutomaton;
use crate::error::Result;
use crate::words::{Alphabet, Letter};

struct Folder {
    width: usize,
    parent: Vec<usize>,
    size: Vec<usize>,
    adj: Vec<Vec<Option<usize>>>,
    pending: Vec<(usize, usize)>,
}

impl Folder {
    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn set(&mut self, u: usize, i: usize, v: usize) {
        let u = self.find(u);
        match self.adj[u][i] {
            Some(t) => self.pending.push((t, v)),
            None => self.adj[u][i] = Some(v),
        }
    }

    fn add_edge(&mut self, u: usize, l: Letter, v: usize) {
        self.set(u, l.index(), v);
        self.set(v, l.inverse().index(), u);
        self.drain();
    }

    fn drain(&mut self) {
        while let Some((a, b)) = self.pending.pop() {
            let (mut a, mut b) = (self.find(a), self.find(b));
            if a == b {
                continue;
            }
            if self.size[a] < self.size[b] {
                std::mem::swap(&mut a, &mut b);
            }
            self.parent[b] = a;
            self.size[a] += self.size[b];
            for i in 0..self.width {
                if let Some(t) = self.adj[b][i].take() {
                    self.set(a, i, t);
                }
            }
        }
    }
}

/// Folds the labelled graph on `n` vertices, trims hanging trees away
/// from `base`, and renumbers breadth-first from `base`.
pub fn fold_graph(r: u32, n: usize, base: usize, edges: &[(usize, Letter, usize)]) -> Result<CoreAutomaton> {
    fold_graph_identified(r, n, base, edges, &[])
}

/// [`fold_graph`] after first identifying each listed pair of vertices.
pub fn fold_graph_identified(
    r: u32,
    n: usize,
    base: usize,
    edges: &[(usize, Letter, usize)],
    identify: &[(usize, usize)],
) -> Result<CoreAutomaton> {
    let alphabet = Alphabet::new(r)?;
    let width = alphabet.size();
    let mut f = Folder {
        width,
        parent: (0..n).collect(),
        size: vec![1; n],
        adj: vec![vec![None; width]; n],
        pending: Vec::new(),
    };
    for &(u, l, v) in edges {
        alphabet.check(l)?;
        f.add_edge(u, l, v);
    }
    f.pending.extend_from_slice(identify);
    f.drain();
    let mut adj: Vec<Vec<Option<usize>>> = vec![vec![None; width]; n];
    let mut alive = vec![false; n];
    for v in 0..n {
        if f.find(v) == v {
            alive[v] = true;
            for i in 0..width {
                if let Some(t) = f.adj[v][i] {
                    adj[v][i] = Some(f.find(t));
                }
            }
        }
    }
    let base = f.find(base);
    trim(&mut adj, &mut alive, base);
    Ok(canonical(r, &adj, base))
}

/// Removes non-base vertices of degree at most one until none remain.
fn trim(adj: &mut [Vec<Option<usize>>], alive: &mut [bool], base: usize) {
    let deg = |row: &Vec<Option<usize>>| row.iter().filter(|t| t.is_some()).count();
    let mut queue: VecDeque<usize> =
        (0..adj.len()).filter(|&v| alive[v] && v != base && deg(&adj[v]) <= 1).collect();
    while let Some(v) = queue.pop_front() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for i in 0..adj[v].len() {
            if let Some(t) = adj[v][i].take() {
                let back = Letter::from_index(i).inverse().index();
                adj[t][back] = None;
                if t != base && alive[t] && deg(&adj[t]) <= 1 {
                    queue.push_back(t);
                }
            }
        }
    }
}

/// Breadth-first renumbering from `base` in the fixed letter order;
/// unreachable vertices are dropped.
pub(crate) fn canonical(r: u32, adj: &[Vec<Option<usize>>], base: usize) -> CoreAutomaton {
    let width = 2 * r as usize;
    let mut id = vec![usize::MAX; adj.len()];
    let mut order = vec![base];
    id[base] = 0;
    let mut k = 0;
    while k < order.len() {
        let v = order[k];
        k += 1;
        for i in 0..width {
            if let Some(t) = adj[v][i] {
                if id[t] == usize::MAX {
                    id[t] = order.len();
                    order.push(t);
                }
            }
        }
    }
    let mut delta = vec![None; order.len() * width];
    for (new, &old) in order.iter().enumerate() {
        for i in 0..width {
            delta[new * width + i] = adj[old][i].map(|t| id[t] as u32);
        }
    }
    CoreAutomaton::from_table(r, delta)
}
