//! Growing a subgroup while keeping its deficit positive: attaching
//! elementary graphs, adjoining a power of an element, linking tuples of
//! cosets, stacking these into towers, and the change-of-basis
//! experiment for the Nielsen automorphism.

mod basis_change;
mod elementary;
mod link;
mod power;
mod tower;

pub use basis_change::{basis_change_experiment, BasisChange};
pub use elementary::{attach_elementary, Attachment, ElementaryKind, ElementarySpec};
pub use link::{link_tuples, Linking};
pub use power::{adjoin_power, power_orbit, PowerAdjunction, PowerOrbit};
pub use tower::{tower, Tower, TowerRequest, TowerStep};

use std::collections::HashMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::growth::{LazyCosetGraph, Node};
use crate::rational::{self, Rational};
use crate::stallings::{fold_graph_identified, CoreAutomaton};
use crate::words::{GroupWord, Letter};

/// Smallest `l >= 1` with `k (2r-1)^(2 - l/2) < epsilon`, compared
/// after squaring: `k^2 (2r-1)^(4-l) < epsilon^2`.
pub fn attachment_length(r: u32, k: usize, epsilon: &Rational) -> usize {
    let q = rational::int(2 * r as i64 - 1);
    let k2 = rational::int((k * k) as i64);
    let e2 = epsilon * epsilon;
    let mut l = 1usize;
    while &k2 * rational::pow(&q, 4 - l as i64) >= e2 {
        l += 1;
    }
    l
}

/// `(2r-1)^(4-l)`: the square of the deficit drop allowed for one
/// attachment of length `l`.
pub(crate) fn drop_bound_sq(r: u32, l: usize) -> Rational {
    rational::pow(&rational::int(2 * r as i64 - 1), 4 - l as i64)
}

pub(crate) fn check_epsilon(core: &CoreAutomaton, epsilon: &Rational) -> Result<Rational> {
    if core.rank() < 2 {
        return Err(Error::Rank { rank: core.rank(), min: 2 });
    }
    let def = core.deficit();
    if !(epsilon > &Rational::zero() && epsilon < &def) {
        return Err(Error::Precondition(format!(
            "need 0 < epsilon < deficit = {}, got {}",
            rational::format(&def),
            rational::format(epsilon)
        )));
    }
    Ok(def)
}

/// The core plus pieces of its coset graph, to be folded after some
/// vertices are identified.
pub(crate) struct Builder<'a> {
    graph: LazyCosetGraph<'a>,
    ids: HashMap<Node, usize>,
    n: usize,
    edges: Vec<(usize, Letter, usize)>,
    identify: Vec<(usize, usize)>,
}

impl<'a> Builder<'a> {
    pub fn new(core: &'a CoreAutomaton) -> Self {
        let edges = core.edges().iter().map(|e| (e.src, e.letter, e.dst)).collect();
        Builder {
            graph: LazyCosetGraph::new(core),
            ids: HashMap::new(),
            n: core.num_vertices(),
            edges,
            identify: Vec::new(),
        }
    }

    pub fn id(&mut self, node: &Node) -> usize {
        match node {
            Node::Core(v) => *v as usize,
            _ => {
                if let Some(&i) = self.ids.get(node) {
                    return i;
                }
                self.ids.insert(node.clone(), self.n);
                self.n += 1;
                self.n - 1
            }
        }
    }

    /// Adds the coset-graph path labelled `w` from `from`.
    pub fn add_path(&mut self, from: &Node, w: &GroupWord) -> Node {
        let mut cur = from.clone();
        for &l in w.letters() {
            let next = self.graph.step(&cur, l);
            let (a, b) = (self.id(&cur), self.id(&next));
            self.edges.push((a, l, b));
            cur = next;
        }
        cur
    }

    /// Adds the forest path from the root of `node` out to `node`.
    pub fn add_forest_path(&mut self, node: &Node) {
        if let Node::Forest { root, path } = node {
            self.add_path(&Node::Core(*root), &GroupWord::reduce(path.iter().copied()));
        }
    }

    pub fn identify(&mut self, a: &Node, b: &Node) {
        let (x, y) = (self.id(a), self.id(b));
        self.identify.push((x, y));
    }

    pub fn fold(self) -> Result<CoreAutomaton> {
        fold_graph_identified(self.graph.core.rank(), self.n, 0, &self.edges, &self.identify)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn attachment_lengths() {
        // 3^(4-l) < (1/2)^2 first holds at l = 6
        assert_eq!(attachment_length(2, 1, &rat(1, 2)), 6);
        assert_eq!(attachment_length(2, 1, &rat(10, 1)), 1);
        assert_eq!(attachment_length(2, 2, &rat(1, 2)), 7);
    }
}
