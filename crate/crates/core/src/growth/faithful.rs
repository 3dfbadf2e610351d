use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::coset::{LazyCosetGraph, Node};
use crate::stallings::CoreAutomaton;
use crate::words::GroupWord;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FaithfulnessReport {
    pub faithful: bool,
    /// Two distinct words that act identically on every probed coset.
    pub witness: Option<(GroupWord, GroupWord)>,
    pub words: usize,
    pub cosets: usize,
}

/// Whether distinct reduced words of length at most `d` act differently
/// on the cosets within distance `d + radius(core)` of the base.
pub fn faithfulness_scan(core: &CoreAutomaton, d: usize) -> FaithfulnessReport {
    let graph = LazyCosetGraph::new(core);
    let radius = d + core.diameter();
    let mut ball = vec![graph.base()];
    let mut seen: HashSet<Node> = ball.iter().cloned().collect();
    let mut frontier = ball.clone();
    for _ in 0..radius {
        let mut next = Vec::new();
        for v in &frontier {
            for t in graph.neighbours(v) {
                if seen.insert(t.clone()) {
                    next.push(t);
                }
            }
        }
        ball.extend(next.iter().cloned());
        frontier = next;
    }
    let mut words = vec![GroupWord::empty()];
    let mut layer = vec![GroupWord::empty()];
    for _ in 0..d {
        let mut next = Vec::new();
        for w in &layer {
            for l in core.alphabet().letters() {
                if w.letters().last() != Some(&l.inverse()) {
                    next.push(w.mul(&GroupWord::reduce([l])));
                }
            }
        }
        words.extend(next.iter().cloned());
        layer = next;
    }
    let mut by_action: HashMap<Vec<Node>, GroupWord> = HashMap::new();
    for w in &words {
        let sig: Vec<Node> = ball.iter().map(|x| graph.read(x, w)).collect();
        if let Some(prev) = by_action.get(&sig) {
            return FaithfulnessReport {
                faithful: false,
                witness: Some((prev.clone(), w.clone())),
                words: words.len(),
                cosets: ball.len(),
            };
        }
        by_action.insert(sig, w.clone());
    }
    FaithfulnessReport { faithful: true, witness: None, words: words.len(), cosets: ball.len() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Alphabet;

    #[test]
    fn regular_action_is_faithful_and_bouquet_is_not() {
        let a = Alphabet::new(2).unwrap();
        assert!(faithfulness_scan(&CoreAutomaton::trivial(2).unwrap(), 3).faithful);
        let gens: Vec<GroupWord> = [[1], [2]].iter().map(|w| GroupWord::from_letters(w, a).unwrap()).collect();
        let all = CoreAutomaton::build(&gens, 2).unwrap();
        assert!(!faithfulness_scan(&all, 2).faithful);
        let conj = CoreAutomaton::build(&[GroupWord::from_letters(&[1, 2, -1], a).unwrap()], 2).unwrap();
        assert!(faithfulness_scan(&conj, 3).faithful);
    }
}
