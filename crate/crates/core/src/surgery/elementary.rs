use serde::{Deserialize, Serialize};

use super::drop_bound_sq;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::stallings::{canonical, CoreAutomaton};
use crate::words::{GroupWord, Letter};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ElementaryKind {
    /// A cycle through `at` labelled `label`.
    Cycle,
    /// A path labelled `leg` from `at` to a new vertex carrying a cycle
    /// labelled `label`.
    CycleWithLeg { leg: GroupWord },
    /// A path labelled `label` from `at` to `to`.
    Arc { to: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementarySpec {
    pub kind: ElementaryKind,
    pub at: usize,
    pub label: GroupWord,
}

impl ElementarySpec {
    /// The distinguished path read from `at`.
    pub fn path_label(&self) -> GroupWord {
        match &self.kind {
            ElementaryKind::CycleWithLeg { leg } => {
                let mut ls = leg.letters().to_vec();
                ls.extend_from_slice(self.label.letters());
                ls.extend(leg.inverse().letters().iter().copied());
                GroupWord::reduce(ls)
            }
            _ => self.label.clone(),
        }
    }

    /// Length of the attached graph's distinguished path.
    pub fn length(&self) -> usize {
        match &self.kind {
            ElementaryKind::CycleWithLeg { leg } => 2 * leg.len() + self.label.len(),
            _ => self.label.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Attachment {
    pub core: CoreAutomaton,
    /// `def(C) - def(C')`.
    pub delta: Rational,
    /// Free factor added to the subgroup: `H' = H * <g>`.
    pub generator: GroupWord,
}

struct Drawer {
    adj: Vec<Vec<Option<usize>>>,
}

impl Drawer {
    fn edge(&mut self, u: usize, l: Letter, v: usize) -> Result<()> {
        let (i, j) = (l.index(), l.inverse().index());
        if self.adj[u][i].is_some() || self.adj[v][j].is_some() || (u == v && i == j) {
            return Err(Error::Precondition(format!("letter {l} already used at the attaching point")));
        }
        self.adj[u][i] = Some(v);
        self.adj[v][j] = Some(u);
        Ok(())
    }

    fn fresh(&mut self, width: usize) -> usize {
        self.adj.push(vec![None; width]);
        self.adj.len() - 1
    }

    fn path(&mut self, from: usize, w: &GroupWord, to: Option<usize>, width: usize) -> Result<usize> {
        let ls = w.letters();
        let mut cur = from;
        for (k, &l) in ls.iter().enumerate() {
            let next = match to {
                Some(t) if k + 1 == ls.len() => t,
                _ => self.fresh(width),
            };
            self.edge(cur, l, next)?;
            cur = next;
        }
        Ok(cur)
    }
}

/// Attaches an elementary graph without folding; fails if any star would
/// stop being standard. The deficit drop obeys
/// `0 <= delta <= (2r-1)^(2 - l/2)`, checked as `delta^2 <= (2r-1)^(4-l)`.
pub fn attach_elementary(core: &CoreAutomaton, spec: &ElementarySpec) -> Result<Attachment> {
    let r = core.rank();
    let width = 2 * r as usize;
    let n = core.num_vertices();
    let label = &spec.label;
    for &l in label.letters() {
        core.alphabet().check(l)?;
    }
    if label.is_empty() {
        return Err(Error::EmptyWord);
    }
    if spec.at >= n {
        return Err(Error::Precondition(format!("vertex {} outside the core", spec.at)));
    }
    let mut d = Drawer { adj: core.adjacency() };
    let end = match &spec.kind {
        ElementaryKind::Cycle => {
            if !label.is_cyclically_reduced() {
                return Err(Error::Precondition("cycle label is not cyclically reduced".into()));
            }
            d.path(spec.at, label, Some(spec.at), width)?
        }
        ElementaryKind::CycleWithLeg { leg } => {
            if leg.is_empty() || !label.is_cyclically_reduced() {
                return Err(Error::Precondition("need a nonempty leg and a cyclically reduced cycle".into()));
            }
            let first = *label.letters().first().expect("nonempty");
            let last = *label.letters().last().expect("nonempty");
            let leg_end = *leg.letters().last().expect("nonempty");
            if first == leg_end.inverse() || last == leg_end {
                return Err(Error::Precondition("leg and cycle fold together".into()));
            }
            let m = d.path(spec.at, leg, None, width)?;
            d.path(m, label, Some(m), width)?;
            spec.at
        }
        ElementaryKind::Arc { to } => {
            if *to >= n {
                return Err(Error::Precondition(format!("vertex {to} outside the core")));
            }
            d.path(spec.at, label, Some(*to), width)?
        }
    };
    let words = core.vertex_words();
    let generator = words[spec.at].mul(&spec.path_label()).mul(&words[end].inverse());
    let new = canonical(r, &d.adj, 0);
    new.validate()?;
    let delta = core.deficit() - new.deficit();
    let l = spec.length();
    if delta < Rational::from_integer(0.into()) || &delta * &delta > drop_bound_sq(r, l) {
        return Err(Error::Postcondition(format!(
            "deficit drop {} outside [0, 3^(2-l/2)] for l = {l}",
            rational::format(&delta)
        )));
    }
    if !new.membership(&generator) || core.embed_check(&new).is_err() {
        return Err(Error::Postcondition("attached graph does not extend the subgroup".into()));
    }
    Ok(Attachment { core: new, delta, generator })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::words::Alphabet;

    fn w(v: &[i32]) -> GroupWord {
        GroupWord::from_letters(v, Alphabet::new(2).unwrap()).unwrap()
    }

    #[test]
    fn long_cycle_on_a_loop() {
        let core = CoreAutomaton::build(&[w(&[1])], 2).unwrap();
        let spec = ElementarySpec { kind: ElementaryKind::Cycle, at: 0, label: w(&[2; 12]) };
        let a = attach_elementary(&core, &spec).unwrap();
        assert!(a.delta <= rat(1, 81));
        assert!(a.delta > rat(0, 1));
        assert_eq!(a.core.subgroup_rank(), 2);
        assert!(a.core.membership(&w(&[2; 12])));
    }

    #[test]
    fn collisions_are_rejected() {
        let core = CoreAutomaton::build(&[w(&[1])], 2).unwrap();
        let spec = ElementarySpec { kind: ElementaryKind::Cycle, at: 0, label: w(&[1, 2, 2]) };
        assert!(attach_elementary(&core, &spec).is_err());
    }

    #[test]
    fn leg_and_arc() {
        let core = CoreAutomaton::build(&[w(&[1, 2, -1])], 2).unwrap();
        let spec = ElementarySpec {
            kind: ElementaryKind::CycleWithLeg { leg: w(&[2, 2]) },
            at: 0,
            label: w(&[1, 1, 1]),
        };
        let a = attach_elementary(&core, &spec).unwrap();
        assert_eq!(a.generator, w(&[2, 2, 1, 1, 1, -2, -2]));
        let spec = ElementarySpec { kind: ElementaryKind::Arc { to: 1 }, at: 0, label: w(&[2, 2, -1]) };
        let a = attach_elementary(&core, &spec).unwrap();
        assert_eq!(a.generator, w(&[2, 2, -1, -1]));
        assert_eq!(a.core.index(), None);
        assert_eq!(a.core.subgroup_rank(), 2);
    }
}
