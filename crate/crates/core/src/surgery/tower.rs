use serde::{Deserialize, Serialize};

use super::{adjoin_power, link_tuples, power_orbit, PowerOrbit};
use crate::error::{Error, Result};
use crate::growth::LazyCosetGraph;
use crate::rational::{self, Rational};
use crate::stallings::CoreAutomaton;
use crate::words::GroupWord;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TowerRequest {
    Power(GroupWord),
    Link { from: Vec<GroupWord>, to: Vec<GroupWord> },
}

/// One line of the tower log.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TowerStep {
    pub step: usize,
    /// `power`, `link`, or `skip` when the request already held.
    pub kind: String,
    /// The exponent for powers, the linking word for links.
    pub n_or_b: String,
    #[serde(with = "rational::serde_str")]
    pub deficit_before: Rational,
    #[serde(with = "rational::serde_str")]
    pub deficit_after: Rational,
    #[serde(with = "rational::serde_str")]
    pub epsilon: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tower {
    pub cores: Vec<CoreAutomaton>,
    pub steps: Vec<TowerStep>,
}

impl Tower {
    pub fn final_core(&self) -> &CoreAutomaton {
        self.cores.last().expect("tower has a base")
    }

    pub fn log_lines(&self) -> Vec<String> {
        self.steps.iter().map(|s| serde_json::to_string(s).expect("step serializes")).collect()
    }
}

/// Applies the requests in order with budgets `c / 3^(i+1)`, `c` the
/// initial deficit, so every stage keeps deficit above `c / 2`. A power
/// already periodic, or a link whose cosets already coincide, leaves the
/// subgroup unchanged; a link whose cosets are not pairwise distinct is
/// skipped.
pub fn tower(base: &CoreAutomaton, plan: &[TowerRequest], seed: u64) -> Result<Tower> {
    let c = base.deficit();
    let zero = Rational::from_integer(0.into());
    if c <= zero {
        return Err(Error::Precondition("base subgroup has zero deficit".into()));
    }
    let mut cores = vec![base.clone()];
    let mut steps = Vec::new();
    let mut witnesses: Vec<(GroupWord, usize)> = Vec::new();
    let mut links: Vec<(Vec<GroupWord>, Vec<GroupWord>, GroupWord)> = Vec::new();
    for (i, req) in plan.iter().enumerate() {
        let cur = cores.last().expect("nonempty").clone();
        let epsilon = &c / rational::pow(&rational::int(3), i as i64 + 1);
        let before = cur.deficit();
        let (next, kind, n_or_b) = match req {
            TowerRequest::Power(g) => match power_orbit(&cur, g)? {
                PowerOrbit::Periodic(k) => {
                    witnesses.push((g.clone(), k));
                    (cur.clone(), "skip", k.to_string())
                }
                PowerOrbit::Free => {
                    let p = adjoin_power(&cur, g, &epsilon)?;
                    witnesses.push((g.clone(), p.n));
                    (p.core, "power", p.n.to_string())
                }
            },
            TowerRequest::Link { from, to } => match link_tuples(&cur, from, to, &epsilon, seed ^ i as u64) {
                Ok(res) => {
                    links.push((from.clone(), to.clone(), res.b.clone()));
                    let kind = if res.b.is_empty() { "skip" } else { "link" };
                    (res.core, kind, res.b.to_string())
                }
                Err(Error::Precondition(_)) => (cur.clone(), "skip", String::new()),
                Err(e) => return Err(e),
            },
        };
        let after = next.deficit();
        if after * rational::int(2) <= c {
            return Err(Error::Postcondition(format!("deficit fell to c/2 at step {i}")));
        }
        steps.push(TowerStep {
            step: i,
            kind: kind.into(),
            n_or_b,
            deficit_before: before,
            deficit_after: next.deficit(),
            epsilon,
        });
        cores.push(next);
    }
    let top = cores.last().expect("nonempty");
    for (g, n) in &witnesses {
        if !top.membership(&g.pow(*n as i64)) {
            return Err(Error::Postcondition(format!("power of {g} lost")));
        }
    }
    let graph = LazyCosetGraph::new(top);
    for (from, to, b) in &links {
        for (x, y) in from.iter().zip(to) {
            if graph.trace(&x.mul(b)) != graph.trace(y) {
                return Err(Error::Postcondition("link lost".into()));
            }
        }
    }
    for pair in cores.windows(2) {
        pair[0].embed_check(&pair[1]).map_err(|_| Error::Postcondition("stages do not nest".into()))?;
    }
    Ok(Tower { cores, steps })
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
    fn three_stage_tower() {
        let base = CoreAutomaton::build(&[w(&[1, 2, -1])], 2).unwrap();
        let plan = vec![
            TowerRequest::Power(w(&[2, 1])),
            TowerRequest::Link { from: vec![w(&[2])], to: vec![w(&[-2, -2])] },
            TowerRequest::Power(w(&[1, 2, -1])),
        ];
        let t = tower(&base, &plan, 11).unwrap();
        assert_eq!(t.steps.len(), 3);
        assert_eq!(t.steps[2].kind, "skip");
        for s in &t.steps {
            assert!(s.deficit_after.clone() * rat(2, 1) > rat(10, 3));
        }
        let line = &t.log_lines()[0];
        assert!(line.starts_with(r#"{"step":0,"kind":"power","n_or_b":""#));
    }
}
