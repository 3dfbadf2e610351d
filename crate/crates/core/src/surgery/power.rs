use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{attachment_length, check_epsilon, Builder};
use crate::error::{Error, Result};
use crate::growth::{LazyCosetGraph, Node};
use crate::rational::{self, Rational};
use crate::stallings::CoreAutomaton;
use crate::words::GroupWord;

/// How the cosets `H u w^i` behave for `g = u w u^-1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PowerOrbit {
    /// `g^k` lies in `H` for this least `k > 0`.
    Periodic(usize),
    /// All cosets distinct; both directions leave the core for good.
    Free,
}

/// Decides whether `<g>` meets `H` trivially by tracing `H u w^i` for
/// `|i| <= 2 #V + 10`: a repeat gives a period, and otherwise both ends
/// have escaped into the forest, where a cyclically reduced word never
/// turns back.
pub fn power_orbit(core: &CoreAutomaton, g: &GroupWord) -> Result<PowerOrbit> {
    let (u, w) = g.cyclic_decompose()?;
    let graph = LazyCosetGraph::new(core);
    let bound = 2 * core.num_vertices() + 10;
    let winv = w.inverse();
    let start = graph.trace(&u);
    let mut seen: HashMap<Node, i64> = HashMap::from([(start.clone(), 0)]);
    let (mut fwd, mut back) = (start.clone(), start);
    for i in 1..=bound as i64 {
        fwd = graph.read(&fwd, &w);
        if let Some(&j) = seen.get(&fwd) {
            return Ok(PowerOrbit::Periodic((i - j) as usize));
        }
        seen.insert(fwd.clone(), i);
        back = graph.read(&back, &winv);
        if let Some(&j) = seen.get(&back) {
            return Ok(PowerOrbit::Periodic((j + i) as usize));
        }
        seen.insert(back.clone(), -i);
    }
    if fwd.depth() == 0 || back.depth() == 0 {
        return Err(Error::Postcondition("orbit neither repeats nor escapes".into()));
    }
    Ok(PowerOrbit::Free)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PowerAdjunction {
    pub core: CoreAutomaton,
    /// `g^n` lies in the new subgroup, `n = i - j`.
    pub n: usize,
    pub i: i64,
    pub j: i64,
    pub l: usize,
    pub delta: Rational,
}

/// Adds `g^n` for some `n > 0` while lowering the deficit by at most
/// `epsilon`: joins two cosets `H u w^i`, `H u w^j` (`i > 0 > j`) that lie
/// more than `l` steps out in the forest.
pub fn adjoin_power(core: &CoreAutomaton, g: &GroupWord, epsilon: &Rational) -> Result<PowerAdjunction> {
    let def = check_epsilon(core, epsilon)?;
    for &x in g.letters() {
        core.alphabet().check(x)?;
    }
    if let PowerOrbit::Periodic(k) = power_orbit(core, g)? {
        return Err(Error::Precondition(format!("g^{k} already lies in the subgroup")));
    }
    let (u, w) = g.cyclic_decompose()?;
    let l = attachment_length(core.rank(), 1, epsilon);
    let graph = LazyCosetGraph::new(core);
    let start = graph.trace(&u);
    let far = |step: &GroupWord| -> (i64, Node) {
        let mut cur = start.clone();
        let mut k = 0i64;
        loop {
            cur = graph.read(&cur, step);
            k += 1;
            if cur.depth() > l {
                return (k, cur);
            }
        }
    };
    let (i, vi) = far(&w);
    let (jn, vj) = far(&w.inverse());
    let j = -jn;
    let mut b = Builder::new(core);
    b.add_forest_path(&vi);
    b.add_forest_path(&vj);
    b.identify(&vi, &vj);
    let new = b.fold()?;
    let n = (i - j) as usize;
    let new_def = new.deficit();
    let delta = &def - &new_def;
    let zero = Rational::from_integer(0.into());
    let checks = [
        (new.membership(&g.pow(n as i64)), "g^n not in the new subgroup"),
        (core.embed_check(&new).is_ok(), "old core does not embed"),
        (new.subgroup_rank() == core.subgroup_rank() + 1, "rank did not grow by one"),
        (delta >= zero && &delta <= epsilon, "deficit drop exceeds epsilon"),
        (new_def > zero, "deficit vanished"),
    ];
    for (ok, what) in checks {
        if !ok {
            return Err(Error::Postcondition(what.into()));
        }
    }
    Ok(PowerAdjunction { core: new, n, i, j, l, delta })
}

impl PowerAdjunction {
    pub fn summary(&self) -> String {
        format!(
            "n={} i={} j={} l={} delta={}",
            self.n,
            self.i,
            self.j,
            self.l,
            rational::format(&self.delta)
        )
    }
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
    fn power_of_commutator_into_trivial_group() {
        let core = CoreAutomaton::trivial(2).unwrap();
        let g = w(&[1, 2, -1, -2]);
        let p = adjoin_power(&core, &g, &rat(1, 2)).unwrap();
        assert!(p.core.membership(&g.pow(p.n as i64)));
        assert!(p.delta <= rat(1, 2));
        assert!(p.i > 0 && p.j < 0);
    }

    #[test]
    fn conjugated_power() {
        let core = CoreAutomaton::build(&[w(&[1, 1])], 2).unwrap();
        let g = w(&[2, 1, 2, -2]);
        let p = adjoin_power(&core, &g, &rat(1, 10)).unwrap();
        assert!(p.core.membership(&g.pow(p.n as i64)));
        assert!(p.delta <= rat(1, 10));
    }

    #[test]
    fn periodic_orbits() {
        let core = CoreAutomaton::build(&[w(&[1, 1, 1])], 2).unwrap();
        assert_eq!(power_orbit(&core, &w(&[1])).unwrap(), PowerOrbit::Periodic(3));
        assert!(adjoin_power(&core, &w(&[1]), &rat(1, 2)).is_err());
        assert_eq!(power_orbit(&core, &w(&[2])).unwrap(), PowerOrbit::Free);
    }
}
