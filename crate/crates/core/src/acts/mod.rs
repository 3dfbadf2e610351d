//! Right acts of the free monoid: finite tables, the prescribed-growth
//! construction, the k-transitive act built from a forbidden-prefix
//! language, and ball counting.

mod dagger;
mod ktrans;
mod prescribed;

pub use dagger::check_property_dagger;
pub use ktrans::{build_k_transitive, marker, KTransitiveAct, Lookup, Tuple, TupleJson, PlanJson};
pub use prescribed::build_prescribed;

use std::collections::HashSet;
use std::hash::Hash;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::{validate_series, GrowthSeries, SeriesKind};
use crate::par::{self, Exec};
use crate::words::MonoidWord;

/// A right action of the free monoid on `rank` letters, `s(xy) = (sx)y`.
pub trait Act: Sync {
    type State: Clone + Eq + Hash + Send + Sync;

    fn rank(&self) -> u32;

    fn generators(&self) -> Vec<Self::State>;

    /// `s` acted on by the letter `g` in `1..=rank`.
    fn act(&self, s: &Self::State, g: u32) -> Result<Self::State>;

    fn apply(&self, s: &Self::State, w: &MonoidWord) -> Result<Self::State> {
        w.gens().try_fold(s.clone(), |s, g| self.act(&s, g))
    }
}

/// A finite act given by its transition table, `table[s][g - 1]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableAct {
    pub r: u32,
    pub generators: Vec<usize>,
    pub table: Vec<Vec<usize>>,
}

impl TableAct {
    pub fn validate(&self) -> Result<()> {
        if self.r == 0 {
            return Err(Error::Rank { rank: 0, min: 1 });
        }
        let n = self.table.len();
        if self.generators.is_empty() || self.generators.iter().any(|&a| a >= n) {
            return Err(Error::Input("generators must be nonempty state indices".into()));
        }
        for (s, row) in self.table.iter().enumerate() {
            if row.len() != self.r as usize || row.iter().any(|&t| t >= n) {
                return Err(Error::Input(format!("row {s} is not a total map into the states")));
            }
        }
        Ok(())
    }

    pub fn num_states(&self) -> usize {
        self.table.len()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("table serializes")
    }

    pub fn from_json(s: &str) -> Result<TableAct> {
        let act: TableAct = serde_json::from_str(s).map_err(|e| Error::Input(e.to_string()))?;
        act.validate()?;
        Ok(act)
    }
}

impl Act for TableAct {
    type State = usize;

    fn rank(&self) -> u32 {
        self.r
    }

    fn generators(&self) -> Vec<usize> {
        self.generators.clone()
    }

    fn act(&self, s: &usize, g: u32) -> Result<usize> {
        if g == 0 || g > self.r {
            return Err(Error::LetterOutOfRange { letter: g as i64, rank: self.r });
        }
        self.table
            .get(*s)
            .map(|row| row[g as usize - 1])
            .ok_or_else(|| Error::Input(format!("no state {s}")))
    }
}

/// Ball sizes `#B(A, n)` for `n <= n_max`, failing once more than `budget`
/// states have been seen.
pub fn act_growth<A: Act>(act: &A, n_max: usize, budget: usize, exec: Exec) -> Result<GrowthSeries> {
    let mut seen: HashSet<A::State> = HashSet::new();
    let mut frontier = Vec::new();
    for a in act.generators() {
        if seen.insert(a.clone()) {
            frontier.push(a);
        }
    }
    let r = act.rank();
    let mut g = vec![BigUint::from(seen.len())];
    for _ in 0..n_max {
        let images = par::flat_map(exec, &frontier, |s| (1..=r).map(|x| act.act(s, x)).collect::<Vec<_>>());
        let mut next = Vec::new();
        for t in images {
            let t = t?;
            if !seen.contains(&t) {
                seen.insert(t.clone());
                next.push(t);
            }
        }
        if seen.len() > budget {
            return Err(Error::Budget(format!("more than {budget} states within radius {}", g.len())));
        }
        g.push(BigUint::from(seen.len()));
        frontier = next;
    }
    let series = GrowthSeries::new(SeriesKind::Monoid, r, g);
    if let Some(v) = validate_series(&series).violation {
        return Err(Error::Postcondition(format!("act growth invalid at n = {}: {}", v.n, v.detail)));
    }
    Ok(series)
}

/// Two distinct words of length at most `max_len` acting identically on
/// every state within `radius` of the generators, if there are any.
pub fn identical_actions<A: Act>(
    act: &A,
    max_len: usize,
    radius: usize,
) -> Result<Option<(MonoidWord, MonoidWord)>> {
    let mut states: Vec<A::State> = Vec::new();
    let mut seen: HashSet<A::State> = HashSet::new();
    let mut frontier = Vec::new();
    for a in act.generators() {
        if seen.insert(a.clone()) {
            frontier.push(a.clone());
            states.push(a);
        }
    }
    for _ in 0..radius {
        let mut next = Vec::new();
        for s in &frontier {
            for x in 1..=act.rank() {
                let t = act.act(s, x)?;
                if seen.insert(t.clone()) {
                    states.push(t.clone());
                    next.push(t);
                }
            }
        }
        frontier = next;
    }
    let words = MonoidWord::ball(act.rank(), max_len);
    let mut by_profile: std::collections::HashMap<Vec<A::State>, MonoidWord> = std::collections::HashMap::new();
    for w in words {
        let profile = states.iter().map(|s| act.apply(s, &w)).collect::<Result<Vec<_>>>()?;
        if let Some(prev) = by_profile.get(&profile) {
            return Ok(Some((prev.clone(), w)));
        }
        by_profile.insert(profile, w);
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn free(r: u32, depth: usize) -> TableAct {
        // the free act on one generator, cut at `depth` with self-loops
        let mut table = Vec::new();
        let mut level = vec![0usize];
        table.push(vec![0; r as usize]);
        for _ in 0..depth {
            let mut next = Vec::new();
            for &s in &level {
                for g in 0..r as usize {
                    table.push(vec![0; r as usize]);
                    let t = table.len() - 1;
                    table[t] = vec![t; r as usize];
                    table[s][g] = t;
                    next.push(t);
                }
            }
            level = next;
        }
        TableAct { r, generators: vec![0], table }
    }

    #[test]
    fn free_act_growth() {
        let act = free(2, 3);
        act.validate().unwrap();
        let g = act_growth(&act, 3, 100, Exec::auto()).unwrap();
        assert_eq!(g, GrowthSeries::from_u64(SeriesKind::Monoid, 2, &[1, 3, 7, 15]));
        assert!(act_growth(&act, 3, 10, Exec::Sequential).is_err());
        let back = TableAct::from_json(&act.to_json()).unwrap();
        assert_eq!(back, act);
    }

    #[test]
    fn identical_actions_found_on_a_small_act() {
        let act = TableAct { r: 2, generators: vec![0], table: vec![vec![1, 0], vec![1, 1]] };
        let pair = identical_actions(&act, 2, 3).unwrap().unwrap();
        assert_ne!(pair.0, pair.1);
    }
}
