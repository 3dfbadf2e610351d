use serde::{Deserialize, Serialize};

use super::fold::canonical;
use super::CoreAutomaton;
use crate::error::{Error, Result};
use crate::words::{Alphabet, Letter};

/// `{"r": int, "base": int, "edges": [[src, letter, dst], ...]}` with
/// positive letters only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoreJson {
    pub r: u32,
    pub base: i64,
    pub edges: Vec<[i64; 3]>,
}

pub(super) fn load(j: &CoreJson) -> Result<CoreAutomaton> {
    let alphabet = Alphabet::new(j.r)?;
    let bad = |m: String| Error::InvalidCore(m);
    if j.base < 0 {
        return Err(bad("negative base".into()));
    }
    let mut n = j.base as usize + 1;
    for e in &j.edges {
        if e[0] < 0 || e[2] < 0 {
            return Err(bad(format!("negative vertex in edge {e:?}")));
        }
        if e[1] <= 0 {
            return Err(bad(format!("edge {e:?} must use a positive letter")));
        }
        n = n.max(e[0] as usize + 1).max(e[2] as usize + 1);
    }
    let width = alphabet.size();
    let mut adj = vec![vec![None; width]; n];
    for e in &j.edges {
        let l = Letter::new(i32::try_from(e[1]).map_err(|_| bad(format!("letter {}", e[1])))?)?;
        alphabet.check(l)?;
        let (s, t) = (e[0] as usize, e[2] as usize);
        if adj[s][l.index()].is_some() {
            return Err(bad(format!("two edges labelled {l} leave vertex {s}")));
        }
        if adj[t][l.inverse().index()].is_some() {
            return Err(bad(format!("two edges labelled {l} enter vertex {t}")));
        }
        adj[s][l.index()] = Some(t);
        adj[t][l.inverse().index()] = Some(s);
    }
    let base = j.base as usize;
    let core = canonical(j.r, &adj, base);
    if core.num_vertices() != n {
        return Err(bad("not connected".into()));
    }
    core.validate()?;
    Ok(core)
}
