use std::collections::HashSet;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::growth::{validate_series, GrowthSeries, SeriesKind};
use crate::words::{apply_nielsen, Alphabet, FrequencyWindow, GroupWord, Letter, ZParams};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisChange {
    /// Ball sizes in the basis `a_1, ..., a_r`.
    pub series_a: GrowthSeries,
    /// Ball sizes in the basis `b_1 = a_1`, `b_2 = a_1 a_2`, `b_k = a_k`.
    pub series_b: GrowthSeries,
    /// Radii up to which each series is unaffected by the truncation at
    /// level `depth`.
    pub exact_a: usize,
    pub exact_b: usize,
    /// Balls in the b-basis using only edges below the cut: lower bounds
    /// for the untruncated graph.
    pub lower_b: Vec<BigUint>,
    /// Number of words of each length passing the frequency windows.
    pub z_counts: Vec<u64>,
    pub vertices: usize,
    /// Edges added between vertices of equal level.
    pub paired: usize,
}

#[derive(Serialize, Deserialize)]
struct Summary {
    series_a: Vec<String>,
    series_b: Vec<String>,
    exact_a: usize,
    exact_b: usize,
    lower_b: Vec<String>,
    z_counts: Vec<u64>,
    vertices: usize,
    paired: usize,
}

impl BasisChange {
    pub fn to_json(&self) -> String {
        let s = Summary {
            series_a: self.series_a.g.iter().map(|x| x.to_string()).collect(),
            series_b: self.series_b.g.iter().map(|x| x.to_string()).collect(),
            exact_a: self.exact_a,
            exact_b: self.exact_b,
            lower_b: self.lower_b.iter().map(|x| x.to_string()).collect(),
            z_counts: self.z_counts.clone(),
            vertices: self.vertices,
            paired: self.paired,
        };
        serde_json::to_string(&s).expect("summary serializes")
    }
}

struct Trie {
    width: usize,
    child: Vec<Vec<Option<usize>>>,
    from_parent: Vec<Option<Letter>>,
}

impl Trie {
    fn insert(&mut self, w: &[Letter]) {
        let mut v = 0;
        for &l in w {
            v = match self.child[v][l.index()] {
                Some(c) => c,
                None => {
                    self.child.push(vec![None; self.width]);
                    self.from_parent.push(Some(l));
                    let c = self.child.len() - 1;
                    self.child[v][l.index()] = Some(c);
                    c
                }
            };
        }
    }

    fn has_out(&self, v: usize, l: Letter) -> bool {
        self.child[v][l.index()].is_some() || self.from_parent[v] == Some(l.inverse())
    }
}

fn flip(w: &[Letter], mask: u32) -> Vec<Letter> {
    w.iter()
        .map(|&l| if mask >> (l.generator() - 1) & 1 == 1 { l.inverse() } else { l })
        .collect()
}

/// Builds a transitive action of the free group from the words whose
/// letter and pair frequencies stay in the windows: their Nielsen images,
/// closed under inverting any set of generators and under prefixes, form
/// a geodesic tree to which edges are added between vertices of the same
/// level (each vertex missing `a_j` paired, in ShortLex order, with one
/// missing `a_j^-1`). Balls are then counted in both bases up to `depth`.
///
/// The tree is cut at level `cut >= depth`; edges leaving the cut level
/// stand in for the rest of the graph, and `exact_a`, `exact_b` report the
/// largest radius whose ball never used one.
pub fn basis_change_experiment(r: u32, p: &ZParams, depth: usize, cut: usize) -> Result<BasisChange> {
    if cut < depth {
        return Err(Error::Precondition(format!("cut level {cut} below depth {depth}")));
    }
    let alphabet = Alphabet::new(r)?;
    if r < 2 {
        return Err(Error::Rank { rank: r, min: 2 });
    }
    let mut z_counts = vec![0u64; depth + 1];
    let mut images: HashSet<Vec<Letter>> = HashSet::new();
    let mut stack = vec![(GroupWord::empty(), FrequencyWindow::new(r, &p.epsilon)?)];
    while let Some((z, win)) = stack.pop() {
        if z.len() <= depth {
            z_counts[z.len()] += 1;
        }
        let image = apply_nielsen(&z);
        images.insert(image.letters()[..image.len().min(cut)].to_vec());
        if image.len() > cut + 2 && z.len() >= depth {
            continue;
        }
        for x in alphabet.letters() {
            if z.letters().last() == Some(&x.inverse()) {
                continue;
            }
            let mut next = win.clone();
            next.push(x);
            if next.len() >= p.l.max(1) && !next.in_window() {
                continue;
            }
            let mut ls = z.letters().to_vec();
            ls.push(x);
            stack.push((GroupWord::reduce(ls), next));
        }
    }
    let width = alphabet.size();
    let mut trie = Trie { width, child: vec![vec![None; width]], from_parent: vec![None] };
    let mut sorted: Vec<&Vec<Letter>> = images.iter().collect();
    sorted.sort();
    for w in sorted {
        for mask in 0..(1u32 << r) {
            trie.insert(&flip(w, mask));
        }
    }
    // levels in breadth-first letter order, which is ShortLex
    let mut levels: Vec<Vec<usize>> = vec![vec![0]];
    loop {
        let next: Vec<usize> = levels
            .last()
            .expect("nonempty")
            .iter()
            .flat_map(|&v| trie.child[v].iter().flatten().copied())
            .collect();
        if next.is_empty() {
            break;
        }
        levels.push(next);
    }
    let n = trie.child.len();
    let mut out: Vec<Vec<Option<usize>>> = vec![vec![None; width]; n];
    for v in 0..n {
        for l in alphabet.letters() {
            if let Some(c) = trie.child[v][l.index()] {
                out[v][l.index()] = Some(c);
                out[c][l.inverse().index()] = Some(v);
            }
        }
    }
    let mut paired = 0;
    for level in &levels {
        for x in alphabet.positive() {
            let lack: Vec<usize> = level.iter().copied().filter(|&v| !trie.has_out(v, x)).collect();
            let lack_inv: Vec<usize> = level.iter().copied().filter(|&v| !trie.has_out(v, x.inverse())).collect();
            if lack.len() != lack_inv.len() {
                return Err(Error::Postcondition(format!(
                    "unequal deficits for {x} on a level: {} vs {}",
                    lack.len(),
                    lack_inv.len()
                )));
            }
            for (&a, &b) in lack.iter().zip(&lack_inv) {
                out[a][x.index()] = Some(b);
                out[b][x.inverse().index()] = Some(a);
                paired += 1;
            }
        }
    }
    let table: Vec<Vec<usize>> = out
        .into_iter()
        .map(|row| row.into_iter().collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| Error::Postcondition("some star is not standard".into()))?;
    let mut level = vec![0usize; n];
    for (d, vs) in levels.iter().enumerate() {
        for &v in vs {
            level[v] = d;
        }
    }
    let last = levels.len() - 1;
    // edges leaving the last level, other than the one to the parent,
    // stand in for the part of the graph that was cut off
    let step = |(v, cut): (usize, bool), l: Letter| {
        let t = table[v][l.index()];
        (t, cut || (level[v] == last && trie.from_parent[v] != Some(l.inverse())))
    };
    let a_moves: Vec<Move> = alphabet.letters().map(|l| vec![l]).collect();
    let (a1, a2) = (Letter::pos(1), Letter::pos(2));
    let mut b_moves: Vec<Move> = vec![vec![a1], vec![a1.inverse()], vec![a1, a2], vec![a2.inverse(), a1.inverse()]];
    b_moves.extend(alphabet.letters().skip(4).map(|l| vec![l]));
    let (ga, exact_a) = balls(n, &a_moves, depth, &step, false);
    let (gb, exact_b) = balls(n, &b_moves, depth, &step, false);
    let (lower_b, _) = balls(n, &b_moves, depth, &step, true);
    let series_a = GrowthSeries::new(SeriesKind::Group, r, ga);
    let series_b = GrowthSeries::new(SeriesKind::Group, r, gb);
    for s in [&series_a, &series_b] {
        if let Some(v) = validate_series(s).violation {
            return Err(Error::Postcondition(format!("series invalid at n = {}: {}", v.n, v.detail)));
        }
    }
    Ok(BasisChange { series_a, series_b, exact_a, exact_b, lower_b, z_counts, vertices: n, paired })
}

type Move = Vec<Letter>;

/// Ball sizes up to `depth`, and the largest radius whose ball never used
/// an edge flagged by `step`. With `avoid`, flagged edges are not taken.
fn balls(
    n: usize,
    moves: &[Move],
    depth: usize,
    step: &impl Fn((usize, bool), Letter) -> (usize, bool),
    avoid: bool,
) -> (Vec<BigUint>, usize) {
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut frontier = vec![0usize];
    let mut count = 1u64;
    let mut out = vec![BigUint::from(1u32)];
    let mut exact = None;
    for radius in 0..depth {
        let mut next = Vec::new();
        for &v in &frontier {
            for m in moves {
                let (t, cut) = m.iter().fold((v, false), |acc, &l| step(acc, l));
                if cut && exact.is_none() {
                    exact = Some(radius);
                }
                if cut && avoid {
                    continue;
                }
                if !seen[t] {
                    seen[t] = true;
                    next.push(t);
                }
            }
        }
        count += next.len() as u64;
        out.push(BigUint::from(count));
        frontier = next;
    }
    (out, exact.unwrap_or(depth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::words::{sample_reduced, sample_rng};

    #[test]
    fn nielsen_prefixes_are_stable() {
        let mut rng = sample_rng(3, 0);
        for _ in 0..200 {
            let z = sample_reduced(30, 2, &mut rng);
            let full = apply_nielsen(&z);
            for k in 0..=z.len() {
                let part = apply_nielsen(&GroupWord::reduce(z.letters()[..k].iter().copied()));
                let keep = part.len().saturating_sub(1);
                assert_eq!(&full.letters()[..keep], &part.letters()[..keep]);
            }
        }
    }

    #[test]
    fn unconstrained_windows_give_the_free_action() {
        let p = ZParams { epsilon: rat(1, 40), l: 20 };
        let res = basis_change_experiment(2, &p, 5, 5).unwrap();
        let free: Vec<u64> = vec![1, 5, 17, 53, 161, 485];
        assert_eq!(res.series_a, GrowthSeries::from_u64(SeriesKind::Group, 2, &free));
        assert_eq!(res.exact_a, 5);
        assert_eq!(res.exact_b, 2);
        assert_eq!(res.series_b.g[..3], res.series_a.g[..3]);
        assert_eq!(res.vertices, 485);
    }

    #[test]
    fn windows_thin_out_the_a_balls() {
        let p = ZParams { epsilon: rat(1, 8), l: 8 };
        let res = basis_change_experiment(2, &p, 11, 12).unwrap();
        assert_eq!(res.z_counts[8], 136);
        assert!(res.series_a.g[11] < BigUint::from(3u32).pow(11));
        for n in 0..=res.exact_b {
            assert_eq!(res.lower_b[n], res.series_b.g[n]);
        }
        for n in 0..=11 {
            assert!(res.lower_b[n] <= res.series_b.g[n]);
        }
    }
}
