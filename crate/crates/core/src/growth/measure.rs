use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::stallings::CoreAutomaton;
use crate::words::Letter;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasureBounds {
    /// `upper[n]`: uniform measure of the cylinders at level `n` whose
    /// geodesic-tree vertex still has a descendant at level `N`.
    #[serde(with = "rational::serde_vec")]
    pub upper: Vec<Rational>,
    /// Measure of the boundary points whose ray avoids returning through
    /// the core, `def / 2r`; the bounds decrease to it.
    #[serde(with = "rational::serde_str")]
    pub limit: Rational,
}

/// Upper bounds on the measure of the set of boundary rays that stay
/// geodesic in the coset graph, read off the geodesic spanning tree cut
/// at depth `n_max`.
pub fn boundary_measure_bounds(core: &CoreAutomaton, n_max: usize) -> Result<MeasureBounds> {
    let r = core.rank();
    if r < 2 {
        return Err(Error::Rank { rank: r, min: 2 });
    }
    let q = 2 * r as u64 - 1;
    let dist = core.distances();
    let n = core.num_vertices();
    // tree children in the core, from the breadth-first parents
    let mut children = vec![Vec::new(); n];
    for v in 1..n {
        let parent = core
            .alphabet()
            .letters()
            .filter_map(|l: Letter| core.target(v, l))
            .filter(|&p| dist[p] + 1 == dist[v])
            .min()
            .expect("non-base vertex has a parent");
        children[parent].push(v);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(dist[v]));
    let mut extends = vec![false; n];
    for &v in &order {
        let d = dist[v];
        extends[v] = d <= n_max
            && (d == n_max
                || (core.vertex_deficit(v) > 0 && d < n_max)
                || children[v].iter().any(|&c| extends[c]));
    }
    let mut upper = Vec::with_capacity(n_max + 1);
    for level in 0..=n_max {
        let mut t = BigUint::zero();
        for v in 0..n {
            if dist[v] == level && extends[v] {
                t += 1u32;
            }
            if dist[v] < level && core.vertex_deficit(v) > 0 {
                t += BigUint::from(core.vertex_deficit(v)) * num_traits::pow(BigUint::from(q), level - dist[v] - 1);
            }
        }
        let u = if level == 0 {
            rational::from_uint(&t)
        } else {
            rational::from_uint(&t)
                / (rational::int(2 * r as i64) * rational::pow(&rational::int(q as i64), level as i64 - 1))
        };
        upper.push(u);
    }
    let limit = core.deficit() / rational::int(2 * r as i64);
    Ok(MeasureBounds { upper, limit })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use crate::words::{Alphabet, GroupWord};

    fn core(ws: &[&[i32]]) -> CoreAutomaton {
        let a = Alphabet::new(2).unwrap();
        let gens: Vec<GroupWord> = ws.iter().map(|w| GroupWord::from_letters(w, a).unwrap()).collect();
        CoreAutomaton::build(&gens, 2).unwrap()
    }

    #[test]
    fn conjugate_settles_at_five_sixths() {
        let m = boundary_measure_bounds(&core(&[&[1, 2, -1]]), 6).unwrap();
        assert_eq!(m.upper[0], rat(1, 1));
        assert_eq!(m.upper[1], rat(1, 1));
        assert_eq!(m.upper[2], rat(5, 6));
        assert_eq!(m.limit, rat(5, 6));
    }

    #[test]
    fn trivial_and_finite_index() {
        let m = boundary_measure_bounds(&core(&[]), 6).unwrap();
        assert!(m.upper.iter().all(|u| *u == rat(1, 1)));
        let m = boundary_measure_bounds(&core(&[&[1, 1], &[2], &[1, 2, -1]]), 4).unwrap();
        assert_eq!(m.upper[4], rat(0, 1));
    }
}
