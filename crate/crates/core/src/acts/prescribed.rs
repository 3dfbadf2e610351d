use super::TableAct;
use crate::error::{Error, Result};

/// An act whose sphere of radius `n` has exactly `d[n]` states, for
/// `n < d.len()`; the last sphere is closed off by self-loops.
///
/// Writing `d[n+1] = p r + q`, the first `p` states of sphere `n` get `r`
/// new children, the next gets `q` new children on `x_1..x_q`, and every
/// other transition is a self-loop.
pub fn build_prescribed(d: &[u64], r: u32) -> Result<TableAct> {
    if r == 0 {
        return Err(Error::Rank { rank: 0, min: 1 });
    }
    if d.is_empty() {
        return Err(Error::Input("empty sphere sequence".into()));
    }
    if d[0] == 0 {
        return Err(Error::Inadmissible { index: 0, detail: "no generators".into() });
    }
    for n in 1..d.len() {
        if d[n] > r as u64 * d[n - 1] {
            return Err(Error::Inadmissible {
                index: n,
                detail: format!("d({n}) = {} > {r} d({}) = {}", d[n], n - 1, r as u64 * d[n - 1]),
            });
        }
    }
    let ru = r as usize;
    let mut table: Vec<Vec<usize>> = (0..d[0] as usize).map(|s| vec![s; ru]).collect();
    let generators: Vec<usize> = (0..d[0] as usize).collect();
    let mut sphere = generators.clone();
    for &next in &d[1..] {
        let (p, q) = ((next / r as u64) as usize, (next % r as u64) as usize);
        let mut fresh = Vec::with_capacity(next as usize);
        for (i, &s) in sphere.iter().enumerate() {
            let children = if i < p { ru } else if i == p { q } else { 0 };
            for g in 0..children {
                let t = table.len();
                table.push(vec![t; ru]);
                table[s][g] = t;
                fresh.push(t);
            }
        }
        sphere = fresh;
    }
    Ok(TableAct { r, generators, table })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acts::act_growth;
    use crate::growth::{GrowthSeries, SeriesKind};
    use crate::par::Exec;

    #[test]
    fn rays_and_errors() {
        let act = build_prescribed(&[1; 6], 2).unwrap();
        let g = act_growth(&act, 5, 100, Exec::auto()).unwrap();
        assert_eq!(g, GrowthSeries::from_u64(SeriesKind::Monoid, 2, &[1, 2, 3, 4, 5, 6]));
        let act = build_prescribed(&[2; 6], 2).unwrap();
        let g = act_growth(&act, 5, 100, Exec::auto()).unwrap();
        assert_eq!(g, GrowthSeries::from_u64(SeriesKind::Monoid, 2, &[2, 4, 6, 8, 10, 12]));
        assert_eq!(
            build_prescribed(&[1, 3], 2).unwrap_err(),
            Error::Inadmissible { index: 1, detail: "d(1) = 3 > 2 d(0) = 2".into() }
        );
    }
}
