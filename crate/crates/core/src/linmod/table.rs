//! Finite modules given by explicit rule tables in JSON.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{RuleModule, SparseVec};
use crate::error::{Error, Result};
use crate::growth::SeriesKind;
use crate::rational::{self, Rational};
use crate::words::Letter;

/// A module with named basis elements. `rules[tag][k]` is the image of
/// `tag` under the k-th letter (`x_1..x_r`, or `a1 A1 a2 A2 ...` for group
/// modules), as a map from tag to coefficient string.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableModule {
    pub rank: u32,
    #[serde(default = "monoid")]
    pub kind: SeriesKind,
    pub rules: BTreeMap<String, Vec<BTreeMap<String, String>>>,
    #[serde(default)]
    pub generators: Vec<BTreeMap<String, String>>,
    #[serde(skip)]
    parsed: BTreeMap<String, Vec<SparseVec<String>>>,
}

fn monoid() -> SeriesKind {
    SeriesKind::Monoid
}

fn parse_vec(m: &BTreeMap<String, String>) -> Result<SparseVec<String>> {
    let mut v = SparseVec::zero();
    for (k, c) in m {
        v.add_term(k.clone(), rational::parse(c)?);
    }
    Ok(v)
}

impl TableModule {
    pub fn from_json(s: &str) -> Result<TableModule> {
        let mut t: TableModule = serde_json::from_str(s).map_err(|e| Error::Input(e.to_string()))?;
        t.validate()?;
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    /// Builds a table from images given as sparse vectors.
    pub fn from_rules(
        rank: u32,
        kind: SeriesKind,
        rules: BTreeMap<String, Vec<SparseVec<String>>>,
        generators: Vec<SparseVec<String>>,
    ) -> Result<TableModule> {
        let enc = |v: &SparseVec<String>| -> BTreeMap<String, String> {
            v.iter().map(|(k, c)| (k.clone(), rational::format(c))).collect()
        };
        let mut t = TableModule {
            rank,
            kind,
            rules: rules.iter().map(|(k, vs)| (k.clone(), vs.iter().map(enc).collect())).collect(),
            generators: generators.iter().map(enc).collect(),
            parsed: BTreeMap::new(),
        };
        t.validate()?;
        Ok(t)
    }

    /// Checks that every tag has one image per letter and that images only
    /// mention known tags, then caches the parsed images.
    pub fn validate(&mut self) -> Result<()> {
        let width = match self.kind {
            SeriesKind::Monoid => self.rank as usize,
            SeriesKind::Group => 2 * self.rank as usize,
        };
        let mut parsed = BTreeMap::new();
        for (tag, imgs) in &self.rules {
            if imgs.len() != width {
                return Err(Error::Input(format!("tag {tag} has {} images, expected {width}", imgs.len())));
            }
            let vs = imgs.iter().map(parse_vec).collect::<Result<Vec<_>>>()?;
            for v in &vs {
                if let Some(k) = v.keys().find(|k| !self.rules.contains_key(*k)) {
                    return Err(Error::Input(format!("image of {tag} mentions unknown tag {k}")));
                }
            }
            parsed.insert(tag.clone(), vs);
        }
        for g in &self.generators {
            if let Some(k) = g.keys().find(|k| !self.rules.contains_key(*k)) {
                return Err(Error::Input(format!("generator mentions unknown tag {k}")));
            }
            parse_vec(g)?;
        }
        self.parsed = parsed;
        Ok(())
    }

    pub fn generator_vectors(&self) -> Result<Vec<SparseVec<String>>> {
        self.generators.iter().map(parse_vec).collect()
    }

    fn column(&self, x: Letter) -> Result<usize> {
        let g = x.generator();
        if g == 0 || g > self.rank {
            return Err(Error::LetterOutOfRange { letter: x.value() as i64, rank: self.rank });
        }
        match self.kind {
            SeriesKind::Monoid if x.is_positive() => Ok(g as usize - 1),
            SeriesKind::Monoid => Err(Error::Input("inverse letter acting on a monoid module".into())),
            SeriesKind::Group => Ok(x.index()),
        }
    }
}

impl RuleModule for TableModule {
    type Tag = String;

    fn rank(&self) -> u32 {
        self.rank
    }

    fn kind(&self) -> SeriesKind {
        self.kind
    }

    fn act(&self, tag: &String, x: Letter) -> Result<SparseVec<String>> {
        let col = self.column(x)?;
        let imgs = self.parsed.get(tag).ok_or_else(|| Error::Input(format!("no rule for tag {tag}")))?;
        Ok(imgs[col].clone())
    }
}

/// Convenience for tests and examples: `(tag, coefficient)` pairs.
pub fn vec_of(pairs: &[(&str, Rational)]) -> SparseVec<String> {
    SparseVec::from_terms(pairs.iter().map(|(k, c)| (k.to_string(), c.clone())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linmod::module_growth;
    use crate::par::Exec;

    const TWO_DIM: &str = r#"{
        "rank": 2,
        "rules": {
            "e": [{"f": "1"}, {"e": "1/2", "f": "-1"}],
            "f": [{}, {"f": "3"}]
        },
        "generators": [{"e": "1"}]
    }"#;

    #[test]
    fn table_round_trip_and_growth() {
        let t = TableModule::from_json(TWO_DIM).unwrap();
        let back = TableModule::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        let s = module_growth(&t, &t.generator_vectors().unwrap(), 4, 100, Exec::auto()).unwrap();
        assert_eq!(s.g.iter().map(|x| x.to_string()).collect::<Vec<_>>(), ["1", "2", "2", "2", "2"]);
    }

    #[test]
    fn malformed_tables_are_rejected() {
        let bad = TWO_DIM.replace(r#"{"f": "3"}"#, r#"{"g": "3"}"#);
        assert!(matches!(TableModule::from_json(&bad), Err(Error::Input(_))));
        let bad = TWO_DIM.replace(r#"[{}, {"f": "3"}]"#, r#"[{}]"#);
        assert!(TableModule::from_json(&bad).is_err());
    }
}
