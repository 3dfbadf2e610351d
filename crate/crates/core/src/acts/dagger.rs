use crate::words::MonoidWord;

/// Whether no nonempty suffix of a word of `p` is a prefix of a different
/// word of `p`.
pub fn check_property_dagger(p: &[MonoidWord]) -> bool {
    for (i, w) in p.iter().enumerate() {
        for (j, w2) in p.iter().enumerate() {
            if i == j || w == w2 {
                continue;
            }
            let a = w.letters();
            if (0..a.len()).any(|s| w2.letters().starts_with(&a[s..])) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let w = |g: &[u32]| MonoidWord::from_gens(g);
        assert!(check_property_dagger(&[w(&[1, 1, 2, 2]), w(&[1, 1, 2, 1, 2, 2])]));
        assert!(!check_property_dagger(&[w(&[1, 2]), w(&[2, 1])]));
        assert!(check_property_dagger(&[w(&[1, 1, 2, 2])]));
        assert!(!check_property_dagger(&[w(&[1, 2]), w(&[1, 2, 1])]));
    }
}
