use super::{AspectId, AspectVectors, Provenance, SparseVector, Vector};
use crate::corpus::Corpus;
use std::collections::BTreeSet;

/// Binary author-indicator vectors over the corpus-wide author vocabulary,
/// scaled to unit norm. The dot product of two such vectors is the Ochiai
/// coefficient of the two author sets.
pub fn embed_authors(corpus: &Corpus) -> AspectVectors {
    let vocab: Vec<&String> = corpus.author_index().keys().collect();
    let vectors = corpus
        .articles()
        .iter()
        .map(|a| {
            let entries: Vec<(u32, f64)> = a
                .authors
                .iter()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .map(|name| {
                    (
                        vocab.binary_search(&name).expect("author indexed") as u32,
                        1.0,
                    )
                })
                .collect();
            Vector::Sparse(SparseVector::from_entries(entries)).normalized()
        })
        .collect();
    AspectVectors {
        aspect: AspectId::Authors,
        dim: vocab.len(),
        ids: corpus.ids().cloned().collect(),
        vectors,
        meta: Provenance::builtin([("encoding", "binary-indicator".into())], None),
    }
}

/// |A ∩ B| / sqrt(|A| |B|) over the distinct names of each list.
pub fn ochiai<S: AsRef<str>>(a: &[S], b: &[S]) -> f64 {
    let a: BTreeSet<&str> = a.iter().map(AsRef::as_ref).collect();
    let b: BTreeSet<&str> = b.iter().map(AsRef::as_ref).collect();
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let shared = a.intersection(&b).count() as f64;
    shared / ((a.len() * b.len()) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::test_support::article;

    fn corpus() -> Corpus {
        Corpus::from_articles(
            vec![
                article("A1", &["a", "b"], "", &[]),
                article("A2", &["b", "c"], "", &[]),
                article("A3", &["a", "b"], "", &[]),
                article("A4", &["d"], "", &[]),
            ],
            None,
        )
        .unwrap()
    }

    #[test]
    fn indicator_dots_match_ochiai() {
        let v = embed_authors(&corpus());
        v.check().unwrap();
        assert_eq!(v.dim, 4);
        assert!((v.get(0).dot(v.get(1)) - 0.5).abs() < 1e-12);
        assert!((v.get(0).dot(v.get(2)) - 1.0).abs() < 1e-12);
        assert_eq!(v.get(0).dot(v.get(3)), 0.0);
    }

    #[test]
    fn ochiai_values() {
        assert_eq!(ochiai(&["a", "b"], &["b", "c"]), 0.5);
        assert_eq!(ochiai(&["a", "b"], &["b", "a"]), 1.0);
        assert_eq!(ochiai(&["a"], &["z"]), 0.0);
        assert_eq!(ochiai::<&str>(&[], &["z"]), 0.0);
        // Repeated names count once.
        assert_eq!(ochiai(&["a", "a"], &["a"]), 1.0);
    }
}
