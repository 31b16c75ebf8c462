use super::{AspectId, AspectVectors, Provenance, Vector};
use crate::corpus::{Article, Corpus};

/// (ln(1 + count_a), ln(1 + count_b), 1). The constant component keeps every
/// vector non-zero and every pairwise cosine positive.
pub fn numeric_features(article: &Article) -> [f64; 3] {
    [
        (article.cite_count_a as f64).ln_1p(),
        (article.cite_count_b as f64).ln_1p(),
        1.0,
    ]
}

pub fn embed_numeric(corpus: &Corpus) -> AspectVectors {
    AspectVectors {
        aspect: AspectId::Numeric,
        dim: 3,
        ids: corpus.ids().cloned().collect(),
        vectors: corpus
            .articles()
            .iter()
            .map(|a| Vector::Dense(numeric_features(a).to_vec()).normalized())
            .collect(),
        meta: Provenance::builtin(
            [(
                "features",
                "log1p(cite_count_a), log1p(cite_count_b), 1".into(),
            )],
            None,
        ),
    }
}
