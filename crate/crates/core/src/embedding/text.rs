//! Abstract-text embedding: built-in TF-IDF or imported vectors.

use super::{
    read_vector_file, AspectId, AspectVectors, EmbedError, Provenance, SparseVector, Vector,
    VectorSource,
};
use crate::corpus::{tokenize, Corpus};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

/// Sign random projection applied on top of TF-IDF. Approximate: cosines
/// are only preserved in expectation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Projection {
    pub dim: usize,
    pub seed: u64,
}

impl Default for Projection {
    fn default() -> Self {
        Projection {
            dim: 256,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TextMode {
    Builtin { projection: Option<Projection> },
    Imported(PathBuf),
}

impl Default for TextMode {
    fn default() -> Self {
        TextMode::Builtin { projection: None }
    }
}

/// Vocabulary and IDF table learned from the corpus abstracts, kept so that
/// uploaded abstracts land in the same space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TextFit {
    /// Sorted vocabulary; a term's position is its vector index.
    terms: Vec<String>,
    idf: Vec<f64>,
    n_docs: usize,
    projection: Option<Projection>,
}

impl TextFit {
    pub fn fit(docs: &[Vec<String>], projection: Option<Projection>) -> Self {
        let mut df: BTreeMap<&str, usize> = BTreeMap::new();
        for doc in docs {
            for tok in doc.iter().map(String::as_str).collect::<BTreeSet<_>>() {
                *df.entry(tok).or_default() += 1;
            }
        }
        let n = docs.len();
        let (terms, idf) = df
            .into_iter()
            .map(|(t, d)| (t.to_owned(), (n as f64 / d as f64).ln()))
            .unzip();
        TextFit {
            terms,
            idf,
            n_docs: n,
            projection,
        }
    }

    pub fn vocabulary_size(&self) -> usize {
        self.terms.len()
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn projection(&self) -> Option<Projection> {
        self.projection
    }

    /// Output dimension of [`TextFit::transform`].
    pub fn dim(&self) -> usize {
        self.projection.map_or(self.terms.len(), |p| p.dim)
    }

    pub fn term_index(&self, term: &str) -> Option<usize> {
        self.terms.binary_search_by(|t| t.as_str().cmp(term)).ok()
    }

    pub fn idf(&self, term: &str) -> Option<f64> {
        self.term_index(term).map(|i| self.idf[i])
    }

    /// Raw tf × idf weights of in-vocabulary tokens; zero weights omitted.
    fn weights(&self, tokens: &[String]) -> Vec<(u32, f64)> {
        let mut tf: BTreeMap<usize, f64> = BTreeMap::new();
        for tok in tokens {
            if let Some(i) = self.term_index(tok) {
                *tf.entry(i).or_default() += 1.0;
            }
        }
        tf.into_iter()
            .map(|(i, f)| (i as u32, f * self.idf[i]))
            .filter(|(_, w)| *w != 0.0)
            .collect()
    }

    /// Unit-norm embedding of a token list; `Null` when no weight survives.
    pub fn transform(&self, tokens: &[String]) -> Vector {
        let weights = self.weights(tokens);
        match self.projection {
            None => Vector::Sparse(SparseVector::from_entries(weights)).normalized(),
            Some(p) => {
                let mut out = vec![0.0; p.dim];
                let scale = 1.0 / (p.dim as f64).sqrt();
                for (term, w) in weights {
                    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
                    rng.set_stream(u64::from(term));
                    let mut bits = 0u64;
                    for (k, slot) in out.iter_mut().enumerate() {
                        if k % 64 == 0 {
                            bits = rng.next_u64();
                        }
                        let sign = if bits >> (k % 64) & 1 == 1 { 1.0 } else { -1.0 };
                        *slot += sign * scale * w;
                    }
                }
                Vector::Dense(out).normalized()
            }
        }
    }
}

/// Embeds every abstract. Builtin mode also returns the fit state needed by
/// [`embed_external_abstract`]; imported mode returns none.
pub fn embed_text(
    corpus: &Corpus,
    mode: &TextMode,
) -> Result<(AspectVectors, Option<TextFit>), EmbedError> {
    let ids: Vec<_> = corpus.ids().cloned().collect();
    match mode {
        TextMode::Builtin { projection } => {
            let docs: Vec<Vec<String>> = corpus
                .articles()
                .iter()
                .map(|a| tokenize(&a.abstract_text))
                .collect();
            let fit = TextFit::fit(&docs, *projection);
            let vectors = docs.iter().map(|d| fit.transform(d)).collect();
            let mut params = vec![
                ("weighting", "tf*ln(N/df)".into()),
                ("vocabulary", fit.vocabulary_size().into()),
            ];
            if let Some(p) = projection {
                params.push(("projection_dim", p.dim.into()));
            }
            let aspect = AspectVectors {
                aspect: AspectId::Text,
                dim: fit.dim(),
                ids,
                vectors,
                meta: Provenance::builtin(params, projection.map(|p| p.seed)),
            };
            Ok((aspect, Some(fit)))
        }
        TextMode::Imported(path) => {
            let mut map = read_vector_file(path)?;
            let dim = map.values().next().map_or(0, Vec::len);
            let vectors = ids
                .iter()
                .map(|id| {
                    map.remove(id.as_str())
                        .map(|v| Vector::Dense(v).normalized())
                        .ok_or_else(|| EmbedError::MissingVector(id.clone()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let meta = Provenance {
                source: VectorSource::Imported,
                params: [("path".to_owned(), path.display().to_string().into())].into(),
                seed: None,
            };
            Ok((
                AspectVectors {
                    aspect: AspectId::Text,
                    dim,
                    ids,
                    vectors,
                    meta,
                },
                None,
            ))
        }
    }
}

pub fn embed_external_abstract(text: &str, fit: Option<&TextFit>) -> Result<Vector, EmbedError> {
    let fit = fit.ok_or(EmbedError::NoFitState)?;
    match fit.transform(&tokenize(text)) {
        Vector::Null => Err(EmbedError::NoKnownTokens),
        v => Ok(v),
    }
}
