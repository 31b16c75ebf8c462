//! Publication corpus: articles, validation, indices and the citation graph.
//!
//! Articles are kept sorted by id so that an article's position in
//! [`Corpus::articles`] is also its canonical index everywhere else in the
//! crate (pair stores, embeddings, graphs). Index order therefore equals the
//! lexicographic order of ids.

mod graph;
mod load;
mod tokenize;

pub use graph::{build_citation_graph, CitationGraph};
pub use load::{
    load_corpus, ColumnMap, CorpusFormat, IngestConfig, LoadReport, Loaded, RejectedRow,
};
pub use tokenize::{is_stopword, stopword_list, tokenize};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    FileUnreadable {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("missing required fields: {}", .0.join(", "))]
    SchemaMismatch(Vec<String>),
    #[error("corpus contains no articles")]
    EmptyCorpus,
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("article {id}: {reason}")]
    InvalidArticle { id: String, reason: String },
}

/// Opaque article identifier. Ordering is lexicographic on the string form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArticleId(pub String);

impl ArticleId {
    pub fn new(id: impl Into<String>) -> Self {
        ArticleId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ArticleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ArticleId {
    fn from(s: &str) -> Self {
        ArticleId(s.to_owned())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Article {
    pub id: ArticleId,
    pub title: String,
    pub authors: Vec<String>,
    pub year: i32,
    #[serde(rename = "abstract")]
    pub abstract_text: String,
    #[serde(default)]
    pub keywords: Vec<String>,
    pub cite_count_a: u64,
    pub cite_count_b: u64,
    #[serde(default)]
    pub references: Vec<ArticleId>,
}

/// A validated, immutable set of articles with author and token indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CorpusFile", into = "CorpusFile")]
pub struct Corpus {
    articles: Vec<Article>,
    span: (i32, i32),
    by_id: HashMap<ArticleId, usize>,
    author_index: BTreeMap<String, BTreeSet<usize>>,
    token_index: BTreeMap<String, BTreeSet<usize>>,
}

#[derive(Clone, Serialize, Deserialize)]
struct CorpusFile {
    span: (i32, i32),
    articles: Vec<Article>,
}

impl TryFrom<CorpusFile> for Corpus {
    type Error = CorpusError;

    fn try_from(file: CorpusFile) -> Result<Self, Self::Error> {
        Corpus::from_articles(file.articles, Some(file.span))
    }
}

impl From<Corpus> for CorpusFile {
    fn from(c: Corpus) -> Self {
        CorpusFile {
            span: c.span,
            articles: c.articles,
        }
    }
}

impl Corpus {
    /// Builds a corpus from already clean articles. Every invariant violation
    /// is an error here; lenient ingestion lives in [`load_corpus`].
    ///
    /// Duplicate references collapse to one. When `span` is `None` it is
    /// derived from the data.
    pub fn from_articles(
        mut articles: Vec<Article>,
        span: Option<(i32, i32)>,
    ) -> Result<Self, CorpusError> {
        if articles.is_empty() {
            return Err(CorpusError::EmptyCorpus);
        }
        articles.sort_by(|a, b| a.id.cmp(&b.id));
        let invalid = |a: &Article, reason: String| CorpusError::InvalidArticle {
            id: a.id.0.clone(),
            reason,
        };

        let span = span.unwrap_or_else(|| {
            let lo = articles.iter().map(|a| a.year).min().unwrap_or(0);
            let hi = articles.iter().map(|a| a.year).max().unwrap_or(0);
            (lo, hi)
        });
        if span.0 > span.1 {
            return Err(CorpusError::Malformed(format!(
                "year span {}-{} is inverted",
                span.0, span.1
            )));
        }

        let mut by_id = HashMap::with_capacity(articles.len());
        for (idx, a) in articles.iter().enumerate() {
            if a.id.0.is_empty() {
                return Err(invalid(a, "empty id".into()));
            }
            if by_id.insert(a.id.clone(), idx).is_some() {
                return Err(invalid(a, "duplicate id".into()));
            }
        }

        for a in &mut articles {
            if a.authors.is_empty() || a.authors.iter().any(|n| n.trim().is_empty()) {
                return Err(invalid(
                    a,
                    "author list is empty or has a blank name".into(),
                ));
            }
            if a.year < span.0 || a.year > span.1 {
                return Err(invalid(
                    a,
                    format!("year {} outside span {}-{}", a.year, span.0, span.1),
                ));
            }
            let mut seen = BTreeSet::new();
            a.references.retain(|r| seen.insert(r.clone()));
        }
        for a in &articles {
            for r in &a.references {
                if *r == a.id {
                    return Err(invalid(a, "references itself".into()));
                }
                if !by_id.contains_key(r) {
                    return Err(invalid(a, format!("references unknown article {r}")));
                }
            }
        }

        let (author_index, token_index) = build_indices(&articles);
        Ok(Corpus {
            articles,
            span,
            by_id,
            author_index,
            token_index,
        })
    }

    pub fn articles(&self) -> &[Article] {
        &self.articles
    }

    pub fn len(&self) -> usize {
        self.articles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.articles.is_empty()
    }

    pub fn span(&self) -> (i32, i32) {
        self.span
    }

    pub fn index_of(&self, id: &ArticleId) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    pub fn get(&self, id: &ArticleId) -> Option<&Article> {
        self.index_of(id).map(|i| &self.articles[i])
    }

    pub fn id(&self, index: usize) -> &ArticleId {
        &self.articles[index].id
    }

    pub fn ids(&self) -> impl Iterator<Item = &ArticleId> {
        self.articles.iter().map(|a| &a.id)
    }

    /// Author name → indices of the articles listing that exact name.
    pub fn author_index(&self) -> &BTreeMap<String, BTreeSet<usize>> {
        &self.author_index
    }

    /// Token → indices of the articles whose title, abstract or keywords
    /// contain it.
    pub fn token_index(&self) -> &BTreeMap<String, BTreeSet<usize>> {
        &self.token_index
    }

    pub fn total_references(&self) -> usize {
        self.articles.iter().map(|a| a.references.len()).sum()
    }

    /// Hex SHA-256 of the canonical JSON form, used to stamp derived artifacts.
    pub fn checksum(&self) -> String {
        let bytes = serde_json::to_vec(&CorpusFileRef {
            span: self.span,
            articles: &self.articles,
        })
        .expect("corpus serializes");
        Sha256::digest(&bytes)
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&CorpusFileRef {
            span: self.span,
            articles: &self.articles,
        })
        .expect("corpus serializes")
    }

    pub fn from_json(s: &str) -> Result<Self, CorpusError> {
        serde_json::from_str(s).map_err(|e| CorpusError::Malformed(e.to_string()))
    }
}

#[derive(Serialize)]
struct CorpusFileRef<'a> {
    span: (i32, i32),
    articles: &'a [Article],
}

/// Tokens an article contributes to the token index.
pub fn article_tokens(a: &Article) -> BTreeSet<String> {
    let mut toks: BTreeSet<String> = tokenize(&a.title).into_iter().collect();
    toks.extend(tokenize(&a.abstract_text));
    for k in &a.keywords {
        toks.extend(tokenize(k));
    }
    toks
}

type Indices = (
    BTreeMap<String, BTreeSet<usize>>,
    BTreeMap<String, BTreeSet<usize>>,
);

fn build_indices(articles: &[Article]) -> Indices {
    let mut authors: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    let mut tokens: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    for (idx, a) in articles.iter().enumerate() {
        for name in &a.authors {
            authors.entry(name.clone()).or_default().insert(idx);
        }
        for tok in article_tokens(a) {
            tokens.entry(tok).or_default().insert(idx);
        }
    }
    (authors, tokens)
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    pub fn article(id: &str, authors: &[&str], abstract_text: &str, refs: &[&str]) -> Article {
        Article {
            id: ArticleId::new(id),
            title: format!("Title of {id}"),
            authors: authors.iter().map(|s| s.to_string()).collect(),
            year: 2000,
            abstract_text: abstract_text.to_owned(),
            keywords: vec![],
            cite_count_a: 0,
            cite_count_b: 0,
            references: refs.iter().map(|r| ArticleId::new(*r)).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::test_support::article;
    use super::*;

    #[test]
    fn articles_are_sorted_by_id() {
        let c = Corpus::from_articles(
            vec![
                article("A2", &["x"], "", &[]),
                article("A10", &["y"], "", &["A2"]),
            ],
            None,
        )
        .unwrap();
        assert_eq!(c.id(0).as_str(), "A10");
        assert_eq!(c.id(1).as_str(), "A2");
        assert_eq!(c.index_of(&"A2".into()), Some(1));
    }

    #[test]
    fn strict_construction_rejects_invariant_violations() {
        let dup = vec![
            article("A1", &["x"], "", &[]),
            article("A1", &["y"], "", &[]),
        ];
        assert!(matches!(
            Corpus::from_articles(dup, None),
            Err(CorpusError::InvalidArticle { .. })
        ));

        let selfref = vec![article("A1", &["x"], "", &["A1"])];
        assert!(matches!(
            Corpus::from_articles(selfref, None),
            Err(CorpusError::InvalidArticle { .. })
        ));

        let noauth = vec![article("A1", &[], "", &[])];
        assert!(matches!(
            Corpus::from_articles(noauth, None),
            Err(CorpusError::InvalidArticle { .. })
        ));

        let unknown = vec![article("A1", &["x"], "", &["A9"])];
        assert!(matches!(
            Corpus::from_articles(unknown, None),
            Err(CorpusError::InvalidArticle { .. })
        ));

        let out_of_span = vec![article("A1", &["x"], "", &[])];
        assert!(Corpus::from_articles(out_of_span, Some((1990, 1995))).is_err());

        assert!(matches!(
            Corpus::from_articles(vec![], None),
            Err(CorpusError::EmptyCorpus)
        ));
    }

    #[test]
    fn duplicate_references_collapse() {
        let c = Corpus::from_articles(
            vec![
                article("A1", &["x"], "", &["A2", "A2"]),
                article("A2", &["y"], "", &[]),
            ],
            None,
        )
        .unwrap();
        assert_eq!(c.articles()[0].references.len(), 1);
    }

    #[test]
    fn indices_cover_authors_and_tokens() {
        let mut a = article("A1", &["Ann Lee", "Bo Chen"], "Graph drawing methods", &[]);
        a.keywords = vec!["Clustering".into()];
        let b = article("A2", &["Bo Chen"], "Text mining", &[]);
        let c = Corpus::from_articles(vec![a, b], None).unwrap();
        assert_eq!(c.author_index()["Bo Chen"], BTreeSet::from([0, 1]));
        assert_eq!(c.token_index()["clustering"], BTreeSet::from([0]));
        assert_eq!(c.token_index()["title"], BTreeSet::from([0, 1]));
    }

    #[test]
    fn json_round_trip_is_identical() {
        let c = Corpus::from_articles(
            vec![
                article("A1", &["x"], "alpha beta", &["A2"]),
                article("A2", &["y"], "gamma", &[]),
            ],
            Some((1990, 2018)),
        )
        .unwrap();
        let back = Corpus::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.checksum(), c.checksum());
    }
}
