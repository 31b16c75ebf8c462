//! Seeded synthetic corpora with topic structure and planted near-duplicate
//! abstracts, for tests, benchmarks and demos.

use crate::corpus::{build_citation_graph, Article, ArticleId, Corpus};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub articles: usize,
    pub topics: usize,
    /// Words per abstract; about a third come from the topic vocabulary.
    pub abstract_words: usize,
    pub topic_vocabulary: usize,
    pub general_vocabulary: usize,
    pub authors_per_topic: usize,
    /// Upper bound on references per article; most stay within the topic.
    pub max_references: usize,
    /// Planted duplicate pairs whose two articles share an author.
    pub duplicates_shared_author: usize,
    /// Planted duplicate pairs with disjoint author lists.
    pub duplicates_disjoint_authors: usize,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        SyntheticSpec {
            articles: 300,
            topics: 8,
            abstract_words: 45,
            topic_vocabulary: 80,
            general_vocabulary: 4000,
            authors_per_topic: 25,
            max_references: 6,
            duplicates_shared_author: 8,
            duplicates_disjoint_authors: 3,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedPair {
    pub a: ArticleId,
    pub b: ArticleId,
    pub shared_author: bool,
}

#[derive(Clone, Debug)]
pub struct SyntheticCorpus {
    pub corpus: Corpus,
    /// Each planted pair has identical abstracts, no citation path of length
    /// two or less, and the stated author relation. `a < b`.
    pub planted: Vec<PlantedPair>,
    pub topic_of: Vec<usize>,
}

/// Generates a corpus. Panics if the planted pairs cannot be placed, which
/// only happens for tiny or very dense specs.
pub fn generate(spec: &SyntheticSpec) -> SyntheticCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.articles;
    let topics = spec.topics.max(1);
    let id = |i: usize| ArticleId(format!("S{i:05}"));

    let topic_of: Vec<usize> = (0..n).map(|_| rng.random_range(0..topics)).collect();
    let years: Vec<i32> = (0..n).map(|_| rng.random_range(1990..=2018)).collect();

    let mut articles: Vec<Article> = (0..n)
        .map(|i| {
            let t = topic_of[i];
            let words: Vec<String> = (0..spec.abstract_words)
                .map(|k| {
                    if k % 3 == 0 {
                        format!("t{t}w{}", rng.random_range(0..spec.topic_vocabulary))
                    } else {
                        format!("g{}", rng.random_range(0..spec.general_vocabulary))
                    }
                })
                .collect();
            let n_auth = rng.random_range(1..=3);
            let mut authors: Vec<String> = (0..n_auth)
                .map(|_| {
                    format!(
                        "Author T{t}-{}",
                        rng.random_range(0..spec.authors_per_topic)
                    )
                })
                .collect();
            authors.sort();
            authors.dedup();
            let cites_a: u64 = rng.random_range(0..60u64).pow(2) / 10;
            Article {
                id: id(i),
                title: format!("Study {i} on t{t}w0"),
                authors,
                year: years[i],
                abstract_text: words.join(" "),
                keywords: vec![format!("topic{t}")],
                cite_count_a: cites_a,
                cite_count_b: cites_a * rng.random_range(5..15u64) / 10,
                references: Vec::new(),
            }
        })
        .collect();

    // Older or same-year articles are cited; mostly within the topic.
    let mut by_topic: Vec<Vec<usize>> = vec![Vec::new(); topics];
    (0..n).for_each(|i| by_topic[topic_of[i]].push(i));
    for i in 0..n {
        let k = rng.random_range(0..=spec.max_references);
        let mut refs = Vec::new();
        for _ in 0..k {
            let pool = if rng.random_bool(0.85) {
                &by_topic[topic_of[i]]
            } else {
                &by_topic[rng.random_range(0..topics)]
            };
            if let Some(&j) = pool.choose(&mut rng) {
                if j != i && years[j] <= years[i] {
                    refs.push(id(j));
                }
            }
        }
        refs.sort();
        refs.dedup();
        articles[i].references = refs;
    }

    let base = Corpus::from_articles(articles.clone(), None).expect("generated corpus is valid");
    let graph = build_citation_graph(&base);

    let wanted = spec.duplicates_shared_author + spec.duplicates_disjoint_authors;
    let mut used = vec![false; n];
    let mut planted = Vec::new();
    let mut attempts = 0;
    while planted.len() < wanted {
        attempts += 1;
        assert!(attempts < 100_000, "could not place {wanted} planted pairs");
        let (x, y) = (rng.random_range(0..n), rng.random_range(0..n));
        if x == y || used[x] || used[y] || graph.distance(x, y).is_some_and(|d| d <= 2) {
            continue;
        }
        let (a, b) = (x.min(y), x.max(y));
        used[a] = true;
        used[b] = true;
        let shared = planted.len() < spec.duplicates_shared_author;
        articles[b].abstract_text = articles[a].abstract_text.clone();
        articles[b].authors = vec![format!("Solo Author {b}")];
        if shared {
            let first = articles[a].authors[0].clone();
            articles[b].authors.insert(0, first);
        }
        planted.push(PlantedPair {
            a: id(a),
            b: id(b),
            shared_author: shared,
        });
    }
    planted.sort_by(|p, q| p.a.cmp(&q.a));

    SyntheticCorpus {
        corpus: Corpus::from_articles(articles, Some((1990, 2018)))
            .expect("generated corpus is valid"),
        planted,
        topic_of,
    }
}
