use aspectsim_core::corpus::{Article, ArticleId, Corpus};
use aspectsim_core::embedding::{embed_external_abstract, AspectId, TopologyParams};
use aspectsim_core::patterns::{match_external_abstract, TrackQuery};
use aspectsim_core::pipeline::{build_model, BuildOptions};
use aspectsim_core::report::{citation_report, topic_report};
use aspectsim_core::simstore::{AspectThresholds, Thresholds, TriState};

fn art(id: &str, authors: &[&str], text: &str, refs: &[&str]) -> Article {
    Article {
        id: id.into(),
        title: format!("Paper {id}"),
        authors: authors.iter().map(|s| s.to_string()).collect(),
        year: 2010,
        abstract_text: text.into(),
        keywords: vec![],
        cite_count_a: 3,
        cite_count_b: 2,
        references: refs.iter().map(|&r| ArticleId::from(r)).collect(),
    }
}

fn small_topology() -> TopologyParams {
    TopologyParams {
        dim: 8,
        walks_per_node: 4,
        walk_length: 8,
        epochs: 1,
        ..Default::default()
    }
}

/// A cites B, B cites C, D cites E, F stands alone.
/// A and F share an abstract and the author "ann"; C and D share an abstract
/// and no author.
fn six() -> Corpus {
    Corpus::from_articles(
        vec![
            art(
                "A",
                &["ann", "bob"],
                "volume rendering transfer function design",
                &["B"],
            ),
            art(
                "B",
                &["bob"],
                "graph layout force directed placement",
                &["C"],
            ),
            art("C", &["cy"], "parallel coordinates axis ordering", &[]),
            art("D", &["dan"], "parallel coordinates axis ordering", &["E"]),
            art(
                "E",
                &["dan", "eve"],
                "treemap hierarchy squarified rectangles",
                &[],
            ),
            art(
                "F",
                &["ann"],
                "volume rendering transfer function design",
                &[],
            ),
        ],
        None,
    )
    .unwrap()
}

#[test]
fn citation_report_on_six_articles() {
    let c = six();
    let opts = BuildOptions {
        topology: small_topology(),
        exact_mode: true,
        ..Default::default()
    };
    let built = build_model(&c, &opts).unwrap();
    let r = citation_report(&c, &built.graph, &built.model).unwrap();

    // Topology-similar pairs: AB, BC, AC (two hops), DE -> A..E covered.
    assert_eq!(r.intra_set_citation.pair_count, 4);
    assert_eq!(r.intra_set_citation.covered_articles, 5);
    assert!((r.intra_set_citation.covered_fraction - 5.0 / 6.0).abs() < 1e-9);
    // With a shared author too: AB (bob), DE (dan).
    assert_eq!(r.self_citation.pair_count, 2);
    assert!((r.self_citation.covered_fraction - 4.0 / 6.0).abs() < 1e-9);
    assert_eq!(r.direct_citation.pair_count, 3);
    assert_eq!(r.direct_self_citation.pair_count, 2);

    let missing: Vec<(&str, &str, TriState)> = r
        .missing_citations
        .iter()
        .map(|m| (m.a.as_str(), m.b.as_str(), m.author_class))
        .collect();
    assert_eq!(missing.len(), 2);
    assert!(missing.contains(&("A", "F", TriState::Similar)));
    assert!(missing.contains(&("C", "D", TriState::Dissimilar)));
    assert_eq!(
        (
            r.missing_with_similar_authors,
            r.missing_without_similar_authors
        ),
        (1, 1)
    );
    for m in &r.missing_citations {
        assert!((m.text_score - 1.0).abs() < 1e-12);
    }
}

#[test]
fn topic_report_keeps_tracked_clusters() {
    let c = six();
    let opts = BuildOptions {
        topology: small_topology(),
        exact_mode: true,
        ..Default::default()
    };
    let built = build_model(&c, &opts).unwrap();
    let r = topic_report(&TrackQuery::keyword("coordinates"), None, &c, &built.model).unwrap();
    assert_eq!(r.tracked.len(), 2);
    assert_eq!(r.clusters.len(), 1);
    assert_eq!(
        r.clusters[0].members,
        vec![ArticleId::from("C"), ArticleId::from("D")]
    );
    assert!((r.clusters[0].tracked_fraction - 1.0).abs() < 1e-12);
}

#[test]
fn upload_ranking_follows_dot_products() {
    let c = Corpus::from_articles(
        vec![
            art("X", &["a"], "alpha beta", &[]),
            art("Y", &["b"], "gamma delta", &[]),
            art("Z", &["c"], "epsilon zeta", &[]),
        ],
        None,
    )
    .unwrap();
    let mut th = Thresholds::default();
    th.set(AspectId::Text, AspectThresholds::new(0.2, 0.1));
    let opts = BuildOptions {
        topology: small_topology(),
        thresholds: th,
        ..Default::default()
    };
    let built = build_model(&c, &opts).unwrap();

    // Every term has df 1, so all weights are tf * ln 3 and the idf cancels.
    // upload (alpha 2, beta 1, gamma 1) / sqrt 6
    // X = (alpha, beta) / sqrt 2: 3 / sqrt 12
    // Y = (gamma, delta) / sqrt 2: 1 / sqrt 12
    let v = embed_external_abstract("alpha alpha beta gamma", built.text_fit.as_ref()).unwrap();
    let got = match_external_abstract(&v, &built.model).unwrap();
    assert_eq!(got.len(), 2);
    assert_eq!(got[0].id.as_str(), "X");
    assert!((got[0].score - 3.0 / 12f64.sqrt()).abs() < 1e-9);
    assert_eq!(got[1].id.as_str(), "Y");
    assert!((got[1].score - 1.0 / 12f64.sqrt()).abs() < 1e-9);

    // Out-of-vocabulary words carry no weight.
    let v = embed_external_abstract("alpha beta unseen words", built.text_fit.as_ref()).unwrap();
    let got = match_external_abstract(&v, &built.model).unwrap();
    assert_eq!(got.len(), 1);
    assert_eq!(got[0].id.as_str(), "X");
    assert!((got[0].score - 1.0).abs() < 1e-12);

    // Duplicate of Y's abstract.
    let v = embed_external_abstract("gamma delta", built.text_fit.as_ref()).unwrap();
    let got = match_external_abstract(&v, &built.model).unwrap();
    assert_eq!(got[0].id.as_str(), "Y");
    assert!((got[0].score - 1.0).abs() < 1e-12);
}
