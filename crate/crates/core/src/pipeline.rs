//! One-call construction of a similarity model from a corpus.

use crate::corpus::{build_citation_graph, CitationGraph, Corpus};
use crate::embedding::{
    embed_authors, embed_numeric, embed_text, embed_topology, AspectVectors, EmbedError, TextFit,
    TextMode, TopologyParams,
};
use crate::simstore::{SimError, SimilarityModel, Thresholds};

#[derive(Clone, Debug, Default)]
pub struct BuildOptions {
    pub topology: TopologyParams,
    pub text: TextMode,
    pub thresholds: Thresholds,
    /// Replace the topology and author stores by their exact relations.
    pub exact_mode: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum BuildError {
    #[error(transparent)]
    Embed(#[from] EmbedError),
    #[error(transparent)]
    Sim(#[from] SimError),
}

pub struct Built {
    pub graph: CitationGraph,
    pub text_fit: Option<TextFit>,
    pub model: SimilarityModel,
}

/// Embeds all four aspects in topology, text, authors, numeric order.
pub fn embed_all(
    corpus: &Corpus,
    graph: &CitationGraph,
    opts: &BuildOptions,
) -> Result<(Vec<AspectVectors>, Option<TextFit>), EmbedError> {
    let (text, fit) = embed_text(corpus, &opts.text)?;
    Ok((
        vec![
            embed_topology(graph, &opts.topology)?,
            text,
            embed_authors(corpus),
            embed_numeric(corpus),
        ],
        fit,
    ))
}

pub fn build_model(corpus: &Corpus, opts: &BuildOptions) -> Result<Built, BuildError> {
    let graph = build_citation_graph(corpus);
    let (vectors, text_fit) = embed_all(corpus, &graph, opts)?;
    let mut model = SimilarityModel::build(vectors, &opts.thresholds)?;
    if opts.exact_mode {
        model = model.with_exact_overrides(&graph, corpus, &opts.thresholds);
    }
    Ok(Built {
        graph,
        text_fit,
        model,
    })
}
