use crate::artifacts::{self, ArtifactError};
use aspectsim_core::corpus::{build_citation_graph, CitationGraph, Corpus};
use aspectsim_core::embedding::{AspectId, TextFit};
use aspectsim_core::pipeline::Built;
use aspectsim_core::simstore::{SimilarityModel, Thresholds};
use std::path::{Path, PathBuf};

/// Everything a query needs, loaded once and never mutated.
pub struct Engine {
    pub corpus: Corpus,
    pub graph: CitationGraph,
    pub model: SimilarityModel,
    pub text_fit: Option<TextFit>,
    pub checksum: String,
    pub watch_dir: Option<PathBuf>,
}

impl Engine {
    /// Loads a work directory produced by `ingest`, `embed` and `classify`.
    /// With `exact_mode`, the topology and author stores are replaced by the
    /// exact relations, using the thresholds the stores were built with.
    pub fn load(dir: &Path, exact_mode: bool) -> Result<Self, ArtifactError> {
        let corpus = artifacts::load_corpus(dir)?;
        let checksum = corpus.checksum();
        let mut vectors = Vec::new();
        let mut stores = Vec::new();
        for aspect in AspectId::ALL {
            vectors.push(artifacts::load_vectors(dir, aspect, &checksum)?);
            stores.push(artifacts::load_store(dir, aspect, &checksum)?);
        }
        let text_fit = artifacts::load_text_fit(dir, &checksum)?;
        let model = SimilarityModel::new(vectors, stores).map_err(|e| ArtifactError::Invalid {
            path: dir.to_owned(),
            message: e.to_string(),
        })?;
        if !model.ids().iter().eq(corpus.ids()) {
            return Err(ArtifactError::Invalid {
                path: dir.join("vectors"),
                message: "article ids differ from the corpus".into(),
            });
        }
        let graph = build_citation_graph(&corpus);
        let mut engine = Engine {
            corpus,
            graph,
            model,
            text_fit,
            checksum,
            watch_dir: None,
        };
        if exact_mode {
            let th = engine.thresholds();
            engine.model = engine
                .model
                .with_exact_overrides(&engine.graph, &engine.corpus, &th);
        }
        Ok(engine)
    }

    pub fn from_built(corpus: Corpus, built: Built) -> Self {
        Engine {
            checksum: corpus.checksum(),
            corpus,
            graph: built.graph,
            model: built.model,
            text_fit: built.text_fit,
            watch_dir: None,
        }
    }

    pub fn with_watch_dir(mut self, dir: Option<PathBuf>) -> Self {
        self.watch_dir = dir;
        self
    }

    /// Thresholds in effect, read back from the stores.
    pub fn thresholds(&self) -> Thresholds {
        let mut th = Thresholds::default();
        for aspect in AspectId::ALL {
            th.set(aspect, self.model.store(aspect).thresholds());
        }
        th
    }
}
