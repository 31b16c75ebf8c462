//! On-disk layout of a work directory. Every artifact after the corpus is
//! stamped with the corpus checksum it was built from.
//!
//! ```text
//! corpus.json              validated corpus
//! ingest-report.json       row counts and rejections
//! vectors/<aspect>.json    stamped embeddings
//! vectors/text-fit.json    stamped vocabulary and IDF table (builtin text only)
//! stores/<aspect>.pairs    binary pair store, with a .pairs.json sidecar
//! ```

use aspectsim_core::corpus::Corpus;
use aspectsim_core::embedding::{AspectId, AspectVectors, TextFit};
use aspectsim_core::simstore::{read_store, write_store, AspectPairStore, SimError};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum ArtifactError {
    #[error("missing artifact {path}; run `{stage}` first")]
    Missing { path: PathBuf, stage: &'static str },
    #[error("{path} was built from corpus {found}, but the corpus is {expected}; rerun `{stage}`")]
    ChecksumMismatch {
        path: PathBuf,
        expected: String,
        found: String,
        stage: &'static str,
    },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

#[derive(Serialize, Deserialize)]
struct Stamped<T> {
    corpus_checksum: String,
    payload: T,
}

pub fn corpus_path(dir: &Path) -> PathBuf {
    dir.join("corpus.json")
}

pub fn ingest_report_path(dir: &Path) -> PathBuf {
    dir.join("ingest-report.json")
}

pub fn vectors_path(dir: &Path, aspect: AspectId) -> PathBuf {
    dir.join("vectors").join(format!("{aspect}.json"))
}

pub fn text_fit_path(dir: &Path) -> PathBuf {
    dir.join("vectors").join("text-fit.json")
}

pub fn store_path(dir: &Path, aspect: AspectId) -> PathBuf {
    dir.join("stores").join(format!("{aspect}.pairs"))
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> ArtifactError + '_ {
    move |source| ArtifactError::Io {
        path: path.to_owned(),
        source,
    }
}

fn require(path: &Path, stage: &'static str) -> Result<(), ArtifactError> {
    if path.exists() {
        Ok(())
    } else {
        Err(ArtifactError::Missing {
            path: path.to_owned(),
            stage,
        })
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ArtifactError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(io(parent))?;
    }
    let text = serde_json::to_string(value).map_err(|e| ArtifactError::Invalid {
        path: path.to_owned(),
        message: e.to_string(),
    })?;
    std::fs::write(path, text).map_err(io(path))
}

fn read_json<T: DeserializeOwned>(path: &Path, stage: &'static str) -> Result<T, ArtifactError> {
    require(path, stage)?;
    let text = std::fs::read_to_string(path).map_err(io(path))?;
    serde_json::from_str(&text).map_err(|e| ArtifactError::Invalid {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

fn read_stamped<T: DeserializeOwned>(
    path: &Path,
    checksum: &str,
    stage: &'static str,
) -> Result<T, ArtifactError> {
    let s: Stamped<T> = read_json(path, stage)?;
    if s.corpus_checksum != checksum {
        return Err(ArtifactError::ChecksumMismatch {
            path: path.to_owned(),
            expected: checksum.to_owned(),
            found: s.corpus_checksum,
            stage,
        });
    }
    Ok(s.payload)
}

pub fn save_corpus(dir: &Path, corpus: &Corpus) -> Result<(), ArtifactError> {
    write_json(&corpus_path(dir), corpus)
}

pub fn load_corpus(dir: &Path) -> Result<Corpus, ArtifactError> {
    read_json(&corpus_path(dir), "ingest")
}

pub fn save_vectors(
    dir: &Path,
    vectors: &AspectVectors,
    checksum: &str,
) -> Result<(), ArtifactError> {
    write_json(
        &vectors_path(dir, vectors.aspect),
        &Stamped {
            corpus_checksum: checksum.to_owned(),
            payload: vectors,
        },
    )
}

pub fn load_vectors(
    dir: &Path,
    aspect: AspectId,
    checksum: &str,
) -> Result<AspectVectors, ArtifactError> {
    let path = vectors_path(dir, aspect);
    let v: AspectVectors = read_stamped(&path, checksum, "embed")?;
    if v.aspect != aspect {
        return Err(ArtifactError::Invalid {
            path,
            message: format!("holds {} vectors", v.aspect),
        });
    }
    Ok(v)
}

/// Removes a stale fit so that imported text vectors never pair with an
/// old vocabulary.
pub fn save_text_fit(
    dir: &Path,
    fit: Option<&TextFit>,
    checksum: &str,
) -> Result<(), ArtifactError> {
    let path = text_fit_path(dir);
    match fit {
        Some(fit) => write_json(
            &path,
            &Stamped {
                corpus_checksum: checksum.to_owned(),
                payload: fit,
            },
        ),
        None if path.exists() => std::fs::remove_file(&path).map_err(io(&path)),
        None => Ok(()),
    }
}

pub fn load_text_fit(dir: &Path, checksum: &str) -> Result<Option<TextFit>, ArtifactError> {
    let path = text_fit_path(dir);
    if !path.exists() {
        return Ok(None);
    }
    read_stamped(&path, checksum, "embed").map(Some)
}

fn sim_err(path: &Path) -> impl FnOnce(SimError) -> ArtifactError + '_ {
    move |e| match e {
        SimError::Io(source) => ArtifactError::Io {
            path: path.to_owned(),
            source,
        },
        other => ArtifactError::Invalid {
            path: path.to_owned(),
            message: other.to_string(),
        },
    }
}

pub fn save_store(
    dir: &Path,
    store: &AspectPairStore,
    checksum: &str,
) -> Result<(), ArtifactError> {
    let path = store_path(dir, store.aspect());
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(io(parent))?;
    }
    write_store(&path, store, checksum)
        .map(|_| ())
        .map_err(sim_err(&path))
}

pub fn load_store(
    dir: &Path,
    aspect: AspectId,
    checksum: &str,
) -> Result<AspectPairStore, ArtifactError> {
    let path = store_path(dir, aspect);
    require(&path, "classify")?;
    let (store, sidecar) = read_store(&path).map_err(sim_err(&path))?;
    if sidecar.corpus_checksum != checksum {
        return Err(ArtifactError::ChecksumMismatch {
            path,
            expected: checksum.to_owned(),
            found: sidecar.corpus_checksum,
            stage: "classify",
        });
    }
    if store.aspect() != aspect {
        return Err(ArtifactError::Invalid {
            path,
            message: format!("holds the {} store", store.aspect()),
        });
    }
    Ok(store)
}
