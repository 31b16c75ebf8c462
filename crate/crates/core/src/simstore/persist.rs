//! Versioned binary store files with a JSON sidecar.
//!
//! Binary layout, all integers and floats little-endian:
//!
//! ```text
//! magic        4 bytes  "ASPS"
//! version      u16
//! aspect       u8       0 topology, 1 text, 2 authors, 3 numeric
//! mode         u8       0 embedding, 1 exact
//! theta_hi     f64
//! theta_lo     f64
//! n            u64      article count
//! pair_count   u64
//! pairs        pair_count × (i: u32, j: u32, score: f64), sorted, i < j
//! ```
//!
//! Classes are not written: embedding-mode pairs are reclassified from
//! their score and thresholds on load, exact-mode pairs are all similar.

use super::{
    classify, AspectPairStore, AspectThresholds, ClassCounts, PairEntry, SimError, StoreMode,
    TriState,
};
use crate::embedding::AspectId;
use serde::{Deserialize, Serialize};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

pub const STORE_MAGIC: &[u8; 4] = b"ASPS";
pub const STORE_FORMAT_VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 1 + 1 + 8 + 8 + 8 + 8;
const RECORD_LEN: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StoreSidecar {
    pub format_version: u16,
    pub aspect: AspectId,
    pub mode: StoreMode,
    pub n: usize,
    pub thresholds: AspectThresholds,
    pub counts: ClassCounts,
    pub corpus_checksum: String,
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".json");
    path.with_file_name(name)
}

/// Writes `path` and `<path>.json`.
pub fn write_store(
    path: &Path,
    store: &AspectPairStore,
    corpus_checksum: &str,
) -> Result<StoreSidecar, SimError> {
    let mut w = BufWriter::new(std::fs::File::create(path)?);
    w.write_all(STORE_MAGIC)?;
    w.write_all(&STORE_FORMAT_VERSION.to_le_bytes())?;
    w.write_all(&[
        store.aspect().index() as u8,
        (store.mode() == StoreMode::Exact) as u8,
    ])?;
    w.write_all(&store.thresholds().hi.to_le_bytes())?;
    w.write_all(&store.thresholds().lo.to_le_bytes())?;
    w.write_all(&(store.n() as u64).to_le_bytes())?;
    w.write_all(&(store.entries().len() as u64).to_le_bytes())?;
    for e in store.entries() {
        w.write_all(&e.i.to_le_bytes())?;
        w.write_all(&e.j.to_le_bytes())?;
        w.write_all(&e.score.to_le_bytes())?;
    }
    w.flush()?;

    let sidecar = StoreSidecar {
        format_version: STORE_FORMAT_VERSION,
        aspect: store.aspect(),
        mode: store.mode(),
        n: store.n(),
        thresholds: store.thresholds(),
        counts: store.counts(),
        corpus_checksum: corpus_checksum.to_owned(),
    };
    let json = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    std::fs::write(sidecar_path(path), json)?;
    Ok(sidecar)
}

fn format_err(msg: impl Into<String>) -> SimError {
    SimError::Format(msg.into())
}

pub fn read_store(path: &Path) -> Result<(AspectPairStore, StoreSidecar), SimError> {
    let mut bytes = Vec::new();
    BufReader::new(std::fs::File::open(path)?).read_to_end(&mut bytes)?;
    if bytes.len() < HEADER_LEN || &bytes[..4] != STORE_MAGIC {
        return Err(format_err("not a pair store file"));
    }
    let u64_at = |k: usize| u64::from_le_bytes(bytes[k..k + 8].try_into().unwrap());
    let f64_at = |k: usize| f64::from_le_bytes(bytes[k..k + 8].try_into().unwrap());
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != STORE_FORMAT_VERSION {
        return Err(format_err(format!("unsupported format version {version}")));
    }
    let aspect =
        AspectId::from_index(bytes[6] as usize).ok_or_else(|| format_err("bad aspect tag"))?;
    let mode = match bytes[7] {
        0 => StoreMode::Embedding,
        1 => StoreMode::Exact,
        t => return Err(format_err(format!("bad mode tag {t}"))),
    };
    let th = AspectThresholds::new(f64_at(8), f64_at(16));
    let n = u64_at(24) as usize;
    let count = u64_at(32) as usize;
    if bytes.len() != HEADER_LEN + count * RECORD_LEN {
        return Err(format_err("truncated or oversized pair section"));
    }

    let entries = bytes[HEADER_LEN..]
        .chunks_exact(RECORD_LEN)
        .map(|r| {
            let score = f64::from_le_bytes(r[8..16].try_into().unwrap());
            let class = match mode {
                StoreMode::Exact => TriState::Similar,
                StoreMode::Embedding => classify(score, th),
            };
            PairEntry {
                i: u32::from_le_bytes(r[0..4].try_into().unwrap()),
                j: u32::from_le_bytes(r[4..8].try_into().unwrap()),
                score,
                class,
            }
        })
        .collect();
    let store = AspectPairStore::from_entries(aspect, n, th, mode, entries)?;

    let sidecar: StoreSidecar = serde_json::from_str(&std::fs::read_to_string(sidecar_path(path))?)
        .map_err(|e| format_err(format!("sidecar: {e}")))?;
    if sidecar.aspect != aspect || sidecar.n != n || sidecar.counts != store.counts() {
        return Err(format_err("sidecar disagrees with the binary store"));
    }
    Ok((store, sidecar))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(mode: StoreMode) -> AspectPairStore {
        let th = AspectThresholds::new(0.6, 0.3);
        let entries = vec![
            PairEntry {
                i: 0,
                j: 2,
                score: 0.9,
                class: TriState::Similar,
            },
            PairEntry {
                i: 1,
                j: 3,
                score: 0.45,
                class: TriState::Uncertain,
            },
            PairEntry {
                i: 2,
                j: 3,
                score: 0.6,
                class: TriState::Similar,
            },
        ];
        let entries = match mode {
            StoreMode::Embedding => entries,
            StoreMode::Exact => entries
                .into_iter()
                .map(|e| PairEntry {
                    class: TriState::Similar,
                    ..e
                })
                .collect(),
        };
        AspectPairStore::from_entries(AspectId::Text, 5, th, mode, entries).unwrap()
    }

    #[test]
    fn round_trip_both_modes() {
        let dir = tempfile::tempdir().unwrap();
        for mode in [StoreMode::Embedding, StoreMode::Exact] {
            let path = dir.path().join("text.bin");
            let store = sample(mode);
            let side = write_store(&path, &store, "abc").unwrap();
            assert_eq!(side.counts.dissimilar, 10 - 3);
            let (back, side2) = read_store(&path).unwrap();
            assert_eq!(back, store);
            assert_eq!(side2, side);
        }
    }

    #[test]
    fn header_layout_is_fixed() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.bin");
        write_store(&path, &sample(StoreMode::Embedding), "x").unwrap();
        let bytes = std::fs::read(&path).unwrap();
        assert_eq!(&bytes[..4], b"ASPS");
        assert_eq!(&bytes[4..6], &[1, 0]);
        assert_eq!(bytes[6], 1);
        assert_eq!(bytes.len(), HEADER_LEN + 3 * RECORD_LEN);
        assert_eq!(
            u32::from_le_bytes(bytes[HEADER_LEN..HEADER_LEN + 4].try_into().unwrap()),
            0
        );
        assert_eq!(
            u32::from_le_bytes(bytes[HEADER_LEN + 4..HEADER_LEN + 8].try_into().unwrap()),
            2
        );
    }

    #[test]
    fn corrupt_files_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.bin");
        write_store(&path, &sample(StoreMode::Embedding), "x").unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.pop();
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(read_store(&path), Err(SimError::Format(_))));
        std::fs::write(&path, b"nope").unwrap();
        assert!(matches!(read_store(&path), Err(SimError::Format(_))));
    }
}
