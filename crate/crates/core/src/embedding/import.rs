//! Externally produced vectors.
//!
//! Two layouts are accepted: one record per line (`article_id` followed by
//! whitespace-separated floats; blank lines and `#` comments are skipped),
//! or a JSON object mapping id to an array of numbers.

use super::EmbedError;
use std::collections::BTreeMap;
use std::path::Path;

fn file_err(path: &Path, message: impl Into<String>) -> EmbedError {
    EmbedError::VectorFile {
        path: path.to_owned(),
        message: message.into(),
    }
}

pub fn read_vector_file(path: &Path) -> Result<BTreeMap<String, Vec<f64>>, EmbedError> {
    let text = std::fs::read_to_string(path).map_err(|e| file_err(path, e.to_string()))?;
    let map = if text.trim_start().starts_with('{') {
        serde_json::from_str::<BTreeMap<String, Vec<f64>>>(&text)
            .map_err(|e| file_err(path, e.to_string()))?
    } else {
        let mut map = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split_whitespace();
            let id = parts.next().unwrap_or_default().to_owned();
            let values = parts
                .map(|p| p.parse::<f64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| file_err(path, format!("line {}: {e}", lineno + 1)))?;
            if map.insert(id.clone(), values).is_some() {
                return Err(file_err(
                    path,
                    format!("line {}: duplicate id {id}", lineno + 1),
                ));
            }
        }
        map
    };

    let mut dims = map.values().map(Vec::len);
    if let Some(dim) = dims.next() {
        if dim == 0 || dims.any(|d| d != dim) {
            return Err(file_err(path, "vectors must share one positive dimension"));
        }
    }
    if map.values().flatten().any(|x| !x.is_finite()) {
        return Err(file_err(path, "non-finite component"));
    }
    Ok(map)
}

/// Reads a file holding exactly one vector: bare floats, a JSON array, or a
/// single record in either [`read_vector_file`] layout.
pub fn read_single_vector(path: &Path) -> Result<Vec<f64>, EmbedError> {
    let text = std::fs::read_to_string(path).map_err(|e| file_err(path, e.to_string()))?;
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        return serde_json::from_str(trimmed).map_err(|e| file_err(path, e.to_string()));
    }
    let bare: Result<Vec<f64>, _> = trimmed.split_whitespace().map(str::parse::<f64>).collect();
    if let Ok(values) = bare {
        if !values.is_empty() {
            return Ok(values);
        }
    }
    let map = read_vector_file(path)?;
    if map.len() != 1 {
        return Err(file_err(
            path,
            format!("expected one vector, found {}", map.len()),
        ));
    }
    Ok(map.into_values().next().unwrap())
}
