use serde::{Deserialize, Serialize};

/// Sparse vector with strictly increasing indices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseVector {
    indices: Vec<u32>,
    values: Vec<f64>,
}

impl SparseVector {
    /// Builds from (index, value) entries; duplicate indices are summed and
    /// exact zeros dropped.
    pub fn from_entries(mut entries: Vec<(u32, f64)>) -> Self {
        entries.sort_unstable_by_key(|e| e.0);
        let mut indices: Vec<u32> = Vec::with_capacity(entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(entries.len());
        for (i, v) in entries {
            if indices.last() == Some(&i) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(i);
                values.push(v);
            }
        }
        let (indices, values) = indices
            .into_iter()
            .zip(values)
            .filter(|(_, v)| *v != 0.0)
            .unzip();
        SparseVector { indices, values }
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut i, mut j, mut acc) = (0, 0, 0.0);
        let (a, b) = (&self.indices, &other.indices);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += self.values[i] * other.values[j];
                    i += 1;
                    j += 1;
                }
            }
        }
        acc
    }

    pub fn dot_dense(&self, dense: &[f64]) -> f64 {
        self.indices
            .iter()
            .zip(&self.values)
            .map(|(&i, v)| v * dense[i as usize])
            .sum()
    }

    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        let mut out = vec![0.0; dim];
        for (&i, &v) in self.indices.iter().zip(&self.values) {
            out[i as usize] = v;
        }
        out
    }
}

/// An aspect embedding for one article.
///
/// `Null` is the zero-information sentinel given to articles with nothing to
/// embed (an empty abstract, say). It scores cosine 0 against every vector,
/// itself included.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Vector {
    Dense(Vec<f64>),
    Sparse(SparseVector),
    Null,
}

impl Vector {
    pub fn is_null(&self) -> bool {
        matches!(self, Vector::Null)
    }

    pub fn dot(&self, other: &Vector) -> f64 {
        match (self, other) {
            (Vector::Dense(a), Vector::Dense(b)) => dense_dot(a, b),
            (Vector::Sparse(a), Vector::Sparse(b)) => a.dot(b),
            (Vector::Sparse(s), Vector::Dense(d)) | (Vector::Dense(d), Vector::Sparse(s)) => {
                s.dot_dense(d)
            }
            _ => 0.0,
        }
    }

    pub fn norm(&self) -> f64 {
        match self {
            Vector::Dense(v) => dense_dot(v, v).sqrt(),
            Vector::Sparse(s) => s.values.iter().map(|x| x * x).sum::<f64>().sqrt(),
            Vector::Null => 0.0,
        }
    }

    /// Scales to unit L2 norm; vectors with zero norm become `Null`.
    pub fn normalized(self) -> Vector {
        let norm = self.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Vector::Null;
        }
        match self {
            Vector::Dense(v) => Vector::Dense(v.into_iter().map(|x| x / norm).collect()),
            Vector::Sparse(s) => Vector::Sparse(SparseVector {
                indices: s.indices,
                values: s.values.into_iter().map(|x| x / norm).collect(),
            }),
            Vector::Null => Vector::Null,
        }
    }

    /// Dense view of length `dim` (zeros for `Null`).
    pub fn to_dense(&self, dim: usize) -> Vec<f64> {
        match self {
            Vector::Dense(v) => v.clone(),
            Vector::Sparse(s) => s.to_dense(dim),
            Vector::Null => vec![0.0; dim],
        }
    }
}

pub(crate) fn dense_dot(a: &[f64], b: &[f64]) -> f64 {
    // Four accumulators let the compiler vectorize without reassociation.
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let k = c * 4;
        acc[0] += a[k] * b[k];
        acc[1] += a[k + 1] * b[k + 1];
        acc[2] += a[k + 2] * b[k + 2];
        acc[3] += a[k + 3] * b[k + 3];
    }
    let mut tail = 0.0;
    for k in chunks * 4..a.len().min(b.len()) {
        tail += a[k] * b[k];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sparse_entries_merge_and_drop_zeros() {
        let s = SparseVector::from_entries(vec![(3, 1.0), (1, 2.0), (3, -1.0), (2, 0.5)]);
        assert_eq!(s.indices(), &[1, 2]);
        assert_eq!(s.values(), &[2.0, 0.5]);
    }

    #[test]
    fn mixed_dots_agree_with_dense() {
        let s = SparseVector::from_entries(vec![(0, 1.0), (4, 2.0)]);
        let d = vec![0.5, 1.0, 1.0, 1.0, 3.0];
        let sv = Vector::Sparse(s.clone());
        let dv = Vector::Dense(d.clone());
        assert_eq!(sv.dot(&dv), 6.5);
        assert_eq!(dv.dot(&sv), 6.5);
        assert_eq!(Vector::Dense(s.to_dense(5)).dot(&dv), 6.5);
    }

    #[test]
    fn zero_vectors_normalize_to_null() {
        assert!(Vector::Dense(vec![0.0, 0.0]).normalized().is_null());
        assert!(Vector::Sparse(SparseVector::from_entries(vec![]))
            .normalized()
            .is_null());
        let v = Vector::Dense(vec![3.0, 4.0]).normalized();
        assert!((v.norm() - 1.0).abs() < 1e-12);
        assert_eq!(Vector::Null.dot(&v), 0.0);
    }

    #[test]
    fn unrolled_dot_handles_tails() {
        let a: Vec<f64> = (0..7).map(f64::from).collect();
        assert_eq!(dense_dot(&a, &a), 91.0);
    }
}
