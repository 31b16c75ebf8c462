use super::PatternError;
use crate::corpus::ArticleId;
use crate::embedding::{AspectId, Vector};
use crate::simstore::{classify, pair_cosine, SimilarityModel, TriState};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UploadMatch {
    pub id: ArticleId,
    pub score: f64,
    pub class: TriState,
}

/// Articles whose text vector is similar to an external abstract vector,
/// best first (ties by id).
pub fn match_external_abstract(
    vector: &Vector,
    model: &SimilarityModel,
) -> Result<Vec<UploadMatch>, PatternError> {
    let text = model.vectors(AspectId::Text);
    match vector {
        Vector::Dense(d) if d.len() != text.dim => {
            return Err(PatternError::DimensionMismatch(d.len(), text.dim))
        }
        Vector::Sparse(s) => {
            if let Some(&max) = s.indices().last() {
                if max as usize >= text.dim {
                    return Err(PatternError::DimensionMismatch(max as usize + 1, text.dim));
                }
            }
        }
        _ => {}
    }
    let th = model.store(AspectId::Text).thresholds();
    let mut out: Vec<UploadMatch> = (0..model.len())
        .into_par_iter()
        .filter_map(|i| {
            let score = pair_cosine(vector, text.get(i));
            let class = if vector.is_null() || text.get(i).is_null() {
                TriState::Dissimilar
            } else {
                classify(score, th)
            };
            (class == TriState::Similar).then(|| UploadMatch {
                id: model.id(i).clone(),
                score,
                class,
            })
        })
        .collect();
    out.sort_by(|a, b| b.score.total_cmp(&a.score).then_with(|| a.id.cmp(&b.id)));
    Ok(out)
}
