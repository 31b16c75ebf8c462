//! Aspect-wise similarity analysis of publication citation networks.
//!
//! A corpus is split into four aspects (citation topology, abstract text,
//! co-authors, citation counts), each aspect is embedded separately, and
//! every article pair is classified per aspect as similar, dissimilar or
//! uncertain from the cosine of its embeddings. The [`patterns`] module
//! answers criteria queries over those classifications.

pub mod calibrate;
pub mod corpus;
pub mod embedding;
pub mod patterns;
pub mod pipeline;
pub mod report;
pub mod simstore;
pub mod synthetic;
