//! Token-level contract shared by every tokenizer: vector quantization
//! against a codebook and receiver-side zero padding.

mod codebook;
mod sequence;

pub use codebook::{
    train_codebook, train_codebook_traced, Codebook, KMeansTrace, DUPLICATE_TOL, KMEANS_MAX_ITERS, KMEANS_TOL,
};
pub use sequence::{zero_pad, LatentVectorSet, TokenSequence};
