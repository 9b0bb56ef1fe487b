//! Shared fixtures for the benchmarks.

use gyrodebias::synthetic::{biased_vocabulary, SyntheticSpec, SyntheticVocabulary};
use gyrodebias::PoincarePoint;

pub fn vocabulary(dim: usize, neutral_words: usize) -> SyntheticVocabulary {
    biased_vocabulary(&SyntheticSpec {
        dim,
        neutral_words,
        ..Default::default()
    })
}

/// Points of the neutral words, in vocabulary order.
pub fn neutral_points(v: &SyntheticVocabulary) -> Vec<PoincarePoint> {
    v.neutral_words.iter().map(|w| v.embedding.point(w).unwrap()).collect()
}
