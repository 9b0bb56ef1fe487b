//! Bias and quality evaluations over an [`EmbeddingSet`].

pub mod analogy;
pub mod datasets;
pub mod sembias;
pub mod similarity;
pub mod weat;

use serde::{Deserialize, Serialize};

use crate::embedding::{EmbeddingSet, Space};
use crate::error::{Error, Result};
use crate::geometry::raw;

pub use analogy::{analogy_eval, analogy_solve, analogy_solve_points, cross_validate_t, t_grid, AnalogyResult, CvPoint, CvResult};
pub use datasets::{AnalogyQuery, SemBiasInstance, SimilarityPair};
pub use sembias::{sembias_eval, SemBiasOptions, SemBiasResult, SemBiasScoring};
pub use similarity::{similarity_eval, SimilarityResult};
pub use weat::{effect_size, weat_association, weat_test, WeatOptions, WeatResult, WeatSpec};

/// How two embedded points are compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Similarity {
    /// Negative geodesic distance on the ball.
    #[default]
    NegPoincare,
    /// Euclidean cosine of the raw coordinates.
    Cosine,
}

impl std::str::FromStr for Similarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "neg-poincare" | "neg_poincare" => Ok(Similarity::NegPoincare),
            "cosine" => Ok(Similarity::Cosine),
            other => Err(Error::InvalidConfig(format!("unknown similarity {other:?}"))),
        }
    }
}

impl Similarity {
    /// Similarity of two vectors; cosine against a zero vector is 0.
    pub fn score(self, x: &[f64], y: &[f64]) -> f64 {
        match self {
            Similarity::NegPoincare => -raw::distance(x, y),
            Similarity::Cosine => raw::cosine(x, y).unwrap_or(0.0),
        }
    }

    pub(crate) fn check_space(self, emb: &EmbeddingSet) -> Result<()> {
        if self == Similarity::NegPoincare && emb.space() == Space::Euclidean {
            return Err(Error::InvalidConfig(
                "negative Poincaré distance needs a Poincaré embedding; use cosine".into(),
            ));
        }
        Ok(())
    }
}

/// Index of `word`, falling back to its lowercase form.
pub(crate) fn lookup(emb: &EmbeddingSet, word: &str) -> Option<usize> {
    emb.index_of(word)
        .or_else(|| emb.index_of(&word.to_lowercase()))
}
