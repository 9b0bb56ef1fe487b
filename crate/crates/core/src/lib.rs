//! Gender bias measurement and removal for Poincaré-ball word embeddings.
//!
//! The [`geometry`] module holds the gyrovector algebra, [`optim`] the
//! Riemannian optimizers, [`bias`] the gyrocosine bias metric and [`pgd`]
//! the debiasing procedure. [`eval`] contains WEAT, SemBias, word similarity
//! and analogy benchmarks.

pub mod bias;
pub mod defaults;
pub mod embedding;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod mean;
pub mod optim;
pub mod pgd;
pub mod stats;
pub mod synthetic;

pub use bias::{gender_gyrovectors, gyrocosine_bias, BiasReport, GenderAxis, GenderGyrovectors};
pub use embedding::{load_embeddings, save_embeddings, EmbeddingSet, Space, WordClass};
pub use error::{Error, Result};
pub use eval::Similarity;
pub use geometry::{PoincarePoint, RootedGyrovector, TangentVector};
pub use mean::{karcher_mean, KarcherMean, MeanConfig};
pub use optim::{AdamConfig, AdamState, RiemannianGradient};
pub use pgd::{debias_vocabulary, debias_word, DebiasReport, PgdConfig};
