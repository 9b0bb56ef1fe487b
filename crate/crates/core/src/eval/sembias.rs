//! SemBias: pick the gender analogy among four candidate pairs.

use serde::{Deserialize, Serialize};

use super::analogy::{endpoints, interpolate};
use super::datasets::SemBiasInstance;
use super::{lookup, Similarity};
use crate::embedding::EmbeddingSet;
use crate::error::{Error, Result};
use crate::geometry::raw;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemBiasScoring {
    /// Solve `he : she :: a : ?` and score the pair by similarity of the
    /// prediction to `b`.
    #[default]
    AnalogyProximity,
    /// Cosine between the gyrovectors `⊖she ⊕ he` and `⊖b ⊕ a`.
    Gyrocosine,
}

impl std::str::FromStr for SemBiasScoring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analogy" | "analogy-proximity" | "analogy_proximity" => Ok(SemBiasScoring::AnalogyProximity),
            "gyrocosine" => Ok(SemBiasScoring::Gyrocosine),
            other => Err(Error::InvalidConfig(format!("unknown SemBias scoring {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemBiasResult {
    pub def: f64,
    pub ster: f64,
    /// Both unrelated pairs together.
    pub none: f64,
    pub evaluated: usize,
    pub skipped: usize,
    pub t: f64,
    pub similarity: Similarity,
    pub scoring: SemBiasScoring,
}

#[derive(Debug, Clone)]
pub struct SemBiasOptions<'a> {
    pub t: f64,
    pub similarity: Similarity,
    pub scoring: SemBiasScoring,
    pub male: &'a str,
    pub female: &'a str,
}

impl Default for SemBiasOptions<'_> {
    fn default() -> Self {
        Self {
            t: 0.3,
            similarity: Similarity::NegPoincare,
            scoring: SemBiasScoring::AnalogyProximity,
            male: "he",
            female: "she",
        }
    }
}

/// Role chosen for one instance: 0 def, 1 ster, 2 or 3 none. Ties keep the
/// earliest candidate in that order.
fn choose(inst: &SemBiasInstance, emb: &EmbeddingSet, he: &[f64], she: &[f64], opts: &SemBiasOptions) -> Option<usize> {
    let mut rows = Vec::with_capacity(4);
    for (a, b) in inst.candidates() {
        rows.push((emb.row(lookup(emb, a)?), emb.row(lookup(emb, b)?)));
    }
    let gender = raw::mobius_add(&raw::neg(she), he);
    let mut best: Option<(usize, f64)> = None;
    for (k, (a, b)) in rows.into_iter().enumerate() {
        let score = match opts.scoring {
            SemBiasScoring::AnalogyProximity => {
                let (d1, d2) = endpoints(he, she, a);
                opts.similarity.score(&interpolate(&d1, &d2, opts.t), b)
            }
            SemBiasScoring::Gyrocosine => {
                let pair = raw::mobius_add(&raw::neg(b), a);
                raw::cosine(&gender, &pair).unwrap_or(0.0)
            }
        };
        if best.is_none_or(|(_, s)| score > s) {
            best = Some((k, score));
        }
    }
    best.map(|(k, _)| k)
}

/// Percentages of instances whose chosen pair is the definitional, the
/// stereotypical, or one of the unrelated pairs.
pub fn sembias_eval(instances: &[SemBiasInstance], emb: &EmbeddingSet, opts: &SemBiasOptions) -> Result<SemBiasResult> {
    if !(0.0..=1.0).contains(&opts.t) {
        return Err(Error::InvalidConfig(format!("t must lie in [0, 1], got {}", opts.t)));
    }
    opts.similarity.check_space(emb)?;
    if instances.is_empty() {
        return Err(Error::EmptyInput("SemBias instances"));
    }
    let he = emb.row(lookup(emb, opts.male).ok_or_else(|| Error::MissingWord(opts.male.into()))?);
    let she = emb.row(lookup(emb, opts.female).ok_or_else(|| Error::MissingWord(opts.female.into()))?);

    let mut counts = [0usize; 3];
    let mut skipped = 0;
    for inst in instances {
        match choose(inst, emb, he, she, opts) {
            Some(k) => counts[k.min(2)] += 1,
            None => {
                log::warn!("skipping SemBias instance with unknown words: {:?}", inst.def_pair);
                skipped += 1;
            }
        }
    }
    let evaluated = instances.len() - skipped;
    if evaluated == 0 {
        return Err(Error::EmptyEvaluable);
    }
    let pct = |c: usize| 100.0 * c as f64 / evaluated as f64;
    Ok(SemBiasResult {
        def: pct(counts[0]),
        ster: pct(counts[1]),
        none: pct(counts[2]),
        evaluated,
        skipped,
        t: opts.t,
        similarity: opts.similarity,
        scoring: opts.scoring,
    })
}
