//! Word-similarity benchmarks scored by Spearman correlation.

use serde::Serialize;

use super::datasets::SimilarityPair;
use super::{lookup, Similarity};
use crate::embedding::EmbeddingSet;
use crate::error::{Error, Result};
use crate::stats;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimilarityResult {
    pub spearman: f64,
    pub pairs_used: usize,
    pub oov: usize,
    pub similarity: Similarity,
}

/// Rank correlation between model similarities and human scores. Pairs with
/// an unknown word are dropped and counted in `oov`.
pub fn similarity_eval(dataset: &[SimilarityPair], emb: &EmbeddingSet, sim: Similarity) -> Result<SimilarityResult> {
    sim.check_space(emb)?;
    let mut model = Vec::with_capacity(dataset.len());
    let mut human = Vec::with_capacity(dataset.len());
    for p in dataset {
        if let (Some(i), Some(j)) = (lookup(emb, &p.w1), lookup(emb, &p.w2)) {
            model.push(sim.score(emb.row(i), emb.row(j)));
            human.push(p.score);
        }
    }
    if model.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "similarity evaluation needs at least 3 resolvable pairs, got {}",
            model.len()
        )));
    }
    Ok(SimilarityResult {
        spearman: stats::spearman(&model, &human)?,
        pairs_used: model.len(),
        oov: dataset.len() - model.len(),
        similarity: sim,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::Space;

    fn setup() -> EmbeddingSet {
        let rows = vec![
            ("o".to_string(), vec![0.0, 0.0]),
            ("p1".to_string(), vec![0.1, 0.0]),
            ("p2".to_string(), vec![0.3, 0.0]),
            ("p3".to_string(), vec![0.5, 0.0]),
            ("p4".to_string(), vec![0.7, 0.0]),
        ];
        EmbeddingSet::from_rows(2, Space::Poincare, rows).unwrap().0
    }

    fn pairs(scores: [f64; 4]) -> Vec<SimilarityPair> {
        ["p1", "p2", "p3", "p4"]
            .iter()
            .zip(scores)
            .map(|(w, score)| SimilarityPair {
                w1: "o".into(),
                w2: w.to_string(),
                score,
            })
            .collect()
    }

    #[test]
    fn ordering_cases() {
        let e = setup();
        // similarity to o falls from p1 to p4
        let same = similarity_eval(&pairs([4.0, 3.0, 2.0, 1.0]), &e, Similarity::NegPoincare).unwrap();
        assert_eq!(same.spearman, 1.0);
        let rev = similarity_eval(&pairs([1.0, 2.0, 3.0, 4.0]), &e, Similarity::NegPoincare).unwrap();
        assert_eq!(rev.spearman, -1.0);
        let swap = similarity_eval(&pairs([4.0, 3.0, 1.0, 2.0]), &e, Similarity::NegPoincare).unwrap();
        assert!((swap.spearman - 0.8).abs() < 1e-12);
    }

    #[test]
    fn oov_pairs_are_dropped() {
        let e = setup();
        let mut ds = pairs([4.0, 3.0, 2.0, 1.0]);
        ds.push(SimilarityPair {
            w1: "o".into(),
            w2: "missing".into(),
            score: 9.0,
        });
        let r = similarity_eval(&ds, &e, Similarity::NegPoincare).unwrap();
        assert_eq!((r.pairs_used, r.oov), (4, 1));
        assert!(matches!(similarity_eval(&ds[..2], &e, Similarity::NegPoincare), Err(Error::InsufficientData(_))));
    }
}
