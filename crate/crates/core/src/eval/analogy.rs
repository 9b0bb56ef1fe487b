//! Analogy completion by gyro-translation.

use rayon::prelude::*;
use serde::Serialize;

use super::datasets::AnalogyQuery;
use super::{lookup, Similarity};
use crate::embedding::EmbeddingSet;
use crate::error::{Error, Result};
use crate::geometry::{raw, PoincarePoint};

/// The eleven interpolation weights `0.0, 0.1, …, 1.0`.
pub fn t_grid() -> [f64; 11] {
    std::array::from_fn(|i| i as f64 / 10.0)
}

fn check_t(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidConfig(format!("t must lie in [0, 1], got {t}")));
    }
    Ok(())
}

/// `d1 = c ⊕ gyr[c, ⊖a](⊖a ⊕ b)` and `d2 = b ⊕ gyr[b, ⊖a](⊖a ⊕ c)`.
pub(crate) fn endpoints(a: &[f64], b: &[f64], c: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let na = raw::neg(a);
    let ab = raw::mobius_add(&na, b);
    let ac = raw::mobius_add(&na, c);
    let d1 = raw::project(raw::mobius_add(c, &raw::gyr_linear(c, &na, &ab)));
    let d2 = raw::project(raw::mobius_add(b, &raw::gyr_linear(b, &na, &ac)));
    (d1, d2)
}

/// `d1 ⊕ ((⊖d1 ⊕ d2) ⊗ t)`, returning the endpoints themselves at t = 0 and 1.
pub(crate) fn interpolate(d1: &[f64], d2: &[f64], t: f64) -> Vec<f64> {
    if t == 0.0 {
        return d1.to_vec();
    }
    if t == 1.0 {
        return d2.to_vec();
    }
    let between = raw::mobius_add(&raw::neg(d1), d2);
    raw::project(raw::mobius_add(d1, &raw::mobius_scalar_mul(t, &between)))
}

/// Solve `a : b :: c : ?` for points already on the ball.
pub fn analogy_solve_points(a: &PoincarePoint, b: &PoincarePoint, c: &PoincarePoint, t: f64) -> Result<PoincarePoint> {
    check_t(t)?;
    for p in [b, c] {
        if p.dim() != a.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: p.dim(),
            });
        }
    }
    let (d1, d2) = endpoints(a.coords(), b.coords(), c.coords());
    Ok(PoincarePoint::from_valid(interpolate(&d1, &d2, t)))
}

pub fn analogy_solve(a: &str, b: &str, c: &str, t: f64, emb: &EmbeddingSet) -> Result<PoincarePoint> {
    let pa = emb.point(a)?;
    let pb = emb.point(b)?;
    let pc = emb.point(c)?;
    analogy_solve_points(&pa, &pb, &pc, t)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalogyResult {
    pub t: f64,
    pub similarity: Similarity,
    /// `correct / total`; out-of-vocabulary queries count as misses.
    pub accuracy: f64,
    pub correct: usize,
    pub total: usize,
    pub oov: usize,
}

struct Resolved {
    d1: Vec<f64>,
    d2: Vec<f64>,
    exclude: [usize; 3],
    gold: String,
}

fn resolve(q: &AnalogyQuery, emb: &EmbeddingSet) -> Option<Resolved> {
    let i1 = lookup(emb, &q.w1)?;
    let i2 = lookup(emb, &q.w2)?;
    let i3 = lookup(emb, &q.w3)?;
    lookup(emb, &q.gold)?;
    let (d1, d2) = endpoints(emb.row(i1), emb.row(i2), emb.row(i3));
    Some(Resolved {
        d1,
        d2,
        exclude: [i1, i2, i3],
        gold: q.gold.to_lowercase(),
    })
}

/// Index of the most similar row, skipping `exclude`; the first of equals wins.
fn nearest(emb: &EmbeddingSet, target: &[f64], exclude: &[usize], sim: Similarity) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for i in 0..emb.len() {
        if exclude.contains(&i) {
            continue;
        }
        let s = sim.score(target, emb.row(i));
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    best.map(|(i, _)| i)
}

fn hit(r: &Resolved, emb: &EmbeddingSet, t: f64, sim: Similarity) -> bool {
    let target = interpolate(&r.d1, &r.d2, t);
    nearest(emb, &target, &r.exclude, sim).is_some_and(|i| emb.words()[i].to_lowercase() == r.gold)
}

/// Share of queries whose nearest word to `d^t`, other than the three
/// query words, is the gold answer (compared case-insensitively).
pub fn analogy_eval(dataset: &[AnalogyQuery], emb: &EmbeddingSet, t: f64, sim: Similarity) -> Result<AnalogyResult> {
    check_t(t)?;
    sim.check_space(emb)?;
    if dataset.is_empty() {
        return Err(Error::EmptyInput("analogy dataset"));
    }
    let outcomes: Vec<Option<bool>> = dataset
        .par_iter()
        .map(|q| resolve(q, emb).map(|r| hit(&r, emb, t, sim)))
        .collect();
    let oov = outcomes.iter().filter(|o| o.is_none()).count();
    if oov == dataset.len() {
        return Err(Error::EmptyEvaluable);
    }
    let correct = outcomes.iter().filter(|o| **o == Some(true)).count();
    Ok(AnalogyResult {
        t,
        similarity: sim,
        accuracy: correct as f64 / dataset.len() as f64,
        correct,
        total: dataset.len(),
        oov,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvPoint {
    pub t: f64,
    pub fold_accuracy: [f64; 2],
    pub mean_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CvResult {
    /// Selected weight.
    pub t: f64,
    pub fold_sizes: [usize; 2],
    pub grid: Vec<CvPoint>,
}

/// Two-fold selection of `t` over [`t_grid`].
///
/// Queries are stably sorted by their text and split into a first and a
/// second half. Each grid value is scored by its mean held-out accuracy
/// over the two halves; ties go to the smaller `t`.
pub fn cross_validate_t(dataset: &[AnalogyQuery], emb: &EmbeddingSet, sim: Similarity) -> Result<CvResult> {
    sim.check_space(emb)?;
    if dataset.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "cross-validation needs at least 2 analogies, got {}",
            dataset.len()
        )));
    }
    let mut order: Vec<&AnalogyQuery> = dataset.iter().collect();
    order.sort_by_cached_key(|q| q.sort_key());
    let resolved: Vec<Option<Resolved>> = order.par_iter().map(|q| resolve(q, emb)).collect();
    if resolved.iter().all(Option::is_none) {
        return Err(Error::EmptyEvaluable);
    }
    let half = dataset.len().div_ceil(2);
    let folds = [&resolved[..half], &resolved[half..]];

    let grid: Vec<CvPoint> = t_grid()
        .iter()
        .map(|&t| {
            let fold_accuracy = folds.map(|fold| {
                let hits = fold
                    .par_iter()
                    .filter(|r| r.as_ref().is_some_and(|r| hit(r, emb, t, sim)))
                    .count();
                hits as f64 / fold.len() as f64
            });
            CvPoint {
                t,
                fold_accuracy,
                mean_accuracy: (fold_accuracy[0] + fold_accuracy[1]) / 2.0,
            }
        })
        .collect();

    let mut best = &grid[0];
    for p in &grid[1..] {
        if p.mean_accuracy > best.mean_accuracy {
            best = p;
        }
    }
    Ok(CvResult {
        t: best.t,
        fold_sizes: [half, dataset.len() - half],
        grid,
    })
}
