//! Word Embedding Association Test with a permutation p-value.

use std::collections::HashSet;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{lookup, Similarity};
use crate::embedding::EmbeddingSet;
use crate::error::{Error, Result};
use crate::stats;

/// Target and attribute word sets for one test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeatSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub targets_x: Vec<String>,
    pub targets_y: Vec<String>,
    pub attributes_a: Vec<String>,
    pub attributes_b: Vec<String>,
    #[serde(default)]
    pub similarity: Similarity,
}

impl WeatSpec {
    pub fn new<S: AsRef<str>>(x: &[S], y: &[S], a: &[S], b: &[S], similarity: Similarity) -> Self {
        let own = |v: &[S]| v.iter().map(|s| s.as_ref().to_string()).collect();
        Self {
            name: None,
            targets_x: own(x),
            targets_y: own(y),
            attributes_a: own(a),
            attributes_b: own(b),
            similarity,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let (x, y, a, b) = (&self.targets_x, &self.targets_y, &self.attributes_a, &self.attributes_b);
        if x.len() != y.len() || x.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "target sets need equal sizes of at least 2, got {} and {}",
                x.len(),
                y.len()
            )));
        }
        if a.len() != b.len() || a.len() < 2 {
            return Err(Error::InvalidConfig(format!(
                "attribute sets need equal sizes of at least 2, got {} and {}",
                a.len(),
                b.len()
            )));
        }
        let mut seen = HashSet::new();
        for w in x.iter().chain(y).chain(a).chain(b) {
            if !seen.insert(w.as_str()) {
                return Err(Error::InvalidConfig(format!("word {w:?} appears more than once across the WEAT sets")));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// The same test with X and Y exchanged.
    pub fn swapped(&self) -> Self {
        let mut s = self.clone();
        std::mem::swap(&mut s.targets_x, &mut s.targets_y);
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeatOptions {
    /// Largest partition count enumerated exactly; above it, this many
    /// random splits are sampled instead.
    pub max_permutations: u64,
    pub seed: u64,
}

impl Default for WeatOptions {
    fn default() -> Self {
        Self {
            max_permutations: 200_000,
            seed: 42,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeatResult {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub statistic: f64,
    pub effect_size_d: f64,
    pub p_value: f64,
    pub permutations_used: u64,
    pub exact: bool,
    pub similarity: Similarity,
    /// Association score of every target word, X first then Y.
    pub associations: Vec<(String, f64)>,
}

fn resolve(emb: &EmbeddingSet, words: &[String]) -> Result<Vec<usize>> {
    words
        .iter()
        .map(|w| lookup(emb, w).ok_or_else(|| Error::MissingWord(w.clone())))
        .collect()
}

fn association_rows(emb: &EmbeddingSet, w: &[f64], a: &[usize], b: &[usize], sim: Similarity) -> f64 {
    let mean_sim = |set: &[usize]| set.iter().map(|&i| sim.score(w, emb.row(i))).sum::<f64>() / set.len() as f64;
    mean_sim(a) - mean_sim(b)
}

/// Mean similarity of `w` to A minus mean similarity to B.
pub fn weat_association(w: &str, spec: &WeatSpec, emb: &EmbeddingSet) -> Result<f64> {
    spec.similarity.check_space(emb)?;
    let wi = lookup(emb, w).ok_or_else(|| Error::MissingWord(w.to_string()))?;
    let a = resolve(emb, &spec.attributes_a)?;
    let b = resolve(emb, &spec.attributes_b)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput("attribute set"));
    }
    Ok(association_rows(emb, emb.row(wi), &a, &b, spec.similarity))
}

/// Cohen's d: difference of group means over the population standard
/// deviation of both groups together.
pub fn effect_size(sx: &[f64], sy: &[f64]) -> Result<f64> {
    if sx.is_empty() || sy.is_empty() {
        return Err(Error::EmptyInput("association scores"));
    }
    // sorted, so that swapping the groups flips the sign exactly
    let mut all: Vec<f64> = sx.iter().chain(sy).copied().collect();
    all.sort_by(f64::total_cmp);
    let std = stats::population_std(&all);
    if !(std > 0.0) {
        return Err(Error::DegenerateVariance);
    }
    Ok((stats::mean(sx) - stats::mean(sy)) / std)
}

/// Σ over `chosen` minus Σ over the rest, both summed in index order.
fn split_statistic(s: &[f64], chosen: &[bool]) -> f64 {
    let mut in_x = 0.0;
    let mut in_y = 0.0;
    for (v, &c) in s.iter().zip(chosen) {
        if c {
            in_x += v;
        } else {
            in_y += v;
        }
    }
    in_x - in_y
}

// Relative slack so that splits equal to the observed one in exact
// arithmetic are not lost to rounding.
fn at_least(stat: f64, observed: f64) -> bool {
    stat >= observed - 1e-12 * observed.abs().max(1.0)
}

pub(crate) fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut c: u128 = 1;
    for i in 0..k {
        c = c.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    c
}

fn exact_count(s: &[f64], k: usize, observed: f64) -> u64 {
    let n = s.len();
    let mut idx: Vec<usize> = (0..k).collect();
    let mut chosen = vec![false; n];
    let mut count = 0;
    loop {
        chosen.iter_mut().for_each(|c| *c = false);
        for &i in &idx {
            chosen[i] = true;
        }
        if at_least(split_statistic(s, &chosen), observed) {
            count += 1;
        }
        // next combination in lexicographic order
        let mut i = k;
        loop {
            if i == 0 {
                return count;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

const MC_CHUNK: u64 = 4096;

fn monte_carlo_count(s: &[f64], k: usize, observed: f64, samples: u64, seed: u64) -> u64 {
    let chunks = samples.div_ceil(MC_CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let todo = MC_CHUNK.min(samples - chunk * MC_CHUNK);
            let mut perm: Vec<usize> = (0..s.len()).collect();
            let mut chosen = vec![false; s.len()];
            let mut count = 0;
            for _ in 0..todo {
                perm.shuffle(&mut rng);
                chosen.iter_mut().for_each(|c| *c = false);
                for &i in &perm[..k] {
                    chosen[i] = true;
                }
                if at_least(split_statistic(s, &chosen), observed) {
                    count += 1;
                }
            }
            count
        })
        .sum()
}

/// Test statistic, Cohen's d and the one-sided permutation p-value.
pub fn weat_test(spec: &WeatSpec, emb: &EmbeddingSet, opts: WeatOptions) -> Result<WeatResult> {
    spec.validate()?;
    spec.similarity.check_space(emb)?;
    if opts.max_permutations == 0 {
        return Err(Error::InvalidConfig("max_permutations must be positive".into()));
    }
    let x = resolve(emb, &spec.targets_x)?;
    let y = resolve(emb, &spec.targets_y)?;
    let a = resolve(emb, &spec.attributes_a)?;
    let b = resolve(emb, &spec.attributes_b)?;

    let s: Vec<f64> = x
        .iter()
        .chain(&y)
        .map(|&i| association_rows(emb, emb.row(i), &a, &b, spec.similarity))
        .collect();
    let k = x.len();
    let (sx, sy) = s.split_at(k);

    let effect_size_d = effect_size(sx, sy)?;

    let identity: Vec<bool> = (0..s.len()).map(|i| i < k).collect();
    let statistic = split_statistic(&s, &identity);

    let total = binomial(s.len() as u64, k as u64);
    let (count, used, exact) = if total <= opts.max_permutations as u128 {
        let total = total as u64;
        (exact_count(&s, k, statistic), total, true)
    } else {
        let n = opts.max_permutations;
        (monte_carlo_count(&s, k, statistic, n, opts.seed), n, false)
    };

    let associations = spec
        .targets_x
        .iter()
        .chain(&spec.targets_y)
        .cloned()
        .zip(s.iter().copied())
        .collect();
    Ok(WeatResult {
        name: spec.name.clone(),
        statistic,
        effect_size_d,
        p_value: count as f64 / used as f64,
        permutations_used: used,
        exact,
        similarity: spec.similarity,
        associations,
    })
}
