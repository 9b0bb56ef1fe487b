//! Gender gyrovectors and the gyrocosine bias of individual words.
//!
//! The male and female definitional sets are summarized by their Karcher
//! means `μ_M`, `μ_F`. Because `⊕` is not commutative, both gyrovectors
//! `g_mf = ⊖μ_M ⊕ μ_F` and `g_fm = ⊖μ_F ⊕ μ_M` are kept. A word's bias is
//!
//! ```text
//! γ(w) = (cos(w', g_mf) - cos(w', g_fm)) / 2
//! ```
//!
//! with `w'` the gyrovector from the origin to `w`. Positive values lean
//! female, negative values lean male.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::embedding::EmbeddingSet;
use crate::error::{Error, Result};
use crate::geometry::{gyrocosine, raw, PoincarePoint, RootedGyrovector};
use crate::mean::{karcher_mean, KarcherMean, MeanConfig};
use crate::stats;

#[derive(Debug, Clone, PartialEq)]
pub struct GenderGyrovectors {
    pub mu_m: PoincarePoint,
    pub mu_f: PoincarePoint,
    pub g_mf: RootedGyrovector,
    pub g_fm: RootedGyrovector,
}

impl GenderGyrovectors {
    pub fn from_means(mu_m: PoincarePoint, mu_f: PoincarePoint) -> Result<Self> {
        let g_mf = RootedGyrovector::new(mu_m.clone(), mu_f.clone())?;
        let g_fm = RootedGyrovector::new(mu_f.clone(), mu_m.clone())?;
        Ok(Self { mu_m, mu_f, g_mf, g_fm })
    }

    /// Means of the given point sets, then gyrovectors between them. No
    /// minimum set size is enforced here.
    pub fn from_points(male: &[PoincarePoint], female: &[PoincarePoint], cfg: &MeanConfig) -> Result<Self> {
        let mu_m = karcher_mean(male, cfg)?;
        let mu_f = karcher_mean(female, cfg)?;
        Self::from_means(mu_m.point, mu_f.point)
    }

    /// The same pair with the roles of the two sets exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            mu_m: self.mu_f.clone(),
            mu_f: self.mu_m.clone(),
            g_mf: self.g_fm.clone(),
            g_fm: self.g_mf.clone(),
        }
    }

    pub fn is_degenerate(&self) -> bool {
        self.g_mf.norm() <= crate::geometry::ZERO_EPS || self.g_fm.norm() <= crate::geometry::ZERO_EPS
    }
}

/// Gender gyrovectors plus what went into them.
#[derive(Debug, Clone)]
pub struct GenderAxis {
    pub gyrovectors: GenderGyrovectors,
    pub male_mean: KarcherMean,
    pub female_mean: KarcherMean,
    pub male_used: Vec<String>,
    pub female_used: Vec<String>,
}

fn resolve_side(emb: &EmbeddingSet, words: &[String], side: &'static str) -> Result<(Vec<String>, Vec<PoincarePoint>)> {
    let mut used = Vec::new();
    let mut points = Vec::new();
    for w in words {
        match emb.vector(w) {
            Some(v) => {
                used.push(w.clone());
                points.push(PoincarePoint::new(v.to_vec())?);
            }
            None => log::warn!("{side} definitional word {w:?} not in vocabulary; skipped"),
        }
    }
    if points.len() < 2 {
        return Err(Error::InsufficientDefinitionalWords {
            side,
            found: points.len(),
        });
    }
    Ok((used, points))
}

/// Looks up both definitional sets (skipping missing words), takes their
/// Karcher means and forms the gender gyrovectors.
pub fn gender_gyrovectors(
    emb: &EmbeddingSet,
    male_words: &[String],
    female_words: &[String],
    cfg: &MeanConfig,
) -> Result<GenderAxis> {
    let (male_used, male) = resolve_side(emb, male_words, "male")?;
    let (female_used, female) = resolve_side(emb, female_words, "female")?;
    let male_mean = karcher_mean(&male, cfg)?;
    let female_mean = karcher_mean(&female, cfg)?;
    let gyrovectors = GenderGyrovectors::from_means(male_mean.point.clone(), female_mean.point.clone())?;
    Ok(GenderAxis {
        gyrovectors,
        male_mean,
        female_mean,
        male_used,
        female_used,
    })
}

pub fn gyrocosine_bias(w: &PoincarePoint, gv: &GenderGyrovectors) -> Result<f64> {
    let w_rooted = RootedGyrovector::from_origin(w.clone());
    let to_f = gyrocosine(&w_rooted, &gv.g_mf)?;
    let to_m = gyrocosine(&w_rooted, &gv.g_fm)?;
    Ok((to_f - to_m) / 2.0)
}

/// Signed cosine between a Euclidean word vector and a gender direction.
pub fn direct_bias_euclidean(w: &[f64], gender_dir: &[f64]) -> Result<f64> {
    if w.len() != gender_dir.len() {
        return Err(Error::DimensionMismatch {
            expected: gender_dir.len(),
            found: w.len(),
        });
    }
    raw::cosine(w, gender_dir).ok_or(Error::ZeroGyrovector)
}

/// `mean(female) - mean(male)` over the words present in a Euclidean set.
pub fn euclidean_gender_direction(emb: &EmbeddingSet, male_words: &[String], female_words: &[String]) -> Result<Vec<f64>> {
    let side_mean = |words: &[String], side: &'static str| -> Result<Vec<f64>> {
        let rows: Vec<&[f64]> = words.iter().filter_map(|w| emb.vector(w)).collect();
        if rows.len() < 2 {
            return Err(Error::InsufficientDefinitionalWords { side, found: rows.len() });
        }
        let mut acc = vec![0.0; emb.dim()];
        for r in &rows {
            for (a, v) in acc.iter_mut().zip(r.iter()) {
                *a += v;
            }
        }
        Ok(acc.into_iter().map(|a| a / rows.len() as f64).collect())
    };
    let m = side_mean(male_words, "male")?;
    let f = side_mean(female_words, "female")?;
    Ok(f.iter().zip(&m).map(|(f, m)| f - m).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Correlation {
    pub pearson: f64,
    pub spearman: f64,
    pub n: usize,
}

/// Pearson and Spearman correlation over the words both maps share.
pub fn bias_correlation(hyp_bias: &BTreeMap<String, f64>, euc_bias: &BTreeMap<String, f64>) -> Result<Correlation> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = hyp_bias
        .iter()
        .filter_map(|(w, h)| euc_bias.get(w).map(|e| (*h, *e)))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "bias correlation needs at least 3 shared words, found {}",
            xs.len()
        )));
    }
    Ok(Correlation {
        pearson: stats::pearson(&xs, &ys)?,
        spearman: stats::spearman(&xs, &ys)?,
        n: xs.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasEntry {
    pub word: String,
    pub gamma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direct_bias: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasSummary {
    pub count: usize,
    pub mean_abs: f64,
    pub max_abs: f64,
    pub threshold: f64,
    pub above_threshold: usize,
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasReport {
    pub entries: Vec<BiasEntry>,
    pub summary: BiasSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correlation: Option<Correlation>,
}

impl BiasReport {
    pub fn gammas(&self) -> BTreeMap<String, f64> {
        self.entries.iter().map(|e| (e.word.clone(), e.gamma)).collect()
    }

    /// `word<TAB>gamma`, plus a direct-bias column when present.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for e in &self.entries {
            match e.direct_bias {
                Some(d) => writeln!(out, "{}\t{:?}\t{:?}", e.word, e.gamma, d)?,
                None => writeln!(out, "{}\t{:?}", e.word, e.gamma)?,
            }
        }
        Ok(())
    }

    pub fn save_tsv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_tsv(std::io::BufWriter::new(file)).map_err(|e| Error::io(path, e))
    }
}

/// γ for every listed word present in `emb`. Words that are missing or sit
/// at the origin are skipped and counted.
pub fn bias_report<S: AsRef<str> + Sync>(
    words: &[S],
    emb: &EmbeddingSet,
    gv: &GenderGyrovectors,
    threshold: f64,
) -> Result<BiasReport> {
    if gv.is_degenerate() {
        return Err(Error::ZeroGyrovector);
    }
    let results: Vec<Option<BiasEntry>> = words
        .par_iter()
        .map(|w| {
            let w = w.as_ref();
            let v = emb.vector(w)?;
            let p = PoincarePoint::new(v.to_vec()).ok()?;
            let gamma = gyrocosine_bias(&p, gv).ok()?;
            Some(BiasEntry {
                word: w.to_string(),
                gamma,
                direct_bias: None,
            })
        })
        .collect();
    let skipped = results.iter().filter(|r| r.is_none()).count();
    if skipped > 0 {
        log::warn!("{skipped} word(s) skipped: not in vocabulary or at the origin");
    }
    let entries: Vec<BiasEntry> = results.into_iter().flatten().collect();
    let abs: Vec<f64> = entries.iter().map(|e| e.gamma.abs()).collect();
    let summary = BiasSummary {
        count: entries.len(),
        mean_abs: if abs.is_empty() { 0.0 } else { stats::mean(&abs) },
        max_abs: abs.iter().copied().fold(0.0, f64::max),
        threshold,
        above_threshold: abs.iter().filter(|&&a| a > threshold).count(),
        skipped,
    };
    Ok(BiasReport {
        entries,
        summary,
        correlation: None,
    })
}

/// Adds a per-word Euclidean direct-bias column and the correlation
/// between the two bias measures.
pub fn attach_direct_bias(report: &mut BiasReport, euclidean: &EmbeddingSet, gender_dir: &[f64], absolute: bool) -> Result<()> {
    let mut euc = BTreeMap::new();
    for e in &mut report.entries {
        e.direct_bias = match euclidean.vector(&e.word) {
            Some(v) => match direct_bias_euclidean(v, gender_dir) {
                Ok(d) => Some(if absolute { d.abs() } else { d }),
                Err(Error::ZeroGyrovector) => None,
                Err(other) => return Err(other),
            },
            None => None,
        };
        if let Some(d) = e.direct_bias {
            euc.insert(e.word.clone(), d);
        }
    }
    let hyp: BTreeMap<String, f64> = report
        .entries
        .iter()
        .map(|e| (e.word.clone(), if absolute { e.gamma.abs() } else { e.gamma }))
        .collect();
    report.correlation = Some(bias_correlation(&hyp, &euc)?);
    Ok(())
}
