//! Per-word gender debiasing by weighted-sum Riemannian optimization.
//!
//! For a gender-neutral word `w`, the debiased vector `w_d` minimizes
//!
//! ```text
//! λ₁ F_s(w_d) + λ₂ F_g(w_d)
//! F_s = |cos(w'_d, w') - 1| / 2                     (semantic offset)
//! F_g = |cos(w'_d, g_mf) - cos(w'_d, g_fm)| / 2     (gender asymmetry)
//! ```
//!
//! starting from `w` itself, with Riemannian Adam. Origin-rooted gyrovectors
//! have the point's own coordinates as their value, so both terms reduce to
//! Euclidean cosines of `w_d` against fixed directions and have closed-form
//! gradients.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bias::GenderGyrovectors;
use crate::embedding::{EmbeddingSet, WordClass};
use crate::error::{Error, Result};
use crate::geometry::{raw, PoincarePoint, ZERO_EPS};
use crate::optim::{euclidean_to_riemannian_grad, radam_step, AdamConfig, AdamState, Objective};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PgdConfig {
    /// Weight of the semantic-offset term.
    pub lambda1: f64,
    /// Weight of the gender term.
    pub lambda2: f64,
    pub learning_rate: f64,
    pub epochs: usize,
}

impl Default for PgdConfig {
    fn default() -> Self {
        Self {
            lambda1: 0.5,
            lambda2: 0.5,
            learning_rate: 3e-4,
            epochs: 350,
        }
    }
}

impl PgdConfig {
    pub fn validate(&self) -> Result<()> {
        let in_unit = |l: f64| (0.0..=1.0).contains(&l);
        if !in_unit(self.lambda1) || !in_unit(self.lambda2) || (self.lambda1 + self.lambda2 - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidConfig(format!(
                "objective weights must lie in [0, 1] and sum to 1, got {} and {}",
                self.lambda1, self.lambda2
            )));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

fn unit(v: &[f64]) -> Result<Vec<f64>> {
    let n = raw::norm(v);
    if n <= ZERO_EPS {
        return Err(Error::ZeroGyrovector);
    }
    Ok(v.iter().map(|c| c / n).collect())
}

/// `ĝ_mf - ĝ_fm`: F_g is half the absolute cosine-weighted projection onto it.
fn gender_axis(gv: &GenderGyrovectors) -> Result<Vec<f64>> {
    let a = unit(gv.g_mf.value())?;
    let b = unit(gv.g_fm.value())?;
    Ok(a.iter().zip(&b).map(|(a, b)| a - b).collect())
}

/// Gradient of `⟨ŵ, u⟩` with respect to `w`: `(u - ⟨ŵ,u⟩ ŵ) / ‖w‖`.
fn unit_dot_grad(w: &[f64], u: &[f64]) -> Vec<f64> {
    let n = raw::norm(w);
    let proj = raw::dot(w, u) / n;
    w.iter().zip(u).map(|(wi, ui)| (ui - proj * wi / n) / n).collect()
}

fn signum_or_zero(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// The scalarized objective for one word, precomputed for the inner loop.
#[derive(Debug, Clone)]
pub struct PgdObjective {
    original: Vec<f64>,
    anchor: Vec<f64>,
    axis: Vec<f64>,
    lambda1: f64,
    lambda2: f64,
}

impl PgdObjective {
    pub fn new(w_orig: &PoincarePoint, gv: &GenderGyrovectors, cfg: &PgdConfig) -> Result<Self> {
        Ok(Self {
            original: w_orig.coords().to_vec(),
            anchor: unit(w_orig.coords())?,
            axis: gender_axis(gv)?,
            lambda1: cfg.lambda1,
            lambda2: cfg.lambda2,
        })
    }

    // The anchor cosine is exactly 1 at the original point; rounding would
    // otherwise leave a ~1e-17 residual whose gradient Adam rescales to a
    // full-size step.
    fn cosines(&self, w: &[f64]) -> (f64, f64) {
        let n = raw::norm(w);
        let anchor = if w == self.original.as_slice() {
            1.0
        } else {
            raw::dot(w, &self.anchor) / n
        };
        (anchor, raw::dot(w, &self.axis) / n)
    }

    pub fn f_s(&self, w: &[f64]) -> f64 {
        (1.0 - self.cosines(w).0).abs() / 2.0
    }

    pub fn f_g(&self, w: &[f64]) -> f64 {
        self.cosines(w).1.abs() / 2.0
    }

    pub fn f_s_grad(&self, w: &[f64]) -> Vec<f64> {
        if w == self.original.as_slice() {
            return vec![0.0; w.len()];
        }
        unit_dot_grad(w, &self.anchor).into_iter().map(|g| -g / 2.0).collect()
    }

    pub fn f_g_grad(&self, w: &[f64]) -> Vec<f64> {
        let s = signum_or_zero(self.cosines(w).1) / 2.0;
        unit_dot_grad(w, &self.axis).into_iter().map(|g| s * g).collect()
    }
}

impl Objective for PgdObjective {
    fn value(&self, w: &[f64]) -> f64 {
        let (c_anchor, c_axis) = self.cosines(w);
        self.lambda1 * (1.0 - c_anchor).abs() / 2.0 + self.lambda2 * c_axis.abs() / 2.0
    }

    fn euclidean_grad(&self, w: &[f64]) -> Vec<f64> {
        let fs = self.f_s_grad(w);
        let fg = self.f_g_grad(w);
        fs.iter()
            .zip(&fg)
            .map(|(s, g)| self.lambda1 * s + self.lambda2 * g)
            .collect()
    }
}

/// Gender asymmetry of `wd`; equals `|γ(wd)|`.
pub fn f_g(wd: &PoincarePoint, gv: &GenderGyrovectors) -> Result<f64> {
    let w = unit(wd.coords())?;
    let axis = gender_axis(gv)?;
    Ok(raw::dot(&w, &axis).abs() / 2.0)
}

/// Semantic offset between `wd` and the original vector.
pub fn f_s(wd: &PoincarePoint, w_orig: &PoincarePoint) -> Result<f64> {
    let a = unit(wd.coords())?;
    let b = unit(w_orig.coords())?;
    if wd == w_orig {
        return Ok(0.0);
    }
    Ok((raw::dot(&a, &b) - 1.0).abs() / 2.0)
}

pub fn pgd_objective(wd: &PoincarePoint, w_orig: &PoincarePoint, gv: &GenderGyrovectors, cfg: &PgdConfig) -> Result<f64> {
    Ok(cfg.lambda1 * f_s(wd, w_orig)? + cfg.lambda2 * f_g(wd, gv)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DebiasOutcome {
    /// Filled in by [`debias_vocabulary`]; empty for standalone calls.
    pub word: String,
    pub original: PoincarePoint,
    pub debiased: PoincarePoint,
    pub f_g_before: f64,
    pub f_g_after: f64,
    pub f_s_after: f64,
    pub objective_before: f64,
    pub objective_after: f64,
    pub epochs_run: usize,
    /// Epoch whose iterate was kept (0 = the starting point).
    pub best_epoch: usize,
}

/// Runs the optimization for one word and returns the lowest-objective
/// iterate seen, so the objective never ends above its starting value.
pub fn debias_word(w_orig: &PoincarePoint, gv: &GenderGyrovectors, cfg: &PgdConfig) -> Result<DebiasOutcome> {
    cfg.validate()?;
    let objective = PgdObjective::new(w_orig, gv, cfg)?;
    let start_value = objective.value(w_orig.coords());
    let mut state = AdamState::new(w_orig, AdamConfig::with_learning_rate(cfg.learning_rate))?;
    let mut x = w_orig.clone();
    let mut best = (x.clone(), start_value, 0usize);

    for epoch in 1..=cfg.epochs {
        let egrad = objective.euclidean_grad(x.coords());
        let g = euclidean_to_riemannian_grad(&x, &egrad)?;
        x = radam_step(&mut state, &x, &g)?;
        if raw::norm(x.coords()) <= ZERO_EPS {
            break;
        }
        let f = objective.value(x.coords());
        if f < best.1 {
            best = (x.clone(), f, epoch);
        }
    }

    let (debiased, objective_after, best_epoch) = best;
    Ok(DebiasOutcome {
        word: String::new(),
        f_g_before: objective.f_g(w_orig.coords()),
        f_g_after: objective.f_g(debiased.coords()),
        f_s_after: objective.f_s(debiased.coords()),
        objective_before: start_value,
        objective_after,
        epochs_run: cfg.epochs,
        best_epoch,
        original: w_orig.clone(),
        debiased,
    })
}

/// One row of the debias report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordDebiasReport {
    pub word: String,
    pub f_g_before: f64,
    pub f_g_after: f64,
    pub f_s_after: f64,
    pub objective_before: f64,
    pub objective_after: f64,
    pub best_epoch: usize,
}

impl From<&DebiasOutcome> for WordDebiasReport {
    fn from(o: &DebiasOutcome) -> Self {
        Self {
            word: o.word.clone(),
            f_g_before: o.f_g_before,
            f_g_after: o.f_g_after,
            f_s_after: o.f_s_after,
            objective_before: o.objective_before,
            objective_after: o.objective_after,
            best_epoch: o.best_epoch,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DebiasSummary {
    pub specific_words: usize,
    pub neutral_words: usize,
    pub debiased_words: usize,
    pub changed_words: usize,
    /// Neutral words at the origin, passed through unchanged.
    pub skipped_zero: usize,
    pub mean_f_g_before: f64,
    pub mean_f_g_after: f64,
    pub mean_f_s_after: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DebiasReport {
    pub config: PgdConfig,
    pub summary: DebiasSummary,
    pub words: Vec<WordDebiasReport>,
}

/// Debiases every neutral word of `emb` in parallel. Gender-specific rows
/// are copied through untouched. Per-word results do not depend on how the
/// work is scheduled.
pub fn debias_vocabulary(emb: &EmbeddingSet, gv: &GenderGyrovectors, cfg: &PgdConfig) -> Result<(EmbeddingSet, DebiasReport)> {
    cfg.validate()?;
    let partition = emb.partition().ok_or(Error::MissingPartition)?;
    if gv.is_degenerate() {
        return Err(Error::ZeroGyrovector);
    }
    let neutral: Vec<usize> = partition
        .iter()
        .enumerate()
        .filter(|(_, c)| **c == WordClass::Neutral)
        .map(|(i, _)| i)
        .collect();

    let outcomes: Vec<Option<DebiasOutcome>> = neutral
        .par_iter()
        .map(|&i| -> Result<Option<DebiasOutcome>> {
            let row = emb.row(i);
            if raw::norm(row) <= ZERO_EPS {
                return Ok(None);
            }
            let mut out = debias_word(&PoincarePoint::new(row.to_vec())?, gv, cfg)?;
            out.word = emb.words()[i].clone();
            Ok(Some(out))
        })
        .collect::<Result<_>>()?;

    let mut result = emb.clone();
    let mut words = Vec::with_capacity(outcomes.len());
    let mut changed = 0;
    let mut skipped_zero = 0;
    for (&i, outcome) in neutral.iter().zip(&outcomes) {
        match outcome {
            Some(o) => {
                if o.debiased != o.original {
                    changed += 1;
                }
                result.set_row(i, o.debiased.coords())?;
                words.push(WordDebiasReport::from(o));
            }
            None => {
                log::warn!("neutral word {:?} is the zero vector; left unchanged", emb.words()[i]);
                skipped_zero += 1;
            }
        }
    }

    let col = |f: fn(&WordDebiasReport) -> f64| -> f64 {
        if words.is_empty() {
            0.0
        } else {
            stats::mean(&words.iter().map(f).collect::<Vec<_>>())
        }
    };
    let summary = DebiasSummary {
        specific_words: emb.len() - neutral.len(),
        neutral_words: neutral.len(),
        debiased_words: words.len(),
        changed_words: changed,
        skipped_zero,
        mean_f_g_before: col(|w| w.f_g_before),
        mean_f_g_after: col(|w| w.f_g_after),
        mean_f_s_after: col(|w| w.f_s_after),
    };
    Ok((
        result,
        DebiasReport {
            config: *cfg,
            summary,
            words,
        },
    ))
}
