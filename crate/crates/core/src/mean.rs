//! Karcher (Fréchet) mean on the Poincaré ball: the minimizer of the sum of
//! squared geodesic distances to a point set, found with Riemannian Adam
//! from the projected arithmetic mean.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{raw, PoincarePoint};
use crate::optim::{euclidean_to_riemannian_grad, radam_step, AdamConfig, AdamState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanConfig {
    pub learning_rate: f64,
    pub max_epochs: usize,
    /// Stop once the metric norm of the Riemannian gradient drops to this.
    pub tol: f64,
}

impl Default for MeanConfig {
    fn default() -> Self {
        Self {
            learning_rate: 3e-4,
            max_epochs: 2000,
            tol: 1e-8,
        }
    }
}

impl MeanConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "mean learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "mean tolerance must be positive, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// Result of [`karcher_mean`], with enough metadata to audit convergence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KarcherMean {
    pub point: PoincarePoint,
    pub converged: bool,
    pub epochs: usize,
    /// Metric norm of the Riemannian gradient at `point`.
    pub grad_norm: f64,
    pub objective: f64,
    pub initial_objective: f64,
}

/// `Σ d(μ, xᵢ)²`.
pub fn karcher_objective(mu: &[f64], points: &[PoincarePoint]) -> f64 {
    points
        .iter()
        .map(|p| raw::distance(mu, p.coords()).powi(2))
        .sum()
}

/// Riemannian gradient `-2 Σ log_μ(xᵢ)` of [`karcher_objective`].
pub fn karcher_riemannian_grad(mu: &[f64], points: &[PoincarePoint]) -> Vec<f64> {
    let mut grad = vec![0.0; mu.len()];
    for p in points {
        for (g, l) in grad.iter_mut().zip(raw::log_map(mu, p.coords())) {
            *g -= 2.0 * l;
        }
    }
    grad
}

/// Euclidean gradient of [`karcher_objective`]: `λ_μ²` times the Riemannian one.
pub fn karcher_euclidean_grad(mu: &[f64], points: &[PoincarePoint]) -> Vec<f64> {
    let lambda = raw::conformal_factor(mu);
    karcher_riemannian_grad(mu, points)
        .into_iter()
        .map(|g| g * lambda * lambda)
        .collect()
}

fn metric_norm(mu: &[f64], g: &[f64]) -> f64 {
    raw::conformal_factor(mu) * raw::norm(g)
}

pub fn karcher_mean(points: &[PoincarePoint], cfg: &MeanConfig) -> Result<KarcherMean> {
    cfg.validate()?;
    let first = points.first().ok_or(Error::EmptyInput("karcher_mean needs at least one point"))?;
    let dim = first.dim();
    if let Some(bad) = points.iter().find(|p| p.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.dim(),
        });
    }

    let mut start = vec![0.0; dim];
    for p in points {
        for (s, c) in start.iter_mut().zip(p.coords()) {
            *s += c;
        }
    }
    let k = points.len() as f64;
    start.iter_mut().for_each(|s| *s /= k);
    let start = PoincarePoint::from_valid(raw::project(start));

    let initial_objective = karcher_objective(start.coords(), points);
    let mut state = AdamState::new(&start, AdamConfig::with_learning_rate(cfg.learning_rate))?;
    let mut x = start;
    let mut best = (x.clone(), initial_objective);
    let mut converged = false;
    let mut epochs = 0;

    while epochs < cfg.max_epochs {
        let rgrad = karcher_riemannian_grad(x.coords(), points);
        if metric_norm(x.coords(), &rgrad) <= cfg.tol {
            converged = true;
            break;
        }
        let lambda = raw::conformal_factor(x.coords());
        let egrad: Vec<f64> = rgrad.iter().map(|g| g * lambda * lambda).collect();
        let g = euclidean_to_riemannian_grad(&x, &egrad)?;
        x = radam_step(&mut state, &x, &g)?;
        epochs += 1;
        let f = karcher_objective(x.coords(), points);
        if f < best.1 {
            best = (x.clone(), f);
        }
    }

    let (point, objective) = best;
    let grad_norm = metric_norm(point.coords(), &karcher_riemannian_grad(point.coords(), points));
    if !converged {
        converged = grad_norm <= cfg.tol;
    }
    if !converged {
        log::debug!("karcher mean stopped after {epochs} epochs with gradient norm {grad_norm:e}");
    }
    Ok(KarcherMean {
        point,
        converged,
        epochs,
        grad_norm,
        objective,
        initial_objective,
    })
}
