//! Riemannian SGD and Riemannian Adam on the Poincaré ball.
//!
//! Objectives hand the optimizers Euclidean gradients; the optimizers rescale
//! them by the inverse metric `1/λ_x² = ((1 - ‖x‖²)/2)²` and step along
//! geodesics with the exponential map.

use crate::error::{Error, Result};
use crate::geometry::{raw, PoincarePoint, TangentVector};

/// Step used by [`finite_difference_grad`].
pub const FD_STEP: f64 = 1e-6;

/// A scalar function on the ball with a Euclidean gradient.
pub trait Objective {
    fn value(&self, x: &[f64]) -> f64;

    /// Gradient with respect to the ambient coordinates. Defaults to central
    /// differences with step [`FD_STEP`].
    fn euclidean_grad(&self, x: &[f64]) -> Vec<f64> {
        finite_difference_grad(|p| self.value(p), x, FD_STEP)
    }
}

/// Central-difference gradient of `f` at `x`.
pub fn finite_difference_grad(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = probe[i];
            probe[i] = orig + h;
            let up = f(&probe);
            probe[i] = orig - h;
            let down = f(&probe);
            probe[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// A gradient attached to a point. `rescaled` records whether the inverse
/// metric has already been applied to the components.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannianGradient {
    tangent: TangentVector,
    rescaled: bool,
}

impl RiemannianGradient {
    pub fn new(tangent: TangentVector, rescaled: bool) -> Self {
        Self { tangent, rescaled }
    }

    pub fn tangent(&self) -> &TangentVector {
        &self.tangent
    }

    pub fn is_rescaled(&self) -> bool {
        self.rescaled
    }

    pub fn components(&self) -> &[f64] {
        self.tangent.components()
    }

    /// Applies the inverse metric if it has not been applied yet.
    pub fn into_rescaled(self) -> Self {
        if self.rescaled {
            return self;
        }
        let factor = inverse_metric_factor(self.tangent.base().coords());
        Self {
            tangent: self.tangent.scaled(factor),
            rescaled: true,
        }
    }
}

fn inverse_metric_factor(x: &[f64]) -> f64 {
    let half = (1.0 - raw::norm_sq(x)) / 2.0;
    half * half
}

/// Converts a Euclidean gradient at `x` into the Riemannian gradient.
pub fn euclidean_to_riemannian_grad(x: &PoincarePoint, g_euc: &[f64]) -> Result<RiemannianGradient> {
    let factor = inverse_metric_factor(x.coords());
    let comps = g_euc.iter().map(|g| g * factor).collect();
    Ok(RiemannianGradient {
        tangent: TangentVector::new(x.clone(), comps)?,
        rescaled: true,
    })
}

fn check_base(x: &PoincarePoint, g: &RiemannianGradient) -> Result<()> {
    if x.dim() != g.tangent.base().dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: g.tangent.base().dim(),
        });
    }
    if g.tangent.base() != x {
        return Err(Error::BaseMismatch);
    }
    Ok(())
}

/// One Riemannian SGD step, `exp_x(-α g)`.
pub fn rsgd_step(x: &PoincarePoint, g: &RiemannianGradient, lr: f64) -> Result<PoincarePoint> {
    if !(lr > 0.0 && lr.is_finite()) {
        return Err(Error::InvalidConfig(format!("learning rate must be positive, got {lr}")));
    }
    check_base(x, g)?;
    let g = g.clone().into_rescaled();
    let step: Vec<f64> = g.components().iter().map(|c| -lr * c).collect();
    Ok(PoincarePoint::from_valid(raw::exp_map(x.coords(), &step)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 3e-4,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn with_learning_rate(learning_rate: f64) -> Self {
        Self {
            learning_rate,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.learning_rate > 0.0
            && self.learning_rate.is_finite()
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.eps > 0.0;
        if !ok {
            return Err(Error::InvalidConfig(format!("bad Adam settings: {self:?}")));
        }
        Ok(())
    }
}

/// Moment estimates of one Riemannian Adam run.
///
/// The first moment lives in the tangent space of the current iterate and
/// is parallel-transported along each step. The second moment is a single
/// scalar: an EMA of the squared metric norm `λ_x² ‖g‖²` of the Riemannian
/// gradient, which keeps the update equivariant under rotations of the ball.
/// With this normalization a step moves roughly `learning_rate` in geodesic
/// distance.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    step: u64,
    m: TangentVector,
    v: f64,
    config: AdamConfig,
}

impl AdamState {
    pub fn new(start: &PoincarePoint, config: AdamConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            step: 0,
            m: TangentVector::zero(start.clone()),
            v: 0.0,
            config,
        })
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn first_moment(&self) -> &TangentVector {
        &self.m
    }

    pub fn second_moment(&self) -> f64 {
        self.v
    }

    pub fn config(&self) -> &AdamConfig {
        &self.config
    }
}

/// One Riemannian Adam step from `x`. Updates `state` in place and returns
/// the new iterate.
pub fn radam_step(state: &mut AdamState, x: &PoincarePoint, g: &RiemannianGradient) -> Result<PoincarePoint> {
    check_base(x, g)?;
    if state.m.base() != x {
        return Err(Error::BaseMismatch);
    }
    let g = g.clone().into_rescaled();
    let AdamConfig {
        learning_rate,
        beta1,
        beta2,
        eps,
    } = state.config;

    let t = state.step + 1;
    let m: Vec<f64> = state
        .m
        .components()
        .iter()
        .zip(g.components())
        .map(|(m, g)| beta1 * m + (1.0 - beta1) * g)
        .collect();
    let lambda = raw::conformal_factor(x.coords());
    let v = beta2 * state.v + (1.0 - beta2) * lambda * lambda * raw::norm_sq(g.components());

    let m_hat_scale = 1.0 / (1.0 - beta1.powi(t as i32));
    let v_hat = v / (1.0 - beta2.powi(t as i32));
    let denom = v_hat.sqrt() + eps;
    let step: Vec<f64> = m
        .iter()
        .map(|c| -learning_rate * c * m_hat_scale / denom)
        .collect();

    let next = raw::exp_map(x.coords(), &step);
    let m_moved = raw::parallel_transport(x.coords(), &next, &m);
    let next = PoincarePoint::from_valid(next);

    state.step = t;
    state.v = v;
    state.m = TangentVector::new(next.clone(), m_moved)?;
    Ok(next)
}
