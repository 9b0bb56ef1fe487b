//! Gyrovector algebra on the Poincaré ball of curvature -1.
//!
//! Points live in the open unit ball `{x : ‖x‖ < 1}` with the conformal
//! metric `λ_x² I`, `λ_x = 2 / (1 - ‖x‖²)`. Every operation that produces a
//! point passes its result through [`project_to_ball`], so results always
//! satisfy `‖x‖ ≤ 1 - BALL_EPS`.
//!
//! The typed functions validate dimensions and return [`Result`]. The
//! [`raw`] submodule holds the slice kernels the optimizers use in their
//! inner loops.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Margin kept between projected points and the ball boundary.
pub const BALL_EPS: f64 = 1e-5;

/// Gyrovectors with value norm at or below this have no direction.
pub const ZERO_EPS: f64 = 1e-12;

/// Dimension from which squared norms and dot products switch to
/// compensated summation.
const COMPENSATED_FROM: usize = 64;

/// Slice-level kernels. Inputs are assumed to be valid ball points of equal
/// length; no projection is applied unless stated.
pub mod raw {
    use super::{BALL_EPS, COMPENSATED_FROM};

    /// Euclidean inner product, Neumaier-compensated for long vectors.
    pub fn dot(x: &[f64], y: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), y.len());
        if x.len() < COMPENSATED_FROM {
            return x.iter().zip(y).map(|(a, b)| a * b).sum();
        }
        let mut sum = 0.0f64;
        let mut comp = 0.0f64;
        for (a, b) in x.iter().zip(y) {
            let term = a * b;
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
        }
        sum + comp
    }

    pub fn norm_sq(x: &[f64]) -> f64 {
        dot(x, x)
    }

    pub fn norm(x: &[f64]) -> f64 {
        norm_sq(x).sqrt()
    }

    pub fn neg(x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| -v).collect()
    }

    /// `x ⊕ y` with c = 1.
    pub fn mobius_add(x: &[f64], y: &[f64]) -> Vec<f64> {
        let xy = dot(x, y);
        let x2 = norm_sq(x);
        let y2 = norm_sq(y);
        let coef_x = 1.0 + 2.0 * xy + y2;
        let coef_y = 1.0 - x2;
        let denom = 1.0 + 2.0 * xy + x2 * y2;
        x.iter()
            .zip(y)
            .map(|(a, b)| (coef_x * a + coef_y * b) / denom)
            .collect()
    }

    /// `x ⊖ y = x ⊕ (-y)`.
    pub fn mobius_sub(x: &[f64], y: &[f64]) -> Vec<f64> {
        mobius_add(x, &neg(y))
    }

    /// `r ⊗ x`; the origin maps to itself.
    pub fn mobius_scalar_mul(r: f64, x: &[f64]) -> Vec<f64> {
        let n = norm(x);
        if n == 0.0 {
            return vec![0.0; x.len()];
        }
        let scale = (r * n.atanh()).tanh() / n;
        x.iter().map(|v| v * scale).collect()
    }

    /// `gyr[a, b] z = ⊖(a ⊕ b) ⊕ (a ⊕ (b ⊕ z))`.
    pub fn gyr(a: &[f64], b: &[f64], z: &[f64]) -> Vec<f64> {
        let ab = project(mobius_add(a, b));
        let bz = project(mobius_add(b, z));
        let a_bz = project(mobius_add(a, &bz));
        project(mobius_add(&neg(&ab), &a_bz))
    }

    /// Closed form of `gyr[u, v] w`, linear in `w`; `w` need not lie in the ball.
    pub fn gyr_linear(u: &[f64], v: &[f64], w: &[f64]) -> Vec<f64> {
        let u2 = norm_sq(u);
        let v2 = norm_sq(v);
        let uv = dot(u, v);
        let uw = dot(u, w);
        let vw = dot(v, w);
        let a = -uw * v2 + vw + 2.0 * uv * vw;
        let b = -vw * u2 - uw;
        let d = 1.0 + 2.0 * uv + u2 * v2;
        w.iter()
            .zip(u.iter().zip(v))
            .map(|(wi, (ui, vi))| wi + 2.0 * (a * ui + b * vi) / d)
            .collect()
    }

    /// Parallel transport of `v` from `T_x` to `T_y`:
    /// `(λ_x / λ_y) gyr[y, ⊖x] v`.
    pub fn parallel_transport(x: &[f64], y: &[f64], v: &[f64]) -> Vec<f64> {
        let ratio = conformal_factor(x) / conformal_factor(y);
        gyr_linear(y, &neg(x), v)
            .into_iter()
            .map(|c| c * ratio)
            .collect()
    }

    pub fn conformal_factor(x: &[f64]) -> f64 {
        2.0 / (1.0 - norm_sq(x))
    }

    /// `‖⊖x ⊕ y‖`, evaluated through the closed form
    /// `‖x - y‖ / sqrt(1 - 2⟨x,y⟩ + ‖x‖²‖y‖²)`, which is symmetric in its
    /// arguments and avoids forming the Möbius sum.
    pub fn gyro_norm_between(x: &[f64], y: &[f64]) -> f64 {
        let diff_sq: f64 = {
            let d: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
            norm_sq(&d)
        };
        let denom = 1.0 - 2.0 * dot(x, y) + norm_sq(x) * norm_sq(y);
        (diff_sq / denom).sqrt()
    }

    pub fn distance(x: &[f64], y: &[f64]) -> f64 {
        let g = gyro_norm_between(x, y).min(1.0 - f64::EPSILON);
        2.0 * g.atanh()
    }

    /// `exp_x(v) = x ⊕ tanh(λ_x‖v‖/2) v/‖v‖`, projected.
    pub fn exp_map(x: &[f64], v: &[f64]) -> Vec<f64> {
        let vn = norm(v);
        if vn == 0.0 {
            return x.to_vec();
        }
        let lambda = conformal_factor(x);
        let scale = (lambda * vn / 2.0).tanh() / vn;
        let step: Vec<f64> = v.iter().map(|c| c * scale).collect();
        project(mobius_add(x, &step))
    }

    /// `log_x(y) = (2/λ_x) atanh(‖u‖) u/‖u‖` with `u = ⊖x ⊕ y`.
    pub fn log_map(x: &[f64], y: &[f64]) -> Vec<f64> {
        let u = mobius_add(&neg(x), y);
        let un = norm(&u);
        if un == 0.0 {
            return vec![0.0; x.len()];
        }
        let lambda = conformal_factor(x);
        let scale = 2.0 / lambda * un.min(1.0 - f64::EPSILON).atanh() / un;
        u.iter().map(|c| c * scale).collect()
    }

    /// Radial clamp to `‖x‖ ≤ 1 - BALL_EPS`.
    pub fn project(mut x: Vec<f64>) -> Vec<f64> {
        let n = norm(&x);
        let max = 1.0 - BALL_EPS;
        if n > max {
            let s = max / n;
            x.iter_mut().for_each(|c| *c *= s);
        }
        x
    }

    /// Cosine of the angle between two vectors; `None` if either is (near) zero.
    pub fn cosine(u: &[f64], v: &[f64]) -> Option<f64> {
        let nu = norm(u);
        let nv = norm(v);
        if nu <= super::ZERO_EPS || nv <= super::ZERO_EPS {
            return None;
        }
        Some((dot(u, v) / (nu * nv)).clamp(-1.0, 1.0))
    }
}

fn check_finite(coords: &[f64]) -> Result<()> {
    match coords.iter().position(|c| !c.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// A point strictly inside the unit ball.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PoincarePoint {
    coords: Vec<f64>,
}

impl PoincarePoint {
    /// Validates finiteness and `‖coords‖ < 1`.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        check_finite(&coords)?;
        let norm = raw::norm(&coords);
        if norm >= 1.0 {
            return Err(Error::NotInBall { norm });
        }
        Ok(Self { coords })
    }

    pub fn origin(dim: usize) -> Self {
        Self {
            coords: vec![0.0; dim],
        }
    }

    /// Wraps coordinates already known to satisfy the ball invariant.
    pub(crate) fn from_valid(coords: Vec<f64>) -> Self {
        debug_assert!(raw::norm(&coords) < 1.0);
        Self { coords }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn norm(&self) -> f64 {
        raw::norm(&self.coords)
    }

    pub fn is_origin(&self) -> bool {
        self.coords.iter().all(|&c| c == 0.0)
    }
}

impl TryFrom<Vec<f64>> for PoincarePoint {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Self::new(coords)
    }
}

impl From<PoincarePoint> for Vec<f64> {
    fn from(p: PoincarePoint) -> Self {
        p.coords
    }
}

/// The gyrovector `⊖tail ⊕ head`, with its value cached.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedGyrovector {
    tail: PoincarePoint,
    head: PoincarePoint,
    value: Vec<f64>,
}

impl RootedGyrovector {
    pub fn new(tail: PoincarePoint, head: PoincarePoint) -> Result<Self> {
        check_dims(tail.dim(), head.dim())?;
        let value = raw::mobius_add(&raw::neg(&tail.coords), &head.coords);
        Ok(Self { tail, head, value })
    }

    /// `O ⊕ z`: the gyrovector from the origin to `head`. Its value is `head`.
    pub fn from_origin(head: PoincarePoint) -> Self {
        let tail = PoincarePoint::origin(head.dim());
        let value = head.coords.clone();
        Self { tail, head, value }
    }

    pub fn tail(&self) -> &PoincarePoint {
        &self.tail
    }

    pub fn head(&self) -> &PoincarePoint {
        &self.head
    }

    pub fn value(&self) -> &[f64] {
        &self.value
    }

    pub fn norm(&self) -> f64 {
        raw::norm(&self.value)
    }

    /// The gyrovector with tail and head swapped.
    pub fn reversed(&self) -> Result<Self> {
        Self::new(self.head.clone(), self.tail.clone())
    }
}

/// A tangent vector at `base`, in ambient coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    base: PoincarePoint,
    components: Vec<f64>,
}

impl TangentVector {
    pub fn new(base: PoincarePoint, components: Vec<f64>) -> Result<Self> {
        check_dims(base.dim(), components.len())?;
        check_finite(&components)?;
        Ok(Self { base, components })
    }

    pub fn zero(base: PoincarePoint) -> Self {
        let components = vec![0.0; base.dim()];
        Self { base, components }
    }

    pub fn base(&self) -> &PoincarePoint {
        &self.base
    }

    pub fn components(&self) -> &[f64] {
        &self.components
    }

    pub fn into_components(self) -> Vec<f64> {
        self.components
    }

    /// Euclidean norm of the components.
    pub fn norm(&self) -> f64 {
        raw::norm(&self.components)
    }

    /// Norm under the ball metric at the base point, `λ_x ‖v‖`.
    pub fn riemannian_norm(&self) -> f64 {
        conformal_factor(&self.base) * self.norm()
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            base: self.base.clone(),
            components: self.components.iter().map(|c| c * s).collect(),
        }
    }
}

pub fn mobius_add(x: &PoincarePoint, y: &PoincarePoint) -> Result<PoincarePoint> {
    check_dims(x.dim(), y.dim())?;
    Ok(PoincarePoint::from_valid(raw::project(raw::mobius_add(
        &x.coords, &y.coords,
    ))))
}

pub fn mobius_neg(x: &PoincarePoint) -> PoincarePoint {
    PoincarePoint::from_valid(raw::neg(&x.coords))
}

pub fn mobius_sub(a: &PoincarePoint, z: &PoincarePoint) -> Result<PoincarePoint> {
    mobius_add(a, &mobius_neg(z))
}

/// The gyration `gyr[a, b] z`.
pub fn gyr(a: &PoincarePoint, b: &PoincarePoint, z: &PoincarePoint) -> Result<PoincarePoint> {
    check_dims(a.dim(), b.dim())?;
    check_dims(a.dim(), z.dim())?;
    Ok(PoincarePoint::from_valid(raw::gyr(
        &a.coords, &b.coords, &z.coords,
    )))
}

pub fn mobius_scalar_mul(r: f64, x: &PoincarePoint) -> Result<PoincarePoint> {
    if !r.is_finite() {
        return Err(Error::InvalidConfig(format!("scalar {r} is not finite")));
    }
    Ok(PoincarePoint::from_valid(raw::project(
        raw::mobius_scalar_mul(r, &x.coords),
    )))
}

/// Geodesic distance `2 atanh(‖⊖x ⊕ y‖)`.
pub fn poincare_distance(x: &PoincarePoint, y: &PoincarePoint) -> Result<f64> {
    check_dims(x.dim(), y.dim())?;
    Ok(raw::distance(&x.coords, &y.coords))
}

/// Cosine of the gyroangle between two rooted gyrovectors, clamped to [-1, 1].
pub fn gyrocosine(u: &RootedGyrovector, v: &RootedGyrovector) -> Result<f64> {
    check_dims(u.value.len(), v.value.len())?;
    raw::cosine(&u.value, &v.value).ok_or(Error::ZeroGyrovector)
}

pub fn conformal_factor(x: &PoincarePoint) -> f64 {
    raw::conformal_factor(&x.coords)
}

pub fn exp_map(x: &PoincarePoint, v: &TangentVector) -> Result<PoincarePoint> {
    check_dims(x.dim(), v.components.len())?;
    if v.base != *x {
        return Err(Error::BaseMismatch);
    }
    Ok(PoincarePoint::from_valid(raw::exp_map(
        &x.coords,
        &v.components,
    )))
}

pub fn log_map(x: &PoincarePoint, y: &PoincarePoint) -> Result<TangentVector> {
    check_dims(x.dim(), y.dim())?;
    Ok(TangentVector {
        base: x.clone(),
        components: raw::log_map(&x.coords, &y.coords),
    })
}

/// Moves a tangent vector at `v.base()` to the tangent space at `to`
/// along the connecting geodesic.
pub fn parallel_transport(v: &TangentVector, to: &PoincarePoint) -> Result<TangentVector> {
    check_dims(v.base.dim(), to.dim())?;
    Ok(TangentVector {
        base: to.clone(),
        components: raw::parallel_transport(&v.base.coords, &to.coords, &v.components),
    })
}

/// Radially clamps a finite vector into the ball.
pub fn project_to_ball(x: Vec<f64>) -> Result<PoincarePoint> {
    check_finite(&x)?;
    Ok(PoincarePoint::from_valid(raw::project(x)))
}
