//! Library of smooth star bodies with analytic derivatives and bounds.

use alloc::format;
use alloc::vec::Vec;

use crate::field::{RadialBounds, RadialField, Smoothness, SphereFunction};
use crate::harmonics::RealHarmonic;
use crate::linalg;
use crate::sphere::{check_dim, MAX_DIM};
use crate::{Error, Result};

struct Ball {
    dim: usize,
    radius: f64,
}

impl SphereFunction for Ball {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, _x: &[f64]) -> f64 {
        self.radius
    }

    fn tangent_derivative(&self, _x: &[f64], _v: &[f64]) -> Option<f64> {
        Some(0.0)
    }
}

/// Ball of radius `radius` centred at the origin.
pub fn ball(n: usize, radius: f64) -> Result<RadialField> {
    check_dim(n)?;
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
    }
    let bounds = RadialBounds {
        rho_min: Some(radius),
        rho_max: Some(radius),
        lipschitz: Some(0.0),
    };
    RadialField::new(Ball { dim: n, radius }, bounds, Smoothness::C1, format!("ball(r={radius})"))
}

struct ShiftedBall {
    center: [f64; MAX_DIM],
    dim: usize,
    /// `R² − |c|²`
    slack: f64,
}

impl ShiftedBall {
    fn root(&self, s: f64) -> f64 {
        libm::sqrt(self.slack + s * s)
    }
}

impl SphereFunction for ShiftedBall {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        let s = linalg::dot(x, &self.center[..self.dim]);
        s + self.root(s)
    }

    fn tangent_derivative(&self, x: &[f64], v: &[f64]) -> Option<f64> {
        let c = &self.center[..self.dim];
        let s = linalg::dot(x, c);
        Some(linalg::dot(v, c) * (1.0 + s / self.root(s)))
    }
}

/// Ball of radius `radius` centred at `center`, `|center| < radius`:
/// `ρ(u) = ⟨u,c⟩ + √(R² − |c|² + ⟨u,c⟩²)`.
pub fn shifted_ball(radius: f64, center: &[f64]) -> Result<RadialField> {
    let n = center.len();
    check_dim(n)?;
    let offset = linalg::norm(center);
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {radius}")));
    }
    if !(offset < radius) {
        return Err(Error::InvalidParameter(format!(
            "center norm {offset} must be below the radius {radius} so that 0 is interior"
        )));
    }
    let mut c = [0.0; MAX_DIM];
    c[..n].copy_from_slice(center);
    let slack = radius * radius - offset * offset;
    // |dρ| ≤ |c| · ρ / √(R² − |c|²) along unit tangents.
    let lipschitz = offset * (radius + offset) / libm::sqrt(slack);
    let bounds = RadialBounds {
        rho_min: Some(radius - offset),
        rho_max: Some(radius + offset),
        lipschitz: Some(lipschitz),
    };
    RadialField::new(
        ShiftedBall { center: c, dim: n, slack },
        bounds,
        Smoothness::C1,
        format!("shifted_ball(r={radius}, c={center:?})"),
    )
}

struct Ellipsoid {
    dim: usize,
    /// `1 / a_i²`
    inv_sq: [f64; MAX_DIM],
}

impl Ellipsoid {
    fn quadric(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.inv_sq).map(|(u, w)| w * u * u).sum()
    }
}

impl SphereFunction for Ellipsoid {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        1.0 / libm::sqrt(self.quadric(x))
    }

    fn tangent_derivative(&self, x: &[f64], v: &[f64]) -> Option<f64> {
        let q = self.quadric(x);
        let dq: f64 = x.iter().zip(v).zip(&self.inv_sq).map(|((u, t), w)| w * u * t).sum();
        Some(-dq / (q * libm::sqrt(q)))
    }
}

/// Axis-aligned ellipsoid `Σ x_i² / a_i² ≤ 1`.
pub fn ellipsoid(semiaxes: &[f64]) -> Result<RadialField> {
    let n = semiaxes.len();
    check_dim(n)?;
    if let Some(a) = semiaxes.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
        return Err(Error::InvalidParameter(format!("semiaxes must be positive, got {a}")));
    }
    let mut inv_sq = [0.0; MAX_DIM];
    for (w, a) in inv_sq.iter_mut().zip(semiaxes) {
        *w = 1.0 / (a * a);
    }
    let a_min = semiaxes.iter().copied().fold(f64::INFINITY, f64::min);
    let a_max = semiaxes.iter().copied().fold(0.0, f64::max);
    // Tangential gradient of the quadric is at most (1/a_min² − 1/a_max²);
    // dρ = −q^{-3/2} dq / 2 with q ≥ 1/a_max².
    let spread = 1.0 / (a_min * a_min) - 1.0 / (a_max * a_max);
    let lipschitz = 0.5 * a_max * a_max * a_max * spread;
    let bounds = RadialBounds {
        rho_min: Some(a_min),
        rho_max: Some(a_max),
        lipschitz: Some(lipschitz),
    };
    let axes: Vec<f64> = semiaxes.to_vec();
    RadialField::new(
        Ellipsoid { dim: n, inv_sq },
        bounds,
        Smoothness::C1,
        format!("ellipsoid(a={axes:?})"),
    )
}

struct HarmonicBall {
    y: RealHarmonic,
    epsilon: f64,
}

impl SphereFunction for HarmonicBall {
    fn dim(&self) -> usize {
        3
    }

    fn value(&self, x: &[f64]) -> f64 {
        1.0 + self.epsilon * self.y.value(x)
    }

    fn tangent_derivative(&self, x: &[f64], v: &[f64]) -> Option<f64> {
        self.y.tangent_derivative(x, v).map(|d| self.epsilon * d)
    }
}

/// `ρ = 1 + ε Y_{ℓ,m}` in ℝ³ with the orthonormal real harmonic `Y_{ℓ,m}`.
///
/// Requires `|ε| · √((2ℓ+1)/4π) < 1`, which bounds `|ε Y|` below 1.
pub fn harmonic_ball(epsilon: f64, degree: usize, order: i64) -> Result<RadialField> {
    let y = RealHarmonic::new(degree, order)?;
    let sup = y.sup_bound();
    if !(epsilon.is_finite() && epsilon.abs() * sup < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "|epsilon| must be below {} for degree {degree}",
            1.0 / sup
        )));
    }
    let bounds = RadialBounds {
        rho_min: Some(1.0 - epsilon.abs() * sup),
        rho_max: Some(1.0 + epsilon.abs() * sup),
        lipschitz: Some(epsilon.abs() * y.lipschitz_bound()),
    };
    RadialField::new(
        HarmonicBall { y, epsilon },
        bounds,
        Smoothness::C1,
        format!("harmonic_ball(eps={epsilon}, l={degree}, m={order})"),
    )
}
