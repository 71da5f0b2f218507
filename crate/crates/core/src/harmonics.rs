//! Spherical harmonics on `S²`, Fourier modes on `S¹`, and the numerically
//! estimated multipliers of the equator transform on each degree.
//!
//! The transform commutes with rotations, so it acts on each harmonic degree
//! `ℓ` as a scalar `λ_ℓ`. Even degrees are annihilated; odd degrees survive,
//! which is what makes the transform injective on odd functions.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use crate::field::{ScalarField, SphereFunction};
use crate::slice::equator_transform;
use crate::sphere::{self, make_frame, Direction, EquatorQuadrature};
use crate::{Error, Result};

/// Largest supported harmonic degree.
pub const MAX_DEGREE: usize = 10;

/// Multipliers with magnitude below this on an odd degree would contradict
/// injectivity on odd functions.
pub const NEAR_KERNEL: f64 = 1e-6;

/// Orthonormal real spherical harmonic `Y_{ℓ,m}` on `S² ⊂ ℝ³`.
///
/// Written as `N · Q_ℓ^{|m|}(z) · A_m(x, y)` where `Q_ℓ^k = d^k P_ℓ / dz^k`
/// and `A_m` is `Re (x + iy)^m` (`m ≥ 0`) or `Im (x + iy)^{|m|}` (`m < 0`).
/// This polynomial extension is differentiated directly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealHarmonic {
    degree: usize,
    order: i64,
    norm: f64,
}

impl RealHarmonic {
    pub fn new(degree: usize, order: i64) -> Result<Self> {
        if degree > MAX_DEGREE || order.unsigned_abs() as usize > degree {
            return Err(Error::HarmonicIndex { degree, order });
        }
        let k = order.unsigned_abs() as usize;
        // (ℓ−k)!/(ℓ+k)!
        let ratio: f64 = ((degree - k + 1)..=(degree + k)).map(|i| 1.0 / i as f64).product();
        let mut norm = libm::sqrt((2.0 * degree as f64 + 1.0) / (4.0 * PI) * ratio);
        if order != 0 {
            norm *= core::f64::consts::SQRT_2;
        }
        Ok(Self { degree, order, norm })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    /// `√((2ℓ+1)/4π)`, a bound for `|Y|` by the addition theorem.
    pub fn sup_bound(&self) -> f64 {
        libm::sqrt((2.0 * self.degree as f64 + 1.0) / (4.0 * PI))
    }

    /// `ℓ · sup_bound` (Bernstein inequality for spherical polynomials).
    pub fn lipschitz_bound(&self) -> f64 {
        self.degree as f64 * self.sup_bound()
    }

    pub fn field(&self) -> ScalarField {
        ScalarField::new(*self)
            .with_lipschitz(self.lipschitz_bound())
            .with_sup_bound(self.sup_bound())
    }

    fn k(&self) -> usize {
        self.order.unsigned_abs() as usize
    }

    /// `(A, ∂A/∂x, ∂A/∂y)`.
    fn azimuthal(&self, x: f64, y: f64) -> (f64, f64, f64) {
        let k = self.k();
        if k == 0 {
            return (1.0, 0.0, 0.0);
        }
        // w^{k-1} and w^k for w = x + iy
        let (mut re, mut im) = (1.0, 0.0);
        for _ in 0..k - 1 {
            (re, im) = (re * x - im * y, re * y + im * x);
        }
        let (re_k, im_k) = (re * x - im * y, re * y + im * x);
        let kf = k as f64;
        if self.order > 0 {
            (re_k, kf * re, -kf * im)
        } else {
            (im_k, kf * im, kf * re)
        }
    }
}

/// `d^k P_ℓ / dz^k` by the fixed-order associated Legendre recurrence.
fn legendre_derivative(degree: usize, k: usize, z: f64) -> f64 {
    if k > degree {
        return 0.0;
    }
    let mut q_prev = (1..=k).map(|i| (2 * i - 1) as f64).product::<f64>();
    if degree == k {
        return q_prev;
    }
    let mut q = z * (2 * k + 1) as f64 * q_prev;
    for l in k + 2..=degree {
        let next = ((2 * l - 1) as f64 * z * q - (l + k - 1) as f64 * q_prev) / (l - k) as f64;
        q_prev = q;
        q = next;
    }
    q
}

impl SphereFunction for RealHarmonic {
    fn dim(&self) -> usize {
        3
    }

    fn value(&self, p: &[f64]) -> f64 {
        let (a, _, _) = self.azimuthal(p[0], p[1]);
        self.norm * legendre_derivative(self.degree, self.k(), p[2]) * a
    }

    fn tangent_derivative(&self, p: &[f64], v: &[f64]) -> Option<f64> {
        let (a, ax, ay) = self.azimuthal(p[0], p[1]);
        let q = legendre_derivative(self.degree, self.k(), p[2]);
        let dq = legendre_derivative(self.degree, self.k() + 1, p[2]);
        Some(self.norm * (q * (ax * v[0] + ay * v[1]) + dq * a * v[2]))
    }
}

/// Shorthand for [`RealHarmonic::new`] as a field.
pub fn real_harmonic(degree: usize, order: i64) -> Result<ScalarField> {
    RealHarmonic::new(degree, order).map(|y| y.field())
}

/// Real trigonometric polynomial
/// `f(θ) = a₀ + Σ_k (a_k cos kθ + b_k sin kθ)` on the unit circle.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigSeries {
    pub constant: f64,
    /// `(a_k, b_k)` for `k = 1, 2, …`
    pub modes: Vec<(f64, f64)>,
}

impl TrigSeries {
    pub fn new(constant: f64, modes: Vec<(f64, f64)>) -> Self {
        Self { constant, modes }
    }

    /// `cos kθ` (`sine = false`) or `sin kθ`.
    pub fn mode(k: usize, sine: bool) -> Self {
        if k == 0 {
            return Self::new(if sine { 0.0 } else { 1.0 }, Vec::new());
        }
        let mut modes = alloc::vec![(0.0, 0.0); k];
        modes[k - 1] = if sine { (0.0, 1.0) } else { (1.0, 0.0) };
        Self::new(0.0, modes)
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.constant
            + self
                .modes
                .iter()
                .enumerate()
                .map(|(i, (a, b))| {
                    let kt = (i + 1) as f64 * theta;
                    a * libm::cos(kt) + b * libm::sin(kt)
                })
                .sum::<f64>()
    }

    pub fn derivative(&self, theta: f64) -> f64 {
        self.modes
            .iter()
            .enumerate()
            .map(|(i, (a, b))| {
                let k = (i + 1) as f64;
                k * (b * libm::cos(k * theta) - a * libm::sin(k * theta))
            })
            .sum()
    }

    pub fn field(&self) -> ScalarField {
        let lip: f64 = self
            .modes
            .iter()
            .enumerate()
            .map(|(i, (a, b))| (i + 1) as f64 * (a.abs() + b.abs()))
            .sum();
        let sup = self.constant.abs() + self.modes.iter().map(|(a, b)| a.abs() + b.abs()).sum::<f64>();
        ScalarField::new(self.clone()).with_lipschitz(lip).with_sup_bound(sup)
    }
}

impl SphereFunction for TrigSeries {
    fn dim(&self) -> usize {
        2
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.eval(libm::atan2(x[1], x[0]))
    }

    fn tangent_derivative(&self, x: &[f64], v: &[f64]) -> Option<f64> {
        // dθ along v is x₁v₂ − x₂v₁ on the unit circle.
        let theta = libm::atan2(x[1], x[0]);
        Some(self.derivative(theta) * (x[0] * v[1] - x[1] * v[0]))
    }
}

/// Closed planar form of the transform: `f′(θ₀ − π/2) − f′(θ₀ + π/2)`.
/// The equator of `ξ = (cos θ₀, sin θ₀)` is the two points `θ₀ ± π/2`, and
/// the meridian towards `ξ` runs with `θ` at the first and against it at the
/// second.
pub fn fourier_check_n2(f: &TrigSeries, theta0: f64) -> f64 {
    f.derivative(theta0 - FRAC_PI_2) - f.derivative(theta0 + FRAC_PI_2)
}

/// Least-squares multiplier of one harmonic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierEstimate {
    pub degree: usize,
    /// `m` for `n = 3`; `0` (cosine) or `1` (sine) for `n = 2`.
    pub order: i64,
    pub lambda: f64,
    /// `max_ξ |T Y(ξ) − λ Y(ξ)|`
    pub residual: f64,
}

/// Settings for multiplier estimation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplierOptions {
    pub num_xi: usize,
    pub resolution: usize,
    pub seed: u64,
}

impl Default for MultiplierOptions {
    fn default() -> Self {
        Self {
            num_xi: 50,
            resolution: 512,
            seed: 0x4a11,
        }
    }
}

fn fit(degree: usize, order: i64, pairs: &[(f64, f64)]) -> MultiplierEstimate {
    let syy: f64 = pairs.iter().map(|(y, _)| y * y).sum();
    let sty: f64 = pairs.iter().map(|(y, t)| y * t).sum();
    let lambda = if syy > 0.0 { sty / syy } else { 0.0 };
    let residual = pairs
        .iter()
        .map(|(y, t)| (t - lambda * y).abs())
        .fold(0.0, f64::max);
    MultiplierEstimate {
        degree,
        order,
        lambda,
        residual,
    }
}

/// Fits `T Y_{ℓ,m}(ξ) ≈ λ Y_{ℓ,m}(ξ)` over `num_xi` random directions (`n = 3`).
pub fn estimate_multiplier(degree: usize, order: i64, opts: MultiplierOptions) -> Result<MultiplierEstimate> {
    let y = real_harmonic(degree, order)?;
    let rule = EquatorQuadrature::new(3, opts.resolution)?;
    let xis = sphere::random_directions(3, opts.num_xi, opts.seed)?;
    let pairs = xis
        .iter()
        .map(|xi| {
            let t = equator_transform(&y, &make_frame(*xi, opts.seed), &rule)?;
            Ok((y.at(xi), t))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(fit(degree, order, &pairs))
}

/// Same fit for the circle mode `cos kθ` (`order = 0`) or `sin kθ`
/// (`order = 1`), with the two-point equator of `S¹`.
pub fn estimate_multiplier_n2(k: usize, order: i64, opts: MultiplierOptions) -> Result<MultiplierEstimate> {
    if !(order == 0 || order == 1) || k > 20 {
        return Err(Error::HarmonicIndex { degree: k, order });
    }
    let series = TrigSeries::mode(k, order == 1);
    let f = series.field();
    let rule = EquatorQuadrature::new(2, 2)?;
    let xis = sphere::random_directions(2, opts.num_xi, opts.seed)?;
    let pairs = xis
        .iter()
        .map(|xi| {
            let t = equator_transform(&f, &make_frame(*xi, opts.seed), &rule)?;
            Ok((f.at(xi), t))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(fit(k, order, &pairs))
}

/// Estimated multipliers for every degree and order up to `l_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierTable {
    pub dim: usize,
    pub rows: Vec<MultiplierEstimate>,
}

impl MultiplierTable {
    pub fn compute(dim: usize, l_max: usize, opts: MultiplierOptions) -> Result<Self> {
        let mut rows = Vec::new();
        match dim {
            2 => {
                for k in 0..=l_max {
                    rows.push(estimate_multiplier_n2(k, 0, opts)?);
                    if k > 0 {
                        rows.push(estimate_multiplier_n2(k, 1, opts)?);
                    }
                }
            }
            3 => {
                if l_max > MAX_DEGREE {
                    return Err(Error::HarmonicIndex {
                        degree: l_max,
                        order: 0,
                    });
                }
                for l in 0..=l_max {
                    for m in -(l as i64)..=(l as i64) {
                        rows.push(estimate_multiplier(l, m, opts)?);
                    }
                }
            }
            _ => return Err(Error::UnsupportedDimension(dim)),
        }
        Ok(Self { dim, rows })
    }

    /// Mean of the estimates over orders for each degree.
    pub fn degree_multipliers(&self) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64, usize)> = Vec::new();
        for r in &self.rows {
            match out.iter_mut().find(|e| e.0 == r.degree) {
                Some(e) => {
                    e.1 += r.lambda;
                    e.2 += 1;
                }
                None => out.push((r.degree, r.lambda, 1)),
            }
        }
        out.into_iter().map(|(d, s, c)| (d, s / c as f64)).collect()
    }
}

/// Outcome of reconstructing an odd field from its transform.
#[derive(Debug, Clone, PartialEq)]
pub struct InjectivityReport {
    /// Estimated `λ_ℓ` for the odd degrees in band.
    pub multipliers: Vec<(usize, f64)>,
    /// Expansion coefficients of `T g`, `(ℓ, m, c)`.
    pub transform_coefficients: Vec<(usize, i64, f64)>,
    /// `max |g_rec − g|` over the probe grid.
    pub sup_error: f64,
}

/// Expands `T g` in harmonics up to `l_max`, divides each odd degree by its
/// estimated multiplier and compares the reconstruction with `g`.
pub fn injectivity_probe(g: &ScalarField, l_max: usize, opts: MultiplierOptions) -> Result<InjectivityReport> {
    if g.dim() != 3 {
        return Err(Error::DimensionMismatch {
            expected: 3,
            found: g.dim(),
        });
    }
    if l_max > MAX_DEGREE {
        return Err(Error::HarmonicIndex {
            degree: l_max,
            order: 0,
        });
    }
    let mut multipliers = Vec::new();
    for l in (1..=l_max).step_by(2) {
        let est = estimate_multiplier(l, 0, opts)?;
        if est.lambda.abs() < NEAR_KERNEL {
            return Err(Error::NearKernel {
                degree: l,
                lambda: est.lambda,
            });
        }
        multipliers.push((l, est.lambda));
    }

    // Products of degree ≤ 2·l_max are integrated exactly by this rule.
    let (nodes, weights) = sphere::sphere_rule(2, 2 * l_max + 2, l_max + 1);
    let rule = EquatorQuadrature::new(3, opts.resolution)?;
    let transformed = nodes
        .chunks_exact(3)
        .map(|p| {
            let xi = Direction::new(p)?;
            equator_transform(g, &make_frame(xi, opts.seed), &rule)
        })
        .collect::<Result<Vec<f64>>>()?;

    let mut harmonics = Vec::new();
    let mut transform_coefficients = Vec::new();
    for l in 0..=l_max {
        for m in -(l as i64)..=(l as i64) {
            let y = RealHarmonic::new(l, m)?;
            let c: f64 = nodes
                .chunks_exact(3)
                .zip(&weights)
                .zip(&transformed)
                .map(|((p, w), t)| w * t * y.value(p))
                .sum();
            transform_coefficients.push((l, m, c));
            if let Some((_, lambda)) = multipliers.iter().find(|(d, _)| *d == l) {
                harmonics.push((c / lambda, y));
            }
        }
    }

    let sup_error = sphere::probe_directions(3)?
        .iter()
        .map(|u| {
            let rec: f64 = harmonics.iter().map(|(c, y)| c * y.value(u.as_slice())).sum();
            (rec - g.at(u)).abs()
        })
        .fold(0.0, f64::max);

    Ok(InjectivityReport {
        multipliers,
        transform_coefficients,
        sup_error,
    })
}

/// `∫_{S²} f g` with a rule exact for degree `< 2(l_max + 1)`.
pub fn inner_product_s2(f: &ScalarField, g: &ScalarField, l_max: usize) -> f64 {
    let (nodes, weights) = sphere::sphere_rule(2, 2 * l_max + 2, l_max + 1);
    nodes
        .chunks_exact(3)
        .zip(&weights)
        .map(|(p, w)| w * f.value(p) * g.value(p))
        .sum()
}
