//! Functions on `S^{n-1}`: scalar fields `f` and radial functions `ρ_K` of
//! star bodies, with derivatives along the sphere and Lipschitz bounds.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::fd::richardson_derivative;
use crate::linalg::{self, Rotation};
use crate::sphere::{self, check_dim, Direction, EquatorFrame, MAX_DIM};
use crate::{Error, Result};

/// Step used by finite-difference fallbacks for derivatives along the sphere.
pub const FD_STEP: f64 = 1e-4;

/// Evaluator for a real function on the unit sphere.
///
/// `value` is only called with unit vectors. `tangent_derivative(x, v)` is the
/// derivative at `x` of the restriction to the sphere along a tangent vector
/// `v ⊥ x`; any smooth extension to ℝⁿ gives the same number, so
/// implementations may differentiate a convenient polynomial extension.
pub trait SphereFunction: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    fn tangent_derivative(&self, _x: &[f64], _v: &[f64]) -> Option<f64> {
        None
    }
}

/// Finite-difference derivative along the great circle through `x` with
/// initial velocity `v`.
pub fn fd_tangent_derivative(f: &dyn SphereFunction, x: &[f64], v: &[f64]) -> f64 {
    let n = x.len();
    let speed = linalg::norm(v);
    if speed == 0.0 {
        return 0.0;
    }
    let g = |s: f64| {
        let (sn, cs) = (libm::sin(s), libm::cos(s));
        let mut y = [0.0; MAX_DIM];
        for k in 0..n {
            y[k] = x[k] * cs + v[k] / speed * sn;
        }
        f.value(&y[..n])
    };
    speed * richardson_derivative(g, 0.0, FD_STEP)
}

/// Scalar field `f: S^{n-1} → ℝ` with optional Lipschitz and sup bounds.
#[derive(Clone)]
pub struct ScalarField {
    inner: Arc<dyn SphereFunction>,
    lipschitz: Option<f64>,
    sup_bound: Option<f64>,
}

impl core::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ScalarField")
            .field("dim", &self.dim())
            .field("lipschitz", &self.lipschitz)
            .field("sup_bound", &self.sup_bound)
            .finish_non_exhaustive()
    }
}

impl ScalarField {
    pub fn new<F: SphereFunction + 'static>(func: F) -> Self {
        Self::from_arc(Arc::new(func))
    }

    pub fn from_arc(inner: Arc<dyn SphereFunction>) -> Self {
        Self {
            inner,
            lipschitz: None,
            sup_bound: None,
        }
    }

    /// Field from a closure; derivatives come from finite differences.
    pub fn from_fn<V>(dim: usize, value: V) -> Self
    where
        V: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::new(FnField {
            dim,
            value,
            derivative: None::<fn(&[f64], &[f64]) -> f64>,
        })
    }

    /// Field from a closure and its tangent derivative `(x, v) ↦ D_v f(x)`.
    pub fn from_fns<V, D>(dim: usize, value: V, derivative: D) -> Self
    where
        V: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        D: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::new(FnField {
            dim,
            value,
            derivative: Some(derivative),
        })
    }

    /// The linear field `x ↦ ⟨x, e⟩`.
    pub fn linear(e: &[f64]) -> Self {
        let dim = e.len();
        let mut coef = [0.0; MAX_DIM];
        coef[..dim].copy_from_slice(e);
        let len = linalg::norm(e);
        Self::from_fns(
            dim,
            move |x: &[f64]| linalg::dot(x, &coef[..x.len()]),
            move |_x: &[f64], v: &[f64]| linalg::dot(v, &coef[..v.len()]),
        )
        .with_lipschitz(len)
        .with_sup_bound(len)
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::from_fns(dim, move |_: &[f64]| c, |_: &[f64], _: &[f64]| 0.0)
            .with_lipschitz(0.0)
            .with_sup_bound(c.abs())
    }

    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz = Some(l);
        self
    }

    pub fn with_sup_bound(mut self, s: f64) -> Self {
        self.sup_bound = Some(s);
        self
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn lipschitz_bound(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn sup_bound(&self) -> Option<f64> {
        self.sup_bound
    }

    pub fn function(&self) -> &Arc<dyn SphereFunction> {
        &self.inner
    }

    #[inline]
    pub fn value(&self, x: &[f64]) -> f64 {
        self.inner.value(x)
    }

    pub fn at(&self, d: &Direction) -> f64 {
        self.inner.value(d.as_slice())
    }

    /// Derivative along tangent `v` at `x`: analytic when the evaluator
    /// provides one, otherwise a Richardson-extrapolated central difference.
    #[inline]
    pub fn derivative_along(&self, x: &[f64], v: &[f64]) -> f64 {
        match self.inner.tangent_derivative(x, v) {
            Some(d) => d,
            None => fd_tangent_derivative(self.inner.as_ref(), x, v),
        }
    }

    /// `∂f/∂ψ` at `(η, ψ)`, taken along the meridian towards the pole.
    pub fn meridian_derivative(&self, frame: &EquatorFrame, eta: &[f64], psi: f64) -> f64 {
        let n = self.dim();
        let mut x = [0.0; MAX_DIM];
        let mut t = [0.0; MAX_DIM];
        frame.embed_into(eta, psi, &mut x);
        frame.meridian_tangent_into(eta, psi, &mut t);
        self.derivative_along(&x[..n], &t[..n])
    }

    /// Whether the evaluator supplies analytic derivatives (probed at one
    /// point).
    pub fn has_analytic_derivative(&self) -> bool {
        let n = self.dim();
        let mut x = [0.0; MAX_DIM];
        let mut v = [0.0; MAX_DIM];
        x[0] = 1.0;
        v[1] = 1.0;
        self.inner.tangent_derivative(&x[..n], &v[..n]).is_some()
    }

    /// Same values, derivatives forced through finite differences.
    pub fn without_derivative(&self) -> Self {
        Self {
            inner: Arc::new(NoDerivative(self.inner.clone())),
            ..self.clone()
        }
    }

    /// `x ↦ (f(x) − f(−x)) / 2`.
    pub fn odd_part(&self) -> Self {
        Self {
            inner: Arc::new(Parity {
                f: self.inner.clone(),
                sign: -1.0,
            }),
            lipschitz: self.lipschitz,
            sup_bound: self.sup_bound,
        }
    }

    /// `x ↦ (f(x) + f(−x)) / 2`.
    pub fn even_part(&self) -> Self {
        Self {
            inner: Arc::new(Parity {
                f: self.inner.clone(),
                sign: 1.0,
            }),
            lipschitz: self.lipschitz,
            sup_bound: self.sup_bound,
        }
    }

    /// `Σ cᵢ fᵢ`. All terms must share a dimension.
    pub fn linear_combination(terms: &[(f64, ScalarField)]) -> Result<Self> {
        let dim = terms
            .first()
            .map(|t| t.1.dim())
            .ok_or_else(|| Error::InvalidParameter("empty linear combination".into()))?;
        if let Some(t) = terms.iter().find(|t| t.1.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: t.1.dim(),
            });
        }
        let sum_bound = |get: fn(&ScalarField) -> Option<f64>| {
            terms
                .iter()
                .map(|(c, f)| get(f).map(|b| c.abs() * b))
                .sum::<Option<f64>>()
        };
        Ok(Self {
            lipschitz: sum_bound(|f| f.lipschitz),
            sup_bound: sum_bound(|f| f.sup_bound),
            inner: Arc::new(Linear {
                dim,
                terms: terms.iter().map(|(c, f)| (*c, f.inner.clone())).collect(),
            }),
        })
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self::linear_combination(&[(c, self.clone())]).expect("single term")
    }

    /// `x ↦ f(Rᵀ x)`.
    pub fn rotated(&self, rotation: &Rotation) -> Result<Self> {
        if rotation.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rotation.dim(),
            });
        }
        Ok(Self {
            inner: Arc::new(Rotated {
                f: self.inner.clone(),
                rotation: rotation.clone(),
            }),
            ..self.clone()
        })
    }

    /// `max |f|` over the probe grid.
    pub fn probe_sup(&self) -> f64 {
        sphere::probe_directions(self.dim())
            .map(|ps| ps.iter().map(|d| self.at(d).abs()).fold(0.0, f64::max))
            .unwrap_or(f64::NAN)
    }
}

/// Regularity class of a radial function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Smoothness {
    C1,
    PiecewiseC1,
    Lipschitz,
}

/// Known bounds on a radial function; missing entries are estimated from the
/// probe grid.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RadialBounds {
    pub rho_min: Option<f64>,
    pub rho_max: Option<f64>,
    pub lipschitz: Option<f64>,
}

/// Radial function `ρ_K > 0` of a star body
/// `K = { λu : u ∈ S^{n-1}, 0 ≤ λ ≤ ρ_K(u) }`.
#[derive(Clone)]
pub struct RadialField {
    inner: Arc<dyn SphereFunction>,
    label: String,
    smoothness: Smoothness,
    lipschitz: Option<f64>,
    rho_min: f64,
    rho_max: f64,
}

impl core::fmt::Debug for RadialField {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("RadialField")
            .field("label", &self.label)
            .field("dim", &self.dim())
            .field("smoothness", &self.smoothness)
            .field("lipschitz", &self.lipschitz)
            .field("rho_min", &self.rho_min)
            .field("rho_max", &self.rho_max)
            .finish_non_exhaustive()
    }
}

impl RadialField {
    /// Validates `func` on the probe grid: positivity, agreement of analytic
    /// derivatives with finite differences within `max(1e-6, 1e-4·L)`, the
    /// Lipschitz bound on sampled pairs, and the declared min/max bounds.
    pub fn new<F: SphereFunction + 'static>(
        func: F,
        bounds: RadialBounds,
        smoothness: Smoothness,
        label: impl Into<String>,
    ) -> Result<Self> {
        Self::from_arc(Arc::new(func), bounds, smoothness, label.into())
    }

    pub fn from_arc(
        inner: Arc<dyn SphereFunction>,
        bounds: RadialBounds,
        smoothness: Smoothness,
        label: String,
    ) -> Result<Self> {
        let n = inner.dim();
        check_dim(n)?;
        let probes = sphere::probe_directions(n)?;
        let values: Vec<f64> = probes.iter().map(|d| inner.value(d.as_slice())).collect();

        let (lo, hi) = values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
        if !(lo > 0.0 && hi.is_finite()) {
            return Err(Error::Validation(alloc::format!(
                "radial function must be positive and finite on probes (min {lo})"
            )));
        }
        let rho_min = bounds.rho_min.unwrap_or(lo);
        let rho_max = bounds.rho_max.unwrap_or(hi * 1.05);
        if rho_min > lo * (1.0 + 1e-12) || rho_max < hi * (1.0 - 1e-12) || rho_min <= 0.0 {
            return Err(Error::Validation(alloc::format!(
                "declared bounds [{rho_min}, {rho_max}] do not contain probe range [{lo}, {hi}]"
            )));
        }

        let tol = bounds.lipschitz.map_or(1e-6, |l| (1e-4 * l).max(1e-6));
        for d in &probes {
            let x = d.as_slice();
            let v = tangent_for(x);
            if let Some(analytic) = inner.tangent_derivative(x, &v[..n]) {
                let fd = fd_tangent_derivative(inner.as_ref(), x, &v[..n]);
                if !((analytic - fd).abs() <= tol) {
                    return Err(Error::Validation(alloc::format!(
                        "analytic derivative {analytic} disagrees with finite difference {fd}"
                    )));
                }
            }
        }

        if let Some(l) = bounds.lipschitz {
            let ok = lipschitz_violations(&*inner, &probes, l) == 0;
            if !ok {
                return Err(Error::Validation(alloc::format!(
                    "Lipschitz bound {l} violated on sampled pairs"
                )));
            }
        }

        Ok(Self {
            inner,
            label,
            smoothness,
            lipschitz: bounds.lipschitz,
            rho_min,
            rho_max,
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn smoothness(&self) -> Smoothness {
        self.smoothness
    }

    pub fn lipschitz_bound(&self) -> Option<f64> {
        self.lipschitz
    }

    /// Lower bound for `ρ` (exact for library bodies, probe minimum otherwise).
    pub fn rho_min(&self) -> f64 {
        self.rho_min
    }

    /// Upper bound for `ρ`.
    pub fn rho_max(&self) -> f64 {
        self.rho_max
    }

    pub fn function(&self) -> &Arc<dyn SphereFunction> {
        &self.inner
    }

    #[inline]
    pub fn radius(&self, u: &[f64]) -> f64 {
        self.inner.value(u)
    }

    pub fn radius_at(&self, u: &Direction) -> f64 {
        self.inner.value(u.as_slice())
    }

    #[inline]
    pub fn derivative_along(&self, x: &[f64], v: &[f64]) -> f64 {
        match self.inner.tangent_derivative(x, v) {
            Some(d) => d,
            None => fd_tangent_derivative(self.inner.as_ref(), x, v),
        }
    }

    /// `∂ρ/∂ψ` at `(η, ψ)` towards the pole of `frame`.
    pub fn meridian_derivative(&self, frame: &EquatorFrame, eta: &[f64], psi: f64) -> f64 {
        let n = self.dim();
        let mut x = [0.0; MAX_DIM];
        let mut t = [0.0; MAX_DIM];
        frame.embed_into(eta, psi, &mut x);
        frame.meridian_tangent_into(eta, psi, &mut t);
        self.derivative_along(&x[..n], &t[..n])
    }

    /// Membership test `|p| ≤ ρ(p/|p|)`.
    pub fn contains(&self, p: &[f64]) -> bool {
        let r = linalg::norm(p);
        if r == 0.0 {
            return true;
        }
        let n = p.len();
        let mut u = [0.0; MAX_DIM];
        for k in 0..n {
            u[k] = p[k] / r;
        }
        r <= self.radius(&u[..n])
    }

    /// `f = ρ^{n-1} / (n-1)`, whose integral over a latitude sphere is the
    /// `(n-1)`-volume of the matching cone section.
    pub fn to_scalar_field(&self) -> ScalarField {
        let k = self.dim() as i32 - 1;
        self.power_field(k)
    }

    /// Field whose equator transform is the slope at `z = 0` of the
    /// hyperplane section function: `ρ^{n-2}/(n-2)` for `n ≥ 3`, `ln ρ` for
    /// `n = 2`.
    pub fn hyperplane_field(&self) -> ScalarField {
        let k = self.dim() as i32 - 2;
        self.power_field(k)
    }

    fn power_field(&self, k: i32) -> ScalarField {
        let lipschitz_rho = self.lipschitz;
        let (sup, lip) = if k == 0 {
            let sup = libm::log(self.rho_max).abs().max(libm::log(self.rho_min).abs());
            (sup, lipschitz_rho.map(|l| l / self.rho_min))
        } else {
            let sup = libm::pow(self.rho_max, k as f64) / k as f64;
            (sup, lipschitz_rho.map(|l| l * libm::pow(self.rho_max, k as f64 - 1.0)))
        };
        let field = ScalarField::from_arc(Arc::new(PowerMap {
            rho: self.inner.clone(),
            power: k,
        }))
        .with_sup_bound(sup);
        match lip {
            Some(l) => field.with_lipschitz(l),
            None => field,
        }
    }

    /// `ρ` itself viewed as a scalar field.
    pub fn as_scalar_field(&self) -> ScalarField {
        let f = ScalarField::from_arc(self.inner.clone()).with_sup_bound(self.rho_max);
        match self.lipschitz {
            Some(l) => f.with_lipschitz(l),
            None => f,
        }
    }

    /// Radial function of `λK`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!(
                "scale factor must be positive, got {lambda}"
            )));
        }
        Ok(Self {
            inner: Arc::new(Linear {
                dim: self.dim(),
                terms: alloc::vec![(lambda, self.inner.clone())],
            }),
            label: alloc::format!("{}*{lambda}", self.label),
            smoothness: self.smoothness,
            lipschitz: self.lipschitz.map(|l| l * lambda),
            rho_min: self.rho_min * lambda,
            rho_max: self.rho_max * lambda,
        })
    }

    /// Radial function of `RK`, i.e. `u ↦ ρ(Rᵀ u)`.
    pub fn rotated(&self, rotation: &Rotation) -> Result<Self> {
        if rotation.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: rotation.dim(),
            });
        }
        Ok(Self {
            inner: Arc::new(Rotated {
                f: self.inner.clone(),
                rotation: rotation.clone(),
            }),
            label: alloc::format!("rotated {}", self.label),
            ..self.clone()
        })
    }
}

/// A unit tangent at `x`: the coordinate axis least aligned with `x`,
/// projected and normalized.
pub(crate) fn tangent_for(x: &[f64]) -> [f64; MAX_DIM] {
    let n = x.len();
    let axis = (0..n)
        .min_by(|&i, &j| x[i].abs().total_cmp(&x[j].abs()))
        .unwrap_or(0);
    let mut v = [0.0; MAX_DIM];
    v[axis] = 1.0;
    let p = x[axis];
    linalg::axpy(-p, x, &mut v[..n]);
    let len = linalg::norm(&v[..n]);
    v[..n].iter_mut().for_each(|c| *c /= len);
    v
}

/// Number of probe pairs (neighbouring grid points and short great-circle
/// steps) where `|g(x) − g(y)| > L · geodesic(x, y)`.
pub fn lipschitz_violations(g: &dyn SphereFunction, probes: &[Direction], l: f64) -> usize {
    let n = g.dim();
    let mut violations = 0;
    let mut check = |x: &[f64], y: &[f64]| {
        let lhs = (g.value(x) - g.value(y)).abs();
        let rhs = l * linalg::geodesic(x, y);
        if lhs > rhs * (1.0 + 1e-9) + 1e-12 {
            violations += 1;
        }
    };
    for pair in probes.windows(2) {
        check(pair[0].as_slice(), pair[1].as_slice());
    }
    for d in probes {
        let x = d.as_slice();
        let v = tangent_for(x);
        let s = 1e-3;
        let mut y = [0.0; MAX_DIM];
        for k in 0..n {
            y[k] = x[k] * libm::cos(s) + v[k] * libm::sin(s);
        }
        check(x, &y[..n]);
    }
    violations
}

struct FnField<V, D> {
    dim: usize,
    value: V,
    derivative: Option<D>,
}

impl<V, D> SphereFunction for FnField<V, D>
where
    V: Fn(&[f64]) -> f64 + Send + Sync,
    D: Fn(&[f64], &[f64]) -> f64 + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    fn tangent_derivative(&self, x: &[f64], v: &[f64]) -> Option<f64> {
        self.derivative.as_ref().map(|d| d(x, v))
    }
}

struct NoDerivative(Arc<dyn SphereFunction>);

impl SphereFunction for NoDerivative {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.0.value(x)
    }
}

struct Parity {
    f: Arc<dyn SphereFunction>,
    sign: f64,
}

impl SphereFunction for Parity {
    fn dim(&self) -> usize {
        self.f.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let n = x.len();
        let mut m = [0.0; MAX_DIM];
        for k in 0..n {
            m[k] = -x[k];
        }
        0.5 * (self.f.value(x) + self.sign * self.f.value(&m[..n]))
    }

    fn tangent_derivative(&self, x: &[f64], v: &[f64]) -> Option<f64> {
        // d/ds f(-(x + s v)) = D_{-v} f(-x)
        let n = x.len();
        let mut mx = [0.0; MAX_DIM];
        let mut mv = [0.0; MAX_DIM];
        for k in 0..n {
            mx[k] = -x[k];
            mv[k] = -v[k];
        }
        let here = self.f.tangent_derivative(x, v)?;
        let there = self.f.tangent_derivative(&mx[..n], &mv[..n])?;
        Some(0.5 * (here + self.sign * there))
    }
}

struct Linear {
    dim: usize,
    terms: Vec<(f64, Arc<dyn SphereFunction>)>,
}

impl SphereFunction for Linear {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(c, f)| c * f.value(x)).sum()
    }

    fn tangent_derivative(&self, x: &[f64], v: &[f64]) -> Option<f64> {
        self.terms
            .iter()
            .map(|(c, f)| f.tangent_derivative(x, v).map(|d| c * d))
            .sum()
    }
}

struct Rotated {
    f: Arc<dyn SphereFunction>,
    rotation: Rotation,
}

impl SphereFunction for Rotated {
    fn dim(&self) -> usize {
        self.f.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let n = x.len();
        let mut y = [0.0; MAX_DIM];
        self.rotation.apply_transpose_into(x, &mut y[..n]);
        self.f.value(&y[..n])
    }

    fn tangent_derivative(&self, x: &[f64], v: &[f64]) -> Option<f64> {
        let n = x.len();
        let mut y = [0.0; MAX_DIM];
        let mut w = [0.0; MAX_DIM];
        self.rotation.apply_transpose_into(x, &mut y[..n]);
        self.rotation.apply_transpose_into(v, &mut w[..n]);
        self.f.tangent_derivative(&y[..n], &w[..n])
    }
}

/// `ρ^k / k`, or `ln ρ` when `k = 0`.
struct PowerMap {
    rho: Arc<dyn SphereFunction>,
    power: i32,
}

impl SphereFunction for PowerMap {
    fn dim(&self) -> usize {
        self.rho.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let r = self.rho.value(x);
        match self.power {
            0 => libm::log(r),
            1 => r,
            k => linalg::powi(r, k) / k as f64,
        }
    }

    fn tangent_derivative(&self, x: &[f64], v: &[f64]) -> Option<f64> {
        let dr = self.rho.tangent_derivative(x, v)?;
        let r = self.rho.value(x);
        Some(match self.power {
            0 => dr / r,
            1 => dr,
            k => linalg::powi(r, k - 1) * dr,
        })
    }
}
