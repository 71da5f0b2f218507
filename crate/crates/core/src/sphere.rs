//! Directions, latitude frames and quadrature on spheres.
//!
//! With north pole `ξ`, every point of `S^{n-1}` is written
//! `x = ξ sin ψ + η cos ψ` with `η ∈ S^{n-1} ∩ ξ⊥` and latitude
//! `ψ ∈ [-π/2, π/2]`. An [`EquatorFrame`] fixes an orthonormal basis of `ξ⊥`
//! so that `η` can be stored as a point of `S^{n-2}` in frame coordinates.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gauss;
use crate::linalg::{self, orthonormalize_against, Rotation};
use crate::{Error, Result};

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 6;

/// Number of probe directions used for constructor-time validation.
pub const PROBE_COUNT: usize = 2000;

pub(crate) fn check_dim(n: usize) -> Result<()> {
    if (MIN_DIM..=MAX_DIM).contains(&n) {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension(n))
    }
}

/// Unit vector in ℝⁿ, `2 ≤ n ≤ 6`. Stored inline so it is `Copy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    coords: [f64; MAX_DIM],
    dim: usize,
}

impl Direction {
    /// Normalizes `v`.
    pub fn new(v: &[f64]) -> Result<Self> {
        check_dim(v.len())?;
        let len = linalg::norm(v);
        if !(len.is_finite() && len > 0.0) {
            return Err(Error::ZeroVector);
        }
        let mut coords = [0.0; MAX_DIM];
        for (c, x) in coords.iter_mut().zip(v) {
            *c = x / len;
        }
        Ok(Self { coords, dim: v.len() })
    }

    /// Standard basis vector `e_axis`.
    pub fn axis(dim: usize, axis: usize) -> Result<Self> {
        check_dim(dim)?;
        if axis >= dim {
            return Err(Error::InvalidParameter(alloc::format!(
                "axis {axis} out of range for dimension {dim}"
            )));
        }
        let mut coords = [0.0; MAX_DIM];
        coords[axis] = 1.0;
        Ok(Self { coords, dim })
    }

    /// Point of the unit circle at polar angle `theta`.
    pub fn from_angle(theta: f64) -> Self {
        let mut coords = [0.0; MAX_DIM];
        coords[0] = libm::cos(theta);
        coords[1] = libm::sin(theta);
        Self { coords, dim: 2 }
    }

    /// Renormalizes without re-validating the dimension.
    pub(crate) fn from_unit_unchecked(v: &[f64]) -> Self {
        let len = linalg::norm(v);
        let mut coords = [0.0; MAX_DIM];
        for (c, x) in coords.iter_mut().zip(v) {
            *c = x / len;
        }
        Self { coords, dim: v.len() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        linalg::dot(self.as_slice(), other.as_slice())
    }

    pub fn geodesic(&self, other: &Direction) -> f64 {
        linalg::geodesic(self.as_slice(), other.as_slice())
    }
}

impl core::ops::Neg for Direction {
    type Output = Direction;

    fn neg(mut self) -> Direction {
        for c in self.coords.iter_mut() {
            *c = -*c;
        }
        self
    }
}

/// North pole `ξ` together with an orthonormal basis of `ξ⊥`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquatorFrame {
    pole: Direction,
    basis: Vec<Direction>,
}

impl EquatorFrame {
    /// Completes `pole` to an orthonormal basis by Gram–Schmidt of candidates
    /// drawn from a generator seeded with `seed`. Degenerate candidates are
    /// skipped, so the result is deterministic in `(pole, seed)`.
    pub fn new(pole: Direction, seed: u64) -> Self {
        let n = pole.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut accepted: Vec<Direction> = Vec::with_capacity(n);
        accepted.push(pole);
        while accepted.len() < n {
            let mut v = [0.0; MAX_DIM];
            for x in v.iter_mut().take(n) {
                *x = rng.gen_range(-1.0..1.0);
            }
            if let Some(d) = orthonormalize_against(&v[..n], &accepted) {
                accepted.push(d);
            }
        }
        let basis = accepted.split_off(1);
        Self { pole, basis }
    }

    /// Frame from explicit parts; rejects bases that are not orthonormal
    /// and orthogonal to the pole within 1e-12.
    pub fn from_parts(pole: Direction, basis: Vec<Direction>) -> Result<Self> {
        let n = pole.dim();
        if basis.len() != n - 1 {
            return Err(Error::DimensionMismatch {
                expected: n - 1,
                found: basis.len(),
            });
        }
        if let Some(b) = basis.iter().find(|b| b.dim() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.dim(),
            });
        }
        let frame = Self { pole, basis };
        if frame.orthonormality_residual() > 1e-12 {
            return Err(Error::Validation("frame is not orthonormal".into()));
        }
        Ok(frame)
    }

    pub fn dim(&self) -> usize {
        self.pole.dim()
    }

    pub fn pole(&self) -> &Direction {
        &self.pole
    }

    pub fn basis(&self) -> &[Direction] {
        &self.basis
    }

    /// Largest deviation of the Gram matrix of `(pole, basis…)` from identity.
    pub fn orthonormality_residual(&self) -> f64 {
        let all: Vec<&Direction> = core::iter::once(&self.pole).chain(self.basis.iter()).collect();
        let mut worst: f64 = 0.0;
        for (i, a) in all.iter().enumerate() {
            for (j, b) in all.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((a.dot(b) - target).abs());
            }
        }
        worst
    }

    /// Frame coordinates `η ∈ S^{n-2}` to the ambient point of `ξ⊥`.
    pub fn lift_into(&self, eta: &[f64], out: &mut [f64]) {
        out[..self.dim()].iter_mut().for_each(|x| *x = 0.0);
        for (e, b) in eta.iter().zip(&self.basis) {
            linalg::axpy(*e, b.as_slice(), out);
        }
    }

    /// `ξ sin ψ + lift(η) cos ψ`, without range checks.
    #[inline]
    pub fn embed_into(&self, eta: &[f64], psi: f64, out: &mut [f64]) {
        self.combine_into(eta, libm::sin(psi), libm::cos(psi), out);
    }

    /// Unit tangent `∂x/∂ψ = ξ cos ψ − lift(η) sin ψ` of the meridian through
    /// `(η, ψ)`, pointing towards the pole.
    #[inline]
    pub fn meridian_tangent_into(&self, eta: &[f64], psi: f64, out: &mut [f64]) {
        self.combine_into(eta, libm::cos(psi), -libm::sin(psi), out);
    }

    #[inline]
    fn combine_into(&self, eta: &[f64], pole_coef: f64, eta_coef: f64, out: &mut [f64]) {
        let n = self.dim();
        for (o, p) in out[..n].iter_mut().zip(self.pole.as_slice()) {
            *o = pole_coef * p;
        }
        for (e, b) in eta.iter().zip(&self.basis) {
            linalg::axpy(eta_coef * e, b.as_slice(), &mut out[..n]);
        }
    }

    /// The point `(η, ψ)` as a direction.
    pub fn embed(&self, eta: &[f64], psi: f64) -> Result<Direction> {
        if eta.len() != self.dim() - 1 {
            return Err(Error::DimensionMismatch {
                expected: self.dim() - 1,
                found: eta.len(),
            });
        }
        if !(-FRAC_PI_2..=FRAC_PI_2).contains(&psi) {
            return Err(Error::LatitudeOutOfRange(psi));
        }
        let mut out = [0.0; MAX_DIM];
        self.embed_into(eta, psi, &mut out);
        Direction::new(&out[..self.dim()])
    }

    /// Frame `(Rξ, R·basis)`.
    pub fn rotated(&self, rotation: &Rotation) -> Self {
        Self {
            pole: rotation.apply(&self.pole),
            basis: self.basis.iter().map(|b| rotation.apply(b)).collect(),
        }
    }

    /// Frame with pole `-ξ` and the same basis of the (shared) equator.
    pub fn flipped(&self) -> Self {
        Self {
            pole: -self.pole,
            basis: self.basis.clone(),
        }
    }
}

/// Shorthand for [`EquatorFrame::new`].
pub fn make_frame(pole: Direction, seed: u64) -> EquatorFrame {
    EquatorFrame::new(pole, seed)
}

/// Surface measure of `S^d ⊂ ℝ^{d+1}`.
pub fn sphere_volume(d: usize) -> f64 {
    match d {
        0 => 2.0,
        1 => 2.0 * PI,
        _ => 2.0 * PI / (d as f64 - 1.0) * sphere_volume(d - 2),
    }
}

/// Positive-weight rule on the equator sphere `S^{n-2}` in frame coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct EquatorQuadrature {
    dim: usize,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    exact_degree: usize,
}

impl EquatorQuadrature {
    /// Rule for ambient dimension `n`:
    ///
    /// * `n = 2`: the two points `±1` of `S⁰`, weight 1 each;
    /// * `n = 3`: `resolution` equispaced points on the circle;
    /// * `n ≥ 4`: `resolution` equispaced azimuths times `resolution / 2`
    ///   Gauss–Gegenbauer nodes per polar level.
    ///
    /// Weights are rescaled to sum to `vol_{n-2}(S^{n-2})` exactly.
    pub fn new(n: usize, resolution: usize) -> Result<Self> {
        check_dim(n)?;
        if resolution < 2 {
            return Err(Error::ResolutionTooSmall(resolution));
        }
        let d = n - 2;
        let polar = (resolution / 2).max(1);
        let (nodes, weights) = sphere_rule(d, resolution, polar);
        let exact_degree = match d {
            0 => usize::MAX,
            1 => resolution - 1,
            _ => (resolution - 1).min(2 * polar - 1),
        };
        Ok(Self {
            dim: n,
            nodes,
            weights,
            exact_degree,
        })
    }

    /// Ambient dimension `n` (nodes have `n - 1` coordinates).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Polynomial degree integrated exactly.
    pub fn exact_degree(&self) -> usize {
        self.exact_degree
    }

    pub fn node(&self, i: usize) -> &[f64] {
        let s = self.dim - 1;
        &self.nodes[i * s..(i + 1) * s]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `(η_i, w_i)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> + '_ {
        self.nodes
            .chunks_exact(self.dim - 1)
            .zip(self.weights.iter().copied())
    }
}

/// Shorthand for [`EquatorQuadrature::new`].
pub fn equator_rule(n: usize, resolution: usize) -> Result<EquatorQuadrature> {
    EquatorQuadrature::new(n, resolution)
}

/// Default equator resolution per ambient dimension.
pub fn default_resolution(n: usize) -> usize {
    match n {
        2 => 2,
        3 => 512,
        4 => 64,
        5 => 24,
        _ => 12,
    }
}

/// Product rule on `S^d` (flattened nodes with stride `d + 1`, weights).
///
/// `S^d` is sliced as `x = (√(1-t²)·y, t)` with `y ∈ S^{d-1}`, whose measure
/// is `(1 - t²)^{(d-2)/2} dt dσ(y)`; the circle uses `azimuths` equispaced
/// points and every further level `polar` Gauss nodes.
pub fn sphere_rule(d: usize, azimuths: usize, polar: usize) -> (Vec<f64>, Vec<f64>) {
    let (nodes, mut weights) = sphere_rule_raw(d, azimuths, polar);
    let scale = sphere_volume(d) / weights.iter().sum::<f64>();
    weights.iter_mut().for_each(|w| *w *= scale);
    (nodes, weights)
}

fn sphere_rule_raw(d: usize, azimuths: usize, polar: usize) -> (Vec<f64>, Vec<f64>) {
    match d {
        0 => (alloc::vec![1.0, -1.0], alloc::vec![1.0, 1.0]),
        1 => {
            let w = 2.0 * PI / azimuths as f64;
            let mut nodes = Vec::with_capacity(2 * azimuths);
            for k in 0..azimuths {
                let theta = 2.0 * PI * k as f64 / azimuths as f64;
                nodes.push(libm::cos(theta));
                nodes.push(libm::sin(theta));
            }
            (nodes, alloc::vec![w; azimuths])
        }
        _ => {
            let (sub_nodes, sub_weights) = sphere_rule_raw(d - 1, azimuths, polar);
            let a = (d as f64 - 2.0) / 2.0;
            let (ts, tw) = gauss::gegenbauer(polar, a, sphere_volume(d) / sphere_volume(d - 1));
            let mut nodes = Vec::with_capacity(ts.len() * sub_nodes.len() / d * (d + 1));
            let mut weights = Vec::with_capacity(ts.len() * sub_weights.len());
            for (t, wt) in ts.iter().zip(&tw) {
                let s = libm::sqrt((1.0 - t * t).max(0.0));
                for (y, wy) in sub_nodes.chunks_exact(d).zip(&sub_weights) {
                    nodes.extend(y.iter().map(|c| s * c));
                    nodes.push(*t);
                    weights.push(wt * wy);
                }
            }
            (nodes, weights)
        }
    }
}

/// Fibonacci-lattice directions on `S²`.
pub fn fibonacci_directions(count: usize) -> Vec<Direction> {
    let golden = PI * (3.0 - libm::sqrt(5.0));
    (0..count)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / count as f64;
            let r = libm::sqrt(1.0 - z * z);
            let theta = golden * i as f64;
            Direction::from_unit_unchecked(&[r * libm::cos(theta), r * libm::sin(theta), z])
        })
        .collect()
}

/// Equispaced directions on `S¹`, offset by half a step so that no
/// direction is a coordinate axis.
pub fn circle_directions(count: usize) -> Vec<Direction> {
    (0..count)
        .map(|k| Direction::from_angle(2.0 * PI * (k as f64 + 0.5) / count as f64))
        .collect()
}

/// Uniformly distributed directions from a seeded generator (rejection from
/// the cube).
pub fn random_directions(n: usize, count: usize, seed: u64) -> Result<Vec<Direction>> {
    check_dim(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..count).map(|_| random_direction(n, &mut rng)).collect())
}

pub(crate) fn random_direction<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Direction {
    loop {
        let mut v = [0.0; MAX_DIM];
        for x in v.iter_mut().take(n) {
            *x = rng.gen_range(-1.0..1.0);
        }
        let r2 = linalg::dot(&v[..n], &v[..n]);
        if r2 > 1e-6 && r2 <= 1.0 {
            return Direction::from_unit_unchecked(&v[..n]);
        }
    }
}

/// Quasi-uniform probe grid of about [`PROBE_COUNT`] directions on `S^{n-1}`:
/// equispaced on the circle, Fibonacci on `S²`, product grids above.
pub fn probe_directions(n: usize) -> Result<Vec<Direction>> {
    check_dim(n)?;
    Ok(match n {
        2 => circle_directions(PROBE_COUNT),
        3 => fibonacci_directions(PROBE_COUNT),
        _ => {
            let (azimuths, polar) = match n {
                4 => (20, 10),
                5 => (16, 5),
                _ => (8, 4),
            };
            let (nodes, _) = sphere_rule(n - 1, azimuths, polar);
            nodes.chunks_exact(n).map(Direction::from_unit_unchecked).collect()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direction_normalizes() {
        let d = Direction::new(&[3.0, 4.0]).unwrap();
        assert!((linalg::norm(d.as_slice()) - 1.0).abs() < 1e-15);
        assert_eq!(d.as_slice(), &[0.6, 0.8]);
    }

    #[test]
    fn direction_rejects_bad_input() {
        assert_eq!(Direction::new(&[0.0, 0.0]), Err(Error::ZeroVector));
        assert_eq!(Direction::new(&[1.0]), Err(Error::UnsupportedDimension(1)));
        assert_eq!(Direction::new(&[1.0; 7]), Err(Error::UnsupportedDimension(7)));
        assert_eq!(Direction::new(&[f64::NAN, 1.0]), Err(Error::ZeroVector));
    }

    #[test]
    fn frame_for_z_pole_spans_xy_plane() {
        let f = make_frame(Direction::axis(3, 2).unwrap(), 0);
        assert!(f.orthonormality_residual() < 1e-12);
        for b in f.basis() {
            assert!(b.as_slice()[2].abs() < 1e-12);
        }
    }

    #[test]
    fn planar_frame_is_unique_line() {
        let f = make_frame(Direction::axis(2, 0).unwrap(), 0);
        let b = f.basis()[0].as_slice();
        assert!(b[0].abs() < 1e-15);
        assert!((b[1].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn frame_is_deterministic_and_seed_dependent() {
        let pole = Direction::new(&[0.3, -0.2, 0.9, 0.1]).unwrap();
        assert_eq!(make_frame(pole, 5), make_frame(pole, 5));
        let a = make_frame(pole, 1);
        let b = make_frame(pole, 2);
        assert_ne!(a, b);
        for f in [&a, &b] {
            assert!(f.orthonormality_residual() < 1e-12);
            let x = f.embed(&[0.0, 0.6, 0.8], 0.0).unwrap();
            assert!(x.dot(&pole).abs() < 1e-12);
        }
    }

    #[test]
    fn embed_examples() {
        let f = make_frame(Direction::axis(3, 2).unwrap(), 0);
        let b0 = f.basis()[0];
        let x = f.embed(&[1.0, 0.0], 0.0).unwrap();
        assert!(linalg::distance(x.as_slice(), b0.as_slice()) < 1e-15);
        let np = f.embed(&[1.0, 0.0], FRAC_PI_2).unwrap();
        assert!(linalg::distance(np.as_slice(), &[0.0, 0.0, 1.0]) < 1e-15);
        let x = f.embed(&[1.0, 0.0], PI / 6.0).unwrap();
        let s3 = libm::sqrt(3.0) / 2.0;
        for k in 0..3 {
            let expected = b0.as_slice()[k] * s3 + [0.0, 0.0, 0.5][k];
            assert!((x.as_slice()[k] - expected).abs() < 1e-15);
        }
        assert!(matches!(f.embed(&[1.0, 0.0], 1.6), Err(Error::LatitudeOutOfRange(_))));
        assert!(matches!(f.embed(&[1.0], 0.0), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn volumes() {
        assert_eq!(sphere_volume(0), 2.0);
        assert!((sphere_volume(2) - 4.0 * PI).abs() < 1e-15);
        assert!((sphere_volume(3) - 2.0 * PI * PI).abs() < 1e-14);
        assert!((sphere_volume(4) - 8.0 * PI * PI / 3.0).abs() < 1e-13);
    }

    #[test]
    fn equator_rule_weights() {
        let r2 = equator_rule(2, 17).unwrap();
        assert_eq!(r2.len(), 2);
        assert_eq!(r2.node(0), &[1.0]);
        assert_eq!(r2.node(1), &[-1.0]);
        assert_eq!(r2.total_weight(), 2.0);

        let r3 = equator_rule(3, 256).unwrap();
        assert!((r3.total_weight() - 2.0 * PI).abs() < 1e-12);
        assert!((r3.weight(0) - 2.0 * PI / 256.0).abs() < 1e-15);

        let r4 = equator_rule(4, 64).unwrap();
        assert_eq!(r4.len(), 64 * 32);
        assert!((r4.total_weight() - 4.0 * PI).abs() < 1e-10);

        for n in 5..=6 {
            let r = equator_rule(n, 8).unwrap();
            assert!((r.total_weight() - sphere_volume(n - 2)).abs() < 1e-10);
        }
    }

    #[test]
    fn equator_rule_errors() {
        assert_eq!(equator_rule(7, 8), Err(Error::UnsupportedDimension(7)));
        assert_eq!(equator_rule(1, 8), Err(Error::UnsupportedDimension(1)));
        assert_eq!(equator_rule(3, 1), Err(Error::ResolutionTooSmall(1)));
    }

    #[test]
    fn nodes_lie_on_sphere() {
        for n in 3..=6 {
            let r = equator_rule(n, 10).unwrap();
            for (eta, w) in r.iter() {
                assert!((linalg::norm(eta) - 1.0).abs() < 1e-14);
                assert!(w > 0.0);
            }
        }
    }

    #[test]
    fn s2_rule_integrates_monomials() {
        // ∫_{S²} x² = 4π/3, ∫ x⁴ = 4π/5, ∫ x²y²z² = 4π/105.
        let r = equator_rule(4, 16).unwrap();
        let q = |f: &dyn Fn(&[f64]) -> f64| r.iter().map(|(e, w)| w * f(e)).sum::<f64>();
        assert!((q(&|e| e[0] * e[0]) - 4.0 * PI / 3.0).abs() < 1e-12);
        assert!((q(&|e| libm::pow(e[2], 4.0)) - 4.0 * PI / 5.0).abs() < 1e-12);
        assert!((q(&|e| e[0] * e[0] * e[1] * e[1] * e[2] * e[2]) - 4.0 * PI / 105.0).abs() < 1e-12);
        assert!(q(&|e| e[0] * e[1] * e[1] * e[2]).abs() < 1e-12);
    }

    #[test]
    fn s3_rule_integrates_monomials() {
        // On S³: ∫ x₁² = vol/4, ∫ x₁⁴ = vol·3/(4·6) = vol/8.
        let r = equator_rule(5, 12).unwrap();
        let vol = sphere_volume(3);
        let m2: f64 = r.iter().map(|(e, w)| w * e[3] * e[3]).sum();
        let m4: f64 = r.iter().map(|(e, w)| w * libm::pow(e[0], 4.0)).sum();
        assert!((m2 - vol / 4.0).abs() < 1e-12);
        assert!((m4 - vol / 8.0).abs() < 1e-12);
    }

    #[test]
    fn circle_rule_spectral() {
        // Trigonometric polynomials of degree < N/2 are integrated exactly.
        let r = equator_rule(3, 32).unwrap();
        for k in 1..16 {
            let got: f64 = r
                .iter()
                .map(|(e, w)| w * libm::cos(k as f64 * libm::atan2(e[1], e[0])))
                .sum();
            assert!(got.abs() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn probe_grids_have_expected_size() {
        assert_eq!(probe_directions(2).unwrap().len(), 2000);
        assert_eq!(probe_directions(3).unwrap().len(), 2000);
        assert_eq!(probe_directions(4).unwrap().len(), 2000);
        assert_eq!(probe_directions(5).unwrap().len(), 2000);
        assert_eq!(probe_directions(6).unwrap().len(), 2048);
        for d in probe_directions(5).unwrap() {
            assert!((linalg::norm(d.as_slice()) - 1.0).abs() < 1e-14);
        }
    }
}
