//! Monte Carlo slab estimators for section measures.
//!
//! A section measure is recovered as the volume of `K` inside a thin slab
//! around the section, divided by the slab thickness. Points are drawn
//! uniformly from a simple region containing `K ∩ slab`:
//!
//! * hyperplane slab `|⟨x, ξ⟩ − z| < δ`: the box `[−R, R]^{n-1} × (z−δ, z+δ)`
//!   in an orthonormal frame of `ξ`, `R = max ρ`; the estimate is
//!   `(2R)^{n-1}` times the fraction of points in `K`;
//! * cone slab `|cos∠(ξ, x) − z| < δ`: the ball of radius `R` cut to the
//!   slab, sampled exactly (height of the direction from its marginal
//!   density on the band, radius from `r^{n-1}`). In latitude coordinates
//!   the volume element is `r · dr · dA_cone · dψ`, so each hit is weighted
//!   by `1/r` and the total divided by `Δψ = arcsin(z+δ) − arcsin(z−δ)`. The
//!   `1/r` weight is averaged over radial shells to keep the variance finite
//!   in the plane.
//!
//! Neither estimator uses the quadrature formulas in [`crate::slice`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::RadialField;
use crate::linalg;
use crate::sphere::{make_frame, random_direction, sphere_volume, Direction, MAX_DIM};
use crate::{Error, Result};

pub const MIN_SAMPLES: usize = 10_000;
pub const DEFAULT_DELTA: f64 = 0.01;
pub const DEFAULT_SAMPLES: usize = 1_000_000;
const SHELLS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabEstimate {
    pub value: f64,
    /// Sample standard deviation over `√samples`.
    pub std_error: f64,
    pub samples: usize,
    pub slab_half_width: f64,
    pub workers: usize,
}

impl SlabEstimate {
    /// Pools estimates over disjoint sample streams.
    pub fn combine(parts: &[SlabEstimate]) -> Option<SlabEstimate> {
        let first = parts.first()?;
        let total: usize = parts.iter().map(|p| p.samples).sum();
        let n = total as f64;
        let value = parts.iter().map(|p| p.samples as f64 * p.value).sum::<f64>() / n;
        let var = parts
            .iter()
            .map(|p| {
                let w = p.samples as f64 * p.std_error;
                w * w
            })
            .sum::<f64>();
        Some(SlabEstimate {
            value,
            std_error: libm::sqrt(var) / n,
            samples: total,
            slab_half_width: first.slab_half_width,
            workers: parts.iter().map(|p| p.workers).sum(),
        })
    }

    /// `|a − b| ≤ k·√(σ_a² + σ_b²)`.
    pub fn agrees_with(&self, other: &SlabEstimate, k: f64) -> bool {
        (self.value - other.value).abs() <= k * libm::hypot(self.std_error, other.std_error)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SlabKind {
    Cone,
    Hyperplane,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabQuery {
    pub kind: SlabKind,
    pub xi: Direction,
    pub z: f64,
    pub delta: f64,
    pub samples: usize,
    pub seed: u64,
}

impl SlabQuery {
    pub fn new(kind: SlabKind, xi: Direction, z: f64) -> Self {
        Self {
            kind,
            xi,
            z,
            delta: DEFAULT_DELTA,
            samples: DEFAULT_SAMPLES,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.z > -1.0 && self.z < 1.0) {
            return Err(Error::HeightOutOfRange(self.z));
        }
        let limit = (1.0 - self.z.abs()).min(self.z.abs() + 1.0);
        if !(self.delta > 0.0 && self.delta < limit) {
            return Err(Error::InvalidParameter(alloc::format!(
                "slab half-width must lie in (0, {limit}), got {}",
                self.delta
            )));
        }
        if self.samples < MIN_SAMPLES {
            return Err(Error::InvalidParameter(alloc::format!(
                "need at least {MIN_SAMPLES} samples, got {}",
                self.samples
            )));
        }
        Ok(())
    }

    /// Number of samples drawn by `worker` out of `workers`.
    pub fn worker_share(&self, worker: usize, workers: usize) -> usize {
        self.samples / workers + usize::from(worker < self.samples % workers)
    }
}

/// Runs stream `worker` of a query split over `workers` streams. Results
/// depend only on `(query, worker, workers)`.
pub fn run_worker(k: &RadialField, q: &SlabQuery, worker: usize, workers: usize) -> Result<SlabEstimate> {
    q.validate()?;
    if workers == 0 || worker >= workers {
        return Err(Error::InvalidParameter(alloc::format!("worker {worker} of {workers}")));
    }
    let n = k.dim();
    if q.xi.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: q.xi.dim() });
    }
    let count = q.worker_share(worker, workers);
    let mut rng = ChaCha8Rng::seed_from_u64(q.seed);
    rng.set_stream(worker as u64);

    let radius = k.rho_max();
    let frame = make_frame(q.xi, 0);
    let xi = q.xi.as_slice();
    let (lo, hi) = (q.z - q.delta, q.z + q.delta);
    let nf = n as f64;

    // Cone slab: marginal density of t = ⟨u, ξ⟩ is ∝ (1 − t²)^{(n-3)/2}.
    let band_density = |t: f64| libm::pow(1.0 - t * t, (nf - 3.0) / 2.0);
    let density_max = band_density(lo).max(band_density(hi)).max(band_density(0.0f64.clamp(lo, hi)));
    let ball_volume = sphere_volume(n - 1) / nf * libm::pow(radius, nf);
    let band_fraction = (band_antiderivative(n, hi) - band_antiderivative(n, lo))
        / (band_antiderivative(n, 1.0) - band_antiderivative(n, -1.0));
    let cone_scale = ball_volume * band_fraction / (libm::asin(hi) - libm::asin(lo));
    let box_scale = libm::pow(2.0 * radius, nf - 1.0);
    let shell_weight = shell_weights(n, radius);

    let mut sum = 0.0;
    let mut sum_sq = 0.0;
    let mut p = [0.0; MAX_DIM];
    let mut u = [0.0; MAX_DIM];
    let mut eta = [0.0; MAX_DIM];
    for _ in 0..count {
        let x = match q.kind {
            SlabKind::Hyperplane => {
                let h = rng.gen_range(lo..hi);
                for c in eta.iter_mut().take(n - 1) {
                    *c = rng.gen_range(-radius..radius);
                }
                frame.lift_into(&eta[..n - 1], &mut p);
                linalg::axpy(h, xi, &mut p[..n]);
                let r = linalg::norm(&p[..n]);
                if r > 0.0 {
                    for c in 0..n {
                        u[c] = p[c] / r;
                    }
                }
                if r == 0.0 || r <= k.radius(&u[..n]) {
                    box_scale
                } else {
                    0.0
                }
            }
            SlabKind::Cone => {
                let t = loop {
                    let t = rng.gen_range(lo..hi);
                    if rng.gen::<f64>() * density_max <= band_density(t) {
                        break t;
                    }
                };
                if n == 2 {
                    eta[0] = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                } else {
                    let d = random_direction(n - 1, &mut rng);
                    eta[..n - 1].copy_from_slice(d.as_slice());
                }
                frame.lift_into(&eta[..n - 1], &mut u);
                for c in u.iter_mut().take(n) {
                    *c *= libm::sqrt(1.0 - t * t);
                }
                linalg::axpy(t, xi, &mut u[..n]);
                let r = radius * libm::pow(1.0 - rng.gen::<f64>(), 1.0 / nf);
                if r <= k.radius(&u[..n]) {
                    let shell = ((r / radius * SHELLS as f64) as usize).min(SHELLS - 1);
                    cone_scale * shell_weight[shell]
                } else {
                    0.0
                }
            }
        };
        sum += x;
        sum_sq += x * x;
    }
    let m = count as f64;
    let mean = sum / m;
    let var = ((sum_sq - m * mean * mean) / (m - 1.0)).max(0.0);
    Ok(SlabEstimate {
        value: mean,
        std_error: libm::sqrt(var / m),
        samples: count,
        slab_half_width: q.delta,
        workers: 1,
    })
}

/// Antiderivative of `(1 − t²)^{(n-3)/2}` on `[−1, 1]`, from
/// `I_k = [t(1 − t²)^{k/2} + k I_{k-2}] / (k + 1)`.
fn band_antiderivative(n: usize, t: f64) -> f64 {
    let s = libm::sqrt((1.0 - t * t).max(0.0));
    let (mut k, mut acc) = if n.is_multiple_of(2) { (-1i32, libm::asin(t)) } else { (0, t) };
    while k < n as i32 - 3 {
        k += 2;
        acc = (t * linalg::powi(s, k) + k as f64 * acc) / (k + 1) as f64;
    }
    acc
}

/// `1/r_eff` per shell, where `r_eff` makes `∫ r^{n-1}/r_eff dr` equal
/// `∫ r^{n-2} dr` over the shell.
fn shell_weights(n: usize, radius: f64) -> [f64; SHELLS] {
    let mut w = [0.0; SHELLS];
    let nf = n as f64;
    for (s, slot) in w.iter_mut().enumerate() {
        let a = radius * s as f64 / SHELLS as f64;
        let b = radius * (s + 1) as f64 / SHELLS as f64;
        let upper = libm::pow(b, nf) - libm::pow(a, nf);
        let lower = libm::pow(b, nf - 1.0) - libm::pow(a, nf - 1.0);
        *slot = nf * lower / ((nf - 1.0) * upper);
    }
    w
}

pub fn run(k: &RadialField, q: &SlabQuery) -> Result<SlabEstimate> {
    run_worker(k, q, 0, 1)
}

/// Estimate of `vol_{n-1}(K ∩ C(ξ, z))`.
pub fn mc_cone_section(
    k: &RadialField,
    xi: Direction,
    z: f64,
    delta: f64,
    samples: usize,
    seed: u64,
) -> Result<SlabEstimate> {
    run(k, &SlabQuery { kind: SlabKind::Cone, xi, z, delta, samples, seed })
}

/// Estimate of `vol_{n-1}(K ∩ (ξ⊥ + zξ))`.
pub fn mc_hyperplane_section(
    k: &RadialField,
    xi: Direction,
    z: f64,
    delta: f64,
    samples: usize,
    seed: u64,
) -> Result<SlabEstimate> {
    run(k, &SlabQuery { kind: SlabKind::Hyperplane, xi, z, delta, samples, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies;
    use core::f64::consts::PI;

    #[test]
    fn rejects_bad_queries() {
        let k = bodies::ball(3, 1.0).unwrap();
        let xi = Direction::axis(3, 2).unwrap();
        assert!(mc_cone_section(&k, xi, 0.0, 0.0, 20_000, 0).is_err());
        assert!(mc_cone_section(&k, xi, 0.95, 0.1, 20_000, 0).is_err());
        assert!(mc_cone_section(&k, xi, 0.0, 0.01, 100, 0).is_err());
        assert!(mc_hyperplane_section(&k, xi, 1.0, 0.01, 20_000, 0).is_err());
    }

    #[test]
    fn unit_ball_values() {
        let k = bodies::ball(3, 1.0).unwrap();
        let xi = Direction::new(&[0.3, -0.2, 0.9]).unwrap();
        let e = mc_cone_section(&k, xi, 0.0, 0.01, 1_000_000, 1).unwrap();
        assert!((e.value - PI).abs() < 3.0 * e.std_error.max(0.01 * PI / 3.0));
        let e = mc_hyperplane_section(&k, xi, 0.5, 0.01, 1_000_000, 2).unwrap();
        assert!((e.value - 0.75 * PI).abs() < 0.03 * PI);
    }

    #[test]
    fn deterministic_and_splittable() {
        let k = bodies::shifted_ball(1.0, &[0.5, 0.0]).unwrap();
        let xi = Direction::axis(2, 0).unwrap();
        let q = SlabQuery { samples: 40_000, seed: 9, ..SlabQuery::new(SlabKind::Cone, xi, 0.0) };
        assert_eq!(run(&k, &q).unwrap(), run(&k, &q).unwrap());
        let parts: alloc::vec::Vec<_> = (0..4).map(|w| run_worker(&k, &q, w, 4).unwrap()).collect();
        let pooled = SlabEstimate::combine(&parts).unwrap();
        assert_eq!(pooled.samples, 40_000);
        assert_eq!(pooled.workers, 4);
        assert!(pooled.agrees_with(&run(&k, &q).unwrap(), 5.0));
    }

    #[test]
    fn band_fraction_matches_known_cases() {
        // n = 3: height of a uniform direction is uniform on [−1, 1].
        let f3 = |a: f64, b: f64| (band_antiderivative(3, b) - band_antiderivative(3, a)) / 2.0;
        assert!((f3(0.2, 0.5) - 0.15).abs() < 1e-15);
        // n = 2: t = cos θ with θ uniform.
        let total = band_antiderivative(2, 1.0) - band_antiderivative(2, -1.0);
        let frac = (band_antiderivative(2, 0.5) - band_antiderivative(2, 0.0)) / total;
        assert!((frac - (1.0 / 6.0)).abs() < 1e-15);
        for n in 4..=6 {
            let h = 1e-6;
            let d = (band_antiderivative(n, 0.3 + h) - band_antiderivative(n, 0.3 - h)) / (2.0 * h);
            assert!((d - libm::pow(0.91, (n as f64 - 3.0) / 2.0)).abs() < 1e-8, "n={n}");
        }
    }

    #[test]
    fn combine_single_part_is_identity() {
        let e = SlabEstimate { value: 1.5, std_error: 0.1, samples: 100, slab_half_width: 0.01, workers: 1 };
        assert_eq!(SlabEstimate::combine(&[e]), Some(e));
        assert_eq!(SlabEstimate::combine(&[]), None);
    }
}
