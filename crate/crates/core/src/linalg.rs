//! Small dense helpers for vectors of length `n ≤ 6`.

use alloc::vec::Vec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::sphere::{Direction, MAX_DIM};
use crate::{Error, Result};

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// `y += alpha * x`
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Euclidean distance.
#[inline]
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    libm::sqrt(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// Great-circle distance between two unit vectors.
pub fn geodesic(a: &[f64], b: &[f64]) -> f64 {
    // atan2 form is accurate for nearby and nearly antipodal points alike.
    let chord = distance(a, b);
    let sum = libm::sqrt(a.iter().zip(b).map(|(x, y)| (x + y) * (x + y)).sum());
    2.0 * libm::atan2(chord, sum)
}

/// Orthogonal `n × n` matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Rotation {
    dim: usize,
    m: Vec<f64>,
}

impl Rotation {
    pub fn identity(dim: usize) -> Self {
        let mut m = alloc::vec![0.0; dim * dim];
        for i in 0..dim {
            m[i * dim + i] = 1.0;
        }
        Self { dim, m }
    }

    /// Rotation by `angle` in the plane of coordinates `i` and `j`.
    pub fn givens(dim: usize, i: usize, j: usize, angle: f64) -> Self {
        let mut r = Self::identity(dim);
        let (s, c) = (libm::sin(angle), libm::cos(angle));
        r.m[i * dim + i] = c;
        r.m[i * dim + j] = -s;
        r.m[j * dim + i] = s;
        r.m[j * dim + j] = c;
        r
    }

    /// Deterministic pseudo-random proper rotation (Gram–Schmidt of seeded
    /// candidate rows, last row sign-fixed so that det = +1).
    pub fn random(dim: usize, seed: u64) -> Result<Self> {
        crate::sphere::check_dim(dim)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows: Vec<Direction> = Vec::with_capacity(dim);
        while rows.len() < dim {
            let mut v = [0.0; MAX_DIM];
            for x in v.iter_mut().take(dim) {
                *x = rng.gen_range(-1.0..1.0);
            }
            if let Some(d) = orthonormalize_against(&v[..dim], &rows) {
                rows.push(d);
            }
        }
        let mut m = Vec::with_capacity(dim * dim);
        for r in &rows {
            m.extend_from_slice(r.as_slice());
        }
        let mut rot = Self { dim, m };
        if rot.determinant() < 0.0 {
            for k in 0..dim {
                rot.m[(dim - 1) * dim + k] = -rot.m[(dim - 1) * dim + k];
            }
        }
        Ok(rot)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.m[i * self.dim + j]
    }

    /// `out = R x`
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim;
        for (row, o) in self.m.chunks_exact(n).zip(out.iter_mut()) {
            *o = dot(row, x);
        }
    }

    /// `out = Rᵀ x`
    pub fn apply_transpose_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim;
        for (j, o) in out.iter_mut().enumerate().take(n) {
            *o = (0..n).map(|i| self.m[i * n + j] * x[i]).sum();
        }
    }

    pub fn apply(&self, d: &Direction) -> Direction {
        let mut out = [0.0; MAX_DIM];
        self.apply_into(d.as_slice(), &mut out[..self.dim]);
        Direction::from_unit_unchecked(&out[..self.dim])
    }

    pub fn compose(&self, other: &Rotation) -> Result<Rotation> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let n = self.dim;
        let mut m = alloc::vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = (0..n).map(|k| self.m[i * n + k] * other.m[k * n + j]).sum();
            }
        }
        Ok(Rotation { dim: n, m })
    }

    /// Largest entry of `|RᵀR − I|`.
    pub fn orthogonality_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                let g: f64 = (0..n).map(|k| self.m[k * n + i] * self.m[k * n + j]).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g - target).abs());
            }
        }
        worst
    }

    fn determinant(&self) -> f64 {
        // Gaussian elimination with partial pivoting on a copy.
        let n = self.dim;
        let mut a = self.m.clone();
        let mut det = 1.0;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&p, &q| a[p * n + col].abs().total_cmp(&a[q * n + col].abs()))
                .unwrap_or(col);
            if a[pivot * n + col] == 0.0 {
                return 0.0;
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(pivot * n + k, col * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in col + 1..n {
                let factor = a[r * n + col] / p;
                for k in col..n {
                    a[r * n + k] -= factor * a[col * n + k];
                }
            }
        }
        det
    }
}

/// Two passes of modified Gram–Schmidt of `v` against `basis`; `None` when
/// the remainder is too short to normalize reliably.
pub(crate) fn orthonormalize_against(v: &[f64], basis: &[Direction]) -> Option<Direction> {
    let n = v.len();
    let mut w = [0.0; MAX_DIM];
    w[..n].copy_from_slice(v);
    let start = norm(&w[..n]);
    if start == 0.0 {
        return None;
    }
    for _ in 0..2 {
        for b in basis {
            let p = dot(&w[..n], b.as_slice());
            axpy(-p, b.as_slice(), &mut w[..n]);
        }
    }
    if norm(&w[..n]) < 1e-6 * start {
        return None;
    }
    Direction::new(&w[..n]).ok()
}

/// `x^k` by repeated squaring (`core` has no `powi` without `std`).
pub fn powi(x: f64, k: i32) -> f64 {
    let mut base = if k < 0 { 1.0 / x } else { x };
    let mut e = k.unsigned_abs();
    let mut acc = 1.0;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}
