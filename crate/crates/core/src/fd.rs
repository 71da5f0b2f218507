//! Central differences with Richardson extrapolation.

use alloc::vec::Vec;

use crate::Result;

/// Step ladder `h₀, h₀/2, …` for central differences at `z = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdOptions {
    pub h0: f64,
    /// Number of steps in the ladder (each half the previous).
    pub levels: usize,
}

impl Default for FdOptions {
    fn default() -> Self {
        Self { h0: 1e-2, levels: 4 }
    }
}

/// Raw central differences and their Richardson table.
#[derive(Debug, Clone, PartialEq)]
pub struct Ladder {
    /// `(h, (f(x+h) - f(x-h)) / 2h)` per level.
    pub steps: Vec<(f64, f64)>,
    /// Diagonal of the Richardson table; the last entry is the estimate.
    pub diagonal: Vec<f64>,
}

impl Ladder {
    pub fn value(&self) -> f64 {
        *self.diagonal.last().expect("ladder has at least one level")
    }

    /// Recomputes the Richardson limit from the raw steps.
    pub fn extrapolate(steps: &[(f64, f64)]) -> Vec<f64> {
        let mut row: Vec<f64> = Vec::with_capacity(steps.len());
        let mut diagonal = Vec::with_capacity(steps.len());
        for (i, &(_, d)) in steps.iter().enumerate() {
            let mut next = Vec::with_capacity(i + 1);
            next.push(d);
            let mut factor = 1.0;
            for j in 1..=i {
                factor *= 4.0;
                let v = next[j - 1] + (next[j - 1] - row[j - 1]) / (factor - 1.0);
                next.push(v);
            }
            diagonal.push(next[i]);
            row = next;
        }
        diagonal
    }

    /// True when successive extrapolants move by non-increasing amounts,
    /// i.e. the ladder behaves like a smooth function's.
    pub fn is_monotone(&self) -> bool {
        let moves: Vec<f64> = self.diagonal.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        moves.windows(2).all(|m| m[1] <= m[0] * 1.5 + 1e-14)
    }
}

/// Central-difference ladder for `f'(x)`.
pub fn central_ladder<F>(mut f: F, x: f64, opts: FdOptions) -> Result<Ladder>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut steps = Vec::with_capacity(opts.levels);
    let mut h = opts.h0;
    for _ in 0..opts.levels.max(1) {
        let d = (f(x + h)? - f(x - h)?) / (2.0 * h);
        steps.push((h, d));
        h *= 0.5;
    }
    let diagonal = Ladder::extrapolate(&steps);
    Ok(Ladder { steps, diagonal })
}

/// One Richardson level: `(4 D(h/2) − D(h)) / 3`.
#[inline]
pub fn richardson_derivative<F>(f: F, x: f64, h: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    let d1 = (f(x + h) - f(x - h)) / (2.0 * h);
    let d2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
    (4.0 * d2 - d1) / 3.0
}
