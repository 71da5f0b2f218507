//! Bracketed scalar root refinement.

/// Bisection and polishing controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Bisect until the bracket is narrower than this.
    pub width: f64,
    /// Secant steps applied after bisection (kept inside the bracket).
    pub polish_steps: usize,
    /// Points in the scan that rejects multiple sign changes; 0 disables it.
    pub scan_points: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            width: 1e-12,
            polish_steps: 3,
            scan_points: 64,
        }
    }
}

/// Root of `g` in `[lo, hi]` where `g(lo)` and `g(hi)` differ in sign (or one
/// vanishes). Returns `None` when the endpoints do not bracket a root.
pub fn bracketed_root<G>(g: G, mut lo: f64, mut hi: f64, opts: RootOptions) -> Option<f64>
where
    G: Fn(f64) -> f64,
{
    let mut g_lo = g(lo);
    let mut g_hi = g(hi);
    if g_lo == 0.0 {
        return Some(lo);
    }
    if g_hi == 0.0 {
        return Some(hi);
    }
    if !(g_lo.is_finite() && g_hi.is_finite()) || g_lo.signum() == g_hi.signum() {
        return None;
    }
    while hi - lo > opts.width {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let g_mid = g(mid);
        if g_mid == 0.0 {
            return Some(mid);
        }
        if g_mid.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g_mid;
        } else {
            hi = mid;
            g_hi = g_mid;
        }
    }
    // Secant polish from the final bracket.
    let mut x = lo - g_lo * (hi - lo) / (g_hi - g_lo);
    let (a, b) = (lo, hi);
    let (mut x_prev, mut g_prev) = (lo, g_lo);
    for _ in 0..opts.polish_steps {
        let gx = g(x);
        if gx == 0.0 || gx == g_prev {
            break;
        }
        let next = x - gx * (x - x_prev) / (gx - g_prev);
        if !(a..=b).contains(&next) {
            break;
        }
        x_prev = x;
        g_prev = gx;
        x = next;
    }
    Some(x.clamp(a, b))
}

/// Number of sign changes of `g` on `points` equispaced samples of `[lo, hi]`.
pub fn sign_changes<G>(g: G, lo: f64, hi: f64, points: usize) -> usize
where
    G: Fn(f64) -> f64,
{
    let points = points.max(2);
    let mut changes = 0;
    let mut prev = g(lo);
    for i in 1..points {
        let t = lo + (hi - lo) * i as f64 / (points - 1) as f64;
        let cur = g(t);
        if cur != 0.0 && prev != 0.0 && cur.signum() != prev.signum() {
            changes += 1;
        }
        if cur != 0.0 {
            prev = cur;
        }
    }
    changes
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bracketed_root(|x| x * x - 2.0, 0.0, 2.0, RootOptions::default()).unwrap();
        assert!((r - core::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn transcendental_root() {
        // cos x = x
        let r = bracketed_root(|x| libm::cos(x) - x, 0.0, 1.0, RootOptions::default()).unwrap();
        assert!((r - 0.7390851332151607).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_bracket() {
        assert_eq!(bracketed_root(|x| x * x + 1.0, -1.0, 1.0, RootOptions::default()), None);
    }

    #[test]
    fn endpoint_root() {
        assert_eq!(bracketed_root(|x| x, 0.0, 1.0, RootOptions::default()), Some(0.0));
    }

    #[test]
    fn counts_sign_changes() {
        assert_eq!(sign_changes(libm::sin, 0.1, 10.0, 200), 3);
        assert_eq!(sign_changes(|x| x - 0.5, 0.0, 1.0, 64), 1);
    }
}
