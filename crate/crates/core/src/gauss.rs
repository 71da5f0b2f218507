//! Gauss rules on `[-1, 1]` for the weights `(1 - t²)^a`, built with the
//! Golub–Welsch eigenvalue method.

use alloc::vec;
use alloc::vec::Vec;

/// Nodes (ascending) and weights of the `m`-point Gauss rule for the weight
/// `(1 - t²)^a`, `a > -1`. Weights are scaled to sum to `total`.
///
/// The rule integrates `p(t)·(1 - t²)^a` exactly for polynomials `p` of degree
/// up to `2m - 1`.
pub fn gegenbauer(m: usize, a: f64, total: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1, "need at least one node");
    assert!(a > -1.0, "weight exponent must exceed -1");
    // Symmetric weight, so the Jacobi matrix has a zero diagonal. Monic
    // Gegenbauer recurrence with lambda = a + 1/2:
    // beta_k = k (k + 2 lambda - 1) / (4 (k + lambda) (k + lambda - 1)).
    let lambda = a + 0.5;
    let mut diag = vec![0.0; m];
    let mut off = vec![0.0; m];
    for k in 1..m {
        let kf = k as f64;
        let beta = kf * (kf + 2.0 * lambda - 1.0) / (4.0 * (kf + lambda) * (kf + lambda - 1.0));
        off[k - 1] = libm::sqrt(beta);
    }
    let mut first = vec![0.0; m];
    first[0] = 1.0;
    tridiagonal_ql(&mut diag, &mut off, &mut first);

    let mut pairs: Vec<(f64, f64)> = diag.iter().copied().zip(first.iter().map(|z| z * z)).collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let sum: f64 = pairs.iter().map(|p| p.1).sum();
    let nodes = pairs.iter().map(|p| p.0).collect();
    let weights = pairs.iter().map(|p| p.1 * total / sum).collect();
    (nodes, weights)
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix.
///
/// `d` holds the diagonal and is overwritten with eigenvalues; `e[i]` couples
/// rows `i` and `i + 1` (last entry ignored). `z` is the first row of the
/// accumulated eigenvector matrix, which is all Golub–Welsch needs.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) {
    let n = d.len();
    if n == 1 {
        return;
    }
    e[n - 1] = 0.0;
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            assert!(iterations < 60, "tridiagonal QL failed to converge");

            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = libm::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r.abs() } else { -r.abs() });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = libm::hypot(f, g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}
