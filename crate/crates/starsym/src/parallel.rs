//! Rayon versions of the per-direction sweeps and Monte Carlo runs. Results
//! are identical to the serial versions in `starsym_core`.

use rayon::prelude::*;
use starsym_core::detector::{self, AsymmetryReport, SweepOptions};
use starsym_core::oracle::{self, SlabEstimate, SlabQuery};
use starsym_core::slice::{derivative_at_zero, CurveSource, DerivativeAtZero, DerivativeOptions};
use starsym_core::sphere::make_frame;
use starsym_core::{Direction, EquatorQuadrature, RadialField, Result, ScalarField};

/// Monte Carlo streams per query. Fixed so results do not depend on the
/// thread pool size.
pub const MC_WORKERS: usize = 8;

pub fn transform_values(
    f: &ScalarField,
    xis: &[Direction],
    rule: &EquatorQuadrature,
    frame_seed: u64,
) -> Result<Vec<f64>> {
    xis.par_iter()
        .map(|xi| detector::transform_at(f, *xi, rule, frame_seed))
        .collect()
}

pub fn sweep(f: &ScalarField, body_id: &str, opts: SweepOptions) -> Result<AsymmetryReport> {
    let n = f.dim();
    let resolution = opts.resolution_for(n);
    let rule = EquatorQuadrature::new(n, resolution)?;
    let xis = detector::sample_directions(n, opts.num_dirs, opts.sampler)?;
    let values = transform_values(f, &xis, &rule, opts.frame_seed)?;
    let threshold = match opts.threshold {
        Some(t) => t,
        None => detector::calibrate(n, resolution, true)?,
    };
    AsymmetryReport::assemble(body_id, xis, values, threshold, None)
}

pub fn detect(k: &RadialField, opts: SweepOptions) -> Result<AsymmetryReport> {
    let f = k.to_scalar_field();
    let mut report = sweep(&f, k.label(), opts)?;
    report.ground_truth_odd_sup = Some(f.odd_part().probe_sup());
    Ok(report)
}

/// Slope check at each direction, frames completed from `frame_seed + i`.
pub fn derivatives(
    source: CurveSource<'_>,
    xis: &[Direction],
    rule: &EquatorQuadrature,
    frame_seed: u64,
    opts: DerivativeOptions,
) -> Result<Vec<DerivativeAtZero>> {
    xis.par_iter()
        .enumerate()
        .map(|(i, xi)| derivative_at_zero(source, &make_frame(*xi, frame_seed.wrapping_add(i as u64)), rule, opts))
        .collect()
}

/// Slab estimate pooled over [`MC_WORKERS`] streams.
pub fn slab(k: &RadialField, q: &SlabQuery) -> Result<SlabEstimate> {
    let parts = (0..MC_WORKERS)
        .into_par_iter()
        .map(|w| oracle::run_worker(k, q, w, MC_WORKERS))
        .collect::<Result<Vec<_>>>()?;
    Ok(SlabEstimate::combine(&parts).expect("at least one worker"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use starsym_core::bodies;
    use starsym_core::detector::Sampler;
    use starsym_core::oracle::SlabKind;

    #[test]
    fn parallel_sweep_matches_serial() {
        let k = bodies::shifted_ball(1.0, &[0.1, 0.2, 0.0]).unwrap();
        let opts = SweepOptions { num_dirs: 40, sampler: Sampler::Random(4), threshold: Some(1e-9), ..Default::default() };
        assert_eq!(detect(&k, opts).unwrap(), detector::detect(&k, opts).unwrap());
    }

    #[test]
    fn pooled_slab_matches_manual_split() {
        let k = bodies::ball(3, 1.0).unwrap();
        let q = SlabQuery { samples: 80_000, seed: 3, ..SlabQuery::new(SlabKind::Hyperplane, Direction::axis(3, 0).unwrap(), 0.2) };
        let manual: Vec<_> = (0..MC_WORKERS).map(|w| oracle::run_worker(&k, &q, w, MC_WORKERS).unwrap()).collect();
        assert_eq!(slab(&k, &q).unwrap(), SlabEstimate::combine(&manual).unwrap());
    }
}
