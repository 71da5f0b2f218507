//! The `verify` suite: named numerical checks of the identities the library
//! relies on, each with a measured residual and a tolerance.

use std::f64::consts::PI;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use starsym_core::detector::{Sampler, SweepOptions, Verdict};
use starsym_core::fd::FdOptions;
use starsym_core::harmonics::{self, fourier_check_n2, MultiplierOptions, TrigSeries};
use starsym_core::oracle::{SlabKind, SlabQuery};
use starsym_core::roots::RootOptions;
use starsym_core::slice::{
    conical_section, eq4_terms, equator_transform, hyperplane_section, majorant_check, CurveSource,
    DerivativeOptions,
};
use starsym_core::sphere::{default_resolution, make_frame, random_directions};
use starsym_core::{bodies, Direction, EquatorQuadrature, RadialField, Rotation, ScalarField};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::{output, parallel};

/// Inputs shared by all checks.
#[derive(Debug, Clone, Copy)]
pub struct VerifyContext {
    /// Equator resolution for `n ≥ 3`; `None` uses the defaults.
    pub resolution: Option<usize>,
    pub seed: u64,
    pub fd: FdOptions,
}

impl VerifyContext {
    pub fn from_config(cfg: &RunConfig) -> Self {
        Self { resolution: cfg.resolution, seed: cfg.seed, fd: cfg.fd_options() }
    }

    pub fn rule(&self, n: usize) -> starsym_core::Result<EquatorQuadrature> {
        let r = if n == 2 { 2 } else { self.resolution.unwrap_or(default_resolution(n)) };
        EquatorQuadrature::new(n, r)
    }

    fn derivative_options(&self) -> DerivativeOptions {
        DerivativeOptions { fd: self.fd, ..Default::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub description: &'static str,
    /// `None` when the check could not be evaluated.
    pub residual: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

struct Outcome {
    residual: f64,
    tolerance: f64,
    passed: bool,
    detail: String,
}

impl Outcome {
    fn at_most(residual: f64, tolerance: f64, detail: String) -> Self {
        Self { residual, tolerance, passed: residual <= tolerance, detail }
    }
}

type CheckFn = fn(&VerifyContext) -> Result<Outcome, starsym_core::Error>;

pub struct Check {
    pub name: &'static str,
    pub description: &'static str,
    run: CheckFn,
}

pub fn checks() -> Vec<Check> {
    vec![
        Check { name: "eq4", description: "FD slope of the conical section at z=0 equals the equator transform", run: eq4 },
        Check { name: "eq4_terms", description: "difference quotient splits into main and tail terms", run: eq4_split },
        Check { name: "eq4_limit", description: "main term tends to the equator transform as z -> 0", run: eq4_limit },
        Check { name: "tail", description: "tail term stays below its bound", run: tail },
        Check { name: "set_identity", description: "hyperplane and conical sections agree at z=0; ball closed forms", run: set_identity },
        Check { name: "majorant", description: "difference quotients never exceed L*pi/2", run: majorant },
        Check { name: "oracle", description: "section values agree with Monte Carlo slab estimates", run: oracle_agreement },
        Check { name: "even_annihilation", description: "transform of even harmonics vanishes", run: even_annihilation },
        Check { name: "odd_multipliers", description: "odd harmonics are scaled by nonzero multipliers", run: odd_multipliers },
        Check { name: "linear_multiplier", description: "degree-one multiplier equals 2*pi", run: linear_multiplier },
        Check { name: "xi_oddness", description: "A(-xi) = -A(xi)", run: xi_oddness },
        Check { name: "n2_fourier", description: "planar transform equals f'(t-pi/2) - f'(t+pi/2)", run: n2_fourier },
        Check { name: "linearity", description: "transform is linear in the field", run: linearity },
        Check { name: "odd_part", description: "transform depends only on the odd part", run: odd_part },
        Check { name: "rotation", description: "transform commutes with rotations", run: rotation },
        Check { name: "scaling", description: "transform of lambda*K scales by lambda^(n-1)", run: scaling },
        Check { name: "detector", description: "verdicts on the body library", run: detector_verdicts },
    ]
}

pub fn check_names() -> Vec<&'static str> {
    checks().iter().map(|c| c.name).collect()
}

pub fn run_checks(ctx: &VerifyContext, only: Option<&str>) -> Result<Vec<CheckResult>, CliError> {
    let selected: Vec<Check> = match only {
        None => checks(),
        Some(name) => {
            let picked: Vec<Check> = checks().into_iter().filter(|c| c.name == name).collect();
            if picked.is_empty() {
                return Err(CliError::Usage(format!(
                    "unknown check '{name}'; available: {}",
                    check_names().join(", ")
                )));
            }
            picked
        }
    };
    Ok(selected
        .into_iter()
        .map(|c| match (c.run)(ctx) {
            Ok(o) => CheckResult {
                name: c.name,
                description: c.description,
                residual: Some(o.residual),
                tolerance: o.tolerance,
                passed: o.passed,
                detail: o.detail,
            },
            Err(e) => CheckResult {
                name: c.name,
                description: c.description,
                residual: None,
                tolerance: f64::NAN,
                passed: false,
                detail: format!("error: {e}"),
            },
        })
        .collect())
}

#[derive(Serialize)]
struct VerifyDoc<'a> {
    parameters: serde_json::Value,
    passed: bool,
    checks: &'a [CheckResult],
}

/// Runs the suite and writes `verify.json`.
pub fn run(cfg: &RunConfig) -> Result<(Vec<CheckResult>, PathBuf), CliError> {
    let results = run_checks(&VerifyContext::from_config(cfg), cfg.only.as_deref())?;
    let passed = results.iter().all(|r| r.passed);
    let doc = VerifyDoc { parameters: cfg.recorded_parameters(), passed, checks: &results };
    let path = output::write(&cfg.output_dir, "verify.json", &output::json(&doc))?;
    Ok((results, path))
}

/// [`CliError::Verification`] naming the failed checks, if any.
pub fn failure(results: &[CheckResult]) -> Option<CliError> {
    let failed: Vec<String> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| match r.residual {
            Some(x) => format!("{} (residual {x:.3e}, tolerance {:.1e})", r.name, r.tolerance),
            None => format!("{} ({})", r.name, r.detail),
        })
        .collect();
    (!failed.is_empty()).then(|| CliError::Verification(failed.join("; ")))
}

/// Smooth library bodies with their dimension.
pub fn library() -> Vec<RadialField> {
    vec![
        bodies::ball(2, 1.0).unwrap(),
        bodies::shifted_ball(1.0, &[0.3, 0.1]).unwrap(),
        bodies::ellipsoid(&[1.4, 0.8]).unwrap(),
        bodies::ball(3, 1.5).unwrap(),
        bodies::shifted_ball(1.0, &[0.2, -0.1, 0.15]).unwrap(),
        bodies::ellipsoid(&[1.5, 1.0, 0.7]).unwrap(),
        bodies::harmonic_ball(0.1, 3, 1).unwrap(),
        bodies::harmonic_ball(0.08, 5, -2).unwrap(),
        bodies::harmonic_ball(0.1, 2, 0).unwrap(),
        // Degree 9: its meridian derivative reaches frequency 8 on the equator,
        // which coarse equator rules alias.
        bodies::harmonic_ball(0.05, 9, 3).unwrap(),
        bodies::shifted_ball(1.0, &[0.2, 0.0, -0.1, 0.1]).unwrap(),
        bodies::ellipsoid(&[1.3, 1.0, 0.9, 1.1]).unwrap(),
    ]
}

fn max_abs(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |m, v| if v.is_nan() { f64::NAN } else { m.max(v.abs()) })
}

fn eq4(ctx: &VerifyContext) -> Result<Outcome, starsym_core::Error> {
    let mut worst = 0.0f64;
    let mut unstable = 0;
    for (i, k) in library().iter().enumerate() {
        let n = k.dim();
        let rule = ctx.rule(n)?;
        let xis = random_directions(n, 24, ctx.seed.wrapping_add(i as u64))?;
        for d in parallel::derivatives(CurveSource::Conical(k), &xis, &rule, ctx.seed, ctx.derivative_options())? {
            worst = worst.max(d.residual);
            unstable += usize::from(!d.ladder_monotone);
        }
    }
    Ok(Outcome::at_most(
        worst,
        1e-6,
        format!("{} bodies x 24 directions; {unstable} non-monotone FD ladders", library().len()),
    ))
}

fn eq4_cases() -> Vec<RadialField> {
    vec![
        bodies::shifted_ball(1.0, &[0.3, -0.2]).unwrap(),
        bodies::shifted_ball(1.0, &[0.25, 0.1, -0.1]).unwrap(),
        bodies::harmonic_ball(0.1, 3, 2).unwrap(),
        bodies::shifted_ball(1.0, &[0.1, 0.2, 0.0, -0.1]).unwrap(),
    ]
}

fn eq4_split(ctx: &VerifyContext) -> Result<Outcome, starsym_core::Error> {
    let mut worst = 0.0f64;
    for k in eq4_cases() {
        let f = k.to_scalar_field();
        let rule = ctx.rule(k.dim())?;
        for xi in random_directions(k.dim(), 8, ctx.seed)? {
            let frame = make_frame(xi, ctx.seed);
            for z in [-0.3, 0.1, 0.01, 0.001] {
                let t = eq4_terms(&f, &frame, z, &rule)?;
                worst = worst.max((t.quotient - t.main - t.tail).abs());
            }
        }
    }
    Ok(Outcome::at_most(worst, 1e-10, "max |quotient - main - tail|".into()))
}

fn eq4_limit(ctx: &VerifyContext) -> Result<Outcome, starsym_core::Error> {
    let mut worst = 0.0f64;
    for k in eq4_cases() {
        let f = k.to_scalar_field();
        let rule = ctx.rule(k.dim())?;
        for (i, xi) in random_directions(k.dim(), 8, ctx.seed)?.into_iter().enumerate() {
            let frame = make_frame(xi, ctx.seed);
            let limit = equator_transform(&f, &make_frame(xi, ctx.seed ^ (i as u64 + 1)), &rule)?;
            let t = eq4_terms(&f, &frame, 1e-4, &rule)?;
            worst = worst.max((t.main - limit).abs());
        }
    }
    Ok(Outcome::at_most(worst, 1e-3, "max |main(z=1e-4) - A(xi)|, transform in an independent frame".into()))
}

fn tail(ctx: &VerifyContext) -> Result<Outcome, starsym_core::Error> {
    let mut worst = 0.0f64;
    let mut largest_ratio = 0.0f64;
    for k in eq4_cases() {
        let f = k.to_scalar_field();
        let rule = ctx.rule(k.dim())?;
        for xi in random_directions(k.dim(), 8, ctx.seed)? {
            let frame = make_frame(xi, ctx.seed);
            for z in [-0.5, -0.05, 0.2, 0.02, 0.002] {
                let t = eq4_terms(&f, &frame, z, &rule)?;
                worst = worst.max(t.tail.abs() - t.tail_bound);
                if t.tail_bound > 0.0 {
                    largest_ratio = largest_ratio.max(t.tail.abs() / t.tail_bound);
                }
            }
        }
    }
    Ok(Outcome::at_most(worst.max(0.0), 0.0, format!("max |tail| / bound = {largest_ratio:.4}")))
}

fn set_identity(ctx: &VerifyContext) -> Result<Outcome, starsym_core::Error> {
    let mut worst = 0.0f64;
    for (i, k) in library().iter().enumerate() {
        let rule = ctx.rule(k.dim())?;
        for xi in random_directions(k.dim(), 6, ctx.seed.wrapping_add(i as u64))? {
            let frame = make_frame(xi, ctx.seed);
            let c = conical_section(k, &frame, 0.0, &rule)?;
            let h = hyperplane_section(k, &frame, 0.0, &rule, RootOptions::default())?;
            worst = worst.max((c - h).abs());
        }
    }
    let ball = bodies::ball(3, 1.0)?;
    let rule = ctx.rule(3)?;
    let frame = make_frame(Direction::new(&[0.3, -0.4, 0.5])?, ctx.seed);
    for z in [-0.8, -0.3, 0.0, 0.45, 0.9] {
        let c = conical_section(&ball, &frame, z, &rule)?;
        let h = hyperplane_section(&ball, &frame, z, &rule, RootOptions::default())?;
        worst = worst.max((c - PI * (1.0 - z * z).sqrt()).abs());
        worst = worst.max((h - PI * (1.0 - z * z)).abs());
    }
    Ok(Outcome::at_most(worst, 1e-10, "conical vs hyperplane at z=0, unit ball closed forms".into()))
}

fn majorant(ctx: &VerifyContext) -> Result<Outcome, starsym_core::Error> {
    let probes = 100_000;
    let fields: Vec<ScalarField> = library().iter().map(RadialField::to_scalar_field).collect();
    let checks = fields
        .par_iter()
        .enumerate()
        .map(|(i, f)| majorant_check(f, probes, ctx.seed.wrapping_add(i as u64)))
        .collect::<starsym_core::Result<Vec<_>>>()?;
    let violations: usize = checks.iter().map(|c| c.violations).sum();
    let tightest = checks
        .iter()
        .filter(|c| c.constant > 0.0)
        .map(|c| c.max_quotient / c.constant)
        .fold(0.0, f64::max);
    Ok(Outcome::at_most(
        violations as f64,
        0.0,
        format!("{} bodies x {probes} probes; largest quotient / c = {tightest:.4}", checks.len()),
    ))
}

struct OracleCase {
    body: RadialField,
    kind: SlabKind,
    xi: Direction,
    z: f64,
    /// Closed form when known; otherwise the quadrature value is compared.
    exact: Option<f64>,
}

fn oracle_cases(seed: u64) -> starsym_core::Result<Vec<OracleCase>> {
    let ball = bodies::ball(3, 1.0)?;
    let e3 = Direction::axis(3, 2)?;
    let mut cases = vec![
        OracleCase { body: ball.clone(), kind: SlabKind::Cone, xi: e3, z: 0.0, exact: Some(PI) },
        OracleCase { body: ball.clone(), kind: SlabKind::Cone, xi: e3, z: 0.6, exact: Some(0.8 * PI) },
        OracleCase { body: ball, kind: SlabKind::Hyperplane, xi: e3, z: 0.5, exact: Some(0.75 * PI) },
        OracleCase {
            body: bodies::shifted_ball(1.0, &[0.5, 0.0])?,
            kind: SlabKind::Cone,
            xi: Direction::axis(2, 0)?,
            z: 0.0,
            exact: Some(3f64.sqrt()),
        },
        OracleCase {
            body: bodies::ellipsoid(&[2.0, 1.0, 1.0])?,
            kind: SlabKind::Hyperplane,
            xi: Direction::axis(3, 0)?,
            z: 0.0,
            exact: Some(PI),
        },
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let others = [
        bodies::shifted_ball(1.0, &[0.2, -0.1, 0.15])?,
        bodies::ellipsoid(&[1.5, 1.0, 0.7])?,
        bodies::harmonic_ball(0.1, 3, 1)?,
    ];
    for (i, body) in others.into_iter().enumerate() {
        let xi = random_directions(3, 1, seed.wrapping_add(100 + i as u64))?[0];
        for kind in [SlabKind::Cone, SlabKind::Hyperplane] {
            let z = rng.gen_range(-0.6..0.6);
            cases.push(OracleCase { body: body.clone(), kind, xi, z, exact: None });
        }
    }
    Ok(cases)
}

fn analytic(case: &OracleCase, ctx: &VerifyContext) -> starsym_core::Result<f64> {
    let rule = ctx.rule(case.body.dim())?;
    let frame = make_frame(case.xi, ctx.seed);
    match case.kind {
        SlabKind::Cone => conical_section(&case.body, &frame, case.z, &rule),
        SlabKind::Hyperplane => hyperplane_section(&case.body, &frame, case.z, &rule, RootOptions::default()),
    }
}

fn oracle_agreement(ctx: &VerifyContext) -> Result<Outcome, starsym_core::Error> {
    let mut worst = 0.0f64;
    let cases = oracle_cases(ctx.seed)?;
    for (i, case) in cases.iter().enumerate() {
        let q = SlabQuery {
            samples: 1_000_000,
            seed: ctx.seed.wrapping_add(i as u64),
            ..SlabQuery::new(case.kind, case.xi, case.z)
        };
        let mc = parallel::slab(&case.body, &q)?;
        let reference = match case.exact {
            Some(v) => v,
            None => analytic(case, ctx)?,
        };
        let allowed = (3.0 * mc.std_error).max(0.01 * reference.abs());
        worst = worst.max((mc.value - reference).abs() / allowed);
    }
    Ok(Outcome::at_most(
        worst,
        1.0,
        format!("{} queries; residual is |analytic - MC| / max(3 sigma, 1%)", cases.len()),
    ))
}

fn harmonic_rule(ctx: &VerifyContext) -> starsym_core::Result<MultiplierOptions> {
    Ok(MultiplierOptions {
        resolution: ctx.resolution.unwrap_or(default_resolution(3)),
        seed: ctx.seed,
        ..Default::default()
    })
}

fn even_annihilation(ctx: &VerifyContext) -> Result<Outcome, starsym_core::Error> {
    let rule = ctx.rule(3)?;
    let xis = random_directions(3, 50, ctx.seed)?;
    let jobs: Vec<(usize, i64)> =
        (0..=10).step_by(2).flat_map(|l: usize| (-(l as i64)..=l as i64).map(move |m| (l, m))).collect();
    let worst = jobs
        .par_iter()
        .map(|&(l, m)| {
            let y = harmonics::real_harmonic(l, m)?;
            Ok(max_abs(parallel::transform_values(&y, &xis, &rule, ctx.seed)?))
        })
        .collect::<starsym_core::Result<Vec<f64>>>()?;
    Ok(Outcome::at_most(max_abs(worst), 1e-8, format!("{} even harmonics x 50 directions", jobs.len())))
}

fn odd_multipliers(ctx: &VerifyContext) -> Result<Outcome, starsym_core::Error> {
    let opts = harmonic_rule(ctx)?;
    let jobs: Vec<(usize, i64)> =
        (1..=9).step_by(2).flat_map(|l: usize| (-(l as i64)..=l as i64).map(move |m| (l, m))).collect();
    let rows = jobs
        .par_iter()
        .map(|&(l, m)| harmonics::estimate_multiplier(l, m, opts))
        .collect::<starsym_core::Result<Vec<_>>>()?;
    let residual = rows.iter().map(|r| r.residual).fold(0.0, f64::max);
    let smallest = rows.iter().map(|r| r.lambda.abs()).fold(f64::INFINITY, f64::min);
    Ok(Outcome {
        residual,
        tolerance: 1e-7,
        passed: residual <= 1e-7 && smallest > 1e-3,
        detail: format!("max fit residual; smallest |lambda| over odd degrees = {smallest:.6}"),
    })
}

fn linear_multiplier(ctx: &VerifyContext) -> Result<Outcome, starsym_core::Error> {
    let opts = harmonic_rule(ctx)?;
    let worst = max_abs(
        (-1..=1)
            .map(|m| harmonics::estimate_multiplier(1, m, opts).map(|r| r.lambda - 2.0 * PI))
            .collect::<starsym_core::Result<Vec<f64>>>()?,
    );
    Ok(Outcome::at_most(worst, 1e-6, "max |lambda_1 - 2 pi| over orders".into()))
}

fn xi_oddness(ctx: &VerifyContext) -> Result<Outcome, starsym_core::Error> {
    let mut worst = 0.0f64;
    for (i, k) in library().iter().enumerate() {
        let f = k.to_scalar_field();
        let rule = ctx.rule(k.dim())?;
        let xis = random_directions(k.dim(), 20, ctx.seed.wrapping_add(i as u64))?;
        let neg: Vec<Direction> = xis.iter().map(|x| -*x).collect();
        let a = parallel::transform_values(&f, &xis, &rule, ctx.seed)?;
        let b = parallel::transform_values(&f, &neg, &rule, ctx.seed.wrapping_add(1))?;
        worst = worst.max(max_abs(a.iter().zip(&b).map(|(x, y)| x + y)));
    }
    Ok(Outcome::at_most(worst, 1e-8, "max |A(xi) + A(-xi)|, frames completed independently".into()))
}

fn n2_fourier(ctx: &VerifyContext) -> Result<Outcome, starsym_core::Error> {
    let rule = ctx.rule(2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let band = rng.gen_range(1..=20);
        let modes = (0..band).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let series = TrigSeries::new(rng.gen_range(-1.0..1.0), modes);
        let theta = rng.gen_range(-PI..PI);
        let t = equator_transform(&series.field(), &make_frame(Direction::from_angle(theta), 0), &rule)?;
        worst = worst.max((t - fourier_check_n2(&series, theta)).abs());
    }
    Ok(Outcome::at_most(worst, 1e-10, "1000 random series of band <= 20".into()))
}

fn linearity(ctx: &VerifyContext) -> Result<Outcome, starsym_core::Error> {
    let lib = library();
    let mut worst = 0.0f64;
    for pair in lib.windows(2).filter(|w| w[0].dim() == w[1].dim()) {
        let (f, g) = (pair[0].to_scalar_field(), pair[1].to_scalar_field());
        let h = ScalarField::linear_combination(&[(1.7, f.clone()), (-0.6, g.clone())])?;
        let rule = ctx.rule(f.dim())?;
        for xi in random_directions(f.dim(), 10, ctx.seed)? {
            let frame = make_frame(xi, ctx.seed);
            let lhs = equator_transform(&h, &frame, &rule)?;
            let rhs = 1.7 * equator_transform(&f, &frame, &rule)? - 0.6 * equator_transform(&g, &frame, &rule)?;
            worst = worst.max((lhs - rhs).abs());
        }
    }
    Ok(Outcome::at_most(worst, 1e-10, "A(1.7 f - 0.6 g) vs 1.7 A f - 0.6 A g".into()))
}

fn odd_part(ctx: &VerifyContext) -> Result<Outcome, starsym_core::Error> {
    let mut worst = 0.0f64;
    for k in library() {
        let f = k.to_scalar_field();
        let odd = f.odd_part();
        let rule = ctx.rule(f.dim())?;
        for xi in random_directions(f.dim(), 10, ctx.seed)? {
            let frame = make_frame(xi, ctx.seed);
            worst = worst.max((equator_transform(&f, &frame, &rule)? - equator_transform(&odd, &frame, &rule)?).abs());
        }
    }
    Ok(Outcome::at_most(worst, 1e-8, "max |A f - A f_odd|".into()))
}

fn rotation(ctx: &VerifyContext) -> Result<Outcome, starsym_core::Error> {
    let mut worst = 0.0f64;
    for (i, k) in library().iter().enumerate() {
        let n = k.dim();
        let rot = Rotation::random(n, ctx.seed.wrapping_add(i as u64))?;
        let f = k.to_scalar_field();
        let turned = k.rotated(&rot)?.to_scalar_field();
        let rule = ctx.rule(n)?;
        for xi in random_directions(n, 10, ctx.seed.wrapping_add(50 + i as u64))? {
            let a = equator_transform(&f, &make_frame(xi, ctx.seed), &rule)?;
            let b = equator_transform(&turned, &make_frame(rot.apply(&xi), ctx.seed.wrapping_add(7)), &rule)?;
            worst = worst.max((a - b).abs());
        }
    }
    Ok(Outcome::at_most(worst, 1e-8, "A(f o R^T)(R xi) vs A f (xi), frames completed independently".into()))
}

fn scaling(ctx: &VerifyContext) -> Result<Outcome, starsym_core::Error> {
    let mut worst = 0.0f64;
    for k in library() {
        let n = k.dim();
        let rule = ctx.rule(n)?;
        for lambda in [0.5, 1.7, 3.0] {
            let big = k.scaled(lambda)?.to_scalar_field();
            let factor = lambda.powi(n as i32 - 1);
            for xi in random_directions(n, 6, ctx.seed)? {
                let frame = make_frame(xi, ctx.seed);
                let a = equator_transform(&k.to_scalar_field(), &frame, &rule)?;
                let b = equator_transform(&big, &frame, &rule)?;
                worst = worst.max((b - factor * a).abs() / (factor * a.abs().max(1.0)));
            }
        }
    }
    Ok(Outcome::at_most(worst, 1e-8, "relative error of lambda^(n-1) scaling".into()))
}

fn detector_verdicts(ctx: &VerifyContext) -> Result<Outcome, starsym_core::Error> {
    let mut wrong = Vec::new();
    let mut weakest = f64::INFINITY;
    for k in library() {
        let n = k.dim();
        let opts = SweepOptions {
            num_dirs: 60,
            sampler: Sampler::AntipodalPaired,
            resolution: if n == 2 { None } else { ctx.resolution },
            threshold: None,
            frame_seed: ctx.seed,
        };
        let report = parallel::detect(&k, opts)?;
        let odd = report.ground_truth_odd_sup.unwrap_or(0.0);
        let expected = if odd > 1e-12 { Verdict::Asymmetric } else { Verdict::Symmetric };
        if report.verdict != expected {
            wrong.push(k.label().to_string());
        }
        if expected == Verdict::Asymmetric {
            weakest = weakest.min(report.max_abs / report.threshold);
        }
    }
    Ok(Outcome::at_most(
        wrong.len() as f64,
        0.0,
        if wrong.is_empty() {
            format!("all verdicts match parity; weakest asymmetric margin = {weakest:.3e} x threshold")
        } else {
            format!("wrong verdicts: {}", wrong.join(", "))
        },
    ))
}
