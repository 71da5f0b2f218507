//! Acceptance criteria, one line per criterion.
//!
//! Runs as a plain binary (`harness = false`) so the summary always prints;
//! the process exits non-zero when any criterion fails.

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, ExitCode, Output};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use starsym::parallel;
use starsym_core::bodies;
use starsym_core::detector::{self, SweepOptions, Verdict};
use starsym_core::harmonics::{estimate_multiplier, real_harmonic, MultiplierOptions};
use starsym_core::oracle::{SlabKind, SlabQuery};
use starsym_core::roots::RootOptions;
use starsym_core::slice::{
    conical_section, equator_transform, hyperplane_section, majorant_check, CurveSource, DerivativeOptions,
};
use starsym_core::sphere::{equator_rule, make_frame, random_directions};
use starsym_core::{Direction, RadialField, Rotation, ScalarField};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn core<T>(r: starsym_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn max_abs(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Volume of the unit ball in ℝ^d.
fn ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / d as f64 * ball_volume(d - 2),
    }
}

// 1. Slope at zero against the transform.

fn slope_cases(n: usize) -> Vec<RadialField> {
    match n {
        2 => vec![
            bodies::ball(2, 1.3).unwrap(),
            bodies::shifted_ball(1.0, &[0.3, 0.0]).unwrap(),
            bodies::shifted_ball(1.0, &[-0.1, 0.2]).unwrap(),
            bodies::ellipsoid(&[1.4, 0.7]).unwrap(),
        ],
        3 => vec![
            bodies::ball(3, 0.8).unwrap(),
            bodies::shifted_ball(1.0, &[0.2, -0.1, 0.2]).unwrap(),
            bodies::ellipsoid(&[1.5, 1.0, 0.7]).unwrap(),
            bodies::harmonic_ball(0.1, 3, 1).unwrap(),
            bodies::harmonic_ball(0.08, 5, -2).unwrap(),
        ],
        _ => vec![
            bodies::shifted_ball(1.0, &[0.1, 0.2, 0.0, -0.15]).unwrap(),
            bodies::ellipsoid(&[1.3, 1.0, 0.9, 1.1]).unwrap(),
        ],
    }
}

fn slope_at_zero() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for (n, dirs) in [(2, 100), (3, 100), (4, 20)] {
        let rule = core(equator_rule(n, starsym_core::sphere::default_resolution(n)))?;
        let xis = core(random_directions(n, dirs, 11 + n as u64))?;
        for body in slope_cases(n) {
            for source in [CurveSource::Conical(&body), CurveSource::Hyperplane(&body)] {
                let ds = core(parallel::derivatives(source, &xis, &rule, 3, DerivativeOptions::default()))?;
                for d in &ds {
                    worst = worst.max(d.residual);
                    count += 1;
                }
            }
        }
    }
    ensure(worst <= 1e-6, format!("max |fd - transform| = {worst:.3e} over {count} slopes"))?;
    Ok(format!("max |fd - transform| = {worst:.3e} over {count} slopes"))
}

// 2. Centrally symmetric bodies.

fn symmetric_bodies() -> Outcome {
    let bodies = vec![
        bodies::ball(2, 1.0).unwrap(),
        bodies::ellipsoid(&[2.0, 0.5]).unwrap(),
        bodies::ball(3, 2.0).unwrap(),
        bodies::ellipsoid(&[1.5, 1.0, 0.7]).unwrap(),
        bodies::harmonic_ball(0.1, 2, 1).unwrap(),
        bodies::harmonic_ball(0.05, 4, -3).unwrap(),
        bodies::ellipsoid(&[1.3, 1.0, 0.9, 1.1]).unwrap(),
    ];
    let mut worst: f64 = 0.0;
    for k in &bodies {
        let report = core(parallel::detect(k, SweepOptions::default()))?;
        ensure(report.verdict == Verdict::Symmetric, format!("{} reported asymmetric", k.label()))?;
        worst = worst.max(report.max_abs);
    }
    ensure(worst < 1e-7, format!("max |A| = {worst:.3e}"))?;
    Ok(format!("{} bodies symmetric, max |A| = {worst:.3e}", bodies.len()))
}

// 3. A slightly shifted ball is caught, with a consistent sign.

fn shifted_ball_detected() -> Outcome {
    let k = core(bodies::shifted_ball(1.0, &[0.1, 0.0, 0.0]))?;
    let opts = SweepOptions::default();
    let report = core(parallel::detect(&k, opts))?;
    let noise = core(detector::battery_noise(3, opts.resolution_for(3), false))?.max(detector::THRESHOLD_FLOOR);
    ensure(report.verdict == Verdict::Asymmetric, "verdict symmetric")?;
    ensure(report.max_abs > 100.0 * noise, format!("max |A| {:.3e} vs noise {noise:.3e}", report.max_abs))?;
    let xi = report.argmax_direction();
    let rule = core(equator_rule(3, opts.resolution_for(3)))?;
    let d = core(parallel::derivatives(CurveSource::Conical(&k), &[xi], &rule, 0, DerivativeOptions::default()))?;
    let (fd, a) = (d[0].fd_value, report.values[report.argmax]);
    ensure(fd.signum() == a.signum(), format!("fd slope {fd:.3e} vs transform {a:.3e}"))?;

    // The signal grows linearly with a small odd perturbation.
    let mut ratios = Vec::new();
    for eps in [0.01, 0.02, 0.04] {
        let hb = core(bodies::harmonic_ball(eps, 3, 0))?;
        ratios.push(core(parallel::detect(&hb, opts))?.max_abs / eps);
    }
    let spread = max_abs(ratios.iter().map(|r| r / ratios[0] - 1.0));
    ensure(spread < 0.05, format!("max|A|/eps spread {spread:.3e}"))?;
    Ok(format!(
        "max |A| = {:.3e} ({:.1e} x noise), signs agree, eps-scaling spread {spread:.2e}",
        report.max_abs,
        report.max_abs / noise
    ))
}

// 4. Harmonic multipliers.

fn legendre(l: usize, x: f64) -> f64 {
    let (mut p0, mut p1) = (1.0, x);
    if l == 0 {
        return p0;
    }
    for k in 1..l {
        let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    p1
}

fn multipliers() -> Outcome {
    let rule = core(equator_rule(3, 512))?;
    let xis = core(random_directions(3, 50, 2024))?;
    let mut even_worst: f64 = 0.0;
    for l in (0..=10).step_by(2) {
        for m in -(l as i64)..=l as i64 {
            let y = core(real_harmonic(l, m))?;
            for xi in &xis {
                even_worst = even_worst.max(core(equator_transform(&y, &make_frame(*xi, 5), &rule))?.abs());
            }
        }
    }
    ensure(even_worst <= 1e-8, format!("even degree max |T Y| = {even_worst:.3e}"))?;
    let opts = MultiplierOptions::default();
    let (mut min_lambda, mut worst_res, mut worst_oracle) = (f64::INFINITY, 0.0_f64, 0.0_f64);
    for l in (1..=9).step_by(2) {
        let expected = 2.0 * PI * l as f64 * legendre(l - 1, 0.0);
        for m in -(l as i64)..=l as i64 {
            let est = core(estimate_multiplier(l, m, opts))?;
            min_lambda = min_lambda.min(est.lambda.abs());
            worst_res = worst_res.max(est.residual);
            worst_oracle = worst_oracle.max((est.lambda - expected).abs());
        }
    }
    ensure(min_lambda > 1e-3, format!("min |lambda| = {min_lambda:.3e}"))?;
    ensure(worst_res <= 1e-7, format!("fit residual {worst_res:.3e}"))?;
    let l1 = core(estimate_multiplier(1, 0, opts))?.lambda;
    ensure((l1 - 2.0 * PI).abs() <= 1e-6, format!("lambda_1 = {l1}"))?;
    Ok(format!(
        "even max |TY| = {even_worst:.2e}, odd min |lambda| = {min_lambda:.3}, fit residual {worst_res:.2e}, \
         zonal oracle gap {worst_oracle:.2e}"
    ))
}

// 5. Planar Fourier identity.

fn planar_fourier() -> Outcome {
    let rule = core(equator_rule(2, 2))?;
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let modes: Vec<(f64, f64)> = (0..rng.gen_range(1..8)).map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let c0: f64 = rng.gen_range(-1.0..1.0);
        let deriv = {
            let modes = modes.clone();
            move |t: f64| -> f64 {
                modes
                    .iter()
                    .enumerate()
                    .map(|(i, (a, b))| {
                        let k = (i + 1) as f64;
                        k * (b * (k * t).cos() - a * (k * t).sin())
                    })
                    .sum()
            }
        };
        let value = {
            let modes = modes.clone();
            move |x: &[f64]| -> f64 {
                let t = x[1].atan2(x[0]);
                c0 + modes
                    .iter()
                    .enumerate()
                    .map(|(i, (a, b))| {
                        let k = (i + 1) as f64;
                        a * (k * t).cos() + b * (k * t).sin()
                    })
                    .sum::<f64>()
            }
        };
        let d2 = deriv.clone();
        let f = ScalarField::from_fns(2, value, move |x: &[f64], v: &[f64]| d2(x[1].atan2(x[0])) * (x[0] * v[1] - x[1] * v[0]));
        let theta: f64 = rng.gen_range(-PI..PI);
        let t = core(equator_transform(&f, &make_frame(Direction::from_angle(theta), 0), &rule))?;
        let expected = deriv(theta - PI / 2.0) - deriv(theta + PI / 2.0);
        worst = worst.max((t - expected).abs());
    }
    ensure(worst <= 1e-10, format!("max deviation {worst:.3e}"))?;
    Ok(format!("1000 random trigonometric polynomials, max deviation {worst:.2e}"))
}

// 6. Monte Carlo slab volumes against the quadrature sections.

fn mc_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let pool = [
        bodies::shifted_ball(1.0, &[0.3, -0.2]).unwrap(),
        bodies::ellipsoid(&[1.5, 0.8]).unwrap(),
        bodies::shifted_ball(1.0, &[0.2, -0.1, 0.15]).unwrap(),
        bodies::ellipsoid(&[1.5, 1.0, 0.7]).unwrap(),
        bodies::harmonic_ball(0.1, 3, 1).unwrap(),
        bodies::shifted_ball(1.0, &[0.1, 0.2, 0.0, -0.1]).unwrap(),
    ];
    let root = RootOptions::default();
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let k = &pool[rng.gen_range(0..pool.len())];
        let n = k.dim();
        let xi = core(random_directions(n, 1, rng.gen()))?[0];
        let z: f64 = rng.gen_range(-0.6..0.6);
        let kind = if i % 2 == 0 { SlabKind::Cone } else { SlabKind::Hyperplane };
        let rule = core(equator_rule(n, starsym_core::sphere::default_resolution(n)))?;
        let frame = make_frame(xi, 1);
        let exact = match kind {
            SlabKind::Cone => core(conical_section(k, &frame, z, &rule))?,
            SlabKind::Hyperplane => core(hyperplane_section(k, &frame, z, &rule, root))?,
        };
        let q = SlabQuery { samples: 400_000, seed: 900 + i, ..SlabQuery::new(kind, xi, z) };
        let est = core(parallel::slab(k, &q))?;
        let tol = (3.0 * est.std_error).max(0.01 * exact.abs());
        let gap = (est.value - exact).abs();
        ensure(gap <= tol, format!("{} {kind:?} z={z:.3}: mc {} vs {exact} (tol {tol:.2e})", k.label(), est.value))?;
        worst = worst.max(gap / tol);
    }

    // Ball sections have closed forms.
    let ball = core(bodies::ball(3, 1.0))?;
    let xi = core(Direction::axis(3, 0))?;
    let z = 0.4_f64;
    let cone = core(parallel::slab(&ball, &SlabQuery { samples: 400_000, ..SlabQuery::new(SlabKind::Cone, xi, z) }))?;
    let cone_exact = PI * (1.0 - z * z).sqrt();
    let plane = core(parallel::slab(&ball, &SlabQuery { samples: 400_000, ..SlabQuery::new(SlabKind::Hyperplane, xi, z) }))?;
    let plane_exact = ball_volume(2) * (1.0 - z * z);
    for (est, exact) in [(cone, cone_exact), (plane, plane_exact)] {
        let tol = (3.0 * est.std_error).max(0.01 * exact);
        ensure((est.value - exact).abs() <= tol, format!("ball: mc {} vs {exact}", est.value))?;
    }

    // Halving the slab width gives a consistent estimate.
    let k = &pool[3];
    let xi = core(Direction::new(&[0.3, -0.5, 0.8]))?;
    let wide = core(parallel::slab(k, &SlabQuery { samples: 400_000, delta: 0.01, ..SlabQuery::new(SlabKind::Hyperplane, xi, 0.2) }))?;
    let narrow = core(parallel::slab(k, &SlabQuery { samples: 400_000, delta: 0.005, ..SlabQuery::new(SlabKind::Hyperplane, xi, 0.2) }))?;
    ensure(wide.agrees_with(&narrow, 4.0), format!("delta 0.01 gives {} but 0.005 gives {}", wide.value, narrow.value))?;
    Ok(format!("20 random queries, worst gap {worst:.2} of tolerance; ball and slab-width checks agree"))
}

// 7. Majorant of the difference quotients.

fn majorant() -> Outcome {
    let mut fields = vec![
        ScalarField::linear(&[0.3, -0.4, 0.5]),
        core(real_harmonic(3, 1))?,
        core(real_harmonic(5, -2))?,
        core(real_harmonic(4, 4))?,
    ];
    for k in [
        bodies::harmonic_ball(0.1, 3, 1),
        bodies::shifted_ball(1.0, &[0.3, -0.1]),
        bodies::ellipsoid(&[1.4, 0.7]),
        bodies::shifted_ball(1.0, &[0.2, -0.1, 0.2]),
        bodies::ellipsoid(&[1.5, 1.0, 0.7]),
        bodies::shifted_ball(1.0, &[0.1, 0.2, 0.0, -0.15]),
    ] {
        fields.push(core(k)?.to_scalar_field());
    }
    let mut total = 0;
    let mut worst_ratio: f64 = 0.0;
    for (i, f) in fields.iter().enumerate() {
        if f.lipschitz_bound().is_none() {
            continue;
        }
        let c = core(majorant_check(f, 100_000, 31 + i as u64))?;
        ensure(c.violations == 0, format!("field {i}: {} violations", c.violations))?;
        worst_ratio = worst_ratio.max(c.max_quotient / c.constant);
        total += c.probes;
    }
    ensure(total >= 300_000, format!("only {total} probes"))?;
    Ok(format!("0 violations over {total} probes, max quotient/constant {worst_ratio:.3}"))
}

// 8. Structural invariants.

fn invariants() -> Outcome {
    let rule = core(equator_rule(3, 512))?;
    let xis = core(random_directions(3, 30, 808))?;
    let f = core(bodies::shifted_ball(1.0, &[0.2, -0.1, 0.15]))?.to_scalar_field();
    let g = core(real_harmonic(3, -1))?;
    let t = |h: &ScalarField, xi: &Direction, seed: u64| equator_transform(h, &make_frame(*xi, seed), &rule);
    let (mut lin, mut odd, mut even, mut flip, mut rot, mut scale) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    let combo = core(ScalarField::linear_combination(&[(1.7, f.clone()), (-0.6, g.clone())]))?;
    let rotation = core(Rotation::random(3, 77))?;
    let body = core(bodies::harmonic_ball(0.1, 3, 1))?;
    let rotated = core(body.rotated(&rotation))?.to_scalar_field();
    let scaled = core(body.scaled(1.6))?.to_scalar_field();
    let base = body.to_scalar_field();
    for (i, xi) in xis.iter().enumerate() {
        let s = i as u64;
        let (tf, tg) = (core(t(&f, xi, s))?, core(t(&g, xi, s))?);
        lin = lin.max((core(t(&combo, xi, s))? - (1.7 * tf - 0.6 * tg)).abs());
        odd = odd.max((core(t(&f.odd_part(), xi, s))? - tf).abs());
        even = even.max(core(t(&f.even_part(), xi, s))?.abs());
        flip = flip.max((core(t(&f, &-*xi, s))? + tf).abs());
        let tb = core(t(&base, xi, s))?;
        rot = rot.max((core(t(&rotated, &rotation.apply(xi), s + 1))? - tb).abs());
        let expected = 1.6_f64.powi(2) * tb;
        scale = scale.max((core(t(&scaled, xi, s))? - expected).abs() / expected.abs().max(1.6_f64.powi(2)));
    }
    ensure(lin <= 1e-10, format!("linearity {lin:.3e}"))?;
    ensure(odd <= 1e-8 && even <= 1e-8, format!("odd part {odd:.3e}, even part {even:.3e}"))?;
    ensure(flip <= 1e-8, format!("xi oddness {flip:.3e}"))?;
    ensure(rot <= 1e-8, format!("rotation {rot:.3e}"))?;
    ensure(scale <= 1e-8, format!("scaling {scale:.3e}"))?;

    // Both section functions share the value at z = 0.
    let k = core(bodies::ellipsoid(&[1.5, 1.0, 0.7]))?;
    let mut coincide: f64 = 0.0;
    for (i, xi) in xis.iter().enumerate() {
        let frame = make_frame(*xi, i as u64);
        let c = core(conical_section(&k, &frame, 0.0, &rule))?;
        let h = core(hyperplane_section(&k, &frame, 0.0, &rule, RootOptions::default()))?;
        coincide = coincide.max((c - h).abs());
    }
    ensure(coincide <= 1e-10, format!("sections at zero differ by {coincide:.3e}"))?;
    Ok(format!(
        "linearity {lin:.1e}, odd part {odd:.1e}, xi-oddness {flip:.1e}, rotation {rot:.1e}, scaling {scale:.1e}, \
         sections at zero {coincide:.1e}"
    ))
}

// 9. Command line contract.

fn starsym(args: &[&str]) -> Result<Output, String> {
    Command::new(env!("CARGO_BIN_EXE_starsym")).args(args).output().map_err(|e| e.to_string())
}

fn expect_code(args: &[&str], code: i32) -> Result<Output, String> {
    let out = starsym(args)?;
    ensure(
        out.status.code() == Some(code),
        format!(
            "`starsym {}` exited {:?}, expected {code}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr).trim()
        ),
    )?;
    Ok(out)
}

fn dir_bytes(dir: &Path) -> Result<Vec<(String, Vec<u8>)>, String> {
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .map(|e| e.map(|e| e.path()).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            std::fs::read(&p).map(|b| (name, b)).map_err(|e| e.to_string())
        })
        .collect()
}

fn cli() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |s: &str| tmp.path().join(s).to_string_lossy().into_owned();
    let spec = path("body.json");
    std::fs::write(&spec, r#"{"kind": "shifted_ball", "dim": 3, "params": {"radius": 1.0, "center": [0.1, 0.0, 0.0]}}"#)
        .map_err(|e| e.to_string())?;

    expect_code(&["verify", "--out", &path("verify")], 0)?;
    let coarse = expect_code(&["verify", "--resolution", "8", "--out", &path("coarse")], 1)?;
    let stderr = String::from_utf8_lossy(&coarse.stderr);
    ensure(stderr.contains("eq4") && stderr.contains("residual"), format!("coarse run reported: {stderr}"))?;

    let runs: [&[&str]; 3] = [
        &["analyze", "--body", &spec, "--dirs", "200", "--resolution", "512", "--seed", "7"],
        &["sections", "--body", &spec, "--kind", "conical,hyperplane", "--z", "-0.9:0.9:0.05", "--formats", "csv,svg,json"],
        &["harmonics", "--dim", "3", "--lmax", "10", "--formats", "csv,json"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let out = path(&format!("run{i}_{rep}"));
            let mut full = args.to_vec();
            full.extend(["--out", &out]);
            expect_code(&full, 0)?;
            outputs.push(dir_bytes(Path::new(&out))?);
        }
        ensure(!outputs[0].is_empty(), format!("`{}` wrote nothing", args[0]))?;
        ensure(outputs[0] == outputs[1], format!("`{}` output differs between runs", args[0]))?;
    }

    let no_dim = path("no_dim.json");
    std::fs::write(&no_dim, r#"{"kind": "ball", "params": {"radius": 1.0}}"#).map_err(|e| e.to_string())?;
    let out = expect_code(&["analyze", "--body", &no_dim, "--out", &path("x")], 2)?;
    ensure(String::from_utf8_lossy(&out.stderr).contains("dim"), "missing dim not named")?;
    expect_code(&["sections", "--body", &spec, "--z", "-1.2:0.5:0.1", "--out", &path("x")], 2)?;
    expect_code(&["harmonics", "--dim", "4", "--out", &path("x")], 2)?;
    expect_code(&["verify", "--only", "no_such_check", "--out", &path("x")], 2)?;
    Ok("verify 0, coarse verify 1, byte-identical reruns, usage errors 2".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("slope at zero matches the transform", slope_at_zero),
        ("symmetric bodies give a vanishing transform", symmetric_bodies),
        ("shifted ball is detected", shifted_ball_detected),
        ("harmonic multipliers", multipliers),
        ("planar Fourier form", planar_fourier),
        ("Monte Carlo slab oracle", mc_oracle),
        ("difference quotient majorant", majorant),
        ("structural invariants", invariants),
        ("command line contract", cli),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
