//! `analyze`, `sections` and `harmonics`. Each takes a fully resolved
//! [`RunConfig`] and writes its artifacts into `output_dir`.

use std::path::PathBuf;

use rayon::prelude::*;
use serde::Serialize;
use starsym_core::detector::{Sampler, SweepOptions};
use starsym_core::harmonics::{self, MultiplierEstimate, MultiplierOptions};
use starsym_core::roots::RootOptions;
use starsym_core::slice::{derivative_at_zero, CurveSource, DerivativeOptions};
use starsym_core::sphere::{default_resolution, make_frame};
use starsym_core::{Direction, EquatorQuadrature, RadialField};

use crate::config::{Command, CurveKind, Format, RunConfig, SamplerName, ZRange};
use crate::error::CliError;
use crate::{output, parallel};

pub const DEFAULT_DIRS: usize = 100;
pub const DEFAULT_LMAX: usize = 10;
pub const DEFAULT_Z_GRID: ZRange = ZRange { start: -0.9, stop: 0.9, step: 0.05 };

/// Fills every default the command uses, so artifacts record them.
pub fn resolve(mut cfg: RunConfig) -> Result<RunConfig, CliError> {
    if let Some(path) = &cfg.body_spec {
        if cfg.body.is_none() {
            cfg.body = Some(crate::body::BodySpec::load(path)?);
        }
    }
    if let Some(body) = &cfg.body {
        match cfg.dim {
            None => cfg.dim = Some(body.dim),
            Some(d) if d != body.dim => {
                return Err(CliError::Usage(format!("--dim {d} disagrees with body dim {}", body.dim)))
            }
            _ => {}
        }
    }
    match cfg.command {
        Command::Analyze => {
            let n = need_body(&cfg)?;
            cfg.resolution.get_or_insert(default_resolution(n));
            cfg.num_dirs.get_or_insert(DEFAULT_DIRS);
            cfg.sampler.get_or_insert(SamplerName::Antipodal);
            if cfg.formats.is_empty() {
                cfg.formats = vec![Format::Csv, Format::Json];
            }
        }
        Command::Sections => {
            let n = need_body(&cfg)?;
            cfg.resolution.get_or_insert(default_resolution(n));
            cfg.z_grid.get_or_insert(DEFAULT_Z_GRID).validate()?;
            if cfg.kinds.is_empty() {
                cfg.kinds = vec![CurveKind::Conical, CurveKind::Hyperplane];
            }
            let xi = cfg.xi.get_or_insert_with(|| {
                let mut e = vec![0.0; n];
                e[0] = 1.0;
                e
            });
            if xi.len() != n {
                return Err(CliError::Usage(format!("--xi has {} components but dim is {n}", xi.len())));
            }
            if cfg.formats.is_empty() {
                cfg.formats = vec![Format::Csv];
            }
        }
        Command::Harmonics => {
            let n = *cfg.dim.get_or_insert(3);
            if n != 2 && n != 3 {
                return Err(CliError::Usage(format!(
                    "dimension {n} is unsupported for harmonic decomposition (use 2 or 3)"
                )));
            }
            let l_max = *cfg.l_max.get_or_insert(DEFAULT_LMAX);
            if n == 3 && l_max > harmonics::MAX_DEGREE {
                return Err(CliError::Usage(format!(
                    "--lmax {l_max} exceeds the supported maximum {}",
                    harmonics::MAX_DEGREE
                )));
            }
            if n == 2 && l_max > 20 {
                return Err(CliError::Usage(format!("--lmax {l_max} exceeds the planar maximum 20")));
            }
            cfg.resolution.get_or_insert(default_resolution(n));
            cfg.num_dirs.get_or_insert(MultiplierOptions::default().num_xi);
            if cfg.formats.is_empty() {
                cfg.formats = vec![Format::Csv];
            }
        }
        Command::Verify => {
            if cfg.formats.is_empty() {
                cfg.formats = vec![Format::Json];
            }
        }
    }
    Ok(cfg)
}

fn need_body(cfg: &RunConfig) -> Result<usize, CliError> {
    cfg.body
        .as_ref()
        .map(|b| b.dim)
        .ok_or_else(|| CliError::Usage("--body is required".into()))
}

fn build_body(cfg: &RunConfig) -> Result<RadialField, CliError> {
    cfg.body
        .as_ref()
        .ok_or_else(|| CliError::Usage("--body is required".into()))?
        .build()
}

fn rule(cfg: &RunConfig, n: usize) -> Result<EquatorQuadrature, CliError> {
    Ok(EquatorQuadrature::new(n, cfg.resolution.unwrap_or(default_resolution(n)))?)
}

fn derivative_options(cfg: &RunConfig) -> DerivativeOptions {
    DerivativeOptions { fd: cfg.fd_options(), ..Default::default() }
}

#[derive(Serialize)]
struct DirectionValue<'a> {
    xi: &'a [f64],
    value: f64,
}

#[derive(Serialize)]
struct Slope {
    xi: Vec<f64>,
    fd_value: f64,
    transform_value: f64,
    residual: f64,
    ladder_monotone: bool,
}

#[derive(Serialize)]
struct AnalyzeReport<'a> {
    parameters: serde_json::Value,
    body: &'a str,
    verdict: &'static str,
    note: &'a str,
    max_abs: f64,
    l2_mean: f64,
    threshold: f64,
    argmax_index: usize,
    argmax_slope: Slope,
    ground_truth_odd_sup: Option<f64>,
    antipodal_defect: Option<f64>,
    values: Vec<DirectionValue<'a>>,
}

/// Outcome of `analyze`, for callers that want more than the files.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyzeSummary {
    pub report: starsym_core::detector::AsymmetryReport,
    pub argmax_fd_slope: f64,
    pub files: Vec<PathBuf>,
}

pub fn analyze(cfg: &RunConfig) -> Result<AnalyzeSummary, CliError> {
    let body = build_body(cfg)?;
    let n = body.dim();
    let sampler = match cfg.sampler.unwrap_or(SamplerName::Antipodal) {
        SamplerName::Antipodal => Sampler::AntipodalPaired,
        SamplerName::Fibonacci => Sampler::Fibonacci,
        SamplerName::Random => Sampler::Random(cfg.seed),
    };
    let opts = SweepOptions {
        num_dirs: cfg.num_dirs.unwrap_or(DEFAULT_DIRS),
        sampler,
        resolution: cfg.resolution,
        threshold: cfg.threshold,
        frame_seed: cfg.seed,
    };
    let report = parallel::detect(&body, opts)?;
    let xi = report.argmax_direction();
    let slope = derivative_at_zero(
        CurveSource::Conical(&body),
        &make_frame(xi, cfg.seed),
        &rule(cfg, n)?,
        derivative_options(cfg),
    )?;

    let parameters = cfg.recorded_parameters();
    let mut files = Vec::new();
    if cfg.formats.contains(&Format::Json) {
        let doc = AnalyzeReport {
            parameters: parameters.clone(),
            body: &report.body_id,
            verdict: report.verdict.name(),
            note: &report.note,
            max_abs: report.max_abs,
            l2_mean: report.l2_mean,
            threshold: report.threshold,
            argmax_index: report.argmax,
            argmax_slope: Slope {
                xi: xi.as_slice().to_vec(),
                fd_value: slope.fd_value,
                transform_value: slope.transform_value,
                residual: slope.residual,
                ladder_monotone: slope.ladder_monotone,
            },
            ground_truth_odd_sup: report.ground_truth_odd_sup,
            antipodal_defect: report.antipodal_defect(),
            values: report
                .xis
                .iter()
                .zip(&report.values)
                .map(|(x, v)| DirectionValue { xi: x.as_slice(), value: *v })
                .collect(),
        };
        files.push(output::write(&cfg.output_dir, "report.json", &output::json(&doc))?);
    }
    if cfg.formats.contains(&Format::Csv) {
        let mut header: Vec<String> = (1..=n).map(|i| format!("xi_{i}")).collect();
        header.push("value".into());
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let rows: Vec<Vec<String>> = report
            .xis
            .iter()
            .zip(&report.values)
            .map(|(x, v)| x.as_slice().iter().chain([v]).map(|c| output::num(*c)).collect())
            .collect();
        files.push(output::write(&cfg.output_dir, "values.csv", &output::csv(&parameters, &header, &rows))?);
    }
    Ok(AnalyzeSummary { argmax_fd_slope: slope.fd_value, report, files })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub kind: &'static str,
    pub zs: Vec<f64>,
    pub values: Vec<f64>,
    /// Finite-difference slope at `z = 0`.
    pub slope: f64,
    /// Equator transform of the matching field.
    pub transform: f64,
}

#[derive(Serialize)]
struct CurvesDoc<'a> {
    parameters: serde_json::Value,
    xi: &'a [f64],
    curves: &'a [Curve],
}

pub fn sections(cfg: &RunConfig) -> Result<(Vec<Curve>, Vec<PathBuf>), CliError> {
    let body = build_body(cfg)?;
    let n = body.dim();
    let xi_raw = cfg.xi.clone().unwrap_or_else(|| {
        let mut e = vec![0.0; n];
        e[0] = 1.0;
        e
    });
    let xi = Direction::new(&xi_raw).map_err(|e| CliError::Usage(format!("--xi: {e}")))?;
    let frame = make_frame(xi, cfg.seed);
    let rule = rule(cfg, n)?;
    let grid = cfg.z_grid.unwrap_or(DEFAULT_Z_GRID);
    grid.validate()?;
    let zs = grid.values();
    let kinds = if cfg.kinds.is_empty() {
        vec![CurveKind::Conical, CurveKind::Hyperplane]
    } else {
        cfg.kinds.clone()
    };

    let mut curves = Vec::new();
    for kind in kinds {
        let source = match kind {
            CurveKind::Conical => CurveSource::Conical(&body),
            CurveKind::Hyperplane => CurveSource::Hyperplane(&body),
        };
        let values = zs
            .par_iter()
            .map(|&z| source.evaluate(&frame, z, &rule, RootOptions::default()))
            .collect::<starsym_core::Result<Vec<f64>>>()?;
        let d = derivative_at_zero(source, &frame, &rule, derivative_options(cfg))?;
        curves.push(Curve {
            kind: kind.name(),
            zs: zs.clone(),
            values,
            slope: d.fd_value,
            transform: d.transform_value,
        });
    }

    let parameters = cfg.recorded_parameters();
    let mut files = Vec::new();
    if cfg.formats.contains(&Format::Csv) {
        let rows: Vec<Vec<String>> = curves
            .iter()
            .flat_map(|c| {
                c.zs.iter().zip(&c.values).map(move |(z, v)| {
                    vec![c.kind.to_string(), output::num(*z), output::num(*v), output::num(c.slope), output::num(c.transform)]
                })
            })
            .collect();
        let text = output::csv(&parameters, &["kind", "z", "value", "slope", "transform"], &rows);
        files.push(output::write(&cfg.output_dir, "curves.csv", &text)?);
    }
    if cfg.formats.contains(&Format::Json) {
        let doc = CurvesDoc { parameters: parameters.clone(), xi: xi.as_slice(), curves: &curves };
        files.push(output::write(&cfg.output_dir, "curves.json", &output::json(&doc))?);
    }
    if cfg.formats.contains(&Format::Svg) {
        let series: Vec<output::Series<'_>> = curves
            .iter()
            .map(|c| output::Series { label: c.kind, xs: &c.zs, ys: &c.values })
            .collect();
        files.push(output::write(&cfg.output_dir, "curves.svg", &output::svg(&series, "z", "volume", &parameters))?);
    }
    Ok((curves, files))
}

/// Multiplier rows for degrees `0..=l_max`: all orders on `S²`, cosine
/// (order 0) and sine (order 1) modes on the circle.
pub fn multiplier_rows(n: usize, l_max: usize, opts: MultiplierOptions) -> Result<Vec<MultiplierEstimate>, CliError> {
    let jobs: Vec<(usize, i64)> = match n {
        2 => (0..=l_max).flat_map(|k| [(k, 0), (k, 1)].into_iter().filter(move |&(k, o)| k > 0 || o == 0)).collect(),
        3 => (0..=l_max).flat_map(|l| (-(l as i64)..=l as i64).map(move |m| (l, m))).collect(),
        _ => {
            return Err(CliError::Usage(format!(
                "dimension {n} is unsupported for harmonic decomposition (use 2 or 3)"
            )))
        }
    };
    let rows = jobs
        .par_iter()
        .map(|&(l, m)| {
            if n == 2 {
                harmonics::estimate_multiplier_n2(l, m, opts)
            } else {
                harmonics::estimate_multiplier(l, m, opts)
            }
        })
        .collect::<starsym_core::Result<Vec<_>>>()?;
    Ok(rows)
}

pub fn harmonics(cfg: &RunConfig) -> Result<(Vec<MultiplierEstimate>, Vec<PathBuf>), CliError> {
    let n = cfg.dim.unwrap_or(3);
    let opts = MultiplierOptions {
        num_xi: cfg.num_dirs.unwrap_or(50),
        resolution: cfg.resolution.unwrap_or(default_resolution(n)),
        seed: cfg.seed,
    };
    let rows = multiplier_rows(n, cfg.l_max.unwrap_or(DEFAULT_LMAX), opts)?;
    let mut parameters = cfg.recorded_parameters();
    parameters["lambda"] = "estimated: least-squares fit of the transform against the field over sampled directions".into();
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| vec![r.degree.to_string(), r.order.to_string(), output::num(r.lambda), output::num(r.residual)])
        .collect();
    let mut files = Vec::new();
    if cfg.formats.contains(&Format::Csv) {
        let text = output::csv(&parameters, &["degree", "order", "lambda", "residual"], &table);
        files.push(output::write(&cfg.output_dir, "multipliers.csv", &text)?);
    }
    if cfg.formats.contains(&Format::Json) {
        #[derive(Serialize)]
        struct Row {
            degree: usize,
            order: i64,
            lambda: f64,
            residual: f64,
        }
        #[derive(Serialize)]
        struct Doc {
            parameters: serde_json::Value,
            rows: Vec<Row>,
        }
        let doc = Doc {
            parameters,
            rows: rows
                .iter()
                .map(|r| Row { degree: r.degree, order: r.order, lambda: r.lambda, residual: r.residual })
                .collect(),
        };
        files.push(output::write(&cfg.output_dir, "multipliers.json", &output::json(&doc))?);
    }
    Ok((rows, files))
}
