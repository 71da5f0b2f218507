use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use starsym::config::{parse_list, Command, CurveKind, Format, RunConfig, SamplerName, ZRange};
use starsym::{commands, verify, CliError};

#[derive(Parser)]
#[command(name = "starsym", version, about = "Symmetry detection for star bodies via the equator transform")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args)]
struct Common {
    /// Equator quadrature resolution (default depends on the dimension).
    #[arg(long)]
    resolution: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest finite-difference step of the Richardson ladder.
    #[arg(long, default_value_t = 1e-2)]
    fd_step: f64,
    #[arg(long, default_value_t = 4)]
    fd_levels: usize,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Sub {
    /// Sweep directions and decide whether the body is 0-symmetric.
    Analyze {
        #[arg(long)]
        body: PathBuf,
        /// Number of sampled directions.
        #[arg(long)]
        dirs: Option<usize>,
        /// antipodal, fibonacci or random (seeded by --seed).
        #[arg(long)]
        sampler: Option<String>,
        /// Use a fixed threshold instead of calibrating one.
        #[arg(long)]
        threshold: Option<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Write conical and hyperplane section curves.
    Sections {
        #[arg(long)]
        body: PathBuf,
        /// Comma-separated: conical, hyperplane.
        #[arg(long)]
        kind: Option<String>,
        /// start:stop:step inside (-1, 1).
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        /// Direction xi as comma-separated components (default e1).
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<String>,
        /// Comma-separated: csv, json, svg.
        #[arg(long)]
        formats: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the numerical identity checks; exit 1 if any fails.
    Verify {
        /// Run a single named check.
        #[arg(long)]
        only: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Estimate the transform's multipliers on harmonics (dim 2 or 3).
    Harmonics {
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long)]
        lmax: Option<usize>,
        /// Directions used in each fit.
        #[arg(long)]
        dirs: Option<usize>,
        #[arg(long)]
        formats: Option<String>,
        #[command(flatten)]
        common: Common,
    },
}

fn base(command: Command, c: Common) -> RunConfig {
    let mut cfg = RunConfig::new(command);
    cfg.resolution = c.resolution;
    cfg.seed = c.seed;
    cfg.fd_step = c.fd_step;
    cfg.fd_levels = c.fd_levels;
    cfg.output_dir = c.out;
    cfg
}

fn config(sub: Sub) -> Result<RunConfig, CliError> {
    let cfg = match sub {
        Sub::Analyze { body, dirs, sampler, threshold, common } => {
            let mut cfg = base(Command::Analyze, common);
            cfg.body_spec = Some(body);
            cfg.num_dirs = dirs;
            cfg.sampler = sampler.as_deref().map(str::parse::<SamplerName>).transpose()?;
            cfg.threshold = threshold;
            cfg
        }
        Sub::Sections { body, kind, z, xi, formats, common } => {
            let mut cfg = base(Command::Sections, common);
            cfg.body_spec = Some(body);
            if let Some(k) = kind {
                cfg.kinds = parse_list::<CurveKind>(&k)?;
            }
            cfg.z_grid = z.as_deref().map(str::parse::<ZRange>).transpose()?;
            if let Some(xi) = xi {
                cfg.xi = Some(
                    xi.split(',')
                        .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad --xi component '{t}'"))))
                        .collect::<Result<_, _>>()?,
                );
            }
            if let Some(f) = formats {
                cfg.formats = parse_list::<Format>(&f)?;
            }
            cfg
        }
        Sub::Verify { only, common } => {
            let mut cfg = base(Command::Verify, common);
            cfg.only = only;
            cfg
        }
        Sub::Harmonics { dim, lmax, dirs, formats, common } => {
            let mut cfg = base(Command::Harmonics, common);
            cfg.dim = Some(dim);
            cfg.l_max = lmax;
            cfg.num_dirs = dirs;
            if let Some(f) = formats {
                cfg.formats = parse_list::<Format>(&f)?;
            }
            cfg
        }
    };
    commands::resolve(cfg)
}

fn run(sub: Sub) -> Result<(), CliError> {
    let cfg = config(sub)?;
    match cfg.command {
        Command::Analyze => {
            let s = commands::analyze(&cfg)?;
            println!(
                "{}: {} (max |A| = {:.3e}, threshold {:.3e})",
                s.report.body_id,
                s.report.verdict.name(),
                s.report.max_abs,
                s.report.threshold
            );
            println!("{}", s.report.note);
        }
        Command::Sections => {
            let (curves, files) = commands::sections(&cfg)?;
            for c in &curves {
                println!("{}: slope at 0 = {:.10} (transform {:.10})", c.kind, c.slope, c.transform);
            }
            for f in files {
                println!("wrote {}", f.display());
            }
        }
        Command::Harmonics => {
            let (rows, files) = commands::harmonics(&cfg)?;
            println!("{} multiplier estimates", rows.len());
            for f in files {
                println!("wrote {}", f.display());
            }
        }
        Command::Verify => {
            let (results, path) = verify::run(&cfg)?;
            for r in &results {
                let residual = r.residual.map_or("n/a".to_string(), |x| format!("{x:.3e}"));
                let status = if r.passed { "PASS" } else { "FAIL" };
                println!("{status} {:<18} residual {residual} (tol {:.1e})", r.name, r.tolerance);
            }
            println!("wrote {}", path.display());
            if let Some(e) = verify::failure(&results) {
                return Err(e);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("starsym: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
