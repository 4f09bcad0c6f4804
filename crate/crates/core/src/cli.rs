//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for usage errors and unreadable input,
//! 3 when the solver fails.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, ValueEnum};

use crate::config::Config;
use crate::error::Error;
use crate::mtx::read_matrix_market_file;
use crate::pencil::Pencil;
use crate::region::Bounds;
use crate::report::RunReport;
use crate::search::search;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SOLVER: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Find all eigenvalues of the pencil (A, B) inside a rectangle.
#[derive(Debug, Parser)]
#[command(name = "rimc", version)]
pub struct Args {
    /// Matrix Market file holding A.
    #[arg(long, value_name = "PATH")]
    pub matrix_a: PathBuf,
    /// Matrix Market file holding B (identity if omitted).
    #[arg(long, value_name = "PATH")]
    pub matrix_b: Option<PathBuf>,
    /// Search rectangle.
    #[arg(
        long,
        num_args = 4,
        allow_negative_numbers = true,
        value_names = ["XMIN", "XMAX", "YMIN", "YMAX"]
    )]
    pub region: Vec<f64>,
    /// Size at which a region is reported as an eigenvalue (d0).
    #[arg(long)]
    pub precision: Option<f64>,
    /// Largest accepted Krylov residual.
    #[arg(long)]
    pub residual_tol: Option<f64>,
    /// Admissibility threshold of the indicator.
    #[arg(long)]
    pub indicator_threshold: Option<f64>,
    /// Krylov subspace dimension.
    #[arg(long)]
    pub krylov_dim: Option<usize>,
    /// Coarse quadrature node count.
    #[arg(long)]
    pub quad_points: Option<usize>,
    /// Seed of the random probe vector.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Use the double-projection indicator.
    #[arg(long)]
    pub legacy_indicator: bool,
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Write every tested region as JSON, for plotting the search tree.
    #[arg(long, value_name = "PATH")]
    pub dump_regions: Option<PathBuf>,
    /// Include wall-clock time in the JSON report.
    #[arg(long)]
    pub timing: bool,
}

impl Args {
    pub fn config(&self) -> Config {
        let mut cfg = Config::default();
        if let Some(v) = self.precision {
            cfg.d0 = v;
        }
        if let Some(v) = self.residual_tol {
            cfg.eps = v;
        }
        if let Some(v) = self.indicator_threshold {
            cfg.delta0 = v;
        }
        if let Some(v) = self.krylov_dim {
            cfg.m = v;
        }
        if let Some(v) = self.quad_points {
            cfg.n0 = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.threads {
            cfg.threads = v;
        }
        cfg.legacy_indicator = self.legacy_indicator;
        cfg
    }

    pub fn bounds(&self) -> Option<Bounds> {
        match self.region[..] {
            [xmin, xmax, ymin, ymax] => Bounds::new(xmin, xmax, ymin, ymax),
            _ => None,
        }
    }
}

fn load(args: &Args) -> crate::Result<Pencil> {
    let a = read_matrix_market_file(&args.matrix_a)?;
    let b = args.matrix_b.as_ref().map(read_matrix_market_file).transpose()?;
    Pencil::new(a, b)
}

fn emit(args: &Args, report: &RunReport, stdout: &mut dyn Write) -> crate::Result<()> {
    let mut sink: Box<dyn Write + '_> = match &args.output {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(stdout),
    };
    match args.format {
        Format::Json => report.write_json(&mut sink)?,
        Format::Csv => report.write_csv(&mut sink)?,
    }
    sink.flush()?;
    Ok(())
}

/// Runs the tool on `argv` (including the program name) and returns the
/// exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let Some(bounds) = args.bounds() else {
        let _ = writeln!(
            stderr,
            "error: --region needs finite XMIN < XMAX and YMIN < YMAX, got {:?}",
            args.region
        );
        return EXIT_USAGE;
    };
    let cfg = args.config();
    if let Err(e) = cfg.validate() {
        let _ = writeln!(stderr, "error: {e}");
        return EXIT_USAGE;
    }
    let pencil = match load(&args) {
        Ok(p) => p,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return EXIT_USAGE;
        }
    };

    let start = Instant::now();
    let outcome = match search(&pencil, &bounds, &cfg) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(stderr, "solver error: {e}");
            return EXIT_SOLVER;
        }
    };
    let elapsed = start.elapsed().as_secs_f64();

    let mut report = RunReport::new(&outcome, bounds, cfg);
    if args.timing {
        report.wall_time = Some(elapsed);
    }
    if let Some(path) = &args.dump_regions {
        let dumped = File::create(path)
            .map_err(Error::from)
            .and_then(|f| {
                serde_json::to_writer(BufWriter::new(f), &outcome.regions)
                    .map_err(|e| Error::Io(e.into()))
            });
        if let Err(e) = dumped {
            let _ = writeln!(stderr, "error: cannot write {}: {e}", path.display());
            return EXIT_USAGE;
        }
    }
    if let Err(e) = emit(&args, &report, stdout) {
        let _ = writeln!(stderr, "error: cannot write report: {e}");
        return EXIT_USAGE;
    }
    EXIT_OK
}
