use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use timelike::coefficients::CurvatureParams;
use timelike::config::{emit, Pipeline, RunConfig};
use timelike::Error;

/// Lorentzian transport, localization and isoperimetry checks on model spacetimes.
#[derive(Parser, Debug)]
#[command(name = "timelike", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Poisson-sprinkle a region.
    Sprinkle(Flags),
    /// Optimal coupling between the earlier and later halves of a sprinkling.
    Transport(Flags),
    /// Ray decomposition from an achronal set, with the 1D curvature checks.
    Localize(Flags),
    /// Future Minkowski content of a set.
    Content(Flags),
    VerifyIsoperimetry(Flags),
    VerifyMonotonicity(Flags),
    VerifySchwarzschild(Flags),
    VerifyBrunnMinkowski(Flags),
    /// Quadrature check of the sharpness identity; `--n` is the dimension.
    VerifySharpness(Flags),
}

#[derive(Args, Debug, Clone)]
struct Flags {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    n: Option<usize>,
    /// Output directory (default: the config's `output`, else `.`).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
    slab: Option<Vec<f64>>,
    #[arg(long, num_args = 1.., allow_negative_numbers = true)]
    r0: Option<Vec<f64>>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long = "K", allow_negative_numbers = true)]
    k: Option<f64>,
    #[arg(long = "N")]
    big_n: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    t: Option<f64>,
    #[arg(long, num_args = 1..)]
    t_grid: Option<Vec<f64>>,
    #[arg(long)]
    bins: Option<usize>,
}

impl Command {
    fn split(&self) -> (Pipeline, &Flags) {
        match self {
            Command::Sprinkle(f) => (Pipeline::Sprinkle, f),
            Command::Transport(f) => (Pipeline::Transport, f),
            Command::Localize(f) => (Pipeline::Localize, f),
            Command::Content(f) => (Pipeline::Content, f),
            Command::VerifyIsoperimetry(f) => (Pipeline::VerifyIsoperimetry, f),
            Command::VerifyMonotonicity(f) => (Pipeline::VerifyMonotonicity, f),
            Command::VerifySchwarzschild(f) => (Pipeline::VerifySchwarzschild, f),
            Command::VerifyBrunnMinkowski(f) => (Pipeline::VerifyBrunnMinkowski, f),
            Command::VerifySharpness(f) => (Pipeline::VerifySharpness, f),
        }
    }
}

fn configure(pipeline: Pipeline, f: &Flags) -> timelike::Result<RunConfig> {
    let mut cfg = match &f.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if f.seed.is_some() {
        cfg.seed = f.seed;
    }
    if let Some(n) = f.n {
        if pipeline == Pipeline::VerifySharpness {
            cfg.dimension = Some(u32::try_from(n).map_err(|_| Error::InvalidParameter(format!("n = {n} is too large")))?);
        } else {
            cfg.n_samples = Some(n);
        }
    }
    if f.out.is_some() {
        cfg.output = f.out.clone();
    }
    if f.m.is_some() {
        cfg.m = f.m;
    }
    if let Some(s) = &f.slab {
        cfg.slab = Some([s[0], s[1]]);
    }
    if f.r0.is_some() {
        cfg.r0 = f.r0.clone();
    }
    if f.a.is_some() {
        cfg.a = f.a;
    }
    if f.k.is_some() || f.big_n.is_some() {
        let base = cfg.curvature;
        let k = f.k.or(base.map(|c| c.k)).unwrap_or(0.0);
        let n = match f.big_n.or(base.map(|c| c.n)) {
            Some(n) => n,
            None => cfg.spacetime.as_ref().map_or(2.0, |s| s.dim as f64),
        };
        cfg.curvature = Some(CurvatureParams::new(k, n)?);
    }
    if f.p.is_some() {
        cfg.p = f.p;
    }
    if f.t.is_some() {
        cfg.t = f.t;
    }
    if f.t_grid.is_some() {
        cfg.t_grid = f.t_grid.clone();
    }
    if f.bins.is_some() {
        cfg.bins = f.bins;
    }
    Ok(cfg)
}

fn is_config_error(e: &Error) -> bool {
    matches!(
        e,
        Error::InvalidParameter(_) | Error::Domain { .. } | Error::Unsupported(_) | Error::Json(_) | Error::Io(_)
    )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Ok(threads) = std::env::var("TIMELIKE_THREADS") {
        match threads.parse::<usize>() {
            Ok(t) if t > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
            }
            _ => {
                eprintln!("error: TIMELIKE_THREADS must be a positive integer, got {threads:?}");
                return ExitCode::from(2);
            }
        }
    }
    let (pipeline, flags) = cli.command.split();
    let cfg = match configure(pipeline, flags) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let out = match pipeline.run(&cfg) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {}: {e}", pipeline.name());
            return ExitCode::from(if is_config_error(&e) { 2 } else { 1 });
        }
    };
    let dir = cfg.output.clone().unwrap_or_else(|| PathBuf::from("."));
    match emit(&out, &dir, pipeline.name()) {
        Ok((json, csv)) => println!("wrote {} and {}", json.display(), csv.display()),
        Err(e) => {
            eprintln!("error: writing reports: {e}");
            return ExitCode::from(2);
        }
    }
    for r in &out.reports {
        println!(
            "{} {}: lhs = {}, rhs = {}, slack = {}, stderr = {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.name,
            r.lhs,
            r.rhs,
            r.slack,
            r.stderr
        );
    }
    if out.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
