//! `tribench`: runs the triangulation experiments and writes CSV trial records.
//!
//! Exit codes: 0 success, 2 bad input, 3 degenerate geometry, 4 I/O failure.

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use tricore::experiments::{
    parse_methods, read_cameras, read_correspondences, read_points, run_sensitivity, run_sfm_real, run_sfm_synth,
    summarize, write_csv, write_csv_to, CorrespondenceSet, ErrorKind, Method, SensitivityConfig, SfmRealConfig,
    SfmSynthConfig, TrialRecord,
};
use tricore::{Camera, Error, Pixel};

#[derive(Parser)]
#[command(name = "tribench", version, about = "Triangulation accuracy benchmarks")]
struct Cli {
    /// Log progress to stderr (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Position,
    Distance,
    Angle,
}

impl From<Kind> for ErrorKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Position => ErrorKind::Position,
            Kind::Distance => ErrorKind::Distance,
            Kind::Angle => ErrorKind::Angle,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Error of triangulated sphere points under camera pose noise.
    Sensitivity {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        conf: u8,
        #[arg(long, value_enum)]
        kind: Kind,
        /// Noise levels: `a:b` (integers, inclusive), `a:b:step`, or a comma list.
        #[arg(long, default_value = "1:10")]
        levels: String,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        /// Comma-separated method names (default: the two-view set).
        #[arg(long)]
        methods: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Pixel noise added to the true projections, in pixels.
        #[arg(long, default_value_t = 0.0)]
        pixel_noise: f64,
        /// CSV output; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Full reconstruction of the synthetic box scene.
    SfmSynth {
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
        cameras: u8,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 1.0)]
        pixel_noise: f64,
        #[arg(long)]
        methods: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reconstruction from correspondence files, evaluated against ground truth.
    SfmReal {
        #[arg(long)]
        correspondences: PathBuf,
        #[arg(long)]
        cameras_file: PathBuf,
        #[arg(long)]
        gt_points: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=3))]
        views: u8,
        #[arg(long, default_value_t = 10)]
        runs: u64,
        #[arg(long, default_value_t = 20)]
        points_per_run: usize,
        #[arg(long)]
        methods: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Triangulates every point of an observation file with known cameras.
    Triangulate {
        #[arg(long)]
        cameras_file: PathBuf,
        /// Lines of `point_id camera_id u v`.
        #[arg(long)]
        observations: PathBuf,
        #[arg(long, default_value = "midpoint")]
        method: String,
    },
}

fn parse_levels(s: &str) -> tricore::Result<Vec<f64>> {
    let bad = || Error::InvalidInput(format!("cannot parse noise levels {s:?}"));
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
    let levels = if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        let (a, b, step) = match parts.as_slice() {
            [a, b] => (num(a)?, num(b)?, 1.0),
            [a, b, st] => (num(a)?, num(b)?, num(st)?),
            _ => return Err(bad()),
        };
        if !(step > 0.0) || b < a {
            return Err(bad());
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        (0..=n).map(|k| a + k as f64 * step).collect()
    } else {
        s.split(',').map(num).collect::<tricore::Result<Vec<_>>>()?
    };
    if levels.is_empty() || levels.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
        return Err(bad());
    }
    Ok(levels)
}

fn methods_or(list: &Option<String>, n_views: usize) -> tricore::Result<Vec<Method>> {
    match list {
        Some(l) => parse_methods(l),
        None => Ok(Method::default_set(n_views)),
    }
}

fn emit(records: &[TrialRecord], out: &Option<PathBuf>) -> tricore::Result<()> {
    match out {
        Some(path) => {
            write_csv(path, records)?;
            info!("wrote {} records to {}", records.len(), path.display());
            print_summary(records, &mut io::stdout().lock());
        }
        None => {
            let stdout = io::stdout();
            write_csv_to(stdout.lock(), records).map_err(|e| Error::Io {
                path: PathBuf::from("<stdout>"),
                source: io::Error::other(e.to_string()),
            })?;
            print_summary(records, &mut io::stderr().lock());
        }
    }
    Ok(())
}

fn print_summary(records: &[TrialRecord], w: &mut dyn Write) {
    let _ = writeln!(w, "{:<28} {:>6} {:<14} {:>12} {:>12} {:>12} {:>7}", "experiment", "level", "method", "mean", "median", "std", "failed");
    for s in summarize(records) {
        let (mean, median, std) = s.stats.map_or((f64::NAN, f64::NAN, f64::NAN), |t| (t.mean, t.median, t.std));
        let _ = writeln!(
            w,
            "{:<28} {:>6} {:<14} {:>12.5e} {:>12.5e} {:>12.5e} {:>7}",
            s.experiment, s.level, s.method, mean, median, std, s.failures
        );
    }
}

fn triangulate_file(cameras_file: &Path, observations: &Path, method: &str) -> tricore::Result<()> {
    let method: Method = method.parse()?;
    let cameras = read_cameras(cameras_file)?;
    let obs = read_correspondences(observations)?;
    let set = CorrespondenceSet::new(cameras, &obs)?;
    let mut out = io::stdout().lock();
    for (pid, track) in set.tracks() {
        let (cams, pixels): (Vec<Camera>, Vec<Pixel>) = track.iter().map(|(c, px)| (set.cameras()[c], *px)).unzip();
        let r = method.triangulate(&cams, &pixels).map_err(|e| e.context(format!("point {pid}")))?;
        writeln!(out, "{pid} {} {} {}", r.point.x, r.point.y, r.point.z).map_err(|source| Error::Io {
            path: PathBuf::from("<stdout>"),
            source,
        })?;
    }
    Ok(())
}

fn run(cli: Cli) -> tricore::Result<()> {
    match cli.command {
        Command::Sensitivity { conf, kind, levels, trials, methods, seed, pixel_noise, out } => {
            let cfg = SensitivityConfig {
                levels: parse_levels(&levels)?,
                trials,
                methods: methods_or(&methods, 2)?,
                seed,
                sigma_pixel: pixel_noise,
                ..SensitivityConfig::new(conf, kind.into())
            };
            emit(&run_sensitivity(&cfg)?, &out)
        }
        Command::SfmSynth { cameras, trials, pixel_noise, methods, seed, out } => {
            let n = cameras as usize;
            let cfg = SfmSynthConfig { trials, pixel_noise, methods: methods_or(&methods, n)?, seed, ..SfmSynthConfig::new(n) };
            emit(&run_sfm_synth(&cfg)?, &out)
        }
        Command::SfmReal { correspondences, cameras_file, gt_points, views, runs, points_per_run, methods, seed, out } => {
            let n = views as usize;
            let set = CorrespondenceSet::new(read_cameras(&cameras_file)?, &read_correspondences(&correspondences)?)?
                .with_ground_truth(read_points(&gt_points)?)?;
            let cfg = SfmRealConfig { runs, points_per_run, methods: methods_or(&methods, n)?, seed, ..SfmRealConfig::new(n) };
            emit(&run_sfm_real(&set, &cfg)?, &out)
        }
        Command::Triangulate { cameras_file, observations, method } => {
            triangulate_file(&cameras_file, &observations, &method)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e.root() {
        Error::Io { .. } => 4,
        root if root.is_geometric() => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let filter = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(filter)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
