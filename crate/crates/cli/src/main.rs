use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ltensor::io::{export_ppm_dir, import_ppm_dir, read_mask, read_real, write_mask, write_real};
use ltensor::synthetic::{low_rank_product, synthetic_video};
use ltensor::{
    l_product, pga_complete, psnr, rse, sample_mask, svt, t_svd, CompletionConfig, CompletionStatus,
    Error, RealTensor, RseDenominator, TransformKind, TransformSpec,
};

#[derive(Parser)]
#[command(name = "ltensor", version, about = "Tensor products, factorizations and completion under ∗_L")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Observation masks
    Mask {
        #[command(subcommand)]
        command: MaskCommand,
    },
    /// Complete a partially observed tensor by proximal gradient
    Complete(CompleteArgs),
    /// ∗_L-SVD factors
    Tsvd(TsvdArgs),
    /// ∗_L product of two tensors
    Product(ProductArgs),
    /// Singular value thresholding
    Svt(SvtArgs),
    /// RSE and PSNR of an obtained tensor against an original
    Metrics(MetricsArgs),
    /// PPM frame directories
    Ppm {
        #[command(subcommand)]
        command: PpmCommand,
    },
    /// Synthetic data
    Synth {
        #[command(subcommand)]
        command: SynthCommand,
    },
}

#[derive(Subcommand)]
enum MaskCommand {
    /// Sample a uniform mask with round(sr·N) observed entries
    Gen {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long)]
        sr: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum PpmCommand {
    /// Read a directory of P6 frames into an H×W×3×T container
    Import {
        #[arg(long)]
        dir: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write an H×W×3×T container as frame_NNNN.ppm files
    Export {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        dir: PathBuf,
    },
}

#[derive(Subcommand)]
enum SynthCommand {
    /// Gaussian X ∗ Y with tubal rank at most `rank`
    Lowrank {
        #[arg(long, value_delimiter = ',', required = true)]
        dims: Vec<usize>,
        #[arg(long)]
        rank: usize,
        #[command(flatten)]
        transform: TransformArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Smooth low-rank colour clip with static texture, values in [0, 1]
    Video {
        #[arg(long)]
        height: usize,
        #[arg(long)]
        width: usize,
        #[arg(long)]
        frames: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum TransformName {
    Fft,
    Dct,
    Cprod,
}

impl From<TransformName> for TransformKind {
    fn from(t: TransformName) -> Self {
        match t {
            TransformName::Fft => TransformKind::Fourier,
            TransformName::Dct => TransformKind::OrthogonalDct,
            TransformName::Cprod => TransformKind::CProduct,
        }
    }
}

#[derive(Args)]
struct TransformArgs {
    #[arg(long, value_enum, default_value = "fft")]
    transform: TransformName,
    /// Transformed modes, 1-based: `3..N` (all trailing modes), `3`, `3..4` or `3,5`
    #[arg(long, default_value = "3..N")]
    modes: String,
}

impl TransformArgs {
    fn spec(&self, dims: &[usize]) -> Result<TransformSpec, Error> {
        let modes = parse_modes(&self.modes, dims.len())?;
        TransformSpec::with_modes(self.transform.into(), dims, &modes)
    }
}

/// 1-based mode list to 0-based indices.
fn parse_modes(text: &str, order: usize) -> Result<Vec<usize>, Error> {
    let bad = || Error::Parameter(format!("cannot parse --modes {text:?} for a tensor of order {order}"));
    let bound = |s: &str| -> Result<usize, Error> {
        if s.eq_ignore_ascii_case("n") {
            Ok(order)
        } else {
            s.trim().parse().map_err(|_| bad())
        }
    };
    let mut modes = Vec::new();
    for part in text.split(',') {
        let part = part.trim();
        if let Some((lo, hi)) = part.split_once("..") {
            let (lo, hi) = (bound(lo)?, bound(hi)?);
            if lo > hi {
                return Err(bad());
            }
            modes.extend(lo..=hi);
        } else {
            modes.push(bound(part)?);
        }
    }
    if modes.iter().any(|&m| m < 3 || m > order) {
        return Err(Error::Parameter(format!(
            "--modes {text:?}: transformed modes must lie in 3..={order}"
        )));
    }
    Ok(modes.into_iter().map(|m| m - 1).collect())
}

#[derive(Clone, Copy, ValueEnum)]
enum DenominatorName {
    Obtained,
    Original,
}

#[derive(Args)]
struct CompleteArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    mask: PathBuf,
    #[command(flatten)]
    transform: TransformArgs,
    #[arg(long, default_value_t = 0.9)]
    nu: f64,
    /// Initial threshold; defaults to nu·‖P_Ω(input)‖_F
    #[arg(long)]
    mu0: Option<f64>,
    #[arg(long, default_value_t = 1e-4)]
    mu_bar_ratio: f64,
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    #[arg(long)]
    ground_truth: Option<PathBuf>,
    #[arg(long)]
    trace_csv: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    reimpose_observed: bool,
    #[arg(long, value_enum, default_value = "obtained")]
    rse_denominator: DenominatorName,
}

#[derive(Args)]
struct TsvdArgs {
    #[arg(long)]
    input: PathBuf,
    #[command(flatten)]
    transform: TransformArgs,
    #[arg(long)]
    out_u: PathBuf,
    #[arg(long)]
    out_s: PathBuf,
    #[arg(long)]
    out_v: PathBuf,
    /// Keep only the leading k singular tubes
    #[arg(long)]
    truncate: Option<usize>,
}

#[derive(Args)]
struct ProductArgs {
    #[arg(long)]
    a: PathBuf,
    #[arg(long)]
    b: PathBuf,
    #[command(flatten)]
    transform: TransformArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SvtArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    tau: f64,
    #[command(flatten)]
    transform: TransformArgs,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MetricsArgs {
    /// Obtained tensor
    #[arg(long)]
    a: PathBuf,
    /// Original tensor
    #[arg(long)]
    b: PathBuf,
}

fn complete(args: CompleteArgs) -> Result<(), Error> {
    let m = read_real(&args.input)?;
    let mask = read_mask(&args.mask)?;
    let truth = args.ground_truth.as_ref().map(read_real).transpose()?;
    let mut cfg = CompletionConfig::new(args.transform.spec(m.dims())?);
    cfg.nu = args.nu;
    cfg.mu0 = args.mu0;
    cfg.mu_bar_ratio = args.mu_bar_ratio;
    cfg.tol = args.tol;
    cfg.max_iters = args.max_iters;
    cfg.reimpose_observed = args.reimpose_observed;
    cfg.rse_denominator = match args.rse_denominator {
        DenominatorName::Obtained => RseDenominator::Obtained,
        DenominatorName::Original => RseDenominator::Original,
    };
    let (x, trace) = pga_complete(&m, &mask, &cfg, truth.as_ref())?;
    write_real(&args.out, &x)?;
    if let Some(path) = &args.trace_csv {
        std::fs::write(path, trace.to_csv()).map_err(|e| Error::Io {
            path: path.clone(),
            source: e,
        })?;
    }
    let status = match trace.status {
        CompletionStatus::Converged => "converged",
        CompletionStatus::MaxIters => "max-iters",
    };
    let last = trace.records.last();
    print!("status {status} iterations {}", trace.iterations());
    if let Some(r) = last {
        print!(" rel_change {:e}", r.rel_change);
        if let (Some(rse), Some(psnr)) = (r.rse, r.psnr) {
            print!(" rse {rse:e} psnr {psnr}");
        }
    }
    println!();
    Ok(())
}

fn tsvd(args: TsvdArgs) -> Result<(), Error> {
    let a = read_real(&args.input)?;
    let spec = args.transform.spec(a.dims())?;
    let f = t_svd(&a, &spec)?;
    let (u, s, v) = match args.truncate {
        Some(k) => f.leading(k)?,
        None => (f.u.clone(), f.s.clone(), f.v.clone()),
    };
    write_real(&args.out_u, &u)?;
    write_real(&args.out_s, &s)?;
    write_real(&args.out_v, &v)?;
    let norms: Vec<String> = f.tube_norms.iter().map(|t| format!("{t:e}")).collect();
    println!("tube_norms {}", norms.join(","));
    Ok(())
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Mask {
            command: MaskCommand::Gen { dims, sr, seed, out },
        } => {
            let mask = sample_mask(&dims, sr, seed)?;
            write_mask(&out, &mask)?;
            println!("observed {} of {}", mask.known_count(), dims.iter().product::<usize>());
        }
        Command::Complete(args) => complete(args)?,
        Command::Tsvd(args) => tsvd(args)?,
        Command::Product(args) => {
            let a = read_real(&args.a)?;
            let b = read_real(&args.b)?;
            let spec = args.transform.spec(a.dims())?;
            write_real(&args.out, &l_product(&a, &b, &spec)?)?;
        }
        Command::Svt(args) => {
            let a = read_real(&args.input)?;
            let spec = args.transform.spec(a.dims())?;
            write_real(&args.out, &svt(&a, args.tau, &spec)?)?;
        }
        Command::Metrics(args) => {
            let a = read_real(&args.a)?;
            let b = read_real(&args.b)?;
            println!("RSE {}", rse(&a, &b)?);
            println!("PSNR {}", psnr(&a, &b)?);
        }
        Command::Ppm { command } => match command {
            PpmCommand::Import { dir, out } => {
                let x = import_ppm_dir(&dir)?;
                write_real(&out, &x)?;
                println!("dims {:?}", x.dims());
            }
            PpmCommand::Export { input, dir } => {
                let x = read_real(&input)?;
                let written = export_ppm_dir(&x, &dir)?;
                println!("wrote {} frames", written.len());
            }
        },
        Command::Synth { command } => {
            let (x, out): (RealTensor, PathBuf) = match command {
                SynthCommand::Lowrank {
                    dims,
                    rank,
                    transform,
                    seed,
                    out,
                } => {
                    let spec = transform.spec(&dims)?;
                    (low_rank_product(&dims, rank, &spec, seed)?, out)
                }
                SynthCommand::Video {
                    height,
                    width,
                    frames,
                    seed,
                    out,
                } => (synthetic_video(height, width, frames, seed)?, out),
            };
            write_real(&out, &x)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Parameter(_) => 1,
                _ => 2,
            })
        }
    }
}
