use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use wten::baselines::{op_count, ProductKind};
use wten::commands::{cmd_bench, cmd_deblur, cmd_preview, cmd_svd, Method, RunConfig};
use wten::io::Band;
use wten::report::{write_records, BenchRecord, ReportFormat};

#[derive(Parser)]
#[command(
    name = "wten",
    version,
    about = "Tensor products over the lazy lifting wavelet"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Timed repetitions (after one warm-up run).
    #[arg(long, default_value_t = 10)]
    reps: usize,
    /// Report file; printed to stdout when omitted.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: ReportFormat,
    /// Wavelet levels (default: as many as p allows).
    #[arg(long)]
    levels: Option<usize>,
    /// Peak pixel value for PSNR/SSIM (default: largest entry).
    #[arg(long)]
    mpp: Option<f64>,
    /// Skip timing the t-product baseline.
    #[arg(long)]
    no_baseline: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Low-rank reconstruction with t-svd, w-svd or sp-w-svd.
    Svd {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        rank: usize,
        #[arg(long, default_value = "w")]
        method: Method,
        #[arg(long)]
        out: Option<PathBuf>,
        /// PGM preview of the band-mean reconstruction.
        #[arg(long)]
        preview: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Blur an image with Toeplitz operators and deblur it again.
    Deblur {
        #[arg(long)]
        input: PathBuf,
        /// Use this blurred image instead of blurring the input.
        #[arg(long)]
        blurred: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        bv: usize,
        #[arg(long, default_value_t = 10)]
        bh: usize,
        #[arg(long, default_value = "w")]
        method: Method,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        preview: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Time m-, t- and w-products on random cubes p = 2, 4, ..., pmax.
    Bench {
        #[arg(long, default_value_t = 512)]
        pmax: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Closed-form operation count of one product.
    Opcount {
        #[arg(long)]
        kind: ProductKind,
        #[arg(long)]
        n1: u64,
        #[arg(long)]
        n2: u64,
        #[arg(long)]
        n3: u64,
        #[arg(long)]
        p: u64,
    },
    /// Write a band (or the band mean) of a tensor as a PGM image.
    Preview {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "mean")]
        band: Band,
        #[arg(long)]
        out: PathBuf,
    },
}

fn config(common: Common) -> RunConfig {
    RunConfig {
        repetitions: common.reps,
        report: common.report,
        format: common.format,
        levels: common.levels,
        mpp: common.mpp,
        baseline: !common.no_baseline,
        ..RunConfig::default()
    }
}

fn print_if_unsaved(cfg: &RunConfig, records: &[BenchRecord]) -> wten::Result<()> {
    if cfg.report.is_none() {
        write_records(records, cfg.format, std::io::stdout().lock())?;
    }
    Ok(())
}

fn run(cli: Cli) -> wten::Result<()> {
    let threads = wten::timing::init_threads();
    log::info!("using {threads} worker thread(s)");
    match cli.command {
        Command::Svd {
            input,
            rank,
            method,
            out,
            preview,
            common,
        } => {
            let cfg = RunConfig {
                input: Some(input),
                rank: Some(rank),
                method,
                output: out,
                preview,
                ..config(common)
            };
            let rec = cmd_svd(&cfg)?;
            print_if_unsaved(&cfg, &[rec])
        }
        Command::Deblur {
            input,
            blurred,
            bv,
            bh,
            method,
            out,
            preview,
            common,
        } => {
            let cfg = RunConfig {
                input: Some(input),
                blurred,
                b_v: bv,
                b_h: bh,
                method,
                output: out,
                preview,
                ..config(common)
            };
            let rec = cmd_deblur(&cfg)?;
            print_if_unsaved(&cfg, &[rec])
        }
        Command::Bench { pmax, seed, common } => {
            let ladder = (1..usize::BITS)
                .map(|e| 1usize << e)
                .take_while(|&p| p <= pmax)
                .collect();
            let cfg = RunConfig {
                ladder,
                seed,
                ..config(common)
            };
            let recs = cmd_bench(&cfg)?;
            print_if_unsaved(&cfg, &recs)
        }
        Command::Opcount {
            kind,
            n1,
            n2,
            n3,
            p,
        } => {
            let report = op_count(kind, n1, n2, n3, p)?;
            let json = serde_json::to_string_pretty(&report).map_err(std::io::Error::from)?;
            println!("{json}");
            Ok(())
        }
        Command::Preview { input, band, out } => cmd_preview(&input, &out, band),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wten: {e}");
            ExitCode::FAILURE
        }
    }
}
