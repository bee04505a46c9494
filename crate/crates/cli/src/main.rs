//! `tokenlink`: simulate progressive token image transmission over a
//! turbo-coded QAM/AWGN link. See `docs/cli.md` for every flag and config key.

mod commands;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tokenlink::Error;

#[derive(Parser, Debug)]
#[command(
    name = "tokenlink",
    version,
    about = "Progressive token image transmission simulator"
)]
struct Cli {
    /// Plain-text `key = value` file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Train a VQ codebook on DCT token groups from images.
    CodebookTrain(CodebookTrainArgs),
    /// Send one image through the link and write the reconstruction.
    Transmit(TransmitArgs),
    /// Average transmissions over an SNR or CBR grid and write CSV.
    Sweep(SweepArgs),
    /// Train the tiny autoencoder with progressive zero-out.
    TrainZeroout(TrainZerooutArgs),
    /// Reconstruction MSE of a trained autoencoder per truncation point.
    EvalGradient(EvalGradientArgs),
    /// Measure block error rates and derive MCS thresholds.
    McsCalibrate(McsCalibrateArgs),
}

#[derive(Args, Debug, Clone)]
pub struct LinkArgs {
    /// Input image (PNG or P6 PPM).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Use a bundled image instead of `--input` (astronaut, chelsea, coffee, rocket).
    #[arg(long)]
    pub bundled: Option<String>,
    /// Codebook file; defaults to the bundled codebook.
    #[arg(long)]
    pub codebook: Option<PathBuf>,
    /// Es/N0 in dB.
    #[arg(long, allow_negative_numbers = true)]
    pub snr: Option<f64>,
    /// Disable channel noise.
    #[arg(long)]
    pub noiseless: bool,
    /// Channel bandwidth ratio target.
    #[arg(long)]
    pub target_cbr: Option<f64>,
    /// MCS table file; defaults to the bundled table.
    #[arg(long)]
    pub mcs_table: Option<PathBuf>,
    /// Fixed modulation (bpsk, qpsk, 16qam, 64qam); needs `--rate`.
    #[arg(long)]
    pub modulation: Option<String>,
    /// Fixed code rate (1/3, 1/2, 2/3, 3/4); needs `--modulation`.
    #[arg(long)]
    pub rate: Option<String>,
    /// Base seed for channel noise.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Turbo decoder iterations.
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Budget formula: consistent or modulation-in-denominator.
    #[arg(long)]
    pub formula: Option<String>,
}

#[derive(Args, Debug)]
pub struct CodebookTrainArgs {
    /// Training images; defaults to the bundled set.
    #[arg(long, num_args = 1..)]
    pub images: Vec<PathBuf>,
    #[arg(long)]
    pub k: Option<usize>,
    /// Number of token vectors drawn from random 256x256 crops.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TransmitArgs {
    #[command(flatten)]
    pub link: LinkArgs,
    /// Reconstructed image (.png writes PNG, anything else P6 PPM).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Write the report as `key=value` lines here as well as to stdout.
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[command(flatten)]
    pub link: LinkArgs,
    /// Grid axis: snr or cbr.
    #[arg(long)]
    pub axis: Option<String>,
    /// Comma-separated grid values.
    #[arg(long, allow_hyphen_values = true)]
    pub values: Option<String>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// CSV output; stdout when absent.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct TrainZerooutArgs {
    /// Patch blob (RTPD); defaults to the bundled patches.
    #[arg(long)]
    pub patches: Option<PathBuf>,
    /// Directory of raw little-endian f32 patch files instead of a blob.
    #[arg(long)]
    pub patch_dir: Option<PathBuf>,
    /// Values per patch when reading `--patch-dir`.
    #[arg(long)]
    pub patch_len: Option<usize>,
    /// Generate this many synthetic low-rank 8x8 patches instead of loading any.
    #[arg(long)]
    pub synthetic: Option<usize>,
    /// Rank of the synthetic patches.
    #[arg(long)]
    pub rank: Option<usize>,
    /// Per-component standard deviation decay of the synthetic patches.
    #[arg(long)]
    pub decay: Option<f64>,
    /// Also write the training patches as a blob.
    #[arg(long)]
    pub save_patches: Option<PathBuf>,
    #[arg(long)]
    pub tokens: Option<usize>,
    #[arg(long)]
    pub token_dim: Option<usize>,
    #[arg(long)]
    pub key_count: Option<usize>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Truncation draws: per-sample or per-batch.
    #[arg(long)]
    pub sampling: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvalGradientArgs {
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub patches: Option<PathBuf>,
    /// Comma-separated truncation points.
    #[arg(long)]
    pub t: Option<String>,
}

#[derive(Args, Debug)]
pub struct McsCalibrateArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub snr_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub snr_max: Option<f64>,
    #[arg(long)]
    pub snr_step: Option<f64>,
    /// Blocks simulated per (scheme, SNR) point.
    #[arg(long)]
    pub blocks: Option<usize>,
    #[arg(long)]
    pub info_len: Option<usize>,
    #[arg(long)]
    pub target_bler: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Calibrated table output; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// 2: configuration, 3: I/O or malformed input, 4: infeasible budget, 1: anything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::Config(_) | Error::Argument(_)) => 2,
        Some(Error::Io { .. } | Error::Parse { .. }) => 3,
        Some(Error::Infeasible(_)) => 4,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = settings::Settings::load(cli.config.as_deref())
        .map_err(anyhow::Error::from)
        .and_then(|s| match cli.command {
            Command::CodebookTrain(a) => commands::codebook_train(&s, a),
            Command::Transmit(a) => commands::transmit(&s, a),
            Command::Sweep(a) => commands::sweep(&s, a),
            Command::TrainZeroout(a) => commands::train_zeroout(&s, a),
            Command::EvalGradient(a) => commands::eval_gradient(&s, a),
            Command::McsCalibrate(a) => commands::mcs_calibrate(&s, a),
        });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
