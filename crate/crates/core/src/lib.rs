//! Progressive token image transmission over turbo-coded QAM links.
//!
//! An image is cut into 256x256 patches. Each patch is turned into an
//! importance-ordered sequence of codebook indices: a fixed prefix of key
//! tokens followed by detail tokens that can be dropped from the tail. The
//! sender fits as many detail tokens as the channel budget allows, turbo
//! encodes them, maps them onto Gray QAM and sends them over AWGN. The
//! receiver decodes, zero-pads whatever was not sent and reconstructs.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar for the common cases.
//!
//! ```
//! use tokenlink::{ChannelParams, Pipeline64, PipelineConfig, ImageF64};
//!
//! let cfg = PipelineConfig { channel: ChannelParams::noiseless(), ..PipelineConfig::default() };
//! let pipeline = Pipeline64::new(cfg, tokenlink::assets::default_codebook()).unwrap();
//! let img = ImageF64::filled(256, 256, 0.25);
//! let (_out, report) = pipeline.transmit(&img).unwrap();
//! assert_eq!(report.symbols, 768);
//! assert_eq!(report.post_fec_bit_errors, 0);
//! ```

pub mod amc;
pub mod assets;
pub mod dct;
pub mod error;
pub mod fec;
pub mod framing;
pub mod image;
pub mod metrics;
pub mod modem;
pub mod num;
pub mod pipeline;
pub mod tokens;
pub mod zeroout;

pub use amc::{compute_cbr, compute_cbr_f64, select_mcs, McsEntry, McsTable};
pub use dct::{importance_order, zigzag, DctTokenizer, DctTokenizerConfig};
pub use error::{Error, Result};
pub use fec::{BlockLayout, CodeRate, TurboCode, TurboConfig};
pub use framing::{
    compute_detail_budget, pack_tokens, select_tokens, unpack_tokens, Bitstream, BudgetFormula, DetailBudget,
    FrameConfig,
};
pub use image::{load_image, save_image, ImageBuffer};
pub use metrics::{mse, psnr};
pub use modem::{awgn_channel, derive_seed, ChannelParams, Constellation};
pub use num::Real;
pub use pipeline::{sweep, write_csv, McsChoice, Pipeline, PipelineConfig, SweepAxis, SweepRow, TransmissionReport};
pub use tokens::{train_codebook, zero_pad, Codebook, LatentVectorSet, TokenSequence};
pub use zeroout::{evaluate_information_gradient, PatchDataset, TinyAutoencoder, TrainConfig, TruncationSampling};

pub type ImageF32 = ImageBuffer<f32>;
pub type ImageF64 = ImageBuffer<f64>;
pub type Codebook32 = Codebook<f32>;
pub type Codebook64 = Codebook<f64>;
pub type DctTokenizer32 = DctTokenizer<f32>;
pub type DctTokenizer64 = DctTokenizer<f64>;
pub type Constellation32 = Constellation<f32>;
pub type Constellation64 = Constellation<f64>;
pub type Pipeline32 = Pipeline<f32>;
pub type Pipeline64 = Pipeline<f64>;
pub type Autoencoder32 = TinyAutoencoder<f32>;
pub type Autoencoder64 = TinyAutoencoder<f64>;
