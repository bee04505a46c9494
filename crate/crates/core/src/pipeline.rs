//! End-to-end chain: tokenize, frame, turbo-encode, modulate, AWGN,
//! demodulate, decode, zero-pad and reconstruct. Also the sweep harness
//! and the block-error simulation used to calibrate MCS thresholds.

use std::io::Write;
use std::time::Instant;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::amc::{compute_cbr_f64, McsEntry, McsTable};
use crate::dct::{DctTokenizer, DctTokenizerConfig};
use crate::error::{config, Error, Result};
use crate::fec::{BlockLayout, CodeRate, TurboCode, TurboConfig};
use crate::framing::{
    budget_for_symbols, pack_tokens, select_tokens, unpack_tokens, Bitstream, BudgetFormula, FrameConfig,
};
use crate::image::ImageBuffer;
use crate::metrics::psnr;
use crate::modem::{awgn_channel, derive_seed, modulation_name, ChannelParams, Constellation};
use crate::num::Real;
use crate::tokens::{zero_pad, Codebook, TokenSequence};

/// Noise variance handed to the soft demapper on a noiseless channel.
pub const NOISELESS_VARIANCE: f64 = 1e-6;

/// Tag written in the first column of every sweep CSV row.
pub const CSV_SCHEMA: &str = "tokenlink-sweep-v1";

pub const CSV_COLUMNS: [&str; 11] = [
    "schema_tag",
    "snr_db",
    "target_cbr",
    "cbr_actual",
    "mcs",
    "tokens_sent",
    "pre_fec_ber",
    "post_fec_ber",
    "token_errors",
    "psnr_db",
    "status",
];

#[derive(Clone, Debug, PartialEq)]
pub enum McsChoice {
    Table(McsTable),
    Fixed { bits_per_symbol: u32, rate: CodeRate },
}

impl McsChoice {
    pub fn select(&self, snr_db: f64) -> McsEntry {
        match self {
            Self::Table(t) => t.select(snr_db).clone(),
            &Self::Fixed { bits_per_symbol, rate } => McsEntry {
                min_snr_db: f64::NEG_INFINITY,
                bits_per_symbol,
                rate,
                label: format!("{}-{rate}", modulation_name(bits_per_symbol)),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub tokenizer: DctTokenizerConfig,
    pub target_cbr: f64,
    pub formula: BudgetFormula,
    pub turbo: TurboConfig,
    pub mcs: McsChoice,
    /// SNR, gain and base seed. Patch `i` uses `derive_seed(seed, i)`.
    pub channel: ChannelParams,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            tokenizer: DctTokenizerConfig::default(),
            target_cbr: 1.0 / 256.0,
            formula: BudgetFormula::Consistent,
            turbo: TurboConfig::default(),
            mcs: McsChoice::Table(McsTable::default_table()),
            channel: ChannelParams::awgn(6.0, 0),
        }
    }
}

/// Aggregate over all patches of one transmitted image.
#[derive(Clone, Debug, PartialEq)]
pub struct TransmissionReport {
    pub height: usize,
    pub width: usize,
    pub patches: usize,
    pub snr_db: f64,
    pub target_cbr: f64,
    /// `symbols / (H * W * 3)`.
    pub cbr_actual: f64,
    pub mcs: String,
    pub bits_per_symbol: u32,
    pub rate: CodeRate,
    pub tokens_sent: usize,
    /// Detail tokens per patch, `n_t`.
    pub tokens_budget: usize,
    pub info_bits: usize,
    pub coded_bits: usize,
    pub symbols: usize,
    pub pre_fec_bit_errors: usize,
    pub post_fec_bit_errors: usize,
    pub pre_fec_ber: f64,
    pub post_fec_ber: f64,
    pub token_errors: usize,
    /// `f64::INFINITY` when the reconstruction equals the input.
    pub psnr_db: f64,
    pub elapsed_ms: f64,
}

impl TransmissionReport {
    /// Copy with the wall-clock field zeroed, for determinism comparisons.
    pub fn without_timing(&self) -> Self {
        Self {
            elapsed_ms: 0.0,
            ..self.clone()
        }
    }
}

#[derive(Default)]
struct PatchOutcome {
    info_bits: usize,
    coded_bits: usize,
    symbols: usize,
    pre_errors: usize,
    post_errors: usize,
    token_errors: usize,
    received: Option<TokenSequence>,
}

/// A validated configuration bound to a codebook.
pub struct Pipeline<T> {
    cfg: PipelineConfig,
    tokenizer: DctTokenizer<T>,
    codebook: Codebook<T>,
    code: TurboCode,
}

impl<T: Real> Pipeline<T> {
    /// Checks cross-module consistency before any run.
    pub fn new(cfg: PipelineConfig, codebook: Codebook<T>) -> Result<Self> {
        let tokenizer = DctTokenizer::new(cfg.tokenizer)?;
        if codebook.dim() != cfg.tokenizer.coeffs_per_token {
            return config(format!(
                "codebook dimension {} does not match {} coefficients per token",
                codebook.dim(),
                cfg.tokenizer.coeffs_per_token
            ));
        }
        if let McsChoice::Table(t) = &cfg.mcs {
            // tables are validated on construction
            debug_assert!(McsTable::new(t.entries().to_vec()).is_ok());
        }
        if let McsChoice::Fixed { bits_per_symbol, rate } = cfg.mcs {
            Constellation::<T>::new(bits_per_symbol)?;
            crate::fec::check_supported(rate)?;
        }
        if !(cfg.target_cbr > 0.0 && cfg.target_cbr.is_finite()) {
            return config(format!("target CBR {} must be positive", cfg.target_cbr));
        }
        if cfg.channel.snr_db.is_nan() {
            return config("SNR is NaN");
        }
        let code = TurboCode::new(cfg.turbo)?;
        Ok(Self {
            cfg,
            tokenizer,
            codebook,
            code,
        })
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.cfg
    }

    pub fn tokenizer(&self) -> &DctTokenizer<T> {
        &self.tokenizer
    }

    pub fn codebook(&self) -> &Codebook<T> {
        &self.codebook
    }

    pub fn turbo(&self) -> &TurboCode {
        &self.code
    }

    fn frame(&self, h: usize, w: usize, target_cbr: f64) -> FrameConfig {
        FrameConfig {
            b_token: self.codebook.token_bits(),
            key_count: self.cfg.tokenizer.key_count,
            total_tokens: self.cfg.tokenizer.total_tokens,
            target_cbr,
            height: h,
            width: w,
            formula: self.cfg.formula,
        }
    }

    /// Tokenizer round trip with the first `key + detail` tokens of every
    /// patch kept and the rest zero-padded; what a perfect channel delivers.
    pub fn reference_reconstruction(&self, img: &ImageBuffer<T>, detail: usize) -> Result<ImageBuffer<T>> {
        let key = self.cfg.tokenizer.key_count;
        let seqs = self
            .tokenizer
            .encode_tiled(img, &self.codebook)?
            .iter()
            .map(|s| zero_pad(&select_tokens(s, detail)?, key, s.total()))
            .collect::<Result<Vec<_>>>()?;
        self.tokenizer
            .decode_tiled(&seqs, img.height(), img.width(), &self.codebook)
    }

    /// Runs the configured operating point.
    pub fn transmit(&self, img: &ImageBuffer<T>) -> Result<(ImageBuffer<T>, TransmissionReport)> {
        self.transmit_at(img, self.cfg.channel, self.cfg.target_cbr)
    }

    /// Runs one transmission with an explicit channel and target CBR.
    pub fn transmit_at(
        &self,
        img: &ImageBuffer<T>,
        channel: ChannelParams,
        target_cbr: f64,
    ) -> Result<(ImageBuffer<T>, TransmissionReport)> {
        let start = Instant::now();
        let (h, w) = (img.height(), img.width());
        let frame = self.frame(h, w, target_cbr);
        frame.validate()?;
        let mcs = self.cfg.mcs.select(channel.snr_db);
        let m = mcs.bits_per_symbol;

        let seqs = self.tokenizer.encode_tiled(img, &self.codebook)?;
        let patches = seqs.len();
        let per_patch = frame.symbol_budget() / patches;
        let budget = budget_for_symbols(per_patch, &frame, mcs.rate, m)?.require_feasible(frame.key_count)?;
        let sent = frame.key_count + budget.detail_tokens;
        // N_s is rounded; the channel never carries more than the target allows
        let cap = per_patch.min(max_symbols(target_cbr, h, w) / patches);
        let layout = BlockLayout::new(
            &self.code,
            mcs.rate,
            sent * frame.b_token as usize,
            Some(cap * m as usize),
        )?;
        let constellation = Constellation::<T>::new(m)?;

        let outcomes = seqs
            .par_iter()
            .enumerate()
            .map(|(i, seq)| {
                let ch = ChannelParams {
                    seed: derive_seed(channel.seed, i as u64),
                    ..channel
                };
                self.patch_chain(seq, budget.detail_tokens, &layout, &constellation, &ch)
            })
            .collect::<Result<Vec<_>>>()?;

        let mut received = Vec::with_capacity(patches);
        let mut total = PatchOutcome::default();
        for o in outcomes {
            total.info_bits += o.info_bits;
            total.coded_bits += o.coded_bits;
            total.symbols += o.symbols;
            total.pre_errors += o.pre_errors;
            total.post_errors += o.post_errors;
            total.token_errors += o.token_errors;
            received.push(o.received.expect("patch chain returns a sequence"));
        }
        let out = self.tokenizer.decode_tiled(&received, h, w, &self.codebook)?;
        let report = TransmissionReport {
            height: h,
            width: w,
            patches,
            snr_db: channel.snr_db,
            target_cbr,
            cbr_actual: compute_cbr_f64(total.symbols, h, w),
            mcs: mcs.label.clone(),
            bits_per_symbol: m,
            rate: mcs.rate,
            tokens_sent: sent * patches,
            tokens_budget: budget.detail_tokens,
            info_bits: total.info_bits,
            coded_bits: total.coded_bits,
            symbols: total.symbols,
            pre_fec_bit_errors: total.pre_errors,
            post_fec_bit_errors: total.post_errors,
            pre_fec_ber: ratio(total.pre_errors, total.coded_bits),
            post_fec_ber: ratio(total.post_errors, total.info_bits),
            token_errors: total.token_errors,
            psnr_db: psnr(img, &out)?,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
        };
        Ok((out, report))
    }

    fn patch_chain(
        &self,
        seq: &TokenSequence,
        detail: usize,
        layout: &BlockLayout,
        constellation: &Constellation<T>,
        channel: &ChannelParams,
    ) -> Result<PatchOutcome> {
        let b = self.codebook.token_bits();
        let tokens = select_tokens(seq, detail)?;
        let info = pack_tokens(&tokens, b)?.to_bits();
        let coded = layout.encode(&self.code, &info)?;
        let m = constellation.bits_per_symbol() as usize;
        let mut padded = coded.clone();
        padded.resize(coded.len().div_ceil(m) * m, 0);
        let tx = constellation.modulate(&padded)?;
        let rx = awgn_channel(&tx, channel);
        let var = if channel.is_noiseless() {
            NOISELESS_VARIANCE
        } else {
            channel.noise_variance()
        };
        let gain = Complex::new(T::of(channel.gain.re), T::of(channel.gain.im));
        let mut llrs = constellation.demodulate_soft(&rx, gain, T::of(var))?;
        llrs.truncate(coded.len());
        let pre_errors = llrs
            .iter()
            .zip(&coded)
            .filter(|(l, &c)| ((**l < T::zero()) as u8) != c)
            .count();
        let decoded = layout.decode(&self.code, &llrs)?;
        let post_errors = decoded.iter().zip(&info).filter(|(a, b)| a != b).count();
        // residual errors pass through: wrong indices are decoded as they are
        let rx_tokens = unpack_tokens(&Bitstream::from_bits(&decoded), b, tokens.len())?;
        let token_errors = rx_tokens.iter().zip(&tokens).filter(|(a, b)| a != b).count();
        let received = zero_pad(&rx_tokens, seq.key_count(), seq.total())?;
        Ok(PatchOutcome {
            info_bits: info.len(),
            coded_bits: coded.len(),
            symbols: tx.len(),
            pre_errors,
            post_errors,
            token_errors,
            received: Some(received),
        })
    }
}

/// Largest symbol count whose CBR does not exceed `target_cbr`.
fn max_symbols(target_cbr: f64, h: usize, w: usize) -> usize {
    let exact = target_cbr * (h * w * 3) as f64;
    // absorb representation error, e.g. 1/256 * 196608
    (exact + exact * 1e-12).floor() as usize
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Sweep grid: SNR values at the configured CBR, or CBR values at the configured SNR.
#[derive(Clone, Debug, PartialEq)]
pub enum SweepAxis {
    Snr(Vec<f64>),
    Cbr(Vec<f64>),
}

/// One averaged grid point.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub snr_db: f64,
    pub target_cbr: f64,
    pub cbr_actual: f64,
    pub mcs: String,
    pub tokens_sent: usize,
    pub pre_fec_ber: f64,
    pub post_fec_ber: f64,
    /// Mean over trials.
    pub token_errors: f64,
    /// Mean over trials.
    pub psnr_db: f64,
    /// `ok`, or the error that stopped this point.
    pub status: String,
}

impl SweepRow {
    fn failed(snr_db: f64, target_cbr: f64, err: &Error) -> Self {
        Self {
            snr_db,
            target_cbr,
            cbr_actual: f64::NAN,
            mcs: String::new(),
            tokens_sent: 0,
            pre_fec_ber: f64::NAN,
            post_fec_ber: f64::NAN,
            token_errors: f64::NAN,
            psnr_db: f64::NAN,
            status: format!("error: {err}"),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

/// Runs `trials` transmissions per grid point. Trial `k` uses channel seed
/// `derive_seed(cfg.channel.seed, k)` at every point. A failing point is
/// reported in its status column and the sweep continues.
pub fn sweep<T: Real>(
    pipeline: &Pipeline<T>,
    img: &ImageBuffer<T>,
    axis: &SweepAxis,
    trials: usize,
) -> Result<Vec<SweepRow>> {
    if trials == 0 {
        return config("sweep needs at least one trial");
    }
    let base = pipeline.config().channel;
    let points: Vec<(f64, f64)> = match axis {
        SweepAxis::Snr(v) => v.iter().map(|&s| (s, pipeline.config().target_cbr)).collect(),
        SweepAxis::Cbr(v) => v.iter().map(|&c| (base.snr_db, c)).collect(),
    };
    Ok(points
        .par_iter()
        .map(|&(snr_db, cbr)| {
            let reports: Result<Vec<TransmissionReport>> = (0..trials)
                .into_par_iter()
                .map(|k| {
                    let ch = ChannelParams {
                        snr_db,
                        seed: derive_seed(base.seed, k as u64),
                        ..base
                    };
                    pipeline.transmit_at(img, ch, cbr).map(|(_, r)| r)
                })
                .collect();
            match reports {
                Err(e) => SweepRow::failed(snr_db, cbr, &e),
                Ok(rs) => {
                    let n = rs.len() as f64;
                    let mean = |f: fn(&TransmissionReport) -> f64| rs.iter().map(f).sum::<f64>() / n;
                    SweepRow {
                        snr_db,
                        target_cbr: cbr,
                        cbr_actual: rs[0].cbr_actual,
                        mcs: rs[0].mcs.clone(),
                        tokens_sent: rs[0].tokens_sent,
                        pre_fec_ber: mean(|r| r.pre_fec_ber),
                        post_fec_ber: mean(|r| r.post_fec_ber),
                        token_errors: mean(|r| r.token_errors as f64),
                        psnr_db: mean(|r| r.psnr_db),
                        status: "ok".into(),
                    }
                }
            }
        })
        .collect())
}

/// Writes the header and one record per row.
pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Io {
        path: "<csv>".into(),
        source: e.into(),
    };
    w.write_record(CSV_COLUMNS).map_err(io)?;
    for r in rows {
        w.write_record([
            CSV_SCHEMA.to_string(),
            r.snr_db.to_string(),
            r.target_cbr.to_string(),
            r.cbr_actual.to_string(),
            r.mcs.clone(),
            r.tokens_sent.to_string(),
            r.pre_fec_ber.to_string(),
            r.post_fec_ber.to_string(),
            r.token_errors.to_string(),
            r.psnr_db.to_string(),
            r.status.clone(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Io {
        path: "<csv>".into(),
        source: e,
    })
}

/// Block and bit error counts of one MCS at one SNR.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlerPoint {
    pub snr_db: f64,
    pub blocks: usize,
    pub block_errors: usize,
    pub bit_errors: usize,
    pub bler: f64,
    pub ber: f64,
}

/// Monte Carlo block error rate of random `info_len`-bit blocks through
/// turbo coding at `rate`, `m`-bit Gray QAM and AWGN at `snr_db` (Es/N0).
pub fn simulate_bler(
    code: &TurboCode,
    bits_per_symbol: u32,
    rate: CodeRate,
    snr_db: f64,
    info_len: usize,
    blocks: usize,
    seed: u64,
) -> Result<BlerPoint> {
    let layout = BlockLayout::new(code, rate, info_len, None)?;
    let constellation = Constellation::<f64>::new(bits_per_symbol)?;
    let m = bits_per_symbol as usize;
    let errors = (0..blocks)
        .into_par_iter()
        .map(|k| -> Result<usize> {
            let s = derive_seed(seed, k as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let info: Vec<u8> = (0..info_len).map(|_| rng.random::<bool>() as u8).collect();
            let coded = layout.encode(code, &info)?;
            let mut padded = coded.clone();
            padded.resize(coded.len().div_ceil(m) * m, 0);
            let tx = constellation.modulate(&padded)?;
            let ch = ChannelParams::awgn(snr_db, derive_seed(s, 1));
            let rx = awgn_channel(&tx, &ch);
            let mut llrs = constellation.demodulate_soft(&rx, Complex::new(1.0, 0.0), ch.noise_variance())?;
            llrs.truncate(coded.len());
            let decoded = layout.decode(code, &llrs)?;
            Ok(decoded.iter().zip(&info).filter(|(a, b)| a != b).count())
        })
        .collect::<Result<Vec<_>>>()?;
    let block_errors = errors.iter().filter(|&&e| e > 0).count();
    let bit_errors: usize = errors.iter().sum();
    Ok(BlerPoint {
        snr_db,
        blocks,
        block_errors,
        bit_errors,
        bler: ratio(block_errors, blocks),
        ber: ratio(bit_errors, blocks * info_len),
    })
}

/// Calibrated threshold: the lowest grid SNR from which every higher grid
/// point meets `target_bler`. `None` when the top of the grid still fails.
pub fn calibrate_threshold(points: &[BlerPoint], target_bler: f64) -> Option<f64> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| a.snr_db.total_cmp(&b.snr_db));
    let mut threshold = None;
    for p in sorted.iter().rev() {
        if p.bler > target_bler {
            break;
        }
        threshold = Some(p.snr_db);
    }
    threshold
}

/// Builds a valid table from calibrated `(threshold, m, rate, label)`
/// candidates: entries dominated by a more efficient scheme with an equal or
/// lower threshold are dropped, and the first row becomes the `-inf` fallback.
pub fn table_from_thresholds(candidates: &[(f64, u32, CodeRate, String)]) -> Result<McsTable> {
    let mut rows: Vec<McsEntry> = candidates
        .iter()
        .map(|(th, m, r, label)| McsEntry {
            min_snr_db: *th,
            bits_per_symbol: *m,
            rate: *r,
            label: label.clone(),
        })
        .collect();
    rows.sort_by(|a, b| a.spectral_efficiency().cmp(&b.spectral_efficiency()));
    let mut kept: Vec<McsEntry> = Vec::new();
    for e in rows {
        while kept.last().is_some_and(|k| k.min_snr_db >= e.min_snr_db) {
            kept.pop();
        }
        if kept
            .last()
            .is_some_and(|k| k.spectral_efficiency() == e.spectral_efficiency())
        {
            continue;
        }
        kept.push(e);
    }
    if let Some(first) = kept.first_mut() {
        first.min_snr_db = f64::NEG_INFINITY;
    }
    McsTable::new(kept)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_pipeline(cbr: f64, snr: f64) -> Pipeline<f64> {
        let tok = DctTokenizerConfig {
            patch_height: 32,
            patch_width: 32,
            block: 8,
            coeffs_per_token: 4,
            total_tokens: 16,
            key_count: 4,
        };
        let rows: Vec<Vec<f64>> = (0..16).map(|i| vec![i as f64 - 8.0, 0.0, 0.0, 0.0]).collect();
        let cb = Codebook::from_rows(&rows).unwrap();
        let cfg = PipelineConfig {
            tokenizer: tok,
            target_cbr: cbr,
            mcs: McsChoice::Fixed {
                bits_per_symbol: 2,
                rate: CodeRate::OneThird,
            },
            channel: ChannelParams::awgn(snr, 3),
            ..PipelineConfig::default()
        };
        Pipeline::new(cfg, cb).unwrap()
    }

    fn gradient(h: usize, w: usize) -> ImageBuffer<f64> {
        let data = (0..h * w * 3).map(|i| ((i / 3) % w) as f64 / w as f64).collect();
        ImageBuffer::new(h, w, data).unwrap()
    }

    #[test]
    fn noiseless_matches_reference() {
        let p = small_pipeline(0.2, f64::INFINITY);
        let img = gradient(32, 64);
        let (out, rep) = p.transmit(&img).unwrap();
        assert_eq!(rep.post_fec_bit_errors, 0);
        assert_eq!(rep.patches, 2);
        assert_eq!(out, p.reference_reconstruction(&img, rep.tokens_budget).unwrap());
        assert!(rep.cbr_actual <= 0.2);
    }

    #[test]
    fn infeasible_budget() {
        let p = small_pipeline(1e-4, 6.0);
        assert!(matches!(p.transmit(&gradient(32, 32)), Err(Error::Infeasible(_))));
    }

    #[test]
    fn codebook_dimension_mismatch() {
        let cb = Codebook::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert!(Pipeline::new(PipelineConfig::default(), cb).is_err());
    }

    #[test]
    fn sweep_records_failures_and_continues() {
        let p = small_pipeline(0.2, 6.0);
        let rows = sweep(&p, &gradient(32, 32), &SweepAxis::Cbr(vec![1e-4, 0.2]), 1).unwrap();
        assert!(!rows[0].is_ok() && rows[0].status.starts_with("error"));
        assert!(rows[1].is_ok());
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with(&CSV_COLUMNS.join(",")));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn threshold_calibration() {
        let pt = |snr_db, bler| BlerPoint {
            snr_db,
            blocks: 10,
            block_errors: 0,
            bit_errors: 0,
            bler,
            ber: 0.0,
        };
        let pts = [pt(0.0, 1.0), pt(1.0, 0.05), pt(2.0, 0.2), pt(3.0, 0.0), pt(4.0, 0.0)];
        assert_eq!(calibrate_threshold(&pts, 0.1), Some(3.0));
        assert_eq!(calibrate_threshold(&[pt(0.0, 0.5)], 0.1), None);
    }

    #[test]
    fn dominated_entries_are_dropped() {
        let c = vec![
            (0.0, 2, CodeRate::OneThird, "A".to_string()),
            (3.0, 2, CodeRate::OneHalf, "B".to_string()),
            (2.5, 4, CodeRate::OneThird, "C".to_string()),
            (6.0, 4, CodeRate::OneHalf, "D".to_string()),
        ];
        let t = table_from_thresholds(&c).unwrap();
        let labels: Vec<_> = t.entries().iter().map(|e| e.label.as_str()).collect();
        assert_eq!(labels, ["A", "C", "D"]);
        assert_eq!(t.entries()[0].min_snr_db, f64::NEG_INFINITY);
    }
}
