//! Gray-mapped QAM modulation, a complex AWGN channel with scalar gain, and
//! max-log soft demapping.
//!
//! SNR is Es/N0 with unit-energy constellations: the complex noise variance
//! is `10^(-snr_db/10)`, split evenly between I and Q.

use std::sync::OnceLock;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{argument, config, Error, Result};
use crate::num::Real;

/// Demapper output limit.
pub const LLR_CLAMP: f64 = 30.0;

pub const SUPPORTED_BITS_PER_SYMBOL: [u32; 4] = [1, 2, 4, 6];

static TABLE: OnceLock<Vec<(u32, Vec<(i32, i32)>)>> = OnceLock::new();

/// Integer (I, Q) levels per label for every supported order, from `data/constellations.txt`.
pub fn gray_table(bits_per_symbol: u32) -> Result<&'static [(i32, i32)]> {
    let table = TABLE.get_or_init(|| {
        parse_gray_table(include_str!("../data/constellations.txt")).expect("bundled constellation table is valid")
    });
    table
        .iter()
        .find(|(m, _)| *m == bits_per_symbol)
        .map(|(_, pts)| pts.as_slice())
        .ok_or_else(|| Error::Config(format!("no constellation with {bits_per_symbol} bits per symbol")))
}

/// Parses rows `m label I Q`; labels must cover `0..2^m` exactly once.
pub fn parse_gray_table(text: &str) -> Result<Vec<(u32, Vec<(i32, i32)>)>> {
    let mut out: Vec<(u32, Vec<Option<(i32, i32)>>)> = Vec::new();
    let mut offset = 0;
    for line in text.lines() {
        let body = line.split('#').next().unwrap_or("").trim();
        if !body.is_empty() {
            let bad = |m: &str| Error::Parse {
                offset,
                message: format!("constellation row: {m}"),
            };
            let f: Vec<&str> = body.split_whitespace().collect();
            if f.len() != 4 {
                return Err(bad("expected `m label I Q`"));
            }
            let m: u32 = f[0].parse().map_err(|_| bad("m"))?;
            if f[1].len() != m as usize || m == 0 || m > 8 {
                return Err(bad("label width must equal m"));
            }
            let label = usize::from_str_radix(f[1], 2).map_err(|_| bad("label"))?;
            let i: i32 = f[2].parse().map_err(|_| bad("I"))?;
            let q: i32 = f[3].parse().map_err(|_| bad("Q"))?;
            let idx = match out.iter().position(|(mm, _)| *mm == m) {
                Some(idx) => idx,
                None => {
                    out.push((m, vec![None; 1 << m]));
                    out.len() - 1
                }
            };
            if out[idx].1[label].replace((i, q)).is_some() {
                return Err(bad("duplicate label"));
            }
        }
        offset += line.len() + 1;
    }
    out.into_iter()
        .map(|(m, pts)| {
            let pts: Option<Vec<_>> = pts.into_iter().collect();
            pts.map(|p| (m, p)).ok_or_else(|| Error::Parse {
                offset,
                message: format!("m={m} table is missing labels"),
            })
        })
        .collect()
}

/// A unit-average-energy Gray constellation. Index = bit label, MSB first.
#[derive(Clone, Debug, PartialEq)]
pub struct Constellation<T> {
    bits_per_symbol: u32,
    points: Vec<Complex<T>>,
}

impl<T: Real> Constellation<T> {
    pub fn new(bits_per_symbol: u32) -> Result<Self> {
        if !SUPPORTED_BITS_PER_SYMBOL.contains(&bits_per_symbol) {
            return config(format!("unsupported bits per symbol {bits_per_symbol}"));
        }
        let levels = gray_table(bits_per_symbol)?;
        let energy: i64 = levels.iter().map(|&(i, q)| (i * i + q * q) as i64).sum();
        let scale = (levels.len() as f64 / energy as f64).sqrt();
        let points = levels
            .iter()
            .map(|&(i, q)| Complex::new(T::of(i as f64 * scale), T::of(q as f64 * scale)))
            .collect();
        Ok(Self {
            bits_per_symbol,
            points,
        })
    }

    pub fn bits_per_symbol(&self) -> u32 {
        self.bits_per_symbol
    }

    pub fn points(&self) -> &[Complex<T>] {
        &self.points
    }

    pub fn name(&self) -> &'static str {
        modulation_name(self.bits_per_symbol)
    }

    /// Maps `m`-bit groups, MSB first, to points. `bits.len()` must be a multiple of `m`.
    pub fn modulate(&self, bits: &[u8]) -> Result<Vec<Complex<T>>> {
        let m = self.bits_per_symbol as usize;
        if bits.len() % m != 0 {
            return argument(format!("{} bits do not fill whole {m}-bit symbols", bits.len()));
        }
        Ok(bits
            .chunks_exact(m)
            .map(|g| self.points[g.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize)])
            .collect())
    }

    /// Minimum-distance hard decision after removing the gain `h`.
    pub fn hard_demap(&self, received: &[Complex<T>], h: Complex<T>) -> Vec<u8> {
        let m = self.bits_per_symbol as usize;
        let mut out = Vec::with_capacity(received.len() * m);
        for &r in received {
            let best = self
                .points
                .iter()
                .enumerate()
                .map(|(i, &x)| (i, (r - h * x).norm_sqr()))
                .fold((0, T::infinity()), |a, b| if b.1 < a.1 { b } else { a })
                .0;
            out.extend((0..m).rev().map(|k| ((best >> k) & 1) as u8));
        }
        out
    }

    /// Max-log LLRs, positive favouring bit 0:
    /// `(min_{x: b=1} |r - h x|^2 - min_{x: b=0} |r - h x|^2) / noise_var`,
    /// clamped to `+-LLR_CLAMP`.
    pub fn demodulate_soft(&self, received: &[Complex<T>], h: Complex<T>, noise_var: T) -> Result<Vec<T>> {
        if !(noise_var > T::zero()) {
            return argument("noise variance must be positive");
        }
        let m = self.bits_per_symbol as usize;
        let lim = T::of(LLR_CLAMP);
        let mut out = Vec::with_capacity(received.len() * m);
        let mut dist = vec![T::zero(); self.points.len()];
        for &r in received {
            for (d, &x) in dist.iter_mut().zip(&self.points) {
                *d = (r - h * x).norm_sqr();
            }
            for k in (0..m).rev() {
                let (mut d0, mut d1) = (T::infinity(), T::infinity());
                for (label, &d) in dist.iter().enumerate() {
                    if (label >> k) & 1 == 0 {
                        d0 = d0.min(d);
                    } else {
                        d1 = d1.min(d);
                    }
                }
                out.push(((d1 - d0) / noise_var).max(-lim).min(lim));
            }
        }
        Ok(out)
    }
}

pub fn modulation_name(bits_per_symbol: u32) -> &'static str {
    match bits_per_symbol {
        1 => "BPSK",
        2 => "QPSK",
        4 => "16QAM",
        6 => "64QAM",
        _ => "unsupported",
    }
}

/// Channel state for one transmission.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelParams {
    /// Es/N0 in dB; `f64::INFINITY` disables noise.
    pub snr_db: f64,
    pub gain: Complex<f64>,
    pub seed: u64,
}

impl ChannelParams {
    pub fn awgn(snr_db: f64, seed: u64) -> Self {
        Self {
            snr_db,
            gain: Complex::new(1.0, 0.0),
            seed,
        }
    }

    pub fn noiseless() -> Self {
        Self::awgn(f64::INFINITY, 0)
    }

    pub fn is_noiseless(&self) -> bool {
        self.snr_db == f64::INFINITY
    }

    /// Total complex noise variance `10^(-snr_db/10)`; zero when noiseless.
    pub fn noise_variance(&self) -> f64 {
        if self.is_noiseless() {
            0.0
        } else {
            10f64.powf(-self.snr_db / 10.0)
        }
    }
}

/// `r = h*s + n` with circularly symmetric Gaussian `n`, deterministic per seed.
pub fn awgn_channel<T: Real>(symbols: &[Complex<T>], params: &ChannelParams) -> Vec<Complex<T>> {
    let h = Complex::new(T::of(params.gain.re), T::of(params.gain.im));
    if params.is_noiseless() {
        return symbols.iter().map(|&s| h * s).collect();
    }
    let sigma = (params.noise_variance() / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    symbols
        .iter()
        .map(|&s| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            h * s + Complex::new(T::of(sigma * re), T::of(sigma * im))
        })
        .collect()
}

/// Derives an independent stream seed from a base seed (SplitMix64 finalizer).
///
/// Sweeps and patches use `derive_seed(base, index)` so every stream is
/// reproducible on its own and independent of scheduling.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
