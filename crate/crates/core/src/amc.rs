//! Adaptive modulation and coding: SNR-indexed (modulation, code rate) table.

use std::fs;
use std::path::Path;

use num_rational::Ratio;

use crate::error::{config, Error, Result};
use crate::fec::{self, CodeRate};
use crate::modem::SUPPORTED_BITS_PER_SYMBOL;

#[derive(Clone, Debug, PartialEq)]
pub struct McsEntry {
    /// Es/N0 threshold in dB; `-inf` for the fallback row.
    pub min_snr_db: f64,
    pub bits_per_symbol: u32,
    pub rate: CodeRate,
    pub label: String,
}

impl McsEntry {
    /// Information bits per channel symbol, `m * r`.
    pub fn spectral_efficiency(&self) -> Ratio<u64> {
        self.rate.ratio() * self.bits_per_symbol as u64
    }
}

/// Rows sorted by strictly ascending threshold and spectral efficiency.
#[derive(Clone, Debug, PartialEq)]
pub struct McsTable {
    entries: Vec<McsEntry>,
}

impl McsTable {
    pub fn new(entries: Vec<McsEntry>) -> Result<Self> {
        let Some(first) = entries.first() else {
            return config("MCS table is empty");
        };
        if first.min_snr_db != f64::NEG_INFINITY {
            return config("first MCS row must have threshold -inf");
        }
        for e in &entries {
            if !SUPPORTED_BITS_PER_SYMBOL.contains(&e.bits_per_symbol) {
                return config(format!(
                    "{}: unsupported bits per symbol {}",
                    e.label, e.bits_per_symbol
                ));
            }
            fec::check_supported(e.rate)?;
            if e.min_snr_db.is_nan() || e.min_snr_db == f64::INFINITY {
                return config(format!("{}: invalid threshold", e.label));
            }
        }
        for w in entries.windows(2) {
            if w[1].min_snr_db <= w[0].min_snr_db {
                return config(format!("thresholds not ascending at {}", w[1].label));
            }
            if w[1].spectral_efficiency() <= w[0].spectral_efficiency() {
                return config(format!("spectral efficiency not increasing at {}", w[1].label));
            }
        }
        Ok(Self { entries })
    }

    /// The table shipped in `data/mcs_default.txt`.
    pub fn default_table() -> Self {
        Self::parse(include_str!("../data/mcs_default.txt")).expect("bundled MCS table is valid")
    }

    /// Rows `min_snr_db m r label`; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        let mut offset = 0;
        for line in text.lines() {
            let body = line.split('#').next().unwrap_or("").trim();
            if !body.is_empty() {
                let bad = |m: &str| Error::Parse {
                    offset,
                    message: format!("MCS row: {m}"),
                };
                let f: Vec<&str> = body.split_whitespace().collect();
                if f.len() != 4 {
                    return Err(bad("expected `min_snr_db m r label`"));
                }
                let min_snr_db = match f[0] {
                    "-inf" => f64::NEG_INFINITY,
                    s => s.parse().map_err(|_| bad("threshold"))?,
                };
                entries.push(McsEntry {
                    min_snr_db,
                    bits_per_symbol: f[1].parse().map_err(|_| bad("bits per symbol"))?,
                    rate: f[2].parse().map_err(|_| bad("code rate"))?,
                    label: f[3].to_string(),
                });
            }
            offset += line.len() + 1;
        }
        Self::new(entries)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::from("# min_snr_db m r label\n");
        for e in &self.entries {
            let th = if e.min_snr_db == f64::NEG_INFINITY {
                "-inf".to_string()
            } else {
                format!("{}", e.min_snr_db)
            };
            s.push_str(&format!("{th} {} {} {}\n", e.bits_per_symbol, e.rate, e.label));
        }
        s
    }

    pub fn entries(&self) -> &[McsEntry] {
        &self.entries
    }

    /// Highest-threshold row with `min_snr_db <= snr_db`.
    pub fn select(&self, snr_db: f64) -> &McsEntry {
        self.entries
            .iter()
            .rev()
            .find(|e| e.min_snr_db <= snr_db)
            .unwrap_or(&self.entries[0])
    }
}

pub fn select_mcs(snr_db: f64, table: &McsTable) -> &McsEntry {
    table.select(snr_db)
}

/// `N_s / (H * W * 3)` as an exact ratio.
pub fn compute_cbr(n_symbols: usize, height: usize, width: usize) -> Ratio<u64> {
    assert!(height > 0 && width > 0, "image dimensions must be positive");
    Ratio::new(n_symbols as u64, (height * width * 3) as u64)
}

pub fn compute_cbr_f64(n_symbols: usize, height: usize, width: usize) -> f64 {
    let r = compute_cbr(n_symbols, height, width);
    *r.numer() as f64 / *r.denom() as f64
}
