//! Progressive source framing: how many detail tokens fit a channel budget,
//! which tokens go out, and how they are packed into bits.

use std::fs;
use std::path::Path;

use crate::error::{argument, config, Error, Result};
use crate::fec::CodeRate;
use crate::tokens::TokenSequence;

/// How the detail-token budget is derived from the symbol budget.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BudgetFormula {
    /// `floor(N_s * m * r / b_token) - key_count`: symbols times bits per
    /// symbol times code rate is the information-bit capacity.
    #[default]
    Consistent,
    /// `floor(N_s * r / (b_token * m)) - key_count`, the form with the
    /// modulation order in the denominator. Kept for comparison only: it
    /// shrinks capacity as the constellation grows.
    ModulationInDenominator,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameConfig {
    pub b_token: u32,
    pub key_count: usize,
    pub total_tokens: usize,
    /// Channel bandwidth ratio: complex symbols per source dimension.
    pub target_cbr: f64,
    pub height: usize,
    pub width: usize,
    pub formula: BudgetFormula,
}

impl FrameConfig {
    pub fn validate(&self) -> Result<()> {
        if self.b_token == 0 || self.b_token > 31 {
            return config(format!("b_token {} outside 1..=31", self.b_token));
        }
        if !(self.target_cbr > 0.0 && self.target_cbr.is_finite()) {
            return config(format!("target CBR {} must be positive", self.target_cbr));
        }
        if self.key_count == 0 || self.key_count > self.total_tokens {
            return config(format!(
                "key count {} outside 1..={}",
                self.key_count, self.total_tokens
            ));
        }
        if self.height == 0 || self.width == 0 {
            return config("image dimensions must be positive");
        }
        Ok(())
    }

    /// `N_s = round(CBR * H * W * 3)`.
    pub fn symbol_budget(&self) -> usize {
        (self.target_cbr * (self.height * self.width * 3) as f64).round() as usize
    }
}

/// Result of the budget computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DetailBudget {
    /// Complex symbols available, `N_s`.
    pub symbols: usize,
    /// Whole tokens that fit the information-bit capacity.
    pub token_capacity: usize,
    /// Detail tokens to send, `n_t`, clamped to `[0, total - key_count]`.
    pub detail_tokens: usize,
    /// False when not even the key tokens fit.
    pub feasible: bool,
}

impl DetailBudget {
    pub fn require_feasible(self, key_count: usize) -> Result<Self> {
        if self.feasible {
            Ok(self)
        } else {
            Err(Error::Infeasible(format!(
                "{} symbols carry {} tokens, fewer than the {key_count} key tokens",
                self.symbols, self.token_capacity
            )))
        }
    }
}

fn check_modulation(m: u32) -> Result<()> {
    if !crate::modem::SUPPORTED_BITS_PER_SYMBOL.contains(&m) {
        return argument(format!("bits per symbol {m} not in {{1, 2, 4, 6}}"));
    }
    Ok(())
}

/// Detail-token budget `n_t` for code rate `rate` and `m` bits per symbol.
pub fn compute_detail_budget(cfg: &FrameConfig, rate: CodeRate, m: u32) -> Result<DetailBudget> {
    cfg.validate()?;
    budget_for_symbols(cfg.symbol_budget(), cfg, rate, m)
}

/// Same as [`compute_detail_budget`] with an explicit symbol count.
pub fn budget_for_symbols(symbols: usize, cfg: &FrameConfig, rate: CodeRate, m: u32) -> Result<DetailBudget> {
    check_modulation(m)?;
    let r = rate.ratio();
    let (num, den) = (*r.numer(), *r.denom());
    let (s, m64, b) = (symbols as u64, m as u64, cfg.b_token as u64);
    let token_capacity = match cfg.formula {
        BudgetFormula::Consistent => s * m64 * num / (den * b),
        BudgetFormula::ModulationInDenominator => s * num / (den * b * m64),
    } as usize;
    let feasible = token_capacity >= cfg.key_count;
    let detail_tokens = token_capacity
        .saturating_sub(cfg.key_count)
        .min(cfg.total_tokens - cfg.key_count);
    Ok(DetailBudget {
        symbols,
        token_capacity,
        detail_tokens,
        feasible,
    })
}

/// Key tokens followed by the first `detail` detail tokens.
pub fn select_tokens(seq: &TokenSequence, detail: usize) -> Result<Vec<u32>> {
    let max = seq.total() - seq.key_count();
    if detail > max {
        return argument(format!("{detail} detail tokens requested, sequence has {max}"));
    }
    Ok(seq.indices()[..seq.key_count() + detail].to_vec())
}

/// Packed bits, most significant bit of each byte first. Trailing pad bits are zero.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Bitstream {
    bytes: Vec<u8>,
    bit_len: usize,
}

impl Bitstream {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut bs = Self {
            bytes: Vec::with_capacity(bits.len().div_ceil(8)),
            bit_len: 0,
        };
        for &b in bits {
            bs.push(b != 0);
        }
        bs
    }

    pub fn push(&mut self, bit: bool) {
        if self.bit_len % 8 == 0 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 0x80 >> (self.bit_len % 8);
        }
        self.bit_len += 1;
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.bit_len, "bit {i} past end {}", self.bit_len);
        self.bytes[i / 8] & (0x80 >> (i % 8)) != 0
    }

    pub fn len(&self) -> usize {
        self.bit_len
    }

    pub fn is_empty(&self) -> bool {
        self.bit_len == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// One `u8` (0 or 1) per bit.
    pub fn to_bits(&self) -> Vec<u8> {
        (0..self.bit_len).map(|i| self.get(i) as u8).collect()
    }

    /// Writes raw bytes to `path` and `bits=<n>` to `path` + `.bits`.
    pub fn dump(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, &self.bytes).map_err(|e| Error::io(path, e))?;
        let mut side = path.as_os_str().to_owned();
        side.push(".bits");
        fs::write(&side, format!("bits={}\n", self.bit_len)).map_err(|e| Error::io(side, e))
    }
}

/// Writes each token as `b_token` bits, MSB first.
pub fn pack_tokens(tokens: &[u32], b_token: u32) -> Result<Bitstream> {
    if b_token == 0 || b_token > 31 {
        return argument(format!("b_token {b_token} outside 1..=31"));
    }
    let mut bs = Bitstream {
        bytes: Vec::new(),
        bit_len: 0,
    };
    for &t in tokens {
        if t >> b_token != 0 {
            return argument(format!("token {t} does not fit in {b_token} bits"));
        }
        for k in (0..b_token).rev() {
            bs.push((t >> k) & 1 == 1);
        }
    }
    Ok(bs)
}

pub fn unpack_tokens(bs: &Bitstream, b_token: u32, count: usize) -> Result<Vec<u32>> {
    let need = count * b_token as usize;
    if bs.len() < need {
        return Err(Error::Framing(format!(
            "{} bits cannot hold {count} tokens of {b_token} bits",
            bs.len()
        )));
    }
    Ok((0..count)
        .map(|t| (0..b_token as usize).fold(0u32, |acc, k| (acc << 1) | bs.get(t * b_token as usize + k) as u32))
        .collect())
}
