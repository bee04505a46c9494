//! Rate matching of the rate-1/3 mother code by periodic parity puncturing.
//!
//! Mother codeword layout for a block of `n` information bits:
//! `[systematic n | parity1 n | parity2 n | tail 4*memory]`. Rate matching
//! keeps a subset of positions in that same order, so rate 1/3 is the identity.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_rational::Ratio;

use crate::error::{config, Error, Result};
use crate::num::Real;

/// Termination bits of the two LTE constituents (2 x 3 steps x 2 bits).
pub const TAIL_BITS: usize = 12;

static STANDARD: OnceLock<PunctureTable> = OnceLock::new();

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CodeRate {
    OneThird,
    OneHalf,
    TwoThirds,
    ThreeQuarters,
}

impl CodeRate {
    pub const ALL: [CodeRate; 4] = [Self::OneThird, Self::OneHalf, Self::TwoThirds, Self::ThreeQuarters];

    pub fn ratio(self) -> Ratio<u64> {
        match self {
            Self::OneThird => Ratio::new(1, 3),
            Self::OneHalf => Ratio::new(1, 2),
            Self::TwoThirds => Ratio::new(2, 3),
            Self::ThreeQuarters => Ratio::new(3, 4),
        }
    }

    pub fn as_f64(self) -> f64 {
        let r = self.ratio();
        *r.numer() as f64 / *r.denom() as f64
    }
}

impl fmt::Display for CodeRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = self.ratio();
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl FromStr for CodeRate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.to_string() == s.trim())
            .ok_or_else(|| Error::Config(format!("unsupported code rate {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PuncturePattern {
    pub rate: CodeRate,
    pub parity1: Vec<bool>,
    pub parity2: Vec<bool>,
    pub keep_tail: bool,
}

impl PuncturePattern {
    /// Mother-code positions kept for an `n`-bit block, in transmission order.
    pub fn kept_positions(&self, n: usize) -> Vec<usize> {
        let period = self.parity1.len();
        let mut out: Vec<usize> = (0..n).collect();
        out.extend((0..n).filter(|i| self.parity1[i % period]).map(|i| n + i));
        out.extend((0..n).filter(|i| self.parity2[i % period]).map(|i| 2 * n + i));
        if self.keep_tail {
            out.extend(3 * n..3 * n + TAIL_BITS);
        }
        out
    }

    pub fn output_len(&self, n: usize) -> usize {
        let period = self.parity1.len();
        let count = |mask: &[bool]| (0..n).filter(|i| mask[i % period]).count();
        n + count(&self.parity1) + count(&self.parity2) + if self.keep_tail { TAIL_BITS } else { 0 }
    }
}

/// One pattern per supported rate.
#[derive(Clone, Debug)]
pub struct PunctureTable {
    patterns: Vec<PuncturePattern>,
}

impl PunctureTable {
    /// Table shipped in `data/puncture.txt`.
    pub fn standard() -> &'static PunctureTable {
        STANDARD.get_or_init(|| {
            Self::parse(include_str!("../../data/puncture.txt")).expect("bundled puncture table is valid")
        })
    }

    /// Rows `rate period parity1-mask parity2-mask tail`.
    pub fn parse(text: &str) -> Result<Self> {
        let mut patterns: Vec<PuncturePattern> = Vec::new();
        let mut offset = 0;
        for line in text.lines() {
            let body = line.split('#').next().unwrap_or("").trim();
            if !body.is_empty() {
                let bad = |m: &str| Error::Parse {
                    offset,
                    message: format!("puncture row: {m}"),
                };
                let f: Vec<&str> = body.split_whitespace().collect();
                if f.len() != 5 {
                    return Err(bad("expected 5 fields"));
                }
                let rate: CodeRate = f[0].parse().map_err(|_| bad("unknown rate"))?;
                let period: usize = f[1].parse().map_err(|_| bad("period"))?;
                let mask = |s: &str| -> Result<Vec<bool>> {
                    if s.len() != period || s.chars().any(|c| c != '0' && c != '1') {
                        return Err(bad("mask must be period binary digits"));
                    }
                    Ok(s.chars().map(|c| c == '1').collect())
                };
                let pattern = PuncturePattern {
                    rate,
                    parity1: mask(f[2])?,
                    parity2: mask(f[3])?,
                    keep_tail: match f[4] {
                        "1" => true,
                        "0" => false,
                        _ => return Err(bad("tail flag must be 0 or 1")),
                    },
                };
                if patterns.iter().any(|p| p.rate == rate) {
                    return Err(bad("duplicate rate"));
                }
                patterns.push(pattern);
            }
            offset += line.len() + 1;
        }
        Ok(Self { patterns })
    }

    pub fn pattern(&self, rate: CodeRate) -> Result<&PuncturePattern> {
        self.patterns
            .iter()
            .find(|p| p.rate == rate)
            .ok_or_else(|| Error::Config(format!("no puncturing pattern for rate {rate}")))
    }

    pub fn rates(&self) -> impl Iterator<Item = CodeRate> + '_ {
        self.patterns.iter().map(|p| p.rate)
    }
}

fn info_len_of(mother_len: usize) -> Result<usize> {
    if mother_len < TAIL_BITS || (mother_len - TAIL_BITS) % 3 != 0 {
        return Err(Error::Framing(format!(
            "{mother_len} is not a mother-code length 3n+{TAIL_BITS}"
        )));
    }
    Ok((mother_len - TAIL_BITS) / 3)
}

/// Punctures a mother codeword to `rate` with the bundled pattern table.
pub fn rate_match(coded: &[u8], rate: CodeRate) -> Result<Vec<u8>> {
    let n = info_len_of(coded.len())?;
    let pattern = PunctureTable::standard().pattern(rate)?;
    Ok(pattern.kept_positions(n).into_iter().map(|i| coded[i]).collect())
}

/// Re-expands punctured LLRs to mother-code length with zeros (erasures).
pub fn rate_recover<T: Real>(llrs: &[T], rate: CodeRate, info_len: usize) -> Result<Vec<T>> {
    let pattern = PunctureTable::standard().pattern(rate)?;
    let kept = pattern.kept_positions(info_len);
    if kept.len() != llrs.len() {
        return Err(Error::Framing(format!(
            "rate {rate} block of {info_len} bits carries {} LLRs, got {}",
            kept.len(),
            llrs.len()
        )));
    }
    let mut out = vec![T::zero(); 3 * info_len + TAIL_BITS];
    for (&pos, &l) in kept.iter().zip(llrs) {
        out[pos] = l;
    }
    Ok(out)
}

pub(crate) fn check_supported(rate: CodeRate) -> Result<()> {
    if PunctureTable::standard().pattern(rate).is_err() {
        return config(format!("rate {rate} has no puncturing pattern"));
    }
    Ok(())
}
