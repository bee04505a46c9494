//! Maps an arbitrary-length payload onto one turbo block.
//!
//! The payload is prefixed with zero filler bits up to the nearest supported
//! block length. Filler bits are known to the receiver, and so is the
//! first-constituent parity over them (the encoder stays in the zero state),
//! so neither is transmitted; the decoder re-inserts them as saturated
//! LLRs. When a symbol budget caps the channel bits, the rate-matched stream
//! is cut at the end and the missing positions decode as erasures.

use crate::error::{Error, Result};
use crate::num::Real;

use super::puncture::{CodeRate, PunctureTable};
use super::turbo::{TurboCode, LLR_CLAMP};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockLayout {
    pub info_len: usize,
    pub block_len: usize,
    pub rate: CodeRate,
    /// Mother-code positions sent on the channel, in order.
    positions: Vec<usize>,
}

impl BlockLayout {
    pub fn new(code: &TurboCode, rate: CodeRate, info_len: usize, capacity: Option<usize>) -> Result<Self> {
        let block_len = code.table().fit(info_len.max(1)).ok_or_else(|| {
            Error::Config(format!(
                "{info_len} bits exceed the largest turbo block ({})",
                code.table().max_len()
            ))
        })?;
        let filler = block_len - info_len;
        let pattern = PunctureTable::standard().pattern(rate)?;
        let mut positions: Vec<usize> = pattern
            .kept_positions(block_len)
            .into_iter()
            .filter(|&p| !(p < filler || (block_len..block_len + filler).contains(&p)))
            .collect();
        if let Some(cap) = capacity {
            positions.truncate(cap);
        }
        Ok(Self {
            info_len,
            block_len,
            rate,
            positions,
        })
    }

    pub fn filler(&self) -> usize {
        self.block_len - self.info_len
    }

    /// Channel bits per block.
    pub fn channel_len(&self) -> usize {
        self.positions.len()
    }

    pub fn encode(&self, code: &TurboCode, info: &[u8]) -> Result<Vec<u8>> {
        if info.len() != self.info_len {
            return Err(Error::Framing(format!(
                "layout expects {} info bits, got {}",
                self.info_len,
                info.len()
            )));
        }
        let mut block = vec![0u8; self.filler()];
        block.extend_from_slice(info);
        let mother = code.encode(&block)?;
        Ok(self.positions.iter().map(|&p| mother[p]).collect())
    }

    pub fn decode<T: Real>(&self, code: &TurboCode, llrs: &[T]) -> Result<Vec<u8>> {
        if llrs.len() != self.positions.len() {
            return Err(Error::Framing(format!(
                "layout carries {} channel bits, got {} LLRs",
                self.positions.len(),
                llrs.len()
            )));
        }
        let mut mother = vec![T::zero(); TurboCode::coded_len(self.block_len)];
        for (&p, &l) in self.positions.iter().zip(llrs) {
            mother[p] = l;
        }
        let known = T::of(LLR_CLAMP);
        for i in 0..self.filler() {
            mother[i] = known;
            mother[self.block_len + i] = known;
        }
        let mut bits = code.decode(&mother)?;
        bits.drain(..self.filler());
        Ok(bits)
    }
}
