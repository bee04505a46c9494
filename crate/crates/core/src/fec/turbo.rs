//! Parallel-concatenated turbo code (two RSC constituents joined by a QPP
//! interleaver) with an iterative max-log-MAP decoder.

use crate::error::{Error, Result};
use crate::num::Real;

use super::puncture::TAIL_BITS;
use super::qpp::QppTable;
use super::trellis::Trellis;

/// LLR magnitude limit applied to decoder inputs.
pub const LLR_CLAMP: f64 = 30.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TurboConfig {
    /// Feedback polynomial, octal notation.
    pub feedback: u32,
    /// Feedforward polynomial, octal notation.
    pub feedforward: u32,
    pub iterations: usize,
    /// Factor applied to extrinsic LLRs exchanged between constituents.
    pub extrinsic_scale: f64,
}

impl Default for TurboConfig {
    fn default() -> Self {
        Self {
            feedback: 0o13,
            feedforward: 0o15,
            iterations: 6,
            extrinsic_scale: 0.75,
        }
    }
}

/// Which constituent decoder runs first in every iteration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DecodeOrder {
    #[default]
    FirstThenSecond,
    SecondThenFirst,
}

#[derive(Clone, Debug)]
pub struct TurboCode {
    cfg: TurboConfig,
    trellis: Trellis,
    table: &'static QppTable,
}

impl TurboCode {
    pub fn new(cfg: TurboConfig) -> Result<Self> {
        let trellis = Trellis::new(cfg.feedback, cfg.feedforward)?;
        if trellis.memory() * 4 != TAIL_BITS {
            return Err(Error::Config(format!(
                "constituent memory {} does not match the {TAIL_BITS}-bit termination layout",
                trellis.memory()
            )));
        }
        if cfg.iterations == 0 {
            return Err(Error::Config("turbo decoder needs at least one iteration".into()));
        }
        if !(cfg.extrinsic_scale > 0.0 && cfg.extrinsic_scale <= 1.0) {
            return Err(Error::Config("extrinsic scale must lie in (0, 1]".into()));
        }
        Ok(Self {
            cfg,
            trellis,
            table: QppTable::standard(),
        })
    }

    pub fn config(&self) -> &TurboConfig {
        &self.cfg
    }

    pub fn trellis(&self) -> &Trellis {
        &self.trellis
    }

    pub fn table(&self) -> &'static QppTable {
        self.table
    }

    pub fn coded_len(info_len: usize) -> usize {
        3 * info_len + TAIL_BITS
    }

    /// `[info | parity1 | parity2 | x1 z1 x1 z1 x1 z1 x2 z2 x2 z2 x2 z2]`.
    pub fn encode(&self, info: &[u8]) -> Result<Vec<u8>> {
        let n = info.len();
        let perm = self.table.interleaver(n)?;
        let interleaved: Vec<u8> = perm.iter().map(|&p| info[p]).collect();
        let (p1, x1, z1) = self.trellis.encode(info);
        let (p2, x2, z2) = self.trellis.encode(&interleaved);
        let mut out = Vec::with_capacity(Self::coded_len(n));
        out.extend_from_slice(info);
        out.extend(p1);
        out.extend(p2);
        for (x, z) in [(&x1, &z1), (&x2, &z2)] {
            for (a, b) in x.iter().zip(z) {
                out.push(*a);
                out.push(*b);
            }
        }
        Ok(out)
    }

    pub fn decode<T: Real>(&self, llrs: &[T]) -> Result<Vec<u8>> {
        self.decode_ordered(llrs, DecodeOrder::default())
    }

    /// Iterative decoding; hard decision on the last constituent's APP.
    pub fn decode_ordered<T: Real>(&self, llrs: &[T], order: DecodeOrder) -> Result<Vec<u8>> {
        if llrs.len() < TAIL_BITS || (llrs.len() - TAIL_BITS) % 3 != 0 {
            return Err(Error::Framing(format!(
                "{} LLRs is not a turbo codeword length",
                llrs.len()
            )));
        }
        let n = (llrs.len() - TAIL_BITS) / 3;
        let perm = self.table.interleaver(n)?;
        let lim = T::of(LLR_CLAMP);
        let l: Vec<T> = llrs.iter().map(|&v| v.max(-lim).min(lim)).collect();
        let (sys, rest) = l.split_at(n);
        let (p1, rest) = rest.split_at(n);
        let (p2, tail) = rest.split_at(n);
        let mem = self.trellis.memory();

        let identity: Vec<usize> = (0..n).collect();
        let build = |perm: &[usize], par: &[T], tail: &[T]| {
            let mut s: Vec<T> = perm.iter().map(|&p| sys[p]).collect();
            s.extend(tail.iter().step_by(2));
            let mut p = par.to_vec();
            p.extend(tail.iter().skip(1).step_by(2));
            (s, p)
        };
        let c1 = build(&identity, p1, &tail[..2 * mem]);
        let c2 = build(&perm, p2, &tail[2 * mem..]);
        let mut stages = [(&identity, &c1), (&perm, &c2)];
        if order == DecodeOrder::SecondThenFirst {
            stages.swap(0, 1);
        }

        let scale = T::of(self.cfg.extrinsic_scale);
        let mut extrinsic = vec![T::zero(); n];
        let mut apriori = vec![T::zero(); n];
        let mut app = vec![T::zero(); n];
        let mut decision = vec![0u8; n];
        for _ in 0..self.cfg.iterations {
            for (map, (s, p)) in stages {
                for (a, &m) in apriori.iter_mut().zip(map.iter()) {
                    *a = extrinsic[m];
                }
                self.trellis.max_log_map(s, p, &apriori, &mut app);
                for i in 0..n {
                    extrinsic[map[i]] = scale * (app[i] - apriori[i] - s[i]);
                    decision[map[i]] = (app[i] < T::zero()) as u8;
                }
            }
        }
        Ok(decision)
    }
}
