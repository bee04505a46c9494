//! Recursive systematic convolutional code trellis and its max-log-MAP
//! soft-in/soft-out decoder.
//!
//! LLRs follow `L = ln P(bit = 0) / P(bit = 1)`, so a positive value favours 0.

use crate::error::{config, Result};
use crate::num::Real;

/// Trellis of a rate-1/2 RSC code given in octal generator notation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trellis {
    memory: usize,
    next: Vec<[usize; 2]>,
    parity: Vec<[u8; 2]>,
    tail_input: Vec<u8>,
}

impl Trellis {
    /// `feedback` and `feedforward` as integers whose binary digits are the
    /// polynomial coefficients, `D^0` first (MSB). LTE uses `0o13` / `0o15`.
    pub fn new(feedback: u32, feedforward: u32) -> Result<Self> {
        if feedback < 3 || feedback & 1 == 0 || feedback.is_power_of_two() {
            return config(format!("invalid feedback polynomial {feedback:o}"));
        }
        let memory = (31 - feedback.leading_zeros()) as usize;
        if memory > 8 {
            return config("constraint length above 9 is not supported");
        }
        if feedforward == 0 || feedforward >> (memory + 1) != 0 || feedforward == feedback {
            return config(format!("invalid feedforward polynomial {feedforward:o}"));
        }
        let tap = |poly: u32, i: usize| ((poly >> (memory - i)) & 1) as u8;
        let states = 1usize << memory;
        let mut next = vec![[0; 2]; states];
        let mut parity = vec![[0; 2]; states];
        let mut tail_input = vec![0; states];
        for s in 0..states {
            let reg = |i: usize| ((s >> (memory - i)) & 1) as u8;
            let fb = (1..=memory).fold(0, |acc, i| acc ^ (tap(feedback, i) & reg(i)));
            let ff = (1..=memory).fold(0, |acc, i| acc ^ (tap(feedforward, i) & reg(i)));
            tail_input[s] = fb;
            for u in 0..2u8 {
                let a = u ^ fb;
                next[s][u as usize] = ((a as usize) << (memory - 1)) | (s >> 1);
                parity[s][u as usize] = (tap(feedforward, 0) & a) ^ ff;
            }
        }
        Ok(Self {
            memory,
            next,
            parity,
            tail_input,
        })
    }

    pub fn lte() -> Self {
        Self::new(0o13, 0o15).expect("LTE constituent polynomials are valid")
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn states(&self) -> usize {
        self.next.len()
    }

    pub fn next_state(&self, state: usize, input: u8) -> usize {
        self.next[state][input as usize]
    }

    pub fn parity_bit(&self, state: usize, input: u8) -> u8 {
        self.parity[state][input as usize]
    }

    /// Input that drives the register toward the all-zero state.
    pub fn tail_input(&self, state: usize) -> u8 {
        self.tail_input[state]
    }

    /// Encodes from the zero state and terminates it.
    ///
    /// Returns `(parity, tail_systematic, tail_parity)`; the tail vectors have
    /// `memory` entries each.
    pub fn encode(&self, bits: &[u8]) -> (Vec<u8>, Vec<u8>, Vec<u8>) {
        let mut state = 0;
        let mut parity = Vec::with_capacity(bits.len());
        for &u in bits {
            parity.push(self.parity[state][u as usize]);
            state = self.next[state][u as usize];
        }
        let mut tail_sys = Vec::with_capacity(self.memory);
        let mut tail_par = Vec::with_capacity(self.memory);
        for _ in 0..self.memory {
            let u = self.tail_input[state];
            tail_sys.push(u);
            tail_par.push(self.parity[state][u as usize]);
            state = self.next[state][u as usize];
        }
        debug_assert_eq!(state, 0);
        (parity, tail_sys, tail_par)
    }

    /// Max-log-MAP over a terminated block.
    ///
    /// `sys` and `par` cover `n + memory` steps (tail included); `apriori` covers
    /// the `n` information steps. Writes the a-posteriori LLR of each
    /// information bit into `app`.
    pub fn max_log_map<T: Real>(&self, sys: &[T], par: &[T], apriori: &[T], app: &mut [T]) {
        let n = apriori.len();
        let steps = n + self.memory;
        assert_eq!(sys.len(), steps);
        assert_eq!(par.len(), steps);
        assert_eq!(app.len(), n);
        let ns = self.states();
        let neg = T::of(-1e30);
        let half = T::of(0.5);

        // branch metric for input u and its parity p at step k
        let gamma = |k: usize, u: u8, p: u8| {
            let lu = if k < n { sys[k] + apriori[k] } else { sys[k] };
            let su = if u == 0 { lu } else { -lu };
            let sp = if p == 0 { par[k] } else { -par[k] };
            half * (su + sp)
        };

        let mut alpha = vec![neg; (steps + 1) * ns];
        alpha[0] = T::zero();
        for k in 0..steps {
            let (cur, nxt) = alpha.split_at_mut((k + 1) * ns);
            let cur = &cur[k * ns..];
            let nxt = &mut nxt[..ns];
            for s in 0..ns {
                if cur[s] <= neg {
                    continue;
                }
                for u in 0..2u8 {
                    let t = self.next[s][u as usize];
                    let m = cur[s] + gamma(k, u, self.parity[s][u as usize]);
                    if m > nxt[t] {
                        nxt[t] = m;
                    }
                }
            }
            let top = nxt.iter().copied().fold(neg, T::max);
            nxt.iter_mut().filter(|v| **v > neg).for_each(|v| *v = *v - top);
        }

        let mut beta = vec![neg; ns];
        beta[0] = T::zero();
        let mut prev = vec![neg; ns];
        for k in (0..steps).rev() {
            let a = &alpha[k * ns..(k + 1) * ns];
            let (mut best0, mut best1) = (neg, neg);
            prev.iter_mut().for_each(|v| *v = neg);
            for s in 0..ns {
                for u in 0..2u8 {
                    let t = self.next[s][u as usize];
                    if beta[t] <= neg {
                        continue;
                    }
                    let g = gamma(k, u, self.parity[s][u as usize]);
                    let b = g + beta[t];
                    if b > prev[s] {
                        prev[s] = b;
                    }
                    if k < n && a[s] > neg {
                        let m = a[s] + b;
                        if u == 0 {
                            best0 = best0.max(m);
                        } else {
                            best1 = best1.max(m);
                        }
                    }
                }
            }
            if k < n {
                app[k] = best0 - best1;
            }
            let top = prev.iter().copied().fold(neg, T::max);
            for (b, &p) in beta.iter_mut().zip(&prev) {
                *b = if p > neg { p - top } else { neg };
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lte_structure() {
        let t = Trellis::lte();
        assert_eq!(t.memory(), 3);
        assert_eq!(t.states(), 8);
        // impulse response of 1+D+D^3 over 1/(1+D^2+D^3)
        let (par, ts, tp) = t.encode(&[1, 0, 0, 0, 0, 0, 0]);
        assert_eq!(par, vec![1, 1, 1, 1, 0, 0, 1]);
        assert_eq!(ts.len(), 3);
        assert_eq!(tp.len(), 3);
    }

    #[test]
    fn zero_input_is_fixed_point() {
        let t = Trellis::lte();
        let (par, ts, tp) = t.encode(&[0; 20]);
        assert!(par.iter().chain(&ts).chain(&tp).all(|&b| b == 0));
    }

    #[test]
    fn rejects_bad_polynomials() {
        assert!(Trellis::new(0o10, 0o15).is_err());
        assert!(Trellis::new(0o13, 0o13).is_err());
        assert!(Trellis::new(0o13, 0o77).is_err());
    }

    #[test]
    fn noiseless_map_recovers_input() {
        let t = Trellis::lte();
        let bits: Vec<u8> = (0..50).map(|i| ((i * 7 + 3) % 5 % 2) as u8).collect();
        let (par, ts, tp) = t.encode(&bits);
        let llr = |b: &u8| if *b == 0 { 10.0 } else { -10.0 };
        let sys: Vec<f64> = bits.iter().chain(&ts).map(llr).collect();
        let p: Vec<f64> = par.iter().chain(&tp).map(llr).collect();
        let mut app = vec![0.0; bits.len()];
        t.max_log_map(&sys, &p, &vec![0.0; bits.len()], &mut app);
        let dec: Vec<u8> = app.iter().map(|&l| (l < 0.0) as u8).collect();
        assert_eq!(dec, bits);
    }
}
