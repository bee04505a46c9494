use crate::error::{argument, Error, Result};
use crate::num::Real;

use super::Codebook;

/// Importance-ordered token indices with a key/detail split and a reception mask.
///
/// Positions `0..key_count` are key tokens; the rest are detail tokens.
/// A `false` mask entry marks a zero-padded position whose latent is the
/// all-zeros vector (not codeword 0).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenSequence {
    indices: Vec<u32>,
    key_count: usize,
    received: Vec<bool>,
}

impl TokenSequence {
    /// A fully received sequence.
    pub fn new(indices: Vec<u32>, key_count: usize) -> Result<Self> {
        if key_count == 0 || key_count > indices.len() {
            return argument(format!("key count {key_count} outside 1..={}", indices.len()));
        }
        let received = vec![true; indices.len()];
        Ok(Self {
            indices,
            key_count,
            received,
        })
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn key_count(&self) -> usize {
        self.key_count
    }

    pub fn total(&self) -> usize {
        self.indices.len()
    }

    pub fn received_mask(&self) -> &[bool] {
        &self.received
    }

    pub fn received_count(&self) -> usize {
        self.received.iter().filter(|&&r| r).count()
    }

    /// Latent vectors for decoding: codewords where received, zeros elsewhere.
    pub fn latents<T: Real>(&self, cb: &Codebook<T>) -> Result<LatentVectorSet<T>> {
        let dim = cb.dim();
        let mut data = vec![T::zero(); self.total() * dim];
        for (i, (&t, &ok)) in self.indices.iter().zip(&self.received).enumerate() {
            if ok {
                data[i * dim..(i + 1) * dim].copy_from_slice(cb.dequantize(t)?);
            }
        }
        Ok(LatentVectorSet {
            count: self.total(),
            dim,
            data,
        })
    }
}

/// Rebuilds a full-length sequence from a received prefix.
///
/// Positions past the prefix carry index 0 with the mask cleared.
pub fn zero_pad(received: &[u32], key_count: usize, total: usize) -> Result<TokenSequence> {
    if received.len() < key_count {
        return Err(Error::Protocol(format!(
            "received {} tokens but {key_count} key tokens are required",
            received.len()
        )));
    }
    if received.len() > total {
        return argument(format!("received {} tokens, sequence holds {total}", received.len()));
    }
    if key_count == 0 {
        return argument("key count must be at least 1");
    }
    let mut indices = received.to_vec();
    indices.resize(total, 0);
    let mut mask = vec![true; received.len()];
    mask.resize(total, false);
    Ok(TokenSequence {
        indices,
        key_count,
        received: mask,
    })
}

/// `count` latent vectors of dimension `dim`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct LatentVectorSet<T> {
    count: usize,
    dim: usize,
    data: Vec<T>,
}

impl<T: Real> LatentVectorSet<T> {
    pub fn new(count: usize, dim: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != count * dim {
            return argument(format!(
                "latent buffer has {} values, expected {count}x{dim}",
                data.len()
            ));
        }
        Ok(Self { count, dim, data })
    }

    pub fn zeros(count: usize, dim: usize) -> Self {
        Self {
            count,
            dim,
            data: vec![T::zero(); count * dim],
        }
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vector(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_flat(&self) -> &[T] {
        &self.data
    }

    pub fn into_flat(self) -> Vec<T> {
        self.data
    }

    /// Keeps vectors `0..t` and replaces the rest by zero vectors.
    pub fn zero_out(&self, t: usize) -> Result<Self> {
        if t > self.count {
            return argument(format!("truncation point {t} exceeds {} latents", self.count));
        }
        let mut data = self.data.clone();
        data[t * self.dim..].iter_mut().for_each(|x| *x = T::zero());
        Ok(Self {
            count: self.count,
            dim: self.dim,
            data,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_reception_is_unchanged() {
        let tokens: Vec<u32> = (0..256).collect();
        let seq = zero_pad(&tokens, 32, 256).unwrap();
        assert!(seq.received_mask().iter().all(|&m| m));
        assert_eq!(seq.indices(), &tokens[..]);
    }

    #[test]
    fn partial_reception_masks_suffix() {
        let tokens: Vec<u32> = (1..=128).collect();
        let seq = zero_pad(&tokens, 32, 256).unwrap();
        assert_eq!(seq.total(), 256);
        assert!(seq.received_mask()[..128].iter().all(|&m| m));
        assert!(seq.received_mask()[128..].iter().all(|&m| !m));
        assert!(seq.indices()[128..].iter().all(|&t| t == 0));
        assert_eq!(seq.received_count(), 128);
    }

    #[test]
    fn missing_key_tokens_is_protocol_error() {
        let tokens = vec![0u32; 31];
        assert!(matches!(zero_pad(&tokens, 32, 256), Err(Error::Protocol(_))));
        assert!(matches!(zero_pad(&[0; 300], 32, 256), Err(Error::Argument(_))));
    }

    #[test]
    fn masked_positions_decode_to_zero_latents() {
        let cb = Codebook::from_rows(&[vec![3.0f64, 4.0], vec![-1.0, 1.0]]).unwrap();
        let seq = zero_pad(&[1, 0], 1, 4).unwrap();
        let lat = seq.latents(&cb).unwrap();
        assert_eq!(lat.vector(0), &[-1.0, 1.0]);
        assert_eq!(lat.vector(1), &[3.0, 4.0]);
        assert_eq!(lat.vector(2), &[0.0, 0.0]);
        assert_eq!(lat.vector(3), &[0.0, 0.0]);
    }

    #[test]
    fn zero_out_ranges() {
        let lat = LatentVectorSet::new(3, 2, vec![1.0f64, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(lat.zero_out(3).unwrap(), lat);
        assert_eq!(lat.zero_out(0).unwrap().as_flat(), &[0.0; 6]);
        assert_eq!(lat.zero_out(1).unwrap().as_flat(), &[1.0, 2.0, 0.0, 0.0, 0.0, 0.0]);
        assert!(lat.zero_out(4).is_err());
    }
}
