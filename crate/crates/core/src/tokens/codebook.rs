//! Vector-quantization codebook and its k-means trainer.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{argument, config, Error, Result};
use crate::num::Real;

const MAGIC: &[u8; 4] = b"RTCB";

/// Lloyd iteration cap.
pub const KMEANS_MAX_ITERS: usize = 100;
/// Stop once no centroid moves further than this (Euclidean).
pub const KMEANS_TOL: f64 = 1e-6;
/// Two codewords closer than this are considered duplicates.
pub const DUPLICATE_TOL: f64 = 1e-9;

/// `K` codewords of dimension `d`, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Codebook<T> {
    dim: usize,
    words: Vec<T>,
}

impl<T: Real> Codebook<T> {
    /// Builds a codebook from a flat row-major buffer. `K` must be a power of two.
    pub fn from_flat(k: usize, dim: usize, words: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return config("codebook dimension must be positive");
        }
        if k < 2 || !k.is_power_of_two() {
            return config(format!("codebook size {k} is not a power of two >= 2"));
        }
        if words.len() != k * dim {
            return config(format!("expected {} codebook values, got {}", k * dim, words.len()));
        }
        Ok(Self { dim, words })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != dim) {
            return config("codebook rows have inconsistent dimension");
        }
        Self::from_flat(rows.len(), dim, rows.iter().flatten().copied().collect())
    }

    pub fn len(&self) -> usize {
        self.words.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Bits needed per token index, `log2(K)`.
    pub fn token_bits(&self) -> u32 {
        self.len().trailing_zeros()
    }

    pub fn codeword(&self, index: usize) -> &[T] {
        &self.words[index * self.dim..(index + 1) * self.dim]
    }

    pub fn as_flat(&self) -> &[T] {
        &self.words
    }

    /// Nearest codeword by squared Euclidean distance. Ties go to the lowest index.
    pub fn quantize(&self, v: &[T]) -> Result<u32> {
        if v.len() != self.dim {
            return argument(format!(
                "vector has dimension {}, codebook expects {}",
                v.len(),
                self.dim
            ));
        }
        Ok(nearest(&self.words, self.dim, v).0 as u32)
    }

    pub fn dequantize(&self, token: u32) -> Result<&[T]> {
        let t = token as usize;
        if t >= self.len() {
            return argument(format!("token {token} outside codebook of size {}", self.len()));
        }
        Ok(self.codeword(t))
    }

    /// True when some pair of codewords lies within `DUPLICATE_TOL`.
    pub fn has_duplicates(&self) -> bool {
        let k = self.len();
        let tol = T::of(DUPLICATE_TOL * DUPLICATE_TOL);
        (0..k).into_par_iter().any(|i| {
            let a = self.codeword(i);
            (i + 1..k).any(|j| sq_dist(a, self.codeword(j)) <= tol)
        })
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.len() as u32).to_le_bytes())?;
        w.write_all(&(self.dim as u32).to_le_bytes())?;
        for &x in &self.words {
            w.write_all(&x.to_f32().unwrap_or(f32::NAN).to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut buf = Vec::new();
        r.read_to_end(&mut buf).map_err(|e| Error::io("<codebook stream>", e))?;
        Self::from_bytes(&buf)
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        if buf.len() < 12 || &buf[..4] != MAGIC {
            return Err(Error::Parse {
                offset: 0,
                message: "missing RTCB header".into(),
            });
        }
        let k = u32::from_le_bytes(buf[4..8].try_into().unwrap()) as usize;
        let dim = u32::from_le_bytes(buf[8..12].try_into().unwrap()) as usize;
        let body = &buf[12..];
        if body.len() != k * dim * 4 {
            return Err(Error::Parse {
                offset: 12,
                message: format!("expected {} payload bytes, found {}", k * dim * 4, body.len()),
            });
        }
        let words = body
            .chunks_exact(4)
            .map(|c| T::of(f32::from_le_bytes(c.try_into().unwrap()) as f64))
            .collect();
        Self::from_flat(k, dim, words)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_to(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut buf = Vec::new();
        BufReader::new(file)
            .read_to_end(&mut buf)
            .map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&buf)
    }
}

#[inline]
pub(crate) fn sq_dist<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
}

/// Index and squared distance of the closest row in `words`.
fn nearest<T: Real>(words: &[T], dim: usize, v: &[T]) -> (usize, T) {
    let mut best = (0, T::infinity());
    for (i, w) in words.chunks_exact(dim).enumerate() {
        let d = sq_dist(w, v);
        if d < best.1 {
            best = (i, d);
        }
    }
    best
}

/// Outcome of a k-means run.
#[derive(Clone, Debug)]
pub struct KMeansTrace<T> {
    /// Sum of squared distances after each assignment step.
    pub objective: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
}

/// Trains a `k`-word codebook over `samples` with k-means++ seeding and Lloyd iterations.
pub fn train_codebook<T: Real>(samples: &[Vec<T>], k: usize, seed: u64) -> Result<Codebook<T>> {
    train_codebook_traced(samples, k, seed).map(|(cb, _)| cb)
}

pub fn train_codebook_traced<T: Real>(
    samples: &[Vec<T>],
    k: usize,
    seed: u64,
) -> Result<(Codebook<T>, KMeansTrace<T>)> {
    if samples.is_empty() {
        return config("empty sample set");
    }
    if samples.len() < k {
        return config(format!("{} samples cannot train {k} codewords", samples.len()));
    }
    let dim = samples[0].len();
    if dim == 0 || samples.iter().any(|s| s.len() != dim) {
        return config("samples must share a positive dimension");
    }
    if k < 2 || !k.is_power_of_two() {
        return config(format!("codebook size {k} is not a power of two >= 2"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = kmeans_pp_init(samples, k, dim, &mut rng)?;
    let mut trace = KMeansTrace::<T> {
        objective: Vec::new(),
        iterations: 0,
        converged: false,
    };

    let tol = T::of(KMEANS_TOL);
    for _ in 0..KMEANS_MAX_ITERS {
        let assign: Vec<(usize, T)> = samples.par_iter().map(|s| nearest(&centroids, dim, s)).collect();
        let objective: T = assign.iter().map(|a| a.1).sum();
        if let Some(&prev) = trace.objective.last() {
            // Lloyd steps never increase the objective; allow float rounding only.
            debug_assert!(
                objective <= prev + prev.abs() * T::of(1e-9),
                "k-means objective increased: {prev} -> {objective}"
            );
        }
        trace.objective.push(objective);

        let mut sums = vec![T::zero(); k * dim];
        let mut counts = vec![0usize; k];
        for (s, &(c, _)) in samples.iter().zip(&assign) {
            counts[c] += 1;
            for (acc, &x) in sums[c * dim..(c + 1) * dim].iter_mut().zip(s) {
                *acc = *acc + x;
            }
        }
        let mut max_shift = T::zero();
        for c in 0..k {
            // An empty cluster keeps its centroid.
            if counts[c] == 0 {
                continue;
            }
            let n = T::of_usize(counts[c]);
            let row = &mut centroids[c * dim..(c + 1) * dim];
            let mut shift = T::zero();
            for (w, &s) in row.iter_mut().zip(&sums[c * dim..(c + 1) * dim]) {
                let next = s / n;
                shift = shift + (next - *w) * (next - *w);
                *w = next;
            }
            max_shift = max_shift.max(shift.sqrt());
        }
        trace.iterations += 1;
        if max_shift <= tol {
            trace.converged = true;
            break;
        }
    }

    let cb = Codebook::from_flat(k, dim, centroids)?;
    if cb.has_duplicates() {
        return config("k-means produced duplicate codewords");
    }
    Ok((cb, trace))
}

fn kmeans_pp_init<T: Real>(samples: &[Vec<T>], k: usize, dim: usize, rng: &mut ChaCha8Rng) -> Result<Vec<T>> {
    let mut centroids = Vec::with_capacity(k * dim);
    let first = rng.random_range(0..samples.len());
    centroids.extend_from_slice(&samples[first]);
    let mut d2: Vec<f64> = samples
        .par_iter()
        .map(|s| sq_dist(s, &samples[first]).as_f64())
        .collect();
    for _ in 1..k {
        let total: f64 = d2.iter().sum();
        if total <= 0.0 {
            return config("samples contain fewer distinct vectors than codewords");
        }
        let mut target = rng.random::<f64>() * total;
        let mut pick = d2.len() - 1;
        for (i, &w) in d2.iter().enumerate() {
            if w > 0.0 && target < w {
                pick = i;
                break;
            }
            target -= w;
        }
        while d2[pick] <= 0.0 {
            pick -= 1;
        }
        let chosen = &samples[pick];
        centroids.extend_from_slice(chosen);
        d2.par_iter_mut().zip(samples.par_iter()).for_each(|(d, s)| {
            *d = d.min(sq_dist(s, chosen).as_f64());
        });
    }
    Ok(centroids)
}
