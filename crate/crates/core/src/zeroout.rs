//! Progressive zero-out training on a tiny autoencoder.
//!
//! Each step draws a truncation point `t` uniformly from
//! `key_count..=N`, zeroes latent tokens `t..N`, decodes and takes the pixel
//! MSE against the input. Training this way pushes the most useful
//! information into the earliest tokens.
//!
//! Model: `x (p) -> tanh(W1 x + b1) (p) -> W2 . + b2 (N*d)` for the encoder
//! and the mirror image `z -> tanh(W3 z + b3) (p) -> W4 . + b4 (p)` for the
//! decoder. The hidden width equals `p`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{argument, config, Error, Result};
use crate::num::Real;
use crate::tokens::LatentVectorSet;

const MODEL_MAGIC: &[u8; 4] = b"RTAE";
const DATA_MAGIC: &[u8; 4] = b"RTPD";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Layout {
    p: usize,
    latent: usize,
}

impl Layout {
    // offsets of W1, b1, W2, b2, W3, b3, W4, b4
    fn offsets(&self) -> [usize; 9] {
        let (p, l) = (self.p, self.latent);
        let sizes = [p * p, p, l * p, l, p * l, p, p * p, p];
        let mut o = [0; 9];
        for i in 0..8 {
            o[i + 1] = o[i] + sizes[i];
        }
        o
    }

    fn len(&self) -> usize {
        self.offsets()[8]
    }
}

/// Per-sample activations kept for the backward pass.
struct Trace<T> {
    h1: Vec<T>,
    zm: Vec<T>,
    h3: Vec<T>,
    y: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TinyAutoencoder<T> {
    p: usize,
    tokens: usize,
    token_dim: usize,
    params: Vec<T>,
}

impl<T: Real> TinyAutoencoder<T> {
    /// Xavier-uniform weights except the decoder's latent-input layer, which
    /// starts at zero so a latent contributes nothing until trained. Biases are zero.
    pub fn new(p: usize, tokens: usize, token_dim: usize, seed: u64) -> Result<Self> {
        if p == 0 || tokens == 0 || token_dim == 0 {
            return config("autoencoder dimensions must be positive");
        }
        let layout = Layout {
            p,
            latent: tokens * token_dim,
        };
        let mut params = vec![T::zero(); layout.len()];
        let o = layout.offsets();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shapes = [(0, p, p), (2, layout.latent, p), (6, p, p)];
        for (slot, rows, cols) in shapes {
            let limit = (6.0 / (rows + cols) as f64).sqrt();
            for w in &mut params[o[slot]..o[slot + 1]] {
                *w = T::of(rng.random_range(-limit..limit));
            }
        }
        Ok(Self {
            p,
            tokens,
            token_dim,
            params,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.p
    }

    pub fn tokens(&self) -> usize {
        self.tokens
    }

    pub fn token_dim(&self) -> usize {
        self.token_dim
    }

    fn layout(&self) -> Layout {
        Layout {
            p: self.p,
            latent: self.tokens * self.token_dim,
        }
    }

    /// Flat parameter vector: W1, b1, W2, b2, W3, b3, W4, b4 (row-major weights).
    pub fn params(&self) -> &[T] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [T] {
        &mut self.params
    }

    fn affine(&self, w: usize, b: usize, rows: usize, x: &[T], out: &mut Vec<T>) {
        let o = self.layout().offsets();
        let cols = (o[w + 1] - o[w]) / rows;
        let wm = &self.params[o[w]..o[w + 1]];
        let bias = &self.params[o[b]..o[b + 1]];
        out.clear();
        for r in 0..rows {
            let row = &wm[r * cols..r * cols + x.len()];
            let mut acc = bias[r];
            for (&a, &v) in row.iter().zip(x) {
                acc = acc + a * v;
            }
            out.push(acc);
        }
    }

    /// Latent vector `N*d` for one patch.
    pub fn encode(&self, x: &[T]) -> Vec<T> {
        let mut h = Vec::new();
        self.affine(0, 1, self.p, x, &mut h);
        h.iter_mut().for_each(|v| *v = v.tanh());
        let mut z = Vec::new();
        self.affine(2, 3, self.tokens * self.token_dim, &h, &mut z);
        z
    }

    pub fn encode_latents(&self, x: &[T]) -> LatentVectorSet<T> {
        LatentVectorSet::new(self.tokens, self.token_dim, self.encode(x)).expect("encoder output shape")
    }

    /// Decodes a latent vector. A shorter `z` is treated as a prefix: only
    /// its entries enter the sums, which is exactly what a zero suffix does.
    pub fn decode(&self, z: &[T]) -> Vec<T> {
        let mut h = Vec::new();
        self.affine(4, 5, self.p, z, &mut h);
        h.iter_mut().for_each(|v| *v = v.tanh());
        let mut y = Vec::new();
        self.affine(6, 7, self.p, &h, &mut y);
        y
    }

    /// Reconstruction with latent tokens `t..N` zeroed.
    pub fn reconstruct(&self, x: &[T], t: usize) -> Result<Vec<T>> {
        let lat = self.encode_latents(x).zero_out(t)?;
        Ok(self.decode(lat.as_flat()))
    }

    fn forward(&self, x: &[T], t: usize) -> Trace<T> {
        let mut h1 = Vec::new();
        self.affine(0, 1, self.p, x, &mut h1);
        h1.iter_mut().for_each(|v| *v = v.tanh());
        let mut zm = Vec::new();
        self.affine(2, 3, self.tokens * self.token_dim, &h1, &mut zm);
        zm[t * self.token_dim..].iter_mut().for_each(|v| *v = T::zero());
        let mut h3 = Vec::new();
        self.affine(4, 5, self.p, &zm, &mut h3);
        h3.iter_mut().for_each(|v| *v = v.tanh());
        let mut y = Vec::new();
        self.affine(6, 7, self.p, &h3, &mut y);
        Trace { h1, zm, h3, y }
    }

    fn check_batch(&self, batch: &[&[T]], t: usize) -> Result<()> {
        if batch.is_empty() {
            return argument("empty batch");
        }
        if let Some(x) = batch.iter().find(|x| x.len() != self.p) {
            return argument(format!("patch of size {} for a model with p = {}", x.len(), self.p));
        }
        if t > self.tokens {
            return argument(format!("truncation point {t} exceeds {} tokens", self.tokens));
        }
        Ok(())
    }

    /// Mean squared error over the batch with tokens `t..N` zeroed.
    pub fn loss(&self, batch: &[&[T]], t: usize) -> Result<T> {
        self.check_batch(batch, t)?;
        let sum: T = batch
            .iter()
            .map(|x| {
                let y = self.forward(x, t).y;
                y.iter().zip(x.iter()).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>()
            })
            .sum();
        Ok(sum / T::of_usize(batch.len() * self.p))
    }

    /// Loss and its gradient with respect to [`params`](Self::params).
    pub fn loss_and_gradient(&self, batch: &[&[T]], t: usize) -> Result<(T, Vec<T>)> {
        self.loss_and_gradient_per_sample(batch, &vec![t; batch.len()])
    }

    /// Same as [`loss_and_gradient`](Self::loss_and_gradient) with one truncation point per sample.
    pub fn loss_and_gradient_per_sample(&self, batch: &[&[T]], ts: &[usize]) -> Result<(T, Vec<T>)> {
        if ts.len() != batch.len() {
            return argument(format!("{} truncation points for {} samples", ts.len(), batch.len()));
        }
        for &t in ts {
            self.check_batch(batch, t)?;
        }
        let layout = self.layout();
        let o = layout.offsets();
        let (p, l) = (self.p, layout.latent);
        let scale = T::of(2.0) / T::of_usize(batch.len() * p);
        let mut grad = vec![T::zero(); layout.len()];
        let mut total = T::zero();
        let w = &self.params;

        for (x, &t) in batch.iter().zip(ts) {
            let live = t * self.token_dim;
            let tr = self.forward(x, t);
            // d loss / d y
            let dy: Vec<T> =
                tr.y.iter()
                    .zip(x.iter())
                    .map(|(&a, &b)| {
                        total = total + (a - b) * (a - b);
                        scale * (a - b)
                    })
                    .collect();
            // W4, b4
            for i in 0..p {
                for j in 0..p {
                    grad[o[6] + i * p + j] = grad[o[6] + i * p + j] + dy[i] * tr.h3[j];
                }
                grad[o[7] + i] = grad[o[7] + i] + dy[i];
            }
            let da3: Vec<T> = (0..p)
                .map(|j| {
                    let s: T = (0..p).map(|i| w[o[6] + i * p + j] * dy[i]).sum();
                    s * (T::one() - tr.h3[j] * tr.h3[j])
                })
                .collect();
            // W3, b3
            for j in 0..p {
                for k in 0..l {
                    grad[o[4] + j * l + k] = grad[o[4] + j * l + k] + da3[j] * tr.zm[k];
                }
                grad[o[5] + j] = grad[o[5] + j] + da3[j];
            }
            // zeroed positions pass no gradient back into the encoder
            let dz: Vec<T> = (0..l)
                .map(|k| {
                    if k < live {
                        (0..p).map(|j| w[o[4] + j * l + k] * da3[j]).sum()
                    } else {
                        T::zero()
                    }
                })
                .collect();
            for k in 0..live {
                for j in 0..p {
                    grad[o[2] + k * p + j] = grad[o[2] + k * p + j] + dz[k] * tr.h1[j];
                }
                grad[o[3] + k] = grad[o[3] + k] + dz[k];
            }
            let da1: Vec<T> = (0..p)
                .map(|j| {
                    let s: T = (0..live).map(|k| w[o[2] + k * p + j] * dz[k]).sum();
                    s * (T::one() - tr.h1[j] * tr.h1[j])
                })
                .collect();
            for j in 0..p {
                for i in 0..p {
                    grad[o[0] + j * p + i] = grad[o[0] + j * p + i] + da1[j] * x[i];
                }
                grad[o[1] + j] = grad[o[1] + j] + da1[j];
            }
        }
        Ok((total / T::of_usize(batch.len() * p), grad))
    }

    /// One gradient-descent update at a fixed truncation point. Returns the pre-update loss.
    pub fn step_at(&mut self, batch: &[&[T]], t: usize, learning_rate: T) -> Result<T> {
        self.step_per_sample(batch, &vec![t; batch.len()], learning_rate)
    }

    /// One gradient-descent update with a truncation point per sample.
    pub fn step_per_sample(&mut self, batch: &[&[T]], ts: &[usize], learning_rate: T) -> Result<T> {
        let (loss, grad) = self.loss_and_gradient_per_sample(batch, ts)?;
        if !loss.is_finite() {
            return Err(Error::Training(format!(
                "non-finite loss {loss} at truncation points {ts:?}"
            )));
        }
        for (w, g) in self.params.iter_mut().zip(grad) {
            *w = *w - learning_rate * g;
        }
        Ok(loss)
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        w.write_all(MODEL_MAGIC)?;
        for v in [self.p, self.tokens, self.token_dim] {
            w.write_all(&(v as u32).to_le_bytes())?;
        }
        for &x in &self.params {
            w.write_all(&x.to_f32().unwrap_or(f32::NAN).to_le_bytes())?;
        }
        Ok(())
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        if buf.len() < 16 || &buf[..4] != MODEL_MAGIC {
            return Err(Error::Parse {
                offset: 0,
                message: "missing RTAE header".into(),
            });
        }
        let dim = |i: usize| u32::from_le_bytes(buf[4 + 4 * i..8 + 4 * i].try_into().unwrap()) as usize;
        let (p, tokens, token_dim) = (dim(0), dim(1), dim(2));
        let layout = Layout {
            p,
            latent: tokens * token_dim,
        };
        let body = &buf[16..];
        if body.len() != layout.len() * 4 {
            return Err(Error::Parse {
                offset: 16,
                message: format!("expected {} weight bytes, found {}", layout.len() * 4, body.len()),
            });
        }
        let params: Vec<T> = body
            .chunks_exact(4)
            .map(|c| T::of(f32::from_le_bytes(c.try_into().unwrap()) as f64))
            .collect();
        if params.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse {
                offset: 16,
                message: "non-finite weight".into(),
            });
        }
        Ok(Self {
            p,
            tokens,
            token_dim,
            params,
        })
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
        let mut buf = Vec::new();
        File::open(path)
            .and_then(|f| BufReader::new(f).read_to_end(&mut buf))
            .map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&buf)
    }
}

/// Whether one truncation point is drawn per batch or per sample.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TruncationSampling {
    #[default]
    PerBatch,
    PerSample,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainConfig {
    pub key_count: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub steps: usize,
    pub seed: u64,
    pub sampling: TruncationSampling,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            key_count: 4,
            batch_size: 32,
            learning_rate: 0.3,
            steps: 2000,
            seed: 1,
            sampling: TruncationSampling::PerBatch,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self, tokens: usize) -> Result<()> {
        if self.key_count >= tokens {
            return config(format!("key count {} must be below {tokens} tokens", self.key_count));
        }
        if !(self.learning_rate > 0.0) || self.batch_size == 0 {
            return config("learning rate and batch size must be positive");
        }
        Ok(())
    }
}

/// Uniform draw from `key_count..=n`.
pub fn sample_truncation<R: Rng + ?Sized>(key_count: usize, n: usize, rng: &mut R) -> Result<usize> {
    if key_count > n {
        return argument(format!("key count {key_count} exceeds {n} tokens"));
    }
    Ok(rng.random_range(key_count..=n))
}

pub fn zero_out<T: Real>(latents: &LatentVectorSet<T>, t: usize) -> Result<LatentVectorSet<T>> {
    latents.zero_out(t)
}

/// One zero-out training step: draws `t` once for the whole batch, then
/// updates the model by plain gradient descent. Returns the pre-update loss.
pub fn train_step<T: Real, R: Rng + ?Sized>(
    model: &mut TinyAutoencoder<T>,
    batch: &[&[T]],
    cfg: &TrainConfig,
    rng: &mut R,
) -> Result<T> {
    let ts = match cfg.sampling {
        TruncationSampling::PerBatch => {
            vec![sample_truncation(cfg.key_count, model.tokens(), rng)?; batch.len()]
        }
        TruncationSampling::PerSample => batch
            .iter()
            .map(|_| sample_truncation(cfg.key_count, model.tokens(), rng))
            .collect::<Result<_>>()?,
    };
    model.step_per_sample(batch, &ts, T::of(cfg.learning_rate))
}

/// Runs `cfg.steps` steps on random batches drawn from `data`. Returns per-step losses.
pub fn train<T: Real>(model: &mut TinyAutoencoder<T>, data: &PatchDataset<T>, cfg: &TrainConfig) -> Result<Vec<T>> {
    cfg.validate(model.tokens())?;
    if data.is_empty() {
        return argument("empty training set");
    }
    if data.patch_len() != model.input_dim() {
        return config(format!(
            "patches of {} values for a model with p = {}",
            data.patch_len(),
            model.input_dim()
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut losses = Vec::with_capacity(cfg.steps);
    for _ in 0..cfg.steps {
        let batch: Vec<&[T]> = (0..cfg.batch_size)
            .map(|_| data.patch(rng.random_range(0..data.len())))
            .collect();
        losses.push(train_step(model, &batch, cfg, &mut rng)?);
    }
    Ok(losses)
}

/// Mean reconstruction MSE over `data` for each truncation point.
pub fn evaluate_information_gradient<T: Real>(
    model: &TinyAutoencoder<T>,
    data: &PatchDataset<T>,
    t_values: &[usize],
) -> Result<Vec<(usize, T)>> {
    if data.is_empty() {
        return argument("empty evaluation set");
    }
    if t_values.windows(2).any(|w| w[0] > w[1]) {
        return argument("truncation points must be sorted ascending");
    }
    if let Some(&t) = t_values.iter().find(|&&t| t > model.tokens()) {
        return argument(format!("truncation point {t} exceeds {} tokens", model.tokens()));
    }
    let patches: Vec<&[T]> = (0..data.len()).map(|i| data.patch(i)).collect();
    t_values
        .iter()
        .map(|&t| {
            let sum: f64 = patches
                .par_iter()
                .map(|x| {
                    let y = model.reconstruct(x, t).expect("t checked above");
                    y.iter()
                        .zip(x.iter())
                        .map(|(&a, &b)| ((a - b) * (a - b)).as_f64())
                        .sum::<f64>()
                })
                .sum();
            Ok((t, T::of(sum / (data.len() * data.patch_len()) as f64)))
        })
        .collect()
}

/// Flattened training patches.
///
/// Blob format: magic `RTPD`, `u32` count, `u32` values per patch, then
/// `count * p` little-endian `f32`.
#[derive(Clone, Debug, PartialEq)]
pub struct PatchDataset<T> {
    p: usize,
    data: Vec<T>,
}

impl<T: Real> PatchDataset<T> {
    pub fn new(p: usize, data: Vec<T>) -> Result<Self> {
        if p == 0 || data.len() % p != 0 {
            return config(format!("{} values do not split into patches of {p}", data.len()));
        }
        Ok(Self { p, data })
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.p
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn patch_len(&self) -> usize {
        self.p
    }

    pub fn patch(&self, i: usize) -> &[T] {
        &self.data[i * self.p..(i + 1) * self.p]
    }

    /// Patches `range` as a new dataset.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        Self {
            p: self.p,
            data: self.data[range.start * self.p..range.end * self.p].to_vec(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = DATA_MAGIC.to_vec();
        out.extend((self.len() as u32).to_le_bytes());
        out.extend((self.p as u32).to_le_bytes());
        for &x in &self.data {
            out.extend(x.to_f32().unwrap_or(f32::NAN).to_le_bytes());
        }
        out
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        if buf.len() < 12 || &buf[..4] != DATA_MAGIC {
            return Err(Error::Parse {
                offset: 0,
                message: "missing RTPD header".into(),
            });
        }
        let count = u32::from_le_bytes(buf[4..8].try_into().unwrap()) as usize;
        let p = u32::from_le_bytes(buf[8..12].try_into().unwrap()) as usize;
        if buf.len() - 12 != count * p * 4 {
            return Err(Error::Parse {
                offset: 12,
                message: "patch payload length mismatch".into(),
            });
        }
        let data = buf[12..]
            .chunks_exact(4)
            .map(|c| T::of(f32::from_le_bytes(c.try_into().unwrap()) as f64))
            .collect();
        Self::new(p, data)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let buf = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&buf)
    }

    /// Reads every regular file in `dir` (sorted by name) as one raw
    /// little-endian `f32` patch of `p` values.
    pub fn load_dir(dir: impl AsRef<Path>, p: usize) -> Result<Self> {
        let dir = dir.as_ref();
        let mut names: Vec<_> = std::fs::read_dir(dir)
            .map_err(|e| Error::io(dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        names.sort();
        let mut data = Vec::with_capacity(names.len() * p);
        for path in names {
            let buf = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
            if buf.len() != p * 4 {
                return Err(Error::Parse {
                    offset: 0,
                    message: format!("{}: expected {} bytes", path.display(), p * 4),
                });
            }
            data.extend(
                buf.chunks_exact(4)
                    .map(|c| T::of(f32::from_le_bytes(c.try_into().unwrap()) as f64)),
            );
        }
        Self::new(p, data)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }
}

/// Smooth `side x side` patches spanned by the `rank` lowest-frequency 2-D
/// DCT basis images, with coefficient standard deviation `decay^k` and a 0.5
/// offset. Values are rounded through `f32` so the in-memory set matches its blob.
pub fn synthetic_low_rank_patches<T: Real>(
    count: usize,
    side: usize,
    rank: usize,
    decay: f64,
    seed: u64,
) -> Result<PatchDataset<T>> {
    let p = side * side;
    if rank == 0 || rank > p {
        return config(format!("rank {rank} outside 1..={p}"));
    }
    if !(decay > 0.0 && decay <= 1.0) {
        return config(format!("decay {decay} outside (0, 1]"));
    }
    let basis1 = |k: usize, n: usize| {
        let a = if k == 0 {
            (1.0 / side as f64).sqrt()
        } else {
            (2.0 / side as f64).sqrt()
        };
        a * (std::f64::consts::PI * (2 * n + 1) as f64 * k as f64 / (2 * side) as f64).cos()
    };
    let order = crate::dct::zigzag(side);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(count * p);
    for _ in 0..count {
        let coeffs: Vec<f64> = (0..rank)
            .map(|k| {
                let g: f64 = StandardNormal.sample(&mut rng);
                decay.powi(k as i32) * g
            })
            .collect();
        for r in 0..side {
            for c in 0..side {
                let v: f64 = order[..rank]
                    .iter()
                    .zip(&coeffs)
                    .map(|(&pos, &a)| a * basis1(pos / side, r) * basis1(pos % side, c))
                    .sum();
                data.push(T::of((0.5 + v) as f32 as f64));
            }
        }
    }
    PatchDataset::new(p, data)
}
