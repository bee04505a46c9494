//! Deterministic frequency-ordered tokenizer.
//!
//! A patch is decorrelated into a luma/chroma space, split into square
//! blocks and transformed with an orthonormal type-II DCT. Coefficients are
//! ordered globally by zig-zag frequency, then channel (luma first), then
//! block raster position. The first `total_tokens * coeffs_per_token`
//! coefficients in that order are kept and chunked into vectors of
//! `coeffs_per_token`, each quantized to one token. Everything past the
//! retained prefix is dropped, so early tokens carry the coarse image and
//! later tokens refine it.

use rayon::prelude::*;

use crate::error::{argument, config, Result};
use crate::image::ImageBuffer;
use crate::num::Real;
use crate::tokens::{Codebook, LatentVectorSet, TokenSequence};

/// RGB (centered on 0.5) to luma/chroma. JPEG's full-range YCbCr rows.
const RGB_TO_YCC: [[f64; 3]; 3] = [
    [0.299, 0.587, 0.114],
    [-0.168_736, -0.331_264, 0.5],
    [0.5, -0.418_688, -0.081_312],
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DctTokenizerConfig {
    pub patch_height: usize,
    pub patch_width: usize,
    pub block: usize,
    pub coeffs_per_token: usize,
    pub total_tokens: usize,
    pub key_count: usize,
}

impl Default for DctTokenizerConfig {
    fn default() -> Self {
        Self {
            patch_height: 256,
            patch_width: 256,
            block: 8,
            coeffs_per_token: 4,
            total_tokens: 256,
            key_count: 32,
        }
    }
}

impl DctTokenizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.block == 0 || self.patch_height % self.block != 0 || self.patch_width % self.block != 0 {
            return config(format!(
                "patch {}x{} is not a multiple of block size {}",
                self.patch_height, self.patch_width, self.block
            ));
        }
        if self.coeffs_per_token == 0 || self.total_tokens == 0 {
            return config("token count and coefficients per token must be positive");
        }
        if self.total_tokens * self.coeffs_per_token > self.coefficient_count() {
            return config(format!(
                "{} tokens x {} coefficients exceed the {} coefficients of a patch",
                self.total_tokens,
                self.coeffs_per_token,
                self.coefficient_count()
            ));
        }
        if self.key_count == 0 || self.key_count >= self.total_tokens {
            return config(format!(
                "key count {} must lie in 1..{}",
                self.key_count, self.total_tokens
            ));
        }
        Ok(())
    }

    pub fn coefficient_count(&self) -> usize {
        self.patch_height * self.patch_width * 3
    }

    pub fn blocks_per_channel(&self) -> usize {
        (self.patch_height / self.block) * (self.patch_width / self.block)
    }

    pub fn retained(&self) -> usize {
        self.total_tokens * self.coeffs_per_token
    }
}

/// Zig-zag scan of a `b x b` block as natural (row-major) positions.
pub fn zigzag(b: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(b * b);
    for s in 0..(2 * b - 1) {
        let lo = s.saturating_sub(b - 1);
        let hi = s.min(b - 1);
        if s % 2 == 1 {
            for r in lo..=hi {
                out.push(r * b + (s - r));
            }
        } else {
            for r in (lo..=hi).rev() {
                out.push(r * b + (s - r));
            }
        }
    }
    out
}

/// Global coefficient ordering, most important first.
///
/// Coefficients are addressed as `(channel * blocks + block) * b*b + pos`
/// where `pos` is the row-major position inside the block. The result is a
/// permutation of every coefficient in the patch.
pub fn importance_order(cfg: &DctTokenizerConfig) -> Vec<usize> {
    let bb = cfg.block * cfg.block;
    let blocks = cfg.blocks_per_channel();
    let mut order = Vec::with_capacity(cfg.coefficient_count());
    for pos in zigzag(cfg.block) {
        for ch in 0..3 {
            for blk in 0..blocks {
                order.push((ch * blocks + blk) * bb + pos);
            }
        }
    }
    order
}

fn invert3(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let mut inv = [[0.0; 3]; 3];
    for (r, row) in inv.iter_mut().enumerate() {
        for (c, v) in row.iter_mut().enumerate() {
            let (r1, r2) = ((c + 1) % 3, (c + 2) % 3);
            let (c1, c2) = ((r + 1) % 3, (r + 2) % 3);
            *v = (m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]) / det;
        }
    }
    inv
}

/// Encoder/decoder for one patch geometry.
#[derive(Clone, Debug)]
pub struct DctTokenizer<T> {
    cfg: DctTokenizerConfig,
    order: Vec<usize>,
    basis: Vec<T>,
    fwd_color: [[T; 3]; 3],
    inv_color: [[T; 3]; 3],
}

impl<T: Real> DctTokenizer<T> {
    pub fn new(cfg: DctTokenizerConfig) -> Result<Self> {
        cfg.validate()?;
        let b = cfg.block;
        let mut basis = vec![T::zero(); b * b];
        for k in 0..b {
            let alpha = if k == 0 {
                (1.0 / b as f64).sqrt()
            } else {
                (2.0 / b as f64).sqrt()
            };
            for n in 0..b {
                let angle = std::f64::consts::PI * (2 * n + 1) as f64 * k as f64 / (2 * b) as f64;
                basis[k * b + n] = T::of(alpha * angle.cos());
            }
        }
        let cast = |m: [[f64; 3]; 3]| m.map(|row| row.map(T::of));
        let mut order = importance_order(&cfg);
        order.truncate(cfg.retained());
        Ok(Self {
            cfg,
            order,
            basis,
            fwd_color: cast(RGB_TO_YCC),
            inv_color: cast(invert3(&RGB_TO_YCC)),
        })
    }

    pub fn config(&self) -> &DctTokenizerConfig {
        &self.cfg
    }

    /// Retained coefficient positions in importance order.
    pub fn retained_order(&self) -> &[usize] {
        &self.order
    }

    fn check_patch(&self, img: &ImageBuffer<T>) -> Result<()> {
        if img.height() != self.cfg.patch_height || img.width() != self.cfg.patch_width {
            return argument(format!(
                "image is {}x{}, tokenizer expects {}x{} patches",
                img.height(),
                img.width(),
                self.cfg.patch_height,
                self.cfg.patch_width
            ));
        }
        Ok(())
    }

    /// Full coefficient array of a patch in the layout used by [`importance_order`].
    pub fn forward(&self, img: &ImageBuffer<T>) -> Result<Vec<T>> {
        self.check_patch(img)?;
        let (h, w, b) = (self.cfg.patch_height, self.cfg.patch_width, self.cfg.block);
        let half = T::of(0.5);
        let mut planes = vec![vec![T::zero(); h * w]; 3];
        for (p, px) in img.data().chunks_exact(3).enumerate() {
            for ch in 0..3 {
                let m = &self.fwd_color[ch];
                planes[ch][p] = m[0] * (px[0] - half) + m[1] * (px[1] - half) + m[2] * (px[2] - half);
            }
        }
        let blocks = self.cfg.blocks_per_channel();
        let mut coeffs = vec![T::zero(); 3 * blocks * b * b];
        coeffs.par_chunks_mut(b * b).enumerate().for_each(|(idx, out)| {
            let (ch, blk) = (idx / blocks, idx % blocks);
            let (br, bc) = (blk / (w / b), blk % (w / b));
            let mut x = vec![T::zero(); b * b];
            for r in 0..b {
                let src = (br * b + r) * w + bc * b;
                x[r * b..(r + 1) * b].copy_from_slice(&planes[ch][src..src + b]);
            }
            self.dct2(&x, out);
        });
        Ok(coeffs)
    }

    /// Inverse of [`forward`](Self::forward), clamped to `[0, 1]`.
    pub fn inverse(&self, coeffs: &[T]) -> Result<ImageBuffer<T>> {
        let (h, w, b) = (self.cfg.patch_height, self.cfg.patch_width, self.cfg.block);
        if coeffs.len() != self.cfg.coefficient_count() {
            return argument("coefficient array does not match patch geometry");
        }
        let blocks = self.cfg.blocks_per_channel();
        let mut planes = vec![vec![T::zero(); h * w]; 3];
        for (idx, c) in coeffs.chunks_exact(b * b).enumerate() {
            let (ch, blk) = (idx / blocks, idx % blocks);
            let (br, bc) = (blk / (w / b), blk % (w / b));
            let mut x = vec![T::zero(); b * b];
            self.idct2(c, &mut x);
            for r in 0..b {
                let dst = (br * b + r) * w + bc * b;
                planes[ch][dst..dst + b].copy_from_slice(&x[r * b..(r + 1) * b]);
            }
        }
        let half = T::of(0.5);
        let mut data = Vec::with_capacity(h * w * 3);
        for p in 0..h * w {
            let ycc = [planes[0][p], planes[1][p], planes[2][p]];
            for m in &self.inv_color {
                data.push(m[0] * ycc[0] + m[1] * ycc[1] + m[2] * ycc[2] + half);
            }
        }
        ImageBuffer::new(h, w, data)
    }

    /// Retained coefficients grouped into `total_tokens` vectors, before quantization.
    pub fn groups(&self, img: &ImageBuffer<T>) -> Result<LatentVectorSet<T>> {
        let coeffs = self.forward(img)?;
        let data = self.order.iter().map(|&i| coeffs[i]).collect();
        LatentVectorSet::new(self.cfg.total_tokens, self.cfg.coeffs_per_token, data)
    }

    /// Scatters group vectors back and inverts the transform. Unretained
    /// coefficients are zero.
    pub fn reconstruct(&self, latents: &LatentVectorSet<T>) -> Result<ImageBuffer<T>> {
        if latents.count() != self.cfg.total_tokens || latents.dim() != self.cfg.coeffs_per_token {
            return argument(format!(
                "latents are {}x{}, tokenizer expects {}x{}",
                latents.count(),
                latents.dim(),
                self.cfg.total_tokens,
                self.cfg.coeffs_per_token
            ));
        }
        let mut coeffs = vec![T::zero(); self.cfg.coefficient_count()];
        for (&pos, &v) in self.order.iter().zip(latents.as_flat()) {
            coeffs[pos] = v;
        }
        self.inverse(&coeffs)
    }

    pub fn encode_image(&self, img: &ImageBuffer<T>, cb: &Codebook<T>) -> Result<TokenSequence> {
        if cb.dim() != self.cfg.coeffs_per_token {
            return config(format!(
                "codebook dimension {} differs from {} coefficients per token",
                cb.dim(),
                self.cfg.coeffs_per_token
            ));
        }
        let groups = self.groups(img)?;
        let indices = (0..groups.count())
            .into_par_iter()
            .map(|i| cb.quantize(groups.vector(i)))
            .collect::<Result<Vec<_>>>()?;
        TokenSequence::new(indices, self.cfg.key_count)
    }

    pub fn decode_image(&self, seq: &TokenSequence, cb: &Codebook<T>) -> Result<ImageBuffer<T>> {
        if seq.total() != self.cfg.total_tokens {
            return argument(format!(
                "sequence has {} tokens, tokenizer expects {}",
                seq.total(),
                self.cfg.total_tokens
            ));
        }
        self.reconstruct(&seq.latents(cb)?)
    }

    /// Number of patch rows and columns covering an `h x w` image.
    pub fn tile_grid(&self, h: usize, w: usize) -> (usize, usize) {
        (h.div_ceil(self.cfg.patch_height), w.div_ceil(self.cfg.patch_width))
    }

    /// Patches of a larger image in raster order; the ragged border is edge-replicated.
    pub fn tiles(&self, img: &ImageBuffer<T>) -> Vec<ImageBuffer<T>> {
        let (rows, cols) = self.tile_grid(img.height(), img.width());
        let (ph, pw) = (self.cfg.patch_height, self.cfg.patch_width);
        (0..rows * cols)
            .map(|i| img.crop_replicate((i / cols) * ph, (i % cols) * pw, ph, pw))
            .collect()
    }

    /// Reassembles decoded patches into an `h x w` image.
    pub fn untile(&self, patches: &[ImageBuffer<T>], h: usize, w: usize) -> Result<ImageBuffer<T>> {
        let (rows, cols) = self.tile_grid(h, w);
        if patches.len() != rows * cols {
            return argument(format!("{} patches for a {rows}x{cols} grid", patches.len()));
        }
        let mut out = ImageBuffer::filled(h, w, T::zero());
        for (i, p) in patches.iter().enumerate() {
            out.paste(p, (i / cols) * self.cfg.patch_height, (i % cols) * self.cfg.patch_width);
        }
        Ok(out)
    }

    pub fn encode_tiled(&self, img: &ImageBuffer<T>, cb: &Codebook<T>) -> Result<Vec<TokenSequence>> {
        self.tiles(img).iter().map(|p| self.encode_image(p, cb)).collect()
    }

    pub fn decode_tiled(&self, seqs: &[TokenSequence], h: usize, w: usize, cb: &Codebook<T>) -> Result<ImageBuffer<T>> {
        let patches = seqs
            .iter()
            .map(|s| self.decode_image(s, cb))
            .collect::<Result<Vec<_>>>()?;
        self.untile(&patches, h, w)
    }

    fn dct2(&self, x: &[T], out: &mut [T]) {
        let b = self.cfg.block;
        let c = &self.basis;
        // rows then columns: out = C x C^T
        let mut tmp = vec![T::zero(); b * b];
        for k in 0..b {
            for col in 0..b {
                tmp[k * b + col] = (0..b).map(|n| c[k * b + n] * x[n * b + col]).sum();
            }
        }
        for r in 0..b {
            for k in 0..b {
                out[r * b + k] = (0..b).map(|n| tmp[r * b + n] * c[k * b + n]).sum();
            }
        }
    }

    fn idct2(&self, y: &[T], out: &mut [T]) {
        let b = self.cfg.block;
        let c = &self.basis;
        // out = C^T y C
        let mut tmp = vec![T::zero(); b * b];
        for n in 0..b {
            for col in 0..b {
                tmp[n * b + col] = (0..b).map(|k| c[k * b + n] * y[k * b + col]).sum();
            }
        }
        for r in 0..b {
            for n in 0..b {
                out[r * b + n] = (0..b).map(|k| tmp[r * b + k] * c[k * b + n]).sum();
            }
        }
    }
}
