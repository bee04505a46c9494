//! RGB image buffers with samples in `[0, 1]`, plus PPM (P6) and PNG I/O.

use std::fs;
use std::path::Path;

use crate::error::{argument, Error, Result};
use crate::num::Real;

/// Interleaved RGB, row-major, three channels.
#[derive(Clone, Debug, PartialEq)]
pub struct ImageBuffer<T> {
    height: usize,
    width: usize,
    data: Vec<T>,
}

impl<T: Real> ImageBuffer<T> {
    /// Wraps `data`, clamping every sample into `[0, 1]`.
    pub fn new(height: usize, width: usize, mut data: Vec<T>) -> Result<Self> {
        if data.len() != height * width * 3 {
            return argument(format!(
                "image buffer has {} samples, expected {height}x{width}x3",
                data.len()
            ));
        }
        for x in &mut data {
            *x = clamp01(*x);
        }
        Ok(Self { height, width, data })
    }

    pub fn filled(height: usize, width: usize, value: T) -> Self {
        Self {
            height,
            width,
            data: vec![clamp01(value); height * width * 3],
        }
    }

    pub fn from_rgb8(height: usize, width: usize, bytes: &[u8]) -> Result<Self> {
        let scale = T::of(1.0 / 255.0);
        Self::new(height, width, bytes.iter().map(|&b| T::of(b as f64) * scale).collect())
    }

    /// Round-to-nearest 8-bit quantization.
    pub fn to_rgb8(&self) -> Vec<u8> {
        self.data
            .iter()
            .map(|&x| (x.as_f64() * 255.0).round().clamp(0.0, 255.0) as u8)
            .collect()
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize, ch: usize) -> T {
        self.data[(row * self.width + col) * 3 + ch]
    }

    /// Copies a `h x w` window starting at (`row`, `col`); reads past the edge
    /// replicate the last row/column.
    pub fn crop_replicate(&self, row: usize, col: usize, h: usize, w: usize) -> Self {
        let mut data = Vec::with_capacity(h * w * 3);
        for r in 0..h {
            let sr = (row + r).min(self.height - 1);
            for c in 0..w {
                let sc = (col + c).min(self.width - 1);
                let base = (sr * self.width + sc) * 3;
                data.extend_from_slice(&self.data[base..base + 3]);
            }
        }
        Self {
            height: h,
            width: w,
            data,
        }
    }

    /// Writes `patch` at (`row`, `col`), dropping anything past the edge.
    pub fn paste(&mut self, patch: &Self, row: usize, col: usize) {
        for r in 0..patch.height {
            if row + r >= self.height {
                break;
            }
            let w = patch.width.min(self.width.saturating_sub(col));
            let dst = ((row + r) * self.width + col) * 3;
            let src = r * patch.width * 3;
            self.data[dst..dst + w * 3].copy_from_slice(&patch.data[src..src + w * 3]);
        }
    }

    pub fn convert<U: Real>(&self) -> ImageBuffer<U> {
        ImageBuffer {
            height: self.height,
            width: self.width,
            data: self.data.iter().map(|&x| U::of(x.as_f64())).collect(),
        }
    }
}

fn clamp01<T: Real>(x: T) -> T {
    if x.is_nan() {
        T::zero()
    } else {
        x.max(T::zero()).min(T::one())
    }
}

/// Parses a binary PPM (P6). Only `maxval <= 255` is supported.
pub fn decode_ppm<T: Real>(bytes: &[u8]) -> Result<ImageBuffer<T>> {
    let mut pos = 0;
    if bytes.len() < 2 || &bytes[..2] != b"P6" {
        return Err(Error::Parse {
            offset: 0,
            message: "not a P6 PPM (bad magic)".into(),
        });
    }
    pos += 2;
    let mut fields = [0usize; 3];
    for (n, field) in fields.iter_mut().enumerate() {
        // whitespace and comments before each header field
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            let name = ["width", "height", "maxval"][n];
            return Err(Error::Parse {
                offset: pos,
                message: format!("expected {name}"),
            });
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse {
                offset: start,
                message: "header number overflow".into(),
            })?;
    }
    let [width, height, maxval] = fields;
    if maxval == 0 || maxval > 255 {
        return Err(Error::Parse {
            offset: pos,
            message: format!("unsupported maxval {maxval}"),
        });
    }
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::Parse {
            offset: pos,
            message: "missing whitespace after header".into(),
        });
    }
    pos += 1;
    let need = width * height * 3;
    let body = &bytes[pos..];
    if body.len() < need {
        return Err(Error::Parse {
            offset: bytes.len(),
            message: format!("truncated pixel data: need {need} bytes, have {}", body.len()),
        });
    }
    let scale = T::of(1.0 / maxval as f64);
    ImageBuffer::new(
        height,
        width,
        body[..need].iter().map(|&b| T::of(b as f64) * scale).collect(),
    )
}

pub fn encode_ppm<T: Real>(img: &ImageBuffer<T>) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend(img.to_rgb8());
    out
}

/// Loads a P6 PPM (detected by magic) or any PNG.
pub fn load_image<T: Real>(path: impl AsRef<Path>) -> Result<ImageBuffer<T>> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(b"P6") {
        return decode_ppm(&bytes);
    }
    decode_png(&bytes).map_err(|e| match e {
        Error::Parse { offset, message } => Error::Parse {
            offset,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

/// Decodes PNG bytes, converting any colour type to RGB.
pub fn decode_png<T: Real>(bytes: &[u8]) -> Result<ImageBuffer<T>> {
    let img = image::load_from_memory_with_format(bytes, image::ImageFormat::Png)
        .map_err(|e| Error::Parse {
            offset: 0,
            message: e.to_string(),
        })?
        .to_rgb8();
    ImageBuffer::from_rgb8(img.height() as usize, img.width() as usize, img.as_raw())
}

/// Saves as PNG when the extension is `.png`, PPM otherwise.
pub fn save_image<T: Real>(img: &ImageBuffer<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let is_png = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("png"));
    if is_png {
        let buf = image::RgbImage::from_raw(img.width as u32, img.height as u32, img.to_rgb8())
            .expect("buffer length matches dimensions");
        buf.save_with_format(path, image::ImageFormat::Png)
            .map_err(|e| match e {
                image::ImageError::IoError(io) => Error::io(path, io),
                other => Error::io(path, std::io::Error::other(other.to_string())),
            })
    } else {
        fs::write(path, encode_ppm(img)).map_err(|e| Error::io(path, e))
    }
}
