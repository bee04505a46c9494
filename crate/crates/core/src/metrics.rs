use crate::error::{argument, Result};
use crate::image::ImageBuffer;
use crate::num::Real;

/// Mean squared error between two equally sized images.
pub fn mse<T: Real>(a: &ImageBuffer<T>, b: &ImageBuffer<T>) -> Result<f64> {
    if a.height() != b.height() || a.width() != b.width() {
        return argument(format!(
            "image sizes differ: {}x{} vs {}x{}",
            a.height(),
            a.width(),
            b.height(),
            b.width()
        ));
    }
    let sum: f64 = a
        .data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| {
            let d = x.as_f64() - y.as_f64();
            d * d
        })
        .sum();
    Ok(sum / a.data().len() as f64)
}

/// Peak signal-to-noise ratio in dB for samples in `[0, 1]`.
///
/// Identical images give `f64::INFINITY`.
pub fn psnr<T: Real>(a: &ImageBuffer<T>, b: &ImageBuffer<T>) -> Result<f64> {
    let m = mse(a, b)?;
    Ok(if m == 0.0 { f64::INFINITY } else { -10.0 * m.log10() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psnr_reference_values() {
        let zeros = ImageBuffer::<f64>::filled(4, 4, 0.0);
        let ones = ImageBuffer::<f64>::filled(4, 4, 1.0);
        assert_eq!(psnr(&zeros, &zeros).unwrap(), f64::INFINITY);
        assert_eq!(psnr(&zeros, &ones).unwrap(), 0.0);

        let checker = |inv: bool| {
            let data = (0..16 * 3)
                .map(|i| {
                    let p = i / 3;
                    let on = ((p / 4) + (p % 4)) % 2 == 0;
                    if on != inv {
                        0.5
                    } else {
                        0.0
                    }
                })
                .collect();
            ImageBuffer::new(4, 4, data).unwrap()
        };
        let v = psnr(&checker(false), &checker(true)).unwrap();
        assert!((v - 10.0 * 4f64.log10()).abs() < 1e-12);
        assert!((v - 6.0206).abs() < 1e-4);
    }

    #[test]
    fn size_mismatch() {
        let a = ImageBuffer::<f32>::filled(2, 2, 0.0);
        let b = ImageBuffer::<f32>::filled(2, 3, 0.0);
        assert!(psnr(&a, &b).is_err());
    }
}
