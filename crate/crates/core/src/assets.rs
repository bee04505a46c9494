//! Data files compiled into the crate.

use std::sync::OnceLock;

use crate::image::{decode_png, ImageBuffer};
use crate::num::Real;
use crate::tokens::Codebook;
use crate::zeroout::PatchDataset;

const CODEBOOK: &[u8] = include_bytes!("../data/codebook.rtcb");
const PATCHES: &[u8] = include_bytes!("../data/patches.rtpd");

/// Bundled test images, each a whole number of 256x256 patches.
pub const IMAGES: [(&str, &[u8]); 4] = [
    ("astronaut", include_bytes!("../data/images/astronaut.png")),
    ("chelsea", include_bytes!("../data/images/chelsea.png")),
    ("coffee", include_bytes!("../data/images/coffee.png")),
    ("rocket", include_bytes!("../data/images/rocket.png")),
];

/// The shipped K = 4096, d = 4 codebook trained on the bundled images.
pub fn default_codebook<T: Real>() -> Codebook<T> {
    static CB: OnceLock<Codebook<f32>> = OnceLock::new();
    let cb = CB.get_or_init(|| Codebook::from_bytes(CODEBOOK).expect("bundled codebook is valid"));
    Codebook::from_flat(
        cb.len(),
        cb.dim(),
        cb.as_flat().iter().map(|&x| T::of(x as f64)).collect(),
    )
    .expect("bundled codebook is valid")
}

/// The shipped 8x8 training patches for the zero-out trainer.
pub fn default_patches<T: Real>() -> PatchDataset<T> {
    PatchDataset::from_bytes(PATCHES).expect("bundled patch set is valid")
}

/// Decodes a bundled image by name.
pub fn image<T: Real>(name: &str) -> Option<ImageBuffer<T>> {
    IMAGES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, bytes)| decode_png(bytes).expect("bundled image is valid"))
}

/// All bundled images with their names.
pub fn images<T: Real>() -> Vec<(&'static str, ImageBuffer<T>)> {
    IMAGES
        .iter()
        .map(|(n, bytes)| (*n, decode_png(bytes).expect("bundled image is valid")))
        .collect()
}
