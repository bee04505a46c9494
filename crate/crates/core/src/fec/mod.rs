//! Channel coding: rate-1/3 turbo mother code, QPP interleaving and
//! puncturing-based rate matching.

mod block;
mod puncture;
mod qpp;
mod trellis;
mod turbo;

pub use block::BlockLayout;
pub(crate) use puncture::check_supported;
pub use puncture::{rate_match, rate_recover, CodeRate, PuncturePattern, PunctureTable, TAIL_BITS};
pub use qpp::{qpp_interleave, QppTable};
pub use trellis::Trellis;
pub use turbo::{DecodeOrder, TurboCode, TurboConfig, LLR_CLAMP};
