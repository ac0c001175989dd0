//! Seeded Monte Carlo BER simulation of transmit-antenna-selection Alamouti
//! links with zero-forcing precoding, analog and hybrid beamforming, and
//! reflecting-surface cascades.
//!
//! The pipeline for one frame is: draw a channel ([`channel`]), apply a
//! scheme's transmit processing ([`tx`], selected through
//! [`scheme::SchemeRegistry`]), send one Alamouti block of 4-QAM symbols
//! ([`phy`]), combine and detect. [`engine`] aggregates frames into BER
//! points and curves; [`curve_file`] and [`gains`] persist curves and read
//! SNR gains off them.

pub mod channel;
pub mod curve_file;
pub mod engine;
pub mod error;
pub mod gains;
pub mod numerics;
pub mod phy;
pub mod runspec;
pub mod scheme;
pub mod tx;

pub use channel::DirectChannel;
pub use engine::{run_point, run_sweep, BerCurve, BerPoint, SimConfig};
pub use error::{Error, Result};
pub use scheme::{Scheme, SchemeId, SchemeRegistry};
