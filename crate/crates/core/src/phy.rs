//! 4-QAM mapping and the Alamouti space-time block code.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::numerics::{Complex, ComplexMatrix};

/// Information bits carried by one Alamouti block (two 4-QAM symbols).
pub type BitBlock = [u8; 4];

/// Gray-mapped 4-QAM with unit symbol energy.
///
/// The first bit selects the sign of the real part and the second the sign
/// of the imaginary part (`0` → positive).
pub fn qam4_map(bits: &[u8]) -> Result<Complex> {
    let [b0, b1] = bits else {
        return Err(Error::invalid(
            "bits",
            format!("4-QAM takes 2 bits, got {}", bits.len()),
        ));
    };
    if *b0 > 1 || *b1 > 1 {
        return Err(Error::invalid("bits", "bits must be 0 or 1"));
    }
    let axis = |b: u8| if b == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
    Ok(Complex::new(axis(*b0), axis(*b1)))
}

/// Quadrant decision. Points on an axis resolve to bit 0.
pub fn qam4_demap(z: Complex) -> [u8; 2] {
    [u8::from(z.re < 0.0), u8::from(z.im < 0.0)]
}

/// Alamouti codeword `[[x1, -x2*], [x2, x1*]]`: rows are antennas, columns
/// are the two channel uses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlamoutiCodeword {
    pub x1: Complex,
    pub x2: Complex,
}

impl AlamoutiCodeword {
    /// Symbol sent from antenna `antenna` during channel use `slot`.
    pub fn entry(&self, antenna: usize, slot: usize) -> Complex {
        match (antenna, slot) {
            (0, 0) => self.x1,
            (0, 1) => -self.x2.conj(),
            (1, 0) => self.x2,
            (1, 1) => self.x1.conj(),
            _ => panic!("Alamouti codeword index ({antenna}, {slot}) out of range"),
        }
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_vec(
            2,
            2,
            vec![self.entry(0, 0), self.entry(0, 1), self.entry(1, 0), self.entry(1, 1)],
        )
        .expect("2x2")
    }
}

pub fn alamouti_encode(x1: Complex, x2: Complex) -> AlamoutiCodeword {
    AlamoutiCodeword { x1, x2 }
}

/// Decoupled decision statistics produced by the Alamouti combiner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionPair {
    pub x1: Complex,
    pub x2: Complex,
    /// `Σ |h_i|²` over the effective channel taps that were combined.
    pub channel_gain: f64,
}

impl DecisionPair {
    pub const ZERO: DecisionPair = DecisionPair {
        x1: Complex::new(0.0, 0.0),
        x2: Complex::new(0.0, 0.0),
        channel_gain: 0.0,
    };

    /// Sums the statistics of two receive antennas.
    pub fn accumulate(self, other: DecisionPair) -> DecisionPair {
        DecisionPair {
            x1: self.x1 + other.x1,
            x2: self.x2 + other.x2,
            channel_gain: self.channel_gain + other.channel_gain,
        }
    }
}

/// Linear Alamouti combining for one receive antenna:
/// `x̃1 = h1*·y1 + h2·y2*`, `x̃2 = h2*·y1 − h1·y2*`.
pub fn alamouti_combine(h_eff: [Complex; 2], y1: Complex, y2: Complex) -> DecisionPair {
    let [h1, h2] = h_eff;
    DecisionPair {
        x1: h1.conj() * y1 + h2 * y2.conj(),
        x2: h2.conj() * y1 - h1 * y2.conj(),
        channel_gain: h1.norm_sqr() + h2.norm_sqr(),
    }
}

/// Quadrant detection of both symbols. The positive channel gain scales
/// both statistics and cannot move them across an axis.
pub fn detect_pair(d: &DecisionPair) -> BitBlock {
    let [a, b] = qam4_demap(d.x1);
    let [c, e] = qam4_demap(d.x2);
    [a, b, c, e]
}
