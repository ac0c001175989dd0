//! Counter-keyed random sources.
//!
//! A [`RandomSource`] is addressed by `(seed, stream)`. The pair fully
//! determines the draw sequence, so Monte Carlo frames can be evaluated in any
//! order and on any number of workers. Within one stream, independent
//! [`Lane`]s separate the draws of different purposes (channel, noise, bits)
//! so that changing one consumer never shifts the samples of another.

use std::f64::consts::TAU;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::{Complex, ComplexMatrix};
use crate::error::{Error, Result};

/// Purpose tag mixed into the generator key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lane(pub u64);

impl Lane {
    pub const DEFAULT: Lane = Lane(0);
    pub const CHANNEL: Lane = Lane(1);
    pub const ANGLES: Lane = Lane(2);
    pub const PHASES: Lane = Lane(3);
    pub const BITS: Lane = Lane(4);
    pub const NOISE: Lane = Lane(5);
    /// First lane reserved for channel redraws after a singular selection.
    pub const REDRAW_BASE: Lane = Lane(1 << 32);
}

/// Seeded, stream-addressed generator (ChaCha8 keyed by seed and lane, with
/// the ChaCha stream word set to `stream`).
#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    stream: u64,
    lane: Lane,
    rng: ChaCha8Rng,
}

impl RandomSource {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self::with_lane(seed, stream, Lane::DEFAULT)
    }

    pub fn with_lane(seed: u64, stream: u64, lane: Lane) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        key[8..16].copy_from_slice(&lane.0.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(stream);
        Self {
            seed,
            stream,
            lane,
            rng,
        }
    }

    /// Fresh source on the same `(seed, stream)` but a different lane.
    pub fn lane(&self, lane: Lane) -> Self {
        Self::with_lane(self.seed, self.stream, lane)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn current_lane(&self) -> Lane {
        self.lane
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn uniform_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    pub fn bit(&mut self) -> u8 {
        (self.rng.next_u32() & 1) as u8
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// One CN(0,1) draw: variance 1/2 on each real dimension.
    pub fn complex_gaussian(&mut self) -> Complex {
        let re: f64 = self.standard_normal();
        let im: f64 = self.standard_normal();
        Complex::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    }

    /// Matrix of i.i.d. CN(0,1) entries.
    pub fn sample_complex_gaussian(&mut self, rows: usize, cols: usize) -> Result<ComplexMatrix> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("shape", format!("{rows}x{cols} has no entries")));
        }
        let data = (0..rows * cols).map(|_| self.complex_gaussian()).collect();
        ComplexMatrix::from_vec(rows, cols, data)
    }

    /// `n` phases i.i.d. uniform on `[0, 2π)`.
    pub fn sample_uniform_phase(&mut self, n: usize) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(Error::invalid("n", "at least one phase is required"));
        }
        Ok((0..n)
            .map(|_| {
                // u < 1 but u·2π can round up to 2π
                let t = self.uniform() * TAU;
                if t >= TAU {
                    0.0
                } else {
                    t
                }
            })
            .collect())
    }
}
