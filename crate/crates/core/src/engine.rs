//! Seeded Monte Carlo BER engine.
//!
//! A frame is one Alamouti block: two channel uses carrying four information
//! bits over a channel drawn fresh for that frame. Every frame reads its
//! randomness from a [`RandomSource`] addressed by
//! `(seed, point_index << 32 | frame_index)`, so a point's error count is a
//! pure function of the configuration regardless of how frames are
//! scheduled across workers.

use rayon::prelude::*;

use crate::channel::{awgn, NoiseParams, PhaseStrategy};
use crate::error::{Error, Result};
use crate::numerics::{Complex, Lane, RandomSource};
use crate::phy::{alamouti_combine, alamouti_encode, detect_pair, qam4_demap, qam4_map, BitBlock, DecisionPair};
use crate::scheme::{Link, Scheme, SchemeId};
use crate::tx::UlaConfig;

pub const BITS_PER_FRAME: u64 = 4;

/// Two-sided 95% normal quantile used for the interval attached to points.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Run parameters shared by every scheme.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub snr_grid_db: Vec<f64>,
    pub frames_per_packet: u64,
    pub packets: u64,
    pub seed: u64,
    pub nt: usize,
    pub nr: usize,
    /// Array elements per active antenna.
    pub lt: usize,
    /// Reflecting elements on the surface.
    pub nref: usize,
    pub alpha: f64,
    pub phase_strategy: PhaseStrategy,
    pub lambda_m: f64,
    pub d_m: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            snr_grid_db: (0..16).map(|i| 2.0 * i as f64).collect(),
            frames_per_packet: 100_000,
            packets: 10,
            seed: 1,
            nt: 4,
            nr: 1,
            lt: 1,
            nref: 16,
            alpha: 1.0,
            phase_strategy: PhaseStrategy::UniformRandom,
            lambda_m: 0.005,
            d_m: 0.0025,
        }
    }
}

impl SimConfig {
    pub fn total_frames(&self) -> u64 {
        self.frames_per_packet * self.packets
    }

    pub fn ula(&self) -> Result<UlaConfig> {
        UlaConfig::new(self.lt, self.d_m, self.lambda_m)
    }

    /// Checks every invariant, naming the offending key.
    pub fn validate(&self, scheme: SchemeId) -> Result<()> {
        if self.snr_grid_db.is_empty() {
            return Err(Error::invalid("snr", "grid is empty"));
        }
        if self.snr_grid_db.iter().any(|s| !s.is_finite()) {
            return Err(Error::invalid("snr", "grid values must be finite"));
        }
        if self.snr_grid_db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("snr", "grid must be strictly increasing"));
        }
        if self.frames_per_packet == 0 {
            return Err(Error::invalid("frames", "must be at least 1"));
        }
        if self.packets == 0 {
            return Err(Error::invalid("packets", "must be at least 1"));
        }
        if self.frames_per_packet.checked_mul(self.packets).is_none_or(|n| n > u32::MAX as u64) {
            return Err(Error::invalid("frames", "frames x packets must fit in 32 bits"));
        }
        if self.snr_grid_db.len() as u64 > u32::MAX as u64 {
            return Err(Error::invalid("snr", "too many grid points"));
        }
        if self.nt == 0 {
            return Err(Error::invalid("nt", "must be at least 1"));
        }
        if scheme.uses_selection() && self.nt < 2 {
            return Err(Error::invalid("nt", "antenna selection needs at least 2 antennas"));
        }
        if !(1..=2).contains(&self.nr) {
            return Err(Error::invalid("nr", "1 or 2 receive antennas are supported"));
        }
        if self.lt == 0 {
            return Err(Error::invalid("lt", "must be at least 1"));
        }
        if self.nref == 0 {
            return Err(Error::invalid("nref", "must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::invalid("alpha", format!("{} is outside (0, 1]", self.alpha)));
        }
        self.ula()?;
        Ok(())
    }
}

/// Stream id for frame `frame_index` of grid point `point_index`.
pub fn frame_stream(point_index: u64, frame_index: u64) -> u64 {
    (point_index << 32) | frame_index
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FrameOutcome {
    pub bit_errors: u64,
    pub bits: u64,
}

impl std::ops::Add for FrameOutcome {
    type Output = FrameOutcome;

    fn add(self, rhs: FrameOutcome) -> FrameOutcome {
        FrameOutcome {
            bit_errors: self.bit_errors + rhs.bit_errors,
            bits: self.bits + rhs.bits,
        }
    }
}

fn draw_bits(frame: &RandomSource) -> BitBlock {
    let mut rng = frame.lane(Lane::BITS);
    [rng.bit(), rng.bit(), rng.bit(), rng.bit()]
}

/// Sends one block of `bits` over `link` and returns the detected bits.
pub fn transmit(link: &Link, bits: BitBlock, frame: &RandomSource, noise: NoiseParams) -> Result<BitBlock> {
    let s1 = qam4_map(&bits[..2])?;
    let s2 = qam4_map(&bits[2..])?;
    match link {
        Link::Scalar(taps) => {
            let v = awgn(&mut frame.lane(Lane::NOISE), taps.len(), 2, noise)?;
            let mut z = [Complex::new(0.0, 0.0); 2];
            for (r, h) in taps.iter().enumerate() {
                for (t, s) in [s1, s2].into_iter().enumerate() {
                    let y = h * s + v[(r, t)];
                    z[t] += h.conj() * y;
                }
            }
            let [a, b] = qam4_demap(z[0]);
            let [c, d] = qam4_demap(z[1]);
            Ok([a, b, c, d])
        }
        Link::Alamouti(eff) => {
            let x = alamouti_encode(s1, s2);
            let v = awgn(&mut frame.lane(Lane::NOISE), eff.h_eff.len(), 2, noise)?;
            let mut acc = DecisionPair::ZERO;
            for (r, h) in eff.h_eff.iter().enumerate() {
                let y: [Complex; 2] = std::array::from_fn(|t| {
                    (h[0] * x.entry(0, t) + h[1] * x.entry(1, t)) * eff.energy_factor + v[(r, t)]
                });
                acc = acc.accumulate(alamouti_combine(*h, y[0], y[1]));
            }
            Ok(detect_pair(&acc))
        }
    }
}

/// Simulates one frame addressed by `stream` (see [`frame_stream`]).
pub fn run_frame(
    scheme: &dyn Scheme,
    cfg: &SimConfig,
    snr_db: f64,
    stream: u64,
) -> Result<FrameOutcome> {
    let frame_index = stream & 0xffff_ffff;
    if frame_index >= cfg.total_frames() {
        return Err(Error::invalid(
            "frame_index",
            format!("{frame_index} is beyond {} frames", cfg.total_frames()),
        ));
    }
    let frame = RandomSource::new(cfg.seed, stream);
    let link = scheme.link(cfg, &frame)?;
    let bits = draw_bits(&frame);
    let detected = transmit(&link, bits, &frame, NoiseParams::from_snr_db(snr_db))?;
    let bit_errors = bits.iter().zip(&detected).filter(|(a, b)| a != b).count() as u64;
    Ok(FrameOutcome {
        bit_errors,
        bits: BITS_PER_FRAME,
    })
}

/// One point of a BER curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerPoint {
    pub snr_db: f64,
    pub total_bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl BerPoint {
    pub fn from_counts(snr_db: f64, bit_errors: u64, total_bits: u64) -> Self {
        let (ci_low, ci_high) = wilson_ci(bit_errors, total_bits, Z_95);
        Self {
            snr_db,
            total_bits,
            bit_errors,
            ber: bit_errors as f64 / total_bits as f64,
            ci_low,
            ci_high,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerCurve {
    pub scheme: SchemeId,
    pub config: SimConfig,
    pub points: Vec<BerPoint>,
}

impl BerCurve {
    pub fn snrs(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.snr_db).collect()
    }

    pub fn bers(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.ber).collect()
    }
}

/// Aggregates all frames of grid point `point_index` at `snr_db`.
pub fn run_point_indexed(
    scheme: &dyn Scheme,
    cfg: &SimConfig,
    snr_db: f64,
    point_index: u64,
) -> Result<BerPoint> {
    cfg.validate(scheme.id())?;
    let total = (0..cfg.total_frames())
        .into_par_iter()
        .map(|f| run_frame(scheme, cfg, snr_db, frame_stream(point_index, f)))
        .try_reduce(FrameOutcome::default, |a, b| Ok(a + b))?;
    Ok(BerPoint::from_counts(snr_db, total.bit_errors, total.bits))
}

/// Single point on stream block 0.
pub fn run_point(scheme: &dyn Scheme, cfg: &SimConfig, snr_db: f64) -> Result<BerPoint> {
    run_point_indexed(scheme, cfg, snr_db, 0)
}

/// One point per grid value; point `i` uses stream block `i`.
pub fn run_sweep(scheme: &dyn Scheme, cfg: &SimConfig) -> Result<BerCurve> {
    cfg.validate(scheme.id())?;
    let points = cfg
        .snr_grid_db
        .iter()
        .enumerate()
        .map(|(i, &snr)| run_point_indexed(scheme, cfg, snr, i as u64))
        .collect::<Result<Vec<_>>>()?;
    Ok(BerCurve {
        scheme: scheme.id(),
        config: cfg.clone(),
        points,
    })
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool")
        .install(f)
}

/// Wilson score interval for `errors` successes out of `n` trials.
pub fn wilson_ci(errors: u64, n: u64, z: f64) -> (f64, f64) {
    assert!(n > 0 && errors <= n, "wilson_ci needs 0 <= errors <= n, n >= 1");
    let nf = n as f64;
    let p = errors as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    let low = if errors == 0 { 0.0 } else { (center - half).clamp(0.0, p) };
    let high = if errors == n { 1.0 } else { (center + half).clamp(p, 1.0) };
    (low, high)
}
