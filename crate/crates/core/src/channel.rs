//! Rayleigh direct channels, receiver noise and the IRS cascade.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::numerics::{Complex, ComplexMatrix, RandomSource};

/// Direct (or effective) `N_r × N_t` channel.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectChannel(pub ComplexMatrix);

impl DirectChannel {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn nr(&self) -> usize {
        self.0.rows()
    }

    pub fn nt(&self) -> usize {
        self.0.cols()
    }
}

/// Rayleigh segments around the reflecting surface.
#[derive(Debug, Clone, PartialEq)]
pub struct IrsChannels {
    /// Surface → receiver, `N_r × N_REF`.
    pub g: ComplexMatrix,
    /// Transmitter → surface, `N_REF × N_t`.
    pub h: ComplexMatrix,
}

impl IrsChannels {
    pub fn nref(&self) -> usize {
        self.g.cols()
    }

    /// Per-element cascade terms `g_{0,r} · h_{r,col}` seen by receive
    /// antenna 0 through transmit column `col`.
    pub fn cascade_terms(&self, col: usize) -> Vec<Complex> {
        (0..self.nref()).map(|r| self.g[(0, r)] * self.h[(r, col)]).collect()
    }

    /// Column whose cascade terms have the largest magnitude sum, i.e. the
    /// column that gains most from phase alignment.
    pub fn strongest_coherent_column(&self) -> usize {
        (0..self.h.cols())
            .map(|t| {
                let s: f64 = self.cascade_terms(t).iter().map(|c| c.norm()).sum();
                (t, s)
            })
            .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
            .0
    }
}

/// How the surface phases are chosen for each channel realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhaseStrategy {
    #[default]
    UniformRandom,
    Zero,
    /// Co-phase the cascade terms of one transmit column.
    CoherentFirstColumn,
}

impl PhaseStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            PhaseStrategy::UniformRandom => "uniform",
            PhaseStrategy::Zero => "zero",
            PhaseStrategy::CoherentFirstColumn => "coherent",
        }
    }
}

impl fmt::Display for PhaseStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PhaseStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" | "uniform-random" => Ok(PhaseStrategy::UniformRandom),
            "zero" => Ok(PhaseStrategy::Zero),
            "coherent" | "coherent-first-column" => Ok(PhaseStrategy::CoherentFirstColumn),
            other => Err(Error::invalid(
                "phase",
                format!("unknown strategy `{other}` (uniform|zero|coherent)"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrsPhaseConfig {
    pub alpha: f64,
    pub thetas: Vec<f64>,
    pub strategy: PhaseStrategy,
}

/// Noise power for unit symbol energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub n0: f64,
}

impl NoiseParams {
    pub fn from_snr_db(snr_db: f64) -> Self {
        Self {
            n0: 10f64.powf(-snr_db / 10.0),
        }
    }
}

pub fn gen_direct_channel(rng: &mut RandomSource, nr: usize, nt: usize) -> Result<DirectChannel> {
    Ok(DirectChannel(rng.sample_complex_gaussian(nr, nt)?))
}

/// Draws `G` first, then `H`, from the same source.
pub fn gen_irs_channels(
    rng: &mut RandomSource,
    nr: usize,
    nref: usize,
    nt: usize,
) -> Result<IrsChannels> {
    let g = rng.sample_complex_gaussian(nr, nref)?;
    let h = rng.sample_complex_gaussian(nref, nt)?;
    Ok(IrsChannels { g, h })
}

/// `Φ = α · diag(e^{jθ_1}, …, e^{jθ_N})`.
pub fn irs_phase_matrix(cfg: &IrsPhaseConfig) -> Result<ComplexMatrix> {
    if !(cfg.alpha > 0.0 && cfg.alpha <= 1.0) {
        return Err(Error::invalid("alpha", format!("{} is outside (0, 1]", cfg.alpha)));
    }
    if cfg.thetas.is_empty() {
        return Err(Error::invalid("nref", "the surface needs at least one element"));
    }
    let diag: Vec<Complex> = cfg
        .thetas
        .iter()
        .map(|&t| Complex::from_polar(cfg.alpha, t))
        .collect();
    Ok(ComplexMatrix::diagonal(&diag))
}

/// Cascade channel `G · Φ · H`.
pub fn effective_irs_channel(irs: &IrsChannels, phi: &ComplexMatrix) -> Result<DirectChannel> {
    Ok(DirectChannel(irs.g.matmul(phi)?.matmul(&irs.h)?))
}

/// Surface phases for one realization. `context` holds the per-element
/// cascade terms of the column to co-phase and is required only by the
/// coherent strategy.
pub fn sample_phases(
    strategy: PhaseStrategy,
    rng: &mut RandomSource,
    nref: usize,
    context: Option<&[Complex]>,
) -> Result<Vec<f64>> {
    if nref == 0 {
        return Err(Error::invalid("nref", "the surface needs at least one element"));
    }
    match strategy {
        PhaseStrategy::UniformRandom => rng.sample_uniform_phase(nref),
        PhaseStrategy::Zero => Ok(vec![0.0; nref]),
        PhaseStrategy::CoherentFirstColumn => {
            let terms = context.ok_or_else(|| {
                Error::invalid("phase", "coherent strategy needs the cascade column")
            })?;
            if terms.len() != nref {
                return Err(Error::invalid(
                    "phase",
                    format!("cascade column has {} terms, expected {nref}", terms.len()),
                ));
            }
            Ok(terms.iter().map(|c| -c.arg()).collect())
        }
    }
}

/// i.i.d. CN(0, N₀) noise. Draws unit-variance samples and scales them, so
/// the same source yields the same noise shape at every SNR.
pub fn awgn(
    rng: &mut RandomSource,
    rows: usize,
    cols: usize,
    noise: NoiseParams,
) -> Result<ComplexMatrix> {
    if !(noise.n0 > 0.0) || !noise.n0.is_finite() {
        return Err(Error::invalid("n0", format!("noise power {} must be positive", noise.n0)));
    }
    Ok(&rng.sample_complex_gaussian(rows, cols)? * noise.n0.sqrt())
}
