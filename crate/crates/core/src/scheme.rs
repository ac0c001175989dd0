//! Link schemes and the registry that selects them by name.
//!
//! Every scheme turns one frame's random source into the channel seen by the
//! detector. The Monte Carlo engine only talks to [`Scheme`] trait objects,
//! so new transmit chains plug in through [`SchemeRegistry::register`].

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::channel::{
    effective_irs_channel, gen_direct_channel, gen_irs_channels, irs_phase_matrix, sample_phases,
    DirectChannel, IrsPhaseConfig, PhaseStrategy,
};
use crate::engine::SimConfig;
use crate::error::{Error, Result};
use crate::numerics::{Complex, Lane, RandomSource};
use crate::tx::{
    abf_effective_link, hbf_effective_link, select_antennas, zf_effective_link, zf_precoder,
    EffectiveLink, SelectionResult,
};

/// Redraws allowed when a selected channel has a singular Gram matrix.
pub const MAX_REDRAWS: u64 = 16;

/// The closed set of built-in schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SchemeId {
    Siso,
    Alamouti2x1,
    TasOstbc,
    TasOstbcZf,
    TasOstbcAbf,
    TasOstbcHbf,
    IrsTasOstbcHbf,
}

impl SchemeId {
    pub const ALL: [SchemeId; 7] = [
        SchemeId::Siso,
        SchemeId::Alamouti2x1,
        SchemeId::TasOstbc,
        SchemeId::TasOstbcZf,
        SchemeId::TasOstbcAbf,
        SchemeId::TasOstbcHbf,
        SchemeId::IrsTasOstbcHbf,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            SchemeId::Siso => "siso",
            SchemeId::Alamouti2x1 => "alamouti",
            SchemeId::TasOstbc => "tas-ostbc",
            SchemeId::TasOstbcZf => "tas-ostbc-zf",
            SchemeId::TasOstbcAbf => "tas-ostbc-abf",
            SchemeId::TasOstbcHbf => "tas-ostbc-hbf",
            SchemeId::IrsTasOstbcHbf => "irs-tas-ostbc-hbf",
        }
    }

    /// Whether the scheme selects two of `N_t` antennas.
    pub fn uses_selection(&self) -> bool {
        !matches!(self, SchemeId::Siso | SchemeId::Alamouti2x1)
    }

    /// Built-in implementation.
    pub fn scheme(&self) -> Arc<dyn Scheme> {
        match self {
            SchemeId::Siso => Arc::new(Siso),
            SchemeId::Alamouti2x1 => Arc::new(Alamouti2x1),
            SchemeId::TasOstbc => Arc::new(Tas::new(TxChain::Plain)),
            SchemeId::TasOstbcZf => Arc::new(Tas::new(TxChain::Zf)),
            SchemeId::TasOstbcAbf => Arc::new(Tas::new(TxChain::Abf)),
            SchemeId::TasOstbcHbf => Arc::new(Tas::new(TxChain::Hbf)),
            SchemeId::IrsTasOstbcHbf => Arc::new(IrsTasHbf),
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = SchemeId::ALL.iter().map(|i| i.name()).collect();
                Error::invalid("scheme", format!("unknown scheme `{s}` ({})", known.join("|")))
            })
    }
}

/// Channel seen by the detector for one frame.
#[derive(Debug, Clone, PartialEq)]
pub enum Link {
    /// Single transmit antenna, one tap per receive antenna. Two symbols go
    /// out on consecutive channel uses at full energy.
    Scalar(Vec<Complex>),
    /// Alamouti block over two effective taps.
    Alamouti(EffectiveLink),
}

pub trait Scheme: Send + Sync {
    fn id(&self) -> SchemeId;

    fn name(&self) -> &str {
        self.id().name()
    }

    /// Builds the frame's link. `frame` is the frame's base source; schemes
    /// open their own lanes on it.
    fn link(&self, cfg: &SimConfig, frame: &RandomSource) -> Result<Link>;
}

/// Name → scheme lookup.
#[derive(Clone, Default)]
pub struct SchemeRegistry {
    schemes: BTreeMap<String, Arc<dyn Scheme>>,
}

impl SchemeRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry holding all seven built-in schemes.
    pub fn builtin() -> Self {
        let mut r = Self::new();
        for id in SchemeId::ALL {
            r.register(id.scheme());
        }
        r
    }

    /// Adds a scheme, replacing any previous entry with the same name.
    pub fn register(&mut self, scheme: Arc<dyn Scheme>) -> Option<Arc<dyn Scheme>> {
        self.schemes.insert(scheme.name().to_string(), scheme)
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Scheme>> {
        self.schemes.get(name).cloned().ok_or_else(|| {
            Error::invalid(
                "scheme",
                format!("unknown scheme `{name}` ({})", self.names().join("|")),
            )
        })
    }

    pub fn names(&self) -> Vec<&str> {
        self.schemes.keys().map(String::as_str).collect()
    }
}

impl fmt::Debug for SchemeRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.schemes.keys()).finish()
    }
}

fn channel_lane(attempt: u64) -> Lane {
    if attempt == 0 {
        Lane::CHANNEL
    } else {
        Lane(Lane::REDRAW_BASE.0 + 2 * attempt)
    }
}

fn phase_lane(attempt: u64) -> Lane {
    if attempt == 0 {
        Lane::PHASES
    } else {
        Lane(Lane::REDRAW_BASE.0 + 2 * attempt + 1)
    }
}

/// Runs `build` on successive redraw attempts until it stops reporting a
/// singular Gram matrix.
fn with_redraws<T>(mut build: impl FnMut(u64) -> Result<T>) -> Result<T> {
    let mut last = None;
    for attempt in 0..=MAX_REDRAWS {
        match build(attempt) {
            Err(e @ Error::Singular { .. }) => last = Some(e),
            other => return other,
        }
    }
    Err(last.expect("at least one attempt"))
}

/// Uniform `[−π/2, π/2]` departure angles for the two active antennas.
fn draw_aods(frame: &RandomSource) -> [f64; 2] {
    let mut rng = frame.lane(Lane::ANGLES);
    let a = rng.uniform_range(-FRAC_PI_2, FRAC_PI_2);
    let b = rng.uniform_range(-FRAC_PI_2, FRAC_PI_2);
    [a, b]
}

/// One transmit antenna, one tap per receive antenna.
#[derive(Debug, Clone, Copy, Default)]
pub struct Siso;

impl Scheme for Siso {
    fn id(&self) -> SchemeId {
        SchemeId::Siso
    }

    fn link(&self, cfg: &SimConfig, frame: &RandomSource) -> Result<Link> {
        let h = gen_direct_channel(&mut frame.lane(Lane::CHANNEL), cfg.nr, 1)?;
        Ok(Link::Scalar(h.matrix().column(0)))
    }
}

/// Alamouti over two fixed antennas.
#[derive(Debug, Clone, Copy, Default)]
pub struct Alamouti2x1;

impl Scheme for Alamouti2x1 {
    fn id(&self) -> SchemeId {
        SchemeId::Alamouti2x1
    }

    fn link(&self, cfg: &SimConfig, frame: &RandomSource) -> Result<Link> {
        let h = gen_direct_channel(&mut frame.lane(Lane::CHANNEL), cfg.nr, 2)?;
        Ok(Link::Alamouti(EffectiveLink::from_matrix(h.matrix())?))
    }
}

/// Processing applied after antenna selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TxChain {
    Plain,
    Zf,
    Abf,
    Hbf,
}

/// Norm-based selection of two antennas followed by a [`TxChain`].
#[derive(Debug, Clone, Copy)]
pub struct Tas {
    chain: TxChain,
}

impl Tas {
    pub fn new(chain: TxChain) -> Self {
        Self { chain }
    }

    pub fn chain(&self) -> TxChain {
        self.chain
    }

    /// Selection and transmit processing on a given channel realization.
    pub fn link_for_channel(
        &self,
        cfg: &SimConfig,
        h: &DirectChannel,
        aods: [f64; 2],
    ) -> Result<(SelectionResult, EffectiveLink)> {
        let sel = select_antennas(h)?;
        let h_sel = h.matrix().select_columns(&sel.columns());
        let link = match self.chain {
            TxChain::Plain => EffectiveLink::from_matrix(&h_sel)?,
            TxChain::Zf => zf_effective_link(&h_sel, &zf_precoder(&h_sel, h.nt())?)?,
            TxChain::Abf => abf_effective_link(&h_sel, &cfg.ula()?, aods)?,
            TxChain::Hbf => {
                let prec = zf_precoder(&h_sel, h.nt())?;
                hbf_effective_link(&h_sel, &cfg.ula()?, aods, &prec)?
            }
        };
        Ok((sel, link))
    }
}

impl Scheme for Tas {
    fn id(&self) -> SchemeId {
        match self.chain {
            TxChain::Plain => SchemeId::TasOstbc,
            TxChain::Zf => SchemeId::TasOstbcZf,
            TxChain::Abf => SchemeId::TasOstbcAbf,
            TxChain::Hbf => SchemeId::TasOstbcHbf,
        }
    }

    fn link(&self, cfg: &SimConfig, frame: &RandomSource) -> Result<Link> {
        let aods = draw_aods(frame);
        with_redraws(|attempt| {
            let h = gen_direct_channel(&mut frame.lane(channel_lane(attempt)), cfg.nr, cfg.nt)?;
            Ok(Link::Alamouti(self.link_for_channel(cfg, &h, aods)?.1))
        })
    }
}

/// Hybrid-beamformed TAS-OSTBC through a reflecting surface with no direct
/// path.
#[derive(Debug, Clone, Copy, Default)]
pub struct IrsTasHbf;

impl IrsTasHbf {
    /// Cascade channel for one realization: draws `G`, `H` and the surface
    /// phases. `attempt` > 0 selects the redraw lanes.
    pub fn cascade(cfg: &SimConfig, frame: &RandomSource, attempt: u64) -> Result<DirectChannel> {
        let irs = gen_irs_channels(
            &mut frame.lane(channel_lane(attempt)),
            cfg.nr,
            cfg.nref,
            cfg.nt,
        )?;
        let context = match cfg.phase_strategy {
            PhaseStrategy::CoherentFirstColumn => {
                Some(irs.cascade_terms(irs.strongest_coherent_column()))
            }
            _ => None,
        };
        let mut phase_rng = frame.lane(phase_lane(attempt));
        let thetas = sample_phases(cfg.phase_strategy, &mut phase_rng, cfg.nref, context.as_deref())?;
        let phi = irs_phase_matrix(&IrsPhaseConfig {
            alpha: cfg.alpha,
            thetas,
            strategy: cfg.phase_strategy,
        })?;
        effective_irs_channel(&irs, &phi)
    }
}

impl Scheme for IrsTasHbf {
    fn id(&self) -> SchemeId {
        SchemeId::IrsTasOstbcHbf
    }

    fn link(&self, cfg: &SimConfig, frame: &RandomSource) -> Result<Link> {
        let aods = draw_aods(frame);
        let tas = Tas::new(TxChain::Hbf);
        with_redraws(|attempt| {
            let h_eff = Self::cascade(cfg, frame, attempt)?;
            Ok(Link::Alamouti(tas.link_for_channel(cfg, &h_eff, aods)?.1))
        })
    }
}
