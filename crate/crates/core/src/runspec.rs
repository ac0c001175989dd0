//! Flat `key=value` run configuration.
//!
//! Recognized keys: `scheme`, `snr`, `frames`, `packets`, `seed`, `nt`, `nr`,
//! `lt`, `nref`, `alpha`, `phase`, `lambda`, `d`, `out`. Omitted keys fall
//! back to the defaults of [`SimConfig::default`]. Blank lines and lines
//! starting with `#` are ignored.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::engine::SimConfig;
use crate::error::{Error, Result};
use crate::scheme::SchemeId;

pub const KEYS: [&str; 14] = [
    "scheme", "snr", "frames", "packets", "seed", "nt", "nr", "lt", "nref", "alpha", "phase",
    "lambda", "d", "out",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunSpec {
    pub scheme: SchemeId,
    pub config: SimConfig,
    pub out: Option<PathBuf>,
}

/// Expands `start:step:stop` (inclusive) or a comma-separated list.
pub fn parse_snr_grid(text: &str) -> Result<Vec<f64>> {
    let num = |s: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|_| Error::invalid("snr", format!("`{s}` is not a number")))
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop) = (num(start)?, num(step)?, num(stop)?);
            if !(step > 0.0) || stop < start {
                return Err(Error::invalid("snr", format!("bad range `{text}`")));
            }
            let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..n).map(|i| start + i as f64 * step).collect())
        }
        [_] => text.split(',').map(num).collect(),
        _ => Err(Error::invalid("snr", format!("expected start:step:stop, got `{text}`"))),
    }
}

fn value<T: FromStr>(key: &str, raw: &str) -> Result<T> {
    raw.parse()
        .map_err(|_| Error::invalid(key, format!("cannot parse `{raw}`")))
}

/// Builds a validated spec from `(key, value)` pairs; later pairs win.
pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, &'a str)>) -> Result<RunSpec> {
    let mut cfg = SimConfig::default();
    let mut scheme = None;
    let mut out = None;
    let mut spacing = None;
    for (key, raw) in pairs {
        let raw = raw.trim();
        match key.trim() {
            "scheme" => scheme = Some(raw.parse::<SchemeId>()?),
            "snr" => cfg.snr_grid_db = parse_snr_grid(raw)?,
            "frames" => cfg.frames_per_packet = value("frames", raw)?,
            "packets" => cfg.packets = value("packets", raw)?,
            "seed" => cfg.seed = value("seed", raw)?,
            "nt" => cfg.nt = value("nt", raw)?,
            "nr" => cfg.nr = value("nr", raw)?,
            "lt" => cfg.lt = value("lt", raw)?,
            "nref" => cfg.nref = value("nref", raw)?,
            "alpha" => cfg.alpha = value("alpha", raw)?,
            "phase" => cfg.phase_strategy = raw.parse()?,
            "lambda" => cfg.lambda_m = value("lambda", raw)?,
            "d" => spacing = Some(value::<f64>("d", raw)?),
            "out" => out = Some(PathBuf::from(raw)),
            other => {
                return Err(Error::invalid(
                    other,
                    format!("unknown key (expected one of {})", KEYS.join(", ")),
                ))
            }
        }
    }
    cfg.d_m = spacing.unwrap_or(cfg.lambda_m / 2.0);
    let scheme = scheme.ok_or_else(|| Error::invalid("scheme", "missing"))?;
    cfg.validate(scheme)?;
    Ok(RunSpec {
        scheme,
        config: cfg,
        out,
    })
}

/// Splits `key=value` lines without interpreting them.
pub fn parse_pairs(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(n + 1, format!("expected key=value, got `{line}`")))?;
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

/// Parses `key=value` lines into a validated spec.
pub fn parse_runspec(text: &str) -> Result<RunSpec> {
    let pairs = parse_pairs(text)?;
    from_pairs(pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))
}

impl RunSpec {
    /// Canonical `key=value` lines, excluding `out`. Floats use shortest
    /// round-trip formatting and the grid is listed explicitly.
    pub fn to_lines(&self) -> Vec<String> {
        let c = &self.config;
        let mut grid = String::new();
        for (i, s) in c.snr_grid_db.iter().enumerate() {
            if i > 0 {
                grid.push(',');
            }
            write!(grid, "{s}").unwrap();
        }
        vec![
            format!("scheme={}", self.scheme),
            format!("snr={grid}"),
            format!("frames={}", c.frames_per_packet),
            format!("packets={}", c.packets),
            format!("seed={}", c.seed),
            format!("nt={}", c.nt),
            format!("nr={}", c.nr),
            format!("lt={}", c.lt),
            format!("nref={}", c.nref),
            format!("alpha={}", c.alpha),
            format!("phase={}", c.phase_strategy),
            format!("lambda={}", c.lambda_m),
            format!("d={}", c.d_m),
        ]
    }
}
