//! CSV persistence of BER curves.
//!
//! ```text
//! # linksim ber curve
//! # scheme=tas-ostbc
//! # snr=0,2,4
//! # ...
//! scheme,snr_db,total_bits,bit_errors,ber,ci_low,ci_high
//! tas-ostbc,0,400000,31127,0.0778175,0.0769906...,0.0786512...
//! ```
//!
//! Comment lines carry the full run configuration as `key=value` pairs, so
//! reading a file rebuilds the exact [`BerCurve`] that was written.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::engine::{BerCurve, BerPoint};
use crate::error::{Error, Result};
use crate::runspec::{from_pairs, RunSpec};

pub const HEADER: &str = "scheme,snr_db,total_bits,bit_errors,ber,ci_low,ci_high";
const COLUMNS: [&str; 7] = [
    "scheme",
    "snr_db",
    "total_bits",
    "bit_errors",
    "ber",
    "ci_low",
    "ci_high",
];

/// Renders a curve in the CSV format.
pub fn render_curve(curve: &BerCurve) -> String {
    let spec = RunSpec {
        scheme: curve.scheme,
        config: curve.config.clone(),
        out: None,
    };
    let mut s = String::from("# linksim ber curve\n");
    for line in spec.to_lines() {
        writeln!(s, "# {line}").unwrap();
    }
    s.push_str(HEADER);
    s.push('\n');
    for p in &curve.points {
        writeln!(
            s,
            "{},{},{},{},{},{},{}",
            curve.scheme, p.snr_db, p.total_bits, p.bit_errors, p.ber, p.ci_low, p.ci_high
        )
        .unwrap();
    }
    s
}

pub fn write_curve(curve: &BerCurve, path: &Path) -> Result<()> {
    if curve.points.is_empty() {
        return Err(Error::invalid("curve", "nothing to write"));
    }
    fs::write(path, render_curve(curve)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_curve(path: &Path) -> Result<BerCurve> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_curve(&text)
}

/// Parses and re-validates the CSV text of a curve.
pub fn parse_curve(text: &str) -> Result<BerCurve> {
    let mut settings: Vec<(String, String)> = Vec::new();
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let n = idx + 1;
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((k, v)) = comment.split_once('=') {
                settings.push((k.trim().to_string(), v.trim().to_string()));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        match &header {
            None => {
                for col in COLUMNS {
                    if !fields.contains(&col) {
                        return Err(Error::parse(n, format!("missing column `{col}`")));
                    }
                }
                header = Some(fields.iter().map(|s| s.to_string()).collect());
            }
            Some(h) => {
                if fields.len() != h.len() {
                    return Err(Error::parse(
                        n,
                        format!("expected {} fields, found {}", h.len(), fields.len()),
                    ));
                }
                rows.push((n, fields.iter().map(|s| s.to_string()).collect::<Vec<_>>()));
            }
        }
    }
    let header = header.ok_or_else(|| Error::parse(0, "missing header row"))?;
    let spec = from_pairs(settings.iter().map(|(k, v)| (k.as_str(), v.as_str())))
        .map_err(|e| Error::parse(0, format!("bad configuration comments: {e}")))?;
    let col = |name: &str| header.iter().position(|h| h == name).expect("checked above");

    let mut points = Vec::with_capacity(rows.len());
    for (n, fields) in rows {
        let get = |name: &str| fields[col(name)].as_str();
        let num = |name: &str| -> Result<f64> {
            get(name)
                .parse::<f64>()
                .map_err(|_| Error::parse(n, format!("column `{name}`: `{}` is not a number", get(name))))
        };
        let count = |name: &str| -> Result<u64> {
            get(name)
                .parse::<u64>()
                .map_err(|_| Error::parse(n, format!("column `{name}`: `{}` is not a count", get(name))))
        };
        if get("scheme") != spec.scheme.name() {
            return Err(Error::parse(
                n,
                format!("scheme `{}` does not match `{}`", get("scheme"), spec.scheme),
            ));
        }
        let p = BerPoint {
            snr_db: num("snr_db")?,
            total_bits: count("total_bits")?,
            bit_errors: count("bit_errors")?,
            ber: num("ber")?,
            ci_low: num("ci_low")?,
            ci_high: num("ci_high")?,
        };
        if p.total_bits == 0 || p.bit_errors > p.total_bits {
            return Err(Error::parse(n, "bit_errors must lie in [0, total_bits] with total_bits > 0"));
        }
        let expect = p.bit_errors as f64 / p.total_bits as f64;
        if (p.ber - expect).abs() > 1e-12 * expect.max(1e-300) {
            return Err(Error::parse(n, format!("ber {} != bit_errors/total_bits", p.ber)));
        }
        if !(p.ci_low <= p.ber && p.ber <= p.ci_high) {
            return Err(Error::parse(n, "confidence interval does not bracket ber"));
        }
        if let Some(prev) = points.last().map(|q: &BerPoint| q.snr_db) {
            if p.snr_db <= prev {
                return Err(Error::parse(n, "rows must be sorted by increasing snr_db"));
            }
        }
        points.push(p);
    }
    if points.is_empty() {
        return Err(Error::parse(0, "no data rows"));
    }
    Ok(BerCurve {
        scheme: spec.scheme,
        config: spec.config,
        points,
    })
}
