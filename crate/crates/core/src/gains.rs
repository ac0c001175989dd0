//! SNR gain read-off between BER curves.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::curve_file::read_curve;
use crate::engine::BerCurve;
use crate::error::{Error, Result};

/// SNR (dB) at which a curve falls through `target`, interpolating linearly
/// in `(snr_db, log10 ber)` on the first segment that crosses it. Zero-BER
/// points carry no log-domain information and are skipped.
pub fn snr_at_ber(snr_db: &[f64], ber: &[f64], target: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = snr_db
        .iter()
        .zip(ber)
        .filter(|(_, b)| **b > 0.0)
        .map(|(s, b)| (*s, b.log10()))
        .collect();
    let t = target.log10();
    pts.windows(2).find_map(|w| {
        let ((s0, b0), (s1, b1)) = (w[0], w[1]);
        if b0 >= t && b1 < t {
            Some(s0 + (t - b0) * (s1 - s0) / (b1 - b0))
        } else {
            None
        }
    })
}

fn crossing(curve: &BerCurve, label: &str, target: f64) -> Result<f64> {
    snr_at_ber(&curve.snrs(), &curve.bers(), target).ok_or_else(|| Error::Range {
        curve: label.to_string(),
        target,
    })
}

/// Horizontal distance `SNR_base − SNR_improved` at `target_ber`; positive
/// when `improved` needs less SNR.
pub fn extract_gain(base: &BerCurve, improved: &BerCurve, target_ber: f64) -> Result<f64> {
    if !(target_ber > 0.0 && target_ber < 0.5) {
        return Err(Error::invalid("ber", format!("target {target_ber} is outside (0, 0.5)")));
    }
    Ok(crossing(base, "base", target_ber)? - crossing(improved, "improved", target_ber)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GainRow {
    pub label: String,
    pub path: PathBuf,
    pub gain_db: f64,
}

/// Gain of every curve file against the base file.
pub fn gains_report(curve_paths: &[PathBuf], base_path: &Path, target_ber: f64) -> Result<Vec<GainRow>> {
    let base = read_curve(base_path)?;
    let base_label = base_path.display().to_string();
    curve_paths
        .iter()
        .map(|p| {
            let curve = read_curve(p)?;
            let label = p.display().to_string();
            let gain = extract_gain(&base, &curve, target_ber).map_err(|e| match e {
                Error::Range { curve, target } => Error::Range {
                    curve: if curve == "base" { base_label.clone() } else { label.clone() },
                    target,
                },
                other => other,
            })?;
            Ok(GainRow {
                label: format!("{} ({})", label, curve.scheme),
                path: p.clone(),
                gain_db: gain,
            })
        })
        .collect()
}

/// Aligned two-column table.
pub fn render_table(rows: &[GainRow], target_ber: f64) -> String {
    let width = rows.iter().map(|r| r.label.len()).max().unwrap_or(5).max(5);
    let mut s = String::new();
    writeln!(s, "{:<width$}  gain_db @ BER {target_ber:e}", "curve").unwrap();
    for r in rows {
        writeln!(s, "{:<width$}  {:>8.3}", r.label, r.gain_db).unwrap();
    }
    s
}

pub fn render_csv(rows: &[GainRow]) -> String {
    let mut s = String::from("curve,gain_db\n");
    for r in rows {
        writeln!(s, "{},{}", r.path.display(), r.gain_db).unwrap();
    }
    s
}
