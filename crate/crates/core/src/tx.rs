//! Transmit-side processing: antenna selection, zero-forcing precoding and
//! ULA analog beamforming, composed into the effective channel seen by the
//! Alamouti combiner.

use std::f64::consts::{FRAC_1_SQRT_2, TAU};

use crate::channel::DirectChannel;
use crate::error::{Error, Result};
use crate::numerics::{Complex, ComplexMatrix};

/// All `C(nt, na)` index subsets (1-based) in lexicographic order.
pub fn enumerate_combinations(nt: usize, na: usize) -> Result<Vec<Vec<usize>>> {
    if na == 0 || na > nt {
        return Err(Error::invalid(
            "na",
            format!("cannot choose {na} of {nt} antennas"),
        ));
    }
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (1..=na).collect();
    loop {
        out.push(idx.clone());
        // rightmost position that can still advance
        let Some(pos) = (0..na).rev().find(|&i| idx[i] < nt - (na - 1 - i)) else {
            return Ok(out);
        };
        idx[pos] += 1;
        for i in pos + 1..na {
            idx[i] = idx[i - 1] + 1;
        }
    }
}

/// Antenna pair chosen for Alamouti transmission.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionResult {
    /// 1-based, `p1 < p2`.
    pub p1: usize,
    pub p2: usize,
    /// Squared Frobenius norm of the selected sub-channel.
    pub metric: f64,
}

impl SelectionResult {
    /// 0-based column indices.
    pub fn columns(&self) -> [usize; 2] {
        [self.p1 - 1, self.p2 - 1]
    }
}

/// Subset of `na` columns maximizing the squared Frobenius norm. Ties keep
/// the lexicographically smallest subset.
pub fn select_subset(h: &DirectChannel, na: usize) -> Result<(Vec<usize>, f64)> {
    let m = h.matrix();
    let col_power: Vec<f64> = (0..m.cols())
        .map(|c| m.column(c).iter().map(|v| v.norm_sqr()).sum())
        .collect();
    let mut best: Option<(Vec<usize>, f64)> = None;
    for combo in enumerate_combinations(m.cols(), na)? {
        let metric: f64 = combo.iter().map(|&p| col_power[p - 1]).sum();
        if best.as_ref().is_none_or(|(_, b)| metric > *b) {
            best = Some((combo, metric));
        }
    }
    Ok(best.expect("at least one combination"))
}

/// Norm-based selection of two transmit antennas.
pub fn select_antennas(h: &DirectChannel) -> Result<SelectionResult> {
    let (combo, metric) = select_subset(h, 2)?;
    Ok(SelectionResult {
        p1: combo[0],
        p2: combo[1],
        metric,
    })
}

/// Zero-forcing precoder for the selected `N_r × 2` sub-channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ZfPrecoder {
    /// Unscaled `Hᴴ (H Hᴴ)⁻¹`, shape `2 × N_r`.
    pub p_zf: ComplexMatrix,
    /// Power scaling `√(N_t / tr(P Pᴴ))`.
    pub beta: f64,
    /// Diagonal restriction of `β·P_zf`, shape `2 × 2`.
    pub p_diag: ComplexMatrix,
}

impl ZfPrecoder {
    pub fn diag_entries(&self) -> [Complex; 2] {
        [self.p_diag[(0, 0)], self.p_diag[(1, 1)]]
    }
}

/// Builds the power-scaled ZF precoder. `nt_total` is the full transmit
/// antenna count, not the number of active antennas.
pub fn zf_precoder(h_sel: &ComplexMatrix, nt_total: usize) -> Result<ZfPrecoder> {
    if h_sel.cols() != 2 {
        return Err(Error::DimensionMismatch {
            op: "zf_precoder",
            lhs: h_sel.shape(),
            rhs: (h_sel.rows(), 2),
        });
    }
    let p_zf = h_sel.hermitian().matmul(&h_sel.invert_gram()?)?;
    let power = p_zf.matmul(&p_zf.hermitian())?.trace().re;
    let beta = (nt_total as f64 / power).sqrt();
    // one receive antenna: P is a column; otherwise take its main diagonal
    let diag = if p_zf.cols() == 1 {
        [p_zf[(0, 0)], p_zf[(1, 0)]]
    } else {
        [p_zf[(0, 0)], p_zf[(1, 1)]]
    };
    let p_diag = ComplexMatrix::diagonal(&[diag[0] * beta, diag[1] * beta]);
    Ok(ZfPrecoder { p_zf, beta, p_diag })
}

/// Uniform linear array attached to each active antenna.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UlaConfig {
    pub elements: usize,
    pub spacing_m: f64,
    pub wavelength_m: f64,
}

impl UlaConfig {
    /// Half-wavelength array.
    pub fn half_wavelength(elements: usize, wavelength_m: f64) -> Result<Self> {
        Self::new(elements, wavelength_m / 2.0, wavelength_m)
    }

    pub fn new(elements: usize, spacing_m: f64, wavelength_m: f64) -> Result<Self> {
        if elements == 0 {
            return Err(Error::invalid("lt", "array needs at least one element"));
        }
        if !(wavelength_m > 0.0) || !wavelength_m.is_finite() {
            return Err(Error::invalid("lambda", format!("{wavelength_m} m is not a wavelength")));
        }
        if !(spacing_m > 0.0) || spacing_m > wavelength_m / 2.0 * (1.0 + 1e-12) {
            return Err(Error::invalid(
                "d",
                format!("spacing {spacing_m} m must lie in (0, λ/2 = {} m]", wavelength_m / 2.0),
            ));
        }
        Ok(Self {
            elements,
            spacing_m,
            wavelength_m,
        })
    }

    pub fn wavenumber(&self) -> f64 {
        TAU / self.wavelength_m
    }

    /// Phase increment between adjacent elements toward `theta`.
    pub fn phase_step(&self, theta: f64) -> f64 {
        self.wavenumber() * self.spacing_m * theta.sin()
    }
}

/// Unnormalized steering vector `[1, e^{jδ}, …, e^{j(L−1)δ}]`.
pub fn array_response(theta: f64, cfg: &UlaConfig) -> Vec<Complex> {
    let delta = cfg.phase_step(theta);
    (0..cfg.elements)
        .map(|l| Complex::from_polar(1.0, l as f64 * delta))
        .collect()
}

/// Unit-norm progressive-phase weight steered at `theta`.
pub fn ula_weight(theta: f64, cfg: &UlaConfig) -> Vec<Complex> {
    let norm = 1.0 / (cfg.elements as f64).sqrt();
    array_response(theta, cfg)
        .into_iter()
        .map(|a| a * norm)
        .collect()
}

/// `wᴴ a`
pub fn inner(w: &[Complex], a: &[Complex]) -> Complex {
    w.iter().zip(a).map(|(w, a)| w.conj() * a).sum()
}

/// Effective per-antenna channel taps seen by the Alamouti combiner, one
/// pair per receive antenna.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveLink {
    pub h_eff: Vec<[Complex; 2]>,
    /// Per-antenna transmit amplitude `√(E_s/2)`.
    pub energy_factor: f64,
}

impl EffectiveLink {
    /// Plain two-antenna link over an `N_r × 2` channel.
    pub fn from_matrix(h: &ComplexMatrix) -> Result<Self> {
        if h.cols() != 2 {
            return Err(Error::DimensionMismatch {
                op: "effective_link",
                lhs: h.shape(),
                rhs: (h.rows(), 2),
            });
        }
        Ok(Self {
            h_eff: (0..h.rows()).map(|r| [h[(r, 0)], h[(r, 1)]]).collect(),
            energy_factor: FRAC_1_SQRT_2,
        })
    }

    /// Scales the tap of antenna `i` by `gains[i]` on every receive row.
    pub fn per_antenna(mut self, gains: [Complex; 2]) -> Self {
        for row in &mut self.h_eff {
            row[0] *= gains[0];
            row[1] *= gains[1];
        }
        self
    }

    pub fn channel_gain(&self) -> f64 {
        self.h_eff
            .iter()
            .map(|r| r[0].norm_sqr() + r[1].norm_sqr())
            .sum()
    }
}

/// ZF-precoded link `H_sel · P_D`.
pub fn zf_effective_link(h_sel: &ComplexMatrix, prec: &ZfPrecoder) -> Result<EffectiveLink> {
    Ok(EffectiveLink::from_matrix(h_sel)?.per_antenna(prec.diag_entries()))
}

/// Matched analog beamforming: antenna `i` steers its subarray at
/// `theta_aods[i]`, and the receiver sits on that beam. Each tap picks up the
/// array gain `w(θ)ᴴ a(θ) = √L_T`.
pub fn abf_effective_link(
    h_sel: &ComplexMatrix,
    ula: &UlaConfig,
    theta_aods: [f64; 2],
) -> Result<EffectiveLink> {
    let gains = theta_aods.map(|t| inner(&ula_weight(t, ula), &array_response(t, ula)));
    Ok(EffectiveLink::from_matrix(h_sel)?.per_antenna(gains))
}

/// Hybrid beamforming: matched analog beams followed by the diagonal ZF
/// precoder. Receiver-side AGC by `β√L_T` scales signal and noise alike and
/// is not applied.
pub fn hbf_effective_link(
    h_sel: &ComplexMatrix,
    ula: &UlaConfig,
    theta_aods: [f64; 2],
    prec: &ZfPrecoder,
) -> Result<EffectiveLink> {
    Ok(abf_effective_link(h_sel, ula, theta_aods)?.per_antenna(prec.diag_entries()))
}
