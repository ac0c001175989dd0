//! Acceptance gate: reproduces the reference BER behaviour at desk scale and
//! prints one PASS/FAIL line per criterion. Exits non-zero if any fails.
//!
//! Run with `cargo test -p linksim-core --test acceptance --release`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::time::Instant;

use linksim_core::channel::{
    effective_irs_channel, gen_irs_channels, irs_phase_matrix, IrsPhaseConfig, PhaseStrategy,
};
use linksim_core::curve_file::{read_curve, render_curve, write_curve};
use linksim_core::engine::{run_point, run_sweep, with_workers, wilson_ci, BerCurve};
use linksim_core::gains::{extract_gain, snr_at_ber};
use linksim_core::numerics::{Complex, ComplexMatrix, RandomSource};
use linksim_core::phy::{alamouti_encode, qam4_demap, qam4_map};
use linksim_core::runspec::parse_runspec;
use linksim_core::scheme::{IrsTasHbf, SchemeId};
use linksim_core::tx::{
    array_response, inner, select_antennas, ula_weight, zf_precoder, UlaConfig,
};
use linksim_core::{DirectChannel, SimConfig};

/// Desk-scale frame count per SNR point.
const FRAMES: u64 = 200_000;
const SEED: u64 = 1;

type Outcome = Result<String, String>;

fn grid(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(f64::from).collect()
}

fn config(lt: usize, nref: usize, snr: Vec<f64>) -> SimConfig {
    SimConfig {
        snr_grid_db: snr,
        frames_per_packet: FRAMES,
        packets: 1,
        seed: SEED,
        lt,
        nref,
        ..SimConfig::default()
    }
}

/// Sweeps shared between criteria.
#[derive(Default)]
struct Sweeps {
    cache: HashMap<String, BerCurve>,
}

impl Sweeps {
    fn get(&mut self, id: SchemeId, cfg: SimConfig) -> BerCurve {
        let key = format!("{id} {cfg:?}");
        self.cache
            .entry(key)
            .or_insert_with(|| run_sweep(id.scheme().as_ref(), &cfg).expect("sweep"))
            .clone()
    }
}

fn gain(base: &BerCurve, improved: &BerCurve, target: f64) -> Result<f64, String> {
    extract_gain(base, improved, target).map_err(|e| e.to_string())
}

fn within(label: &str, value: f64, expect: f64, tol: f64) -> Result<String, String> {
    let line = format!("{label} = {value:.3} dB (expect {expect:.2} ± {tol})");
    if (value - expect).abs() <= tol {
        Ok(line)
    } else {
        Err(line)
    }
}

fn collect(parts: Vec<Result<String, String>>) -> Outcome {
    let ok = parts.iter().all(|p| p.is_ok());
    let text = parts
        .into_iter()
        .map(|p| match p {
            Ok(s) => s,
            Err(s) => format!("!! {s}"),
        })
        .collect::<Vec<_>>()
        .join("; ");
    if ok {
        Ok(text)
    } else {
        Err(text)
    }
}

// Closed-form BER of 4-QAM Alamouti 2x1 over i.i.d. Rayleigh with unit symbol
// energy: each branch carries SNR/2 and each bit sees half the symbol SNR, so
// the per-bit MRC branch SNR is γ̄ = SNR/4 and
// P = ((1−μ)/2)² (1 + 2·(1+μ)/2), μ = √(γ̄/(1+γ̄)).
fn alamouti_ber_closed_form(snr_db: f64) -> f64 {
    let g = 10f64.powf(snr_db / 10.0) / 4.0;
    let mu = (g / (1.0 + g)).sqrt();
    let a = (1.0 - mu) / 2.0;
    let b = (1.0 + mu) / 2.0;
    a * a * (1.0 + 2.0 * b)
}

fn c1_alamouti_oracle(_: &mut Sweeps) -> Outcome {
    let cfg = config(1, 16, vec![0.0, 4.0, 8.0, 12.0, 16.0]);
    let curve = run_sweep(SchemeId::Alamouti2x1.scheme().as_ref(), &cfg).map_err(|e| e.to_string())?;
    collect(
        curve
            .points
            .iter()
            .map(|p| {
                let theory = alamouti_ber_closed_form(p.snr_db);
                let sigma = (theory * (1.0 - theory) / p.total_bits as f64).sqrt();
                let line = format!(
                    "{} dB: sim {:.4e} vs {:.4e} ({:+.2}σ)",
                    p.snr_db,
                    p.ber,
                    theory,
                    (p.ber - theory) / sigma
                );
                if (p.ber - theory).abs() <= 3.0 * sigma {
                    Ok(line)
                } else {
                    Err(line)
                }
            })
            .collect(),
    )
}

fn abf_grid() -> Vec<f64> {
    grid(-4, 14)
}

fn c2_abf_shift(sweeps: &mut Sweeps) -> Outcome {
    let mut parts = Vec::new();
    let shift = 10.0 * 4f64.log10();
    let abf = SchemeId::TasOstbcAbf.scheme();
    for seed in [1, 2, 3] {
        for snr in [0.0, 3.0, 6.0] {
            let four = SimConfig { seed, ..config(4, 16, vec![snr]) };
            let one = SimConfig { seed, ..config(1, 16, vec![snr + shift]) };
            let a = run_point(abf.as_ref(), &four, snr).map_err(|e| e.to_string())?;
            let b = run_point(abf.as_ref(), &one, snr + shift).map_err(|e| e.to_string())?;
            let line = format!("seed {seed} @{snr} dB: {} vs {}", a.bit_errors, b.bit_errors);
            parts.push(if a.bit_errors == b.bit_errors { Ok(line) } else { Err(line) });
        }
    }
    let base = sweeps.get(SchemeId::TasOstbcAbf, config(1, 16, abf_grid()));
    for (lt, expect) in [(2usize, 3.01), (4, 6.02), (8, 9.03)] {
        let curve = sweeps.get(SchemeId::TasOstbcAbf, config(lt, 16, abf_grid()));
        parts.push(
            gain(&base, &curve, 1e-3)
                .and_then(|g| within(&format!("L_T={lt} gain"), g, expect, 0.3)),
        );
    }
    collect(parts)
}

fn zf_gain(sweeps: &mut Sweeps) -> Result<f64, String> {
    let tas = sweeps.get(SchemeId::TasOstbc, config(1, 16, grid(0, 16)));
    let zf = sweeps.get(SchemeId::TasOstbcZf, config(1, 16, grid(0, 16)));
    gain(&tas, &zf, 1e-3)
}

fn c3_zf_gain(sweeps: &mut Sweeps) -> Outcome {
    within("ZF gain @1e-3", zf_gain(sweeps)?, 3.4, 0.6)
}

fn c4_hbf_vs_abf(sweeps: &mut Sweeps) -> Outcome {
    let zf = zf_gain(sweeps)?;
    let mut parts = Vec::new();
    for lt in [2usize, 4, 8] {
        let abf = sweeps.get(SchemeId::TasOstbcAbf, config(lt, 16, abf_grid()));
        let hbf = sweeps.get(SchemeId::TasOstbcHbf, config(lt, 16, abf_grid()));
        let mut separated = 0;
        for (a, h) in abf.points.iter().zip(&hbf.points) {
            let disjoint = a.ci_high < h.ci_low || h.ci_high < a.ci_low;
            if disjoint {
                separated += 1;
                if h.ber >= a.ber {
                    parts.push(Err(format!(
                        "L_T={lt} @{} dB: HBF {:.3e} >= ABF {:.3e}",
                        a.snr_db, h.ber, a.ber
                    )));
                }
            }
        }
        parts.push(Ok(format!("L_T={lt}: HBF below ABF at all {separated} separated points")));
        parts.push(
            gain(&abf, &hbf, 1e-3)
                .and_then(|g| within(&format!("L_T={lt} HBF-ABF gap"), g, zf, 0.5)),
        );
    }
    collect(parts)
}

fn c5_irs_gain(sweeps: &mut Sweeps) -> Outcome {
    let g = grid(-22, -1);
    let base = sweeps.get(SchemeId::TasOstbcHbf, config(8, 16, g.clone()));
    let mut parts = Vec::new();
    for (nref, expect) in [(4usize, 6.0), (16, 12.0)] {
        let irs = sweeps.get(SchemeId::IrsTasOstbcHbf, config(8, nref, g.clone()));
        parts.push(
            gain(&base, &irs, 1e-2)
                .and_then(|v| within(&format!("N_REF={nref} gain @1e-2"), v, expect, 1.0)),
        );
    }
    // deep-gain sizes: variance of one cascade entry
    for nref in [64usize, 256] {
        let cfg = SimConfig { nref, ..config(8, nref, vec![0.0]) };
        let n = 100_000u64;
        let var: f64 = (0..n)
            .map(|i| {
                let frame = RandomSource::new(SEED, i);
                IrsTasHbf::cascade(&cfg, &frame, 0).unwrap().matrix()[(0, 0)].norm_sqr()
            })
            .sum::<f64>()
            / n as f64;
        let expect = cfg.alpha * cfg.alpha * nref as f64;
        let rel = (var - expect).abs() / expect;
        let line = format!("N_REF={nref} H_eff variance {var:.2} (expect {expect}, {:.2}%)", rel * 100.0);
        parts.push(if rel <= 0.05 { Ok(line) } else { Err(line) });
    }
    collect(parts)
}

fn slope(curve: &BerCurve) -> Result<f64, String> {
    let s2 = snr_at_ber(&curve.snrs(), &curve.bers(), 1e-2)
        .ok_or_else(|| format!("{} never reaches 1e-2", curve.scheme))?;
    let s4 = snr_at_ber(&curve.snrs(), &curve.bers(), 1e-4)
        .ok_or_else(|| format!("{} never reaches 1e-4", curve.scheme))?;
    Ok(2.0 / (s4 - s2))
}

fn c6_diversity(sweeps: &mut Sweeps) -> Outcome {
    let tas = sweeps.get(SchemeId::TasOstbc, config(1, 16, grid(0, 16)));
    let ala = sweeps.get(SchemeId::Alamouti2x1, config(1, 16, grid(0, 26)));
    let (st, sa) = (slope(&tas)?, slope(&ala)?);
    let line = format!(
        "slopes TAS {st:.4} vs Alamouti {sa:.4} dec/dB, ratio {:.3} (need >= 1.5)",
        st / sa
    );
    if st >= 1.5 * sa {
        Ok(line)
    } else {
        Err(line)
    }
}

fn check(cond: bool, what: &str, failures: &mut Vec<String>) {
    if !cond {
        failures.push(what.to_string());
    }
}

fn c7_properties(_: &mut Sweeps) -> Outcome {
    let start = Instant::now();
    let mut fail = Vec::new();
    let mut rng = RandomSource::new(SEED, 7);

    // selection against an independent brute force over all pairs
    for _ in 0..1000 {
        let h = rng.sample_complex_gaussian(1, 4).unwrap();
        let sel = select_antennas(&DirectChannel(h.clone())).unwrap();
        let mut best = (0, 0, f64::NEG_INFINITY);
        for a in 0..4 {
            for b in a + 1..4 {
                let m = h[(0, a)].norm_sqr() + h[(0, b)].norm_sqr();
                if m > best.2 {
                    best = (a + 1, b + 1, m);
                }
            }
        }
        check(
            (sel.p1, sel.p2) == (best.0, best.1) && (sel.metric - best.2).abs() < 1e-12,
            "selection vs brute force",
            &mut fail,
        );
    }

    for _ in 0..1000 {
        let h = rng.sample_complex_gaussian(1, 2).unwrap();
        let p = zf_precoder(&h, 4).unwrap();
        let hp = h.matmul(&p.p_zf).unwrap()[(0, 0)];
        check((hp - Complex::new(1.0, 0.0)).norm() < 1e-10, "H_sel P_zf = 1", &mut fail);
        let tr = p.p_zf.matmul(&p.p_zf.hermitian()).unwrap().trace().re;
        check((p.beta * p.beta * tr - 4.0).abs() < 1e-10, "beta^2 trace = N_t", &mut fail);
    }

    for lt in [1usize, 2, 3, 8, 32] {
        let ula = UlaConfig::half_wavelength(lt, 0.005).unwrap();
        for _ in 0..100 {
            let t = rng.uniform_range(-PI / 2.0, PI / 2.0);
            let g = inner(&ula_weight(t, &ula), &array_response(t, &ula));
            check(
                (g - Complex::new((lt as f64).sqrt(), 0.0)).norm() < 1e-12,
                "matched ULA gain",
                &mut fail,
            );
        }
    }

    for _ in 0..200 {
        let nref = 1 + (rng.uniform() * 20.0) as usize;
        let irs = gen_irs_channels(&mut rng, 1, nref, 4).unwrap();
        let thetas = rng.sample_uniform_phase(nref).unwrap();
        let phi = irs_phase_matrix(&IrsPhaseConfig {
            alpha: 0.7,
            thetas: thetas.clone(),
            strategy: PhaseStrategy::UniformRandom,
        })
        .unwrap();
        let eff = effective_irs_channel(&irs, &phi).unwrap();
        for t in 0..4 {
            let brute: Complex = (0..nref)
                .map(|r| irs.g[(0, r)] * Complex::from_polar(0.7, thetas[r]) * irs.h[(r, t)])
                .sum();
            check((eff.matrix()[(0, t)] - brute).norm() < 1e-12, "cascade sum", &mut fail);
        }
    }

    let alphabet = [[0u8, 0], [0, 1], [1, 0], [1, 1]];
    let mut images = Vec::new();
    for b in alphabet {
        let s = qam4_map(&b).unwrap();
        check(qam4_demap(s) == b, "qam roundtrip", &mut fail);
        images.push((s.re.to_bits(), s.im.to_bits()));
    }
    images.sort_unstable();
    images.dedup();
    check(images.len() == 4, "qam injective", &mut fail);

    for _ in 0..1000 {
        let (x1, x2) = (rng.complex_gaussian(), rng.complex_gaussian());
        let x = alamouti_encode(x1, x2).to_matrix();
        let gram = x.hermitian().matmul(&x).unwrap();
        let expect = ComplexMatrix::identity(2).scale(Complex::new(x1.norm_sqr() + x2.norm_sqr(), 0.0));
        check((&gram - &expect).frobenius_norm_sq().sqrt() < 1e-12, "orthogonality", &mut fail);
    }

    for (k, n) in [(10u64, 1000u64), (0, 50), (3, 7), (999, 1000)] {
        let (nf, p, z) = (n as f64, k as f64 / n as f64, 1.96f64);
        let c = (p + z * z / (2.0 * nf)) / (1.0 + z * z / nf);
        let h = z / (1.0 + z * z / nf) * (p * (1.0 - p) / nf + z * z / (4.0 * nf * nf)).sqrt();
        let (lo, hi) = wilson_ci(k, n, z);
        check(
            (lo - (c - h).max(0.0)).abs() < 1e-12 && (hi - (c + h)).abs() < 1e-12,
            "wilson formula",
            &mut fail,
        );
    }

    let elapsed = start.elapsed().as_secs_f64();
    check(elapsed < 5.0, "suite under 5 s", &mut fail);
    fail.dedup();
    if fail.is_empty() {
        Ok(format!("all property checks exact ({elapsed:.2} s)"))
    } else {
        Err(format!("failed: {}", fail.join(", ")))
    }
}

fn c8_reproducible(_: &mut Sweeps) -> Outcome {
    let spec = parse_runspec(
        "scheme=irs-tas-ostbc-hbf\nsnr=-20:2:-4\nframes=5000\npackets=4\nseed=2024\nlt=8\nnref=4",
    )
    .map_err(|e| e.to_string())?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut files = Vec::new();
    for (run, workers) in [1usize, 8, 1, 8].into_iter().enumerate() {
        let curve = with_workers(workers, || run_sweep(spec.scheme.scheme().as_ref(), &spec.config))
            .map_err(|e| e.to_string())?;
        let path = dir.path().join(format!("run{run}.csv"));
        write_curve(&curve, &path).map_err(|e| e.to_string())?;
        let back = read_curve(&path).map_err(|e| e.to_string())?;
        if render_curve(&back) != render_curve(&curve) {
            return Err("re-read curve renders differently".into());
        }
        files.push(std::fs::read(&path).map_err(|e| e.to_string())?);
    }
    if files.windows(2).all(|w| w[0] == w[1]) {
        Ok(format!("{} runs (1 and 8 workers) byte-identical, {} bytes", files.len(), files[0].len()))
    } else {
        Err("curve files differ between runs".into())
    }
}

fn main() {
    let criteria: [(&str, fn(&mut Sweeps) -> Outcome); 8] = [
        ("1 Alamouti closed-form oracle", c1_alamouti_oracle),
        ("2 ABF exact shift and 10log10(L_T) gains", c2_abf_shift),
        ("3 ZF precoding gain", c3_zf_gain),
        ("4 HBF beats ABF by the ZF gain", c4_hbf_vs_abf),
        ("5 IRS gain 10log10(N_REF)", c5_irs_gain),
        ("6 TAS diversity slope", c6_diversity),
        ("7 exact property suites", c7_properties),
        ("8 byte-identical reruns", c8_reproducible),
    ];
    let mut sweeps = Sweeps::default();
    let mut failed = 0;
    for (name, run) in criteria {
        let t = Instant::now();
        let outcome = run(&mut sweeps);
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS  criterion {name} [{secs:.1} s]: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL  criterion {name} [{secs:.1} s]: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
