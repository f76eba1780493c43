//! Self-checks comparing computed quantities with independent references.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dispersion::{
    negative_index_scan, solve_dispersion, ConstantMedium, DispersionConfig, DispersionMode,
};
use crate::error::Result;
use crate::limits::{
    lindhard_chi_e, longwave_eps, longwave_mu_inv, pauli_landau, plasmon_frequency,
    thomas_fermi_mass2_nr, thomas_fermi_mass2_quadrature, NRState,
};
use crate::response::ElectronGas;
use crate::scalar::{
    drude_ae2, drude_scalars, evaluate_scalars, moment_integrals_closed, vacuum_c, Regime,
    RegimeChoice,
};
use crate::state::{Kinematics, ThermoState, E2_DEFAULT};
use crate::sweep::{parse_grid, render, run_sweep, OutputFormat, SweepSpec};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(
            f,
            "{verdict} [{:2}] {}: {}",
            self.id, self.name, self.detail
        )
    }
}

fn rel(value: f64, reference: f64) -> f64 {
    ((value - reference) / reference).abs()
}

fn outcome(
    id: u8,
    name: &'static str,
    body: impl FnOnce() -> Result<(bool, String)>,
) -> CheckOutcome {
    match body() {
        Ok((passed, detail)) => CheckOutcome {
            id,
            name,
            passed,
            detail,
        },
        Err(e) => CheckOutcome {
            id,
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn k_static() -> f64 {
    E2_DEFAULT / (6.0 * PI * PI)
}

/// Full-kinematics static `chi'_e` against `(e^2/6 pi^2) arccosh zeta`.
pub fn criterion_1() -> CheckOutcome {
    outcome(1, "stationary closed form", || {
        let gas = ElectronGas::new(ThermoState::degenerate(2.0)?)
            .with_regime(RegimeChoice::Fixed(Regime::FullKinematics))
            .with_tol(1e-10);
        let chi = gas
            .evaluate(&Kinematics::from_halved(0.0, 1e-4)?)?
            .chi
            .chi_e_prime;
        let expected = k_static() * 2.0f64.acosh();
        let dev = (chi - expected).abs();
        Ok((
            dev <= 1e-6,
            format!(
                "chi'_e = {chi:.10e}, closed form {expected:.10e}, |diff| {dev:.2e} (tol 1e-6)"
            ),
        ))
    })
}

/// Screening mass by quadrature against its closed form and the nonrelativistic limit.
pub fn criterion_2() -> CheckOutcome {
    outcome(2, "Thomas-Fermi mass", || {
        let quad = thomas_fermi_mass2_quadrature(&ThermoState::degenerate(2.0)?, 1e-14)?.value;
        let closed = E2_DEFAULT / (4.0 * PI * PI) * (2.0f64.acosh() + 6.0 * 3.0f64.sqrt());
        let d1 = rel(quad, closed);
        let s = ThermoState::degenerate(1.0 + 5e-5)?;
        let low = thomas_fermi_mass2_quadrature(&s, 1e-16)?.value;
        let nr = E2_DEFAULT / (PI * PI) * s.fermi_momentum();
        let d2 = rel(low, nr);
        Ok((
            d1 <= 1e-8 && d2 <= 1e-3,
            format!("zeta=2: {quad:.10e} vs {closed:.10e}, rel {d1:.2e} (tol 1e-8); NR: {low:.6e} vs {nr:.6e}, rel {d2:.2e} (tol 1e-3)"),
        ))
    })
}

/// Pauli and Landau susceptibilities against the static relativistic `chi_m`.
pub fn criterion_3() -> CheckOutcome {
    outcome(3, "Pauli/Landau split", || {
        let pf: f64 = 1e-2;
        let zeta = (1.0 + pf * pf).sqrt();
        let nr = NRState::new(0.5 * pf * pf, 0.0)?;
        let (pauli, landau) = pauli_landau(&nr)?;
        let ratio = pauli / landau;
        let gas = ElectronGas::new(ThermoState::degenerate(zeta)?);
        let chi_m = gas.evaluate(&Kinematics::new(0.0, 1e-4 * pf)?)?.chi.chi_m;
        let d = rel(pauli + landau, chi_m);
        Ok((
            ratio == -3.0 && d <= 5e-3,
            format!(
                "ratio {ratio}; Pauli+Landau {:.6e} vs chi_m {chi_m:.6e}, rel {d:.2e} (tol 5e-3)",
                pauli + landau
            ),
        ))
    })
}

/// Drude frequencies against the moment integrals and the nonrelativistic plasmon.
pub fn criterion_4() -> CheckOutcome {
    outcome(4, "Drude frequencies", || {
        let st = ThermoState::degenerate(2.0)?;
        let d = drude_scalars(1.0, &st)?;
        let m = moment_integrals_closed(0.0, 2.0)?;
        let independent = E2_DEFAULT / (12.0 * PI * PI) * (2.0 * m.i0 + m.i1);
        let d1 = (d.ae2 - independent).abs();
        let doubled = d.am2 == 2.0 * d.ae2;
        let pf: f64 = 0.05;
        let xi = 0.5 * pf * pf;
        let nr_w2 = crate::limits::nr_plasmon_omega2(&NRState::new(xi, 0.0)?, 1e-16)?;
        let low = drude_ae2(1.0 + xi, E2_DEFAULT);
        let d2 = rel(low, 0.25 * nr_w2);
        Ok((
            d1 <= 1e-12 && doubled && d2 <= 1e-2,
            format!(
                "a_e^2 {:.10e} vs {independent:.10e}, |diff| {d1:.1e} (tol 1e-12); a_m^2 = 2 a_e^2: {doubled}; NR rel {d2:.2e} (tol 1e-2)",
                d.ae2
            ),
        ))
    })
}

/// Simultaneously negative permittivity and permeability below the plasma frequency.
pub fn criterion_5() -> CheckOutcome {
    outcome(5, "simultaneous negativity", || {
        let st = ThermoState::degenerate(2.0)?;
        let ae = drude_ae2(2.0, E2_DEFAULT).sqrt();
        let a = 0.5 * ae;
        let d = drude_scalars(a, &st)?;
        let eps = longwave_eps(2.0 * a, &st, 1e-12)?;
        let mu_inv = longwave_mu_inv(2.0 * a, &st, 1e-12)?;
        let drude_ok = (d.eps + 3.0).abs() <= 0.01 && (d.mu_inv + 7.0).abs() <= 0.01;
        let gas = ElectronGas::new(st).with_tol(1e-12);
        let band = negative_index_scan(&gas, 0.2 * ae, 6.0 * ae, 200)?;
        let (_, big) = plasmon_frequency(&st, 1e-12)?;
        let edge = band.negative_band.last().map(|b| b.1).unwrap_or(f64::NAN);
        let de = rel(edge, big);
        Ok((
            drude_ok && eps < 0.0 && mu_inv < 0.0 && de <= 1e-4,
            format!(
                "Drude eps {:.4} (-3.00 +- 0.01), mu^-1 {:.4} (-7.00 +- 0.01); assembled eps {eps:.4}, mu^-1 {mu_inv:.4}; band edge {edge:.8e} vs Omega_e {big:.8e}, rel {de:.2e} (tol 1e-4)",
                d.eps, d.mu_inv
            ),
        ))
    })
}

/// Full kinematics at small `|q|` against the long-wavelength expansion.
pub fn criterion_6() -> CheckOutcome {
    outcome(6, "route equivalence", || {
        let b = 1e-4;
        let mut worst_a: (f64, f64, f64) = (0.0, 0.0, 0.0);
        let mut worst_b: (f64, f64, f64) = (0.0, 0.0, 0.0);
        for zeta in [1.5, 2.0, 5.0] {
            let st = ThermoState::degenerate(zeta)?;
            for a in [0.01, 0.05, 0.1] {
                let kin = Kinematics::from_halved(a, b)?;
                let full = evaluate_scalars(
                    &kin,
                    &st,
                    RegimeChoice::Fixed(Regime::FullKinematics),
                    1e-11,
                )?;
                let lw = evaluate_scalars(
                    &kin,
                    &st,
                    RegimeChoice::Fixed(Regime::LongWavelength),
                    1e-11,
                )?;
                let da = rel(full.a_star, lw.a_star);
                let db = rel(full.b_ratio, lw.b_ratio);
                if da > worst_a.0 {
                    worst_a = (da, zeta, a);
                }
                if db > worst_b.0 {
                    worst_b = (db, zeta, a);
                }
            }
        }
        Ok((
            worst_a.0 <= 1e-3 && worst_b.0 <= 1e-3,
            format!(
                "worst A* rel {:.2e} at (zeta {}, a {}); worst B* rel {:.2e} at (zeta {}, a {}) (tol 1e-3)",
                worst_a.0, worst_a.1, worst_a.2, worst_b.0, worst_b.1, worst_b.2
            ),
        ))
    })
}

/// Mean and standard error of the static Lindhard susceptibility sampled in
/// momentum space, `-(e^2/q^2) 2 Integral d^3p/(2 pi)^3 [n(p+q) - n(p)] / (p.q + q^2/2)`.
pub fn lindhard_monte_carlo(qmag: f64, nr: &NRState, samples: u64, seed: u64) -> (f64, f64) {
    let p_max = (2.0 * (nr.xi_prime + 40.0 * nr.t)).sqrt();
    let radius = p_max + qmag;
    let volume = 4.0 / 3.0 * PI * radius.powi(3);
    const CHUNKS: u64 = 64;
    let per_chunk = samples / CHUNKS;
    let (sum, sum2) = (0..CHUNKS)
        .into_par_iter()
        .map(|chunk| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk);
            let (mut s, mut s2) = (0.0f64, 0.0f64);
            let mut taken = 0;
            while taken < per_chunk {
                let p = [
                    rng.gen_range(-radius..radius),
                    rng.gen_range(-radius..radius),
                    rng.gen_range(-radius..radius),
                ];
                let p2 = p[0] * p[0] + p[1] * p[1] + p[2] * p[2];
                if p2 > radius * radius {
                    continue;
                }
                taken += 1;
                let pq = p[2] * qmag;
                let denom = pq + 0.5 * qmag * qmag;
                let shifted = (p2 + 2.0 * pq + qmag * qmag).sqrt();
                let f = if denom == 0.0 {
                    0.0
                } else {
                    (nr.occupation(shifted) - nr.occupation(p2.sqrt())) / denom
                };
                s += f;
                s2 += f * f;
            }
            (s, s2)
        })
        .reduce(|| (0.0, 0.0), |x, y| (x.0 + y.0, x.1 + y.1));
    let n = (per_chunk * CHUNKS) as f64;
    let mean = sum / n;
    let var = (sum2 / n - mean * mean).max(0.0);
    let k = -nr.e2 / (qmag * qmag) * 2.0 / (2.0 * PI).powi(3) * volume;
    (k * mean, k.abs() * (var / n).sqrt())
}

/// Lindhard function against Thomas-Fermi screening and a Monte Carlo integral.
pub fn criterion_7() -> CheckOutcome {
    outcome(7, "Lindhard vs relativistic", || {
        let nr = NRState::new(5e-5, 0.0)?;
        let q = 1e-2 * nr.p_f;
        let chi = lindhard_chi_e(0.0, q, &nr, 1e-6)?.value;
        let tf = thomas_fermi_mass2_nr(&nr, 1e-12)? / (q * q);
        let d = rel(chi, tf);
        let mut ok = d <= 1e-4;
        let mut detail = format!("static q/p_F=1e-2 rel {d:.2e} (tol 1e-4)");
        let xi = 1.25e-3;
        let warm = NRState::new(xi, 0.05 * xi)?;
        for (i, u) in [0.5, 1.0, 1.5].into_iter().enumerate() {
            let q = 2.0 * warm.p_f * u;
            let reduced = lindhard_chi_e(0.0, q, &warm, 1e-10)?.value;
            let (mc, se) = lindhard_monte_carlo(q, &warm, 10_000_000, 0x5eed + i as u64);
            let sigmas = (mc - reduced).abs() / se;
            ok &= sigmas <= 3.0;
            detail.push_str(&format!(
                "; u={u}: MC {mc:.6e} +- {se:.1e} vs {reduced:.6e} ({sigmas:.2} SE)"
            ));
        }
        Ok((ok, detail))
    })
}

/// `I2` against a centered difference of `I1` in `a^2`.
pub fn criterion_8() -> CheckOutcome {
    outcome(8, "derivative identity", || {
        let (a2, h) = (0.01, 1e-4);
        let fd = (moment_integrals_closed(a2 + h, 2.0)?.i1
            - moment_integrals_closed(a2 - h, 2.0)?.i1)
            / (2.0 * h);
        let i2 = moment_integrals_closed(a2, 2.0)?.i2;
        let d = rel(i2, fd);
        Ok((
            d <= 1e-5,
            format!("I2 {i2:.10e} vs difference {fd:.10e}, rel {d:.2e} (tol 1e-5)"),
        ))
    })
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
fn gauss_legendre_unit(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            (0.5 * (1.0 + x), 0.5 * w)
        })
        .collect()
}

/// Vacuum polarization from its dispersion integral over the pair continuum,
/// `(e^2/12 pi^2) q^2 Integral_4^inf ds (1 + 2/s) sqrt(1 - 4/s) / (s (s - q^2))`,
/// mapped by `s = 4/u`, `u = 1 - w^2` onto a smooth integrand in `w`.
pub fn vacuum_c_spectral(qm2: f64, e2: f64) -> f64 {
    let sum: f64 = gauss_legendre_unit(64)
        .into_iter()
        .map(|(w, wt)| {
            let u = 1.0 - w * w;
            wt * (1.0 + 0.5 * u) * 2.0 * w * w / (4.0 - qm2 * u)
        })
        .sum();
    e2 / (12.0 * PI * PI) * qm2 * sum
}

/// Vacuum polarization near the light cone and for spacelike momenta.
pub fn criterion_9() -> CheckOutcome {
    outcome(9, "vacuum polarization", || {
        let qm2 = 1e-3;
        let ratio = vacuum_c(qm2, E2_DEFAULT)? * 60.0 * PI * PI / (E2_DEFAULT * qm2);
        let c = vacuum_c(-1.0, E2_DEFAULT)?;
        let oracle = vacuum_c_spectral(-1.0, E2_DEFAULT);
        let d = (c - oracle).abs();
        Ok((
            (ratio - 1.0).abs() <= 1e-2 && d <= 1e-6,
            format!("light-cone ratio {ratio:.6} (1 +- 0.01); q_M^2=-1: {c:.10e} vs spectral {oracle:.10e}, |diff| {d:.1e} (tol 1e-6)"),
        ))
    })
}

/// Dispersion of a constant medium.
pub fn criterion_10() -> CheckOutcome {
    outcome(10, "dispersion sanity", || {
        let m = ConstantMedium {
            eps: 2.0,
            mu_inv: 1.0,
            tau: 0.0,
        };
        let s = solve_dispersion(
            0.3,
            &m,
            DispersionMode::SelfConsistent,
            &DispersionConfig::default(),
        )?;
        let n = s.n_index.first().copied().unwrap_or(f64::NAN);
        let d = (n - 2.0f64.sqrt()).abs();
        Ok((
            s.n_index.len() == 1 && d <= 1e-10,
            format!(
                "n = {n:.15} ({} roots), |n - sqrt 2| {d:.1e} (tol 1e-10)",
                s.n_index.len()
            ),
        ))
    })
}

/// Assembly identities at random states and kinematics.
pub fn criterion_11() -> CheckOutcome {
    outcome(11, "assembly identities", || {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut points = Vec::with_capacity(1000);
        while points.len() < 1000 {
            let t = if rng.gen_bool(0.3) {
                0.0
            } else {
                rng.gen_range(0.0..0.3)
            };
            let zeta = rng.gen_range(0.5..4.0);
            let omega: f64 = rng.gen_range(0.0..1.5);
            let q = rng.gen_range(1e-3..1.5);
            if (omega * omega - q * q).abs() < 1e-3 {
                continue;
            }
            points.push((t, zeta, omega, q));
        }
        let worst = points
            .par_iter()
            .map(|&(t, zeta, omega, q)| -> Result<f64> {
                let gas = ElectronGas::new(ThermoState::new(t, zeta)?).with_tol(1e-7);
                let r = gas.responses(omega, q)?;
                let scale = r.eps_prime.abs().max(r.tau.abs()).max(1.0);
                Ok(((r.eps_prime + r.mu_prime_inv)
                    .abs()
                    .max((r.tau - r.sigma).abs()))
                    / scale)
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0f64, f64::max);
        Ok((
            worst <= 4.0 * f64::EPSILON,
            format!("1000 points, worst scaled residual {worst:.1e}"),
        ))
    })
}

/// The spec used by the determinism check.
pub fn determinism_spec() -> Result<SweepSpec> {
    Ok(SweepSpec {
        t: vec![0.0, 0.05],
        zeta: vec![1.0, 2.0],
        omega: parse_grid("0:0.6:4")?,
        qmag: parse_grid("1e-4,0.2,0.4")?,
        ..Default::default()
    })
}

/// Repeated sweeps render to identical bytes.
pub fn criterion_12() -> CheckOutcome {
    outcome(12, "sweep determinism", || {
        let spec = determinism_spec()?;
        let mut ok = true;
        for format in [OutputFormat::Csv, OutputFormat::Json] {
            let first = render(&run_sweep(&spec)?.records, format)?;
            let second = render(&run_sweep(&spec)?.records, format)?;
            ok &= first == second && !first.is_empty();
        }
        Ok((
            ok,
            format!(
                "{} grid points, CSV and JSON byte-identical: {ok}",
                spec.len()
            ),
        ))
    })
}

/// Every check, in order.
pub fn run_all() -> Vec<CheckOutcome> {
    let checks: [fn() -> CheckOutcome; 12] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
        criterion_11,
        criterion_12,
    ];
    checks.iter().map(|c| c()).collect()
}
