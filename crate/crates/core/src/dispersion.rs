//! In-medium dispersion relation, refractive index and negative-index bands.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::thomas_fermi_mass2;
use crate::response::{ElectronGas, ResponseSet};
use crate::roots::bisect;
use crate::scalar::{Regime, RegimeChoice};
use crate::state::Kinematics;

/// `|mu^-1|` below this is treated as a pole of `mu`.
pub const POLE_GUARD: f64 = 1e-12;

/// Reported roots must satisfy `|R(q)| <= ROOT_RESIDUAL_MAX`.
pub const ROOT_RESIDUAL_MAX: f64 = 1e-9;

/// A linear response model that can be probed at any `(omega, |q|)`.
pub trait Medium: Sync {
    fn responses(&self, omega: f64, qmag: f64) -> Result<ResponseSet>;

    /// Responses in the `|q| -> 0` limit.
    fn longwave(&self, omega: f64) -> Result<ResponseSet>;

    /// Screening wavenumber used to size the search range.
    fn screening_scale(&self) -> f64 {
        0.0
    }
}

impl Medium for ElectronGas {
    fn responses(&self, omega: f64, qmag: f64) -> Result<ResponseSet> {
        ElectronGas::responses(self, omega, qmag)
    }

    fn longwave(&self, omega: f64) -> Result<ResponseSet> {
        self.with_regime(RegimeChoice::Fixed(Regime::LongWavelength))
            .responses(omega, 0.0)
    }

    fn screening_scale(&self) -> f64 {
        thomas_fermi_mass2(&self.state, self.tol)
            .map(|m| m.value.max(0.0).sqrt())
            .unwrap_or(0.0)
    }
}

/// A medium with fixed, dispersionless coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantMedium {
    pub eps: f64,
    pub mu_inv: f64,
    pub tau: f64,
}

impl ConstantMedium {
    fn set(&self) -> ResponseSet {
        ResponseSet {
            eps: self.eps,
            mu_inv: self.mu_inv,
            eps_prime: 0.0,
            mu_prime_inv: 0.0,
            tau: self.tau,
            sigma: self.tau,
        }
    }
}

impl Medium for ConstantMedium {
    fn responses(&self, _omega: f64, _qmag: f64) -> Result<ResponseSet> {
        Ok(self.set())
    }

    fn longwave(&self, _omega: f64) -> Result<ResponseSet> {
        Ok(self.set())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DispersionMode {
    SelfConsistent,
    LongWavelength,
}

impl std::str::FromStr for DispersionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "selfconsistent" | "self-consistent" => Ok(Self::SelfConsistent),
            "longwave" => Ok(Self::LongWavelength),
            other => Err(Error::domain(format!("unknown dispersion mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DispersionConfig {
    pub grid_points: usize,
    /// Upper end of the scan; `10 omega + 10 m_TF` when `None`.
    pub q_max: Option<f64>,
}

impl Default for DispersionConfig {
    fn default() -> Self {
        Self {
            grid_points: 512,
            q_max: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionSolution {
    pub omega: f64,
    pub qroots: Vec<f64>,
    pub n_index: Vec<f64>,
    pub residual: Vec<f64>,
    pub mode: DispersionMode,
    /// Some scan point had `|mu^-1|` below [`POLE_GUARD`].
    pub pole_nearby: bool,
}

/// `|q|^2 - mu eps omega^2 + 2 mu tau omega |q|`, or `None` next to a pole of `mu`.
pub fn dispersion_residual(r: &ResponseSet, omega: f64, qmag: f64) -> Option<f64> {
    if r.mu_inv.abs() < POLE_GUARD {
        return None;
    }
    let mu = 1.0 / r.mu_inv;
    Some(qmag * qmag - mu * r.eps * omega * omega + 2.0 * mu * r.tau * omega * qmag)
}

/// Wavenumbers `|q| > 0` at which a wave of frequency `omega` propagates.
pub fn solve_dispersion<M: Medium>(
    omega: f64,
    medium: &M,
    mode: DispersionMode,
    config: &DispersionConfig,
) -> Result<DispersionSolution> {
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::domain(format!(
            "dispersion needs omega > 0, got {omega}"
        )));
    }
    let mut sol = DispersionSolution {
        omega,
        qroots: Vec::new(),
        n_index: Vec::new(),
        residual: Vec::new(),
        mode,
        pole_nearby: false,
    };
    match mode {
        DispersionMode::LongWavelength => {
            let r = medium.longwave(omega)?;
            if r.mu_inv.abs() < POLE_GUARD {
                sol.pole_nearby = true;
                return Ok(sol);
            }
            let me = r.eps / r.mu_inv;
            if me > 0.0 {
                let q = me.sqrt() * omega;
                let rt = ResponseSet {
                    tau: 0.0,
                    sigma: 0.0,
                    ..r
                };
                sol.qroots.push(q);
                sol.n_index.push(q / omega);
                sol.residual
                    .push(dispersion_residual(&rt, omega, q).unwrap_or(f64::NAN));
            }
            Ok(sol)
        }
        DispersionMode::SelfConsistent => {
            if config.grid_points < 2 {
                return Err(Error::domain(
                    "dispersion scan needs at least 2 grid points",
                ));
            }
            let q_max = config
                .q_max
                .unwrap_or(10.0 * omega + 10.0 * medium.screening_scale());
            let n = config.grid_points;
            let grid: Vec<f64> = (1..=n).map(|i| q_max * i as f64 / n as f64).collect();
            let values: Vec<Option<f64>> = grid
                .par_iter()
                .map(|&q| residual_at(medium, omega, q))
                .collect::<Result<_>>()?;
            sol.pole_nearby = values.iter().any(|v| v.is_none());
            for i in 0..n - 1 {
                let (Some(r0), Some(r1)) = (values[i], values[i + 1]) else {
                    continue;
                };
                if r0 == 0.0 {
                    push_root(&mut sol, medium, grid[i])?;
                    continue;
                }
                if r0.signum() == r1.signum() {
                    continue;
                }
                let found = bisect(
                    |q| residual_at(medium, omega, q).map(|v| v.unwrap_or(f64::NAN)),
                    grid[i],
                    grid[i + 1],
                );
                match found {
                    Ok(q) => push_root(&mut sol, medium, q)?,
                    Err(Error::LightConeSingular { .. }) | Err(Error::RootNotBracketed { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
            if let Some(&last) = values.last() {
                if last == Some(0.0) {
                    push_root(&mut sol, medium, grid[n - 1])?;
                }
            }
            Ok(sol)
        }
    }
}

fn residual_at<M: Medium>(medium: &M, omega: f64, q: f64) -> Result<Option<f64>> {
    match medium.responses(omega, q) {
        Ok(r) => Ok(dispersion_residual(&r, omega, q)),
        // a grid point on the light cone is skipped like a pole
        Err(Error::LightConeSingular { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

fn push_root<M: Medium>(sol: &mut DispersionSolution, medium: &M, q: f64) -> Result<()> {
    let Some(res) = residual_at(medium, sol.omega, q)? else {
        return Ok(());
    };
    // sign changes across a pole of mu bisect onto the pole, not a root
    if res.abs() <= ROOT_RESIDUAL_MAX {
        sol.qroots.push(q);
        sol.n_index.push(q / sol.omega);
        sol.residual.push(res);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandReport {
    pub omega_grid: Vec<f64>,
    pub eps_vals: Vec<f64>,
    pub mu_inv_vals: Vec<f64>,
    /// Intervals where `eps < 0` and `mu^-1 < 0` together.
    pub negative_band: Vec<(f64, f64)>,
    /// Grid indices where `|mu^-1|` is below [`POLE_GUARD`].
    pub pole_nearby: Vec<usize>,
}

/// Long-wavelength `eps` and `mu^-1` on a uniform frequency grid, with the
/// doubly negative intervals refined by bisection on `max(eps, mu^-1)`.
pub fn negative_index_scan<M: Medium>(
    medium: &M,
    omega_min: f64,
    omega_max: f64,
    n_points: usize,
) -> Result<BandReport> {
    if !(omega_min > 0.0 && omega_max > omega_min && omega_max.is_finite()) {
        return Err(Error::domain(format!(
            "bad frequency range [{omega_min}, {omega_max}]"
        )));
    }
    if n_points < 2 {
        return Err(Error::domain("band scan needs at least 2 grid points"));
    }
    let step = (omega_max - omega_min) / (n_points - 1) as f64;
    let omega_grid: Vec<f64> = (0..n_points)
        .map(|i| {
            if i + 1 == n_points {
                omega_max
            } else {
                omega_min + step * i as f64
            }
        })
        .collect();
    let sets: Vec<ResponseSet> = omega_grid
        .par_iter()
        .map(|&w| medium.longwave(w))
        .collect::<Result<_>>()?;
    let eps_vals: Vec<f64> = sets.iter().map(|r| r.eps).collect();
    let mu_inv_vals: Vec<f64> = sets.iter().map(|r| r.mu_inv).collect();
    let pole_nearby = mu_inv_vals
        .iter()
        .enumerate()
        .filter(|(_, m)| m.abs() < POLE_GUARD)
        .map(|(i, _)| i)
        .collect();

    let worst = |w: f64| -> Result<f64> {
        let r = medium.longwave(w)?;
        Ok(r.eps.max(r.mu_inv))
    };
    let negative: Vec<bool> = eps_vals
        .iter()
        .zip(&mu_inv_vals)
        .map(|(e, m)| e.max(*m) < 0.0)
        .collect();
    let mut negative_band = Vec::new();
    let mut i = 0;
    while i < n_points {
        if !negative[i] {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < n_points && negative[i + 1] {
            i += 1;
        }
        let lo = if start == 0 {
            omega_grid[0]
        } else {
            bisect(worst, omega_grid[start - 1], omega_grid[start])?
        };
        let hi = if i + 1 == n_points {
            omega_grid[i]
        } else {
            bisect(worst, omega_grid[i], omega_grid[i + 1])?
        };
        negative_band.push((lo, hi));
        i += 1;
    }
    Ok(BandReport {
        omega_grid,
        eps_vals,
        mu_inv_vals,
        negative_band,
        pole_nearby,
    })
}

/// Index of refraction `|q| / omega` for every propagating branch.
pub fn refractive_index<M: Medium>(
    omega: f64,
    medium: &M,
    mode: DispersionMode,
) -> Result<Vec<f64>> {
    Ok(solve_dispersion(omega, medium, mode, &DispersionConfig::default())?.n_index)
}

/// Kinematics of each root, handy for re-evaluating responses on shell.
pub fn root_kinematics(sol: &DispersionSolution) -> Result<Vec<Kinematics>> {
    sol.qroots
        .iter()
        .map(|&q| Kinematics::new(sol.omega, q))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::limits::plasmon_frequency;
    use crate::scalar::{drude_ae2, drude_scalars};
    use crate::state::{ThermoState, E2_DEFAULT};

    #[test]
    fn constant_medium_recovers_usual_index() {
        let m = ConstantMedium {
            eps: 2.0,
            mu_inv: 1.0,
            tau: 0.0,
        };
        for mode in [
            DispersionMode::SelfConsistent,
            DispersionMode::LongWavelength,
        ] {
            let s = solve_dispersion(0.3, &m, mode, &DispersionConfig::default()).unwrap();
            assert_eq!(s.qroots.len(), 1);
            assert!((s.n_index[0] - 2.0f64.sqrt()).abs() < 1e-10);
            assert!(s.residual[0].abs() <= ROOT_RESIDUAL_MAX);
        }
    }

    #[test]
    fn opaque_constant_medium_has_no_root() {
        let m = ConstantMedium {
            eps: -2.0,
            mu_inv: 1.0,
            tau: 0.0,
        };
        for mode in [
            DispersionMode::SelfConsistent,
            DispersionMode::LongWavelength,
        ] {
            assert!(
                solve_dispersion(0.3, &m, mode, &DispersionConfig::default())
                    .unwrap()
                    .qroots
                    .is_empty()
            );
        }
    }

    #[test]
    fn magnetoelectric_term_splits_quadratic() {
        // q^2 + 2 mu tau w q - mu eps w^2 = 0
        let m = ConstantMedium {
            eps: 2.0,
            mu_inv: 0.5,
            tau: 0.1,
        };
        let w = 0.2;
        let s = solve_dispersion(
            w,
            &m,
            DispersionMode::SelfConsistent,
            &DispersionConfig::default(),
        )
        .unwrap();
        let (mu, eps, tau) = (2.0, 2.0, 0.1);
        let expected = -mu * tau * w + ((mu * tau * w).powi(2) + mu * eps * w * w).sqrt();
        assert_eq!(s.qroots.len(), 1);
        assert!((s.qroots[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn pole_is_flagged() {
        let m = ConstantMedium {
            eps: 2.0,
            mu_inv: 0.0,
            tau: 0.0,
        };
        let s = solve_dispersion(
            0.3,
            &m,
            DispersionMode::LongWavelength,
            &DispersionConfig::default(),
        )
        .unwrap();
        assert!(s.pole_nearby && s.qroots.is_empty());
    }

    #[test]
    fn vacuum_light_line() {
        let gas = ElectronGas::new(ThermoState::degenerate(1.0).unwrap());
        let s = solve_dispersion(
            0.5,
            &gas,
            DispersionMode::SelfConsistent,
            &DispersionConfig::default(),
        )
        .unwrap();
        assert_eq!(s.qroots.len(), 1, "{s:?}");
        assert!((s.n_index[0] - 1.0).abs() < 1e-3);
    }

    #[test]
    fn longwave_root_above_plasma_frequency() {
        let state = ThermoState::degenerate(2.0).unwrap();
        let gas = ElectronGas::new(state);
        let (omega_e, _) = plasmon_frequency(&state, 1e-12).unwrap();
        let w = 2.0 * omega_e;
        let s = solve_dispersion(
            w,
            &gas,
            DispersionMode::LongWavelength,
            &DispersionConfig::default(),
        )
        .unwrap();
        assert_eq!(s.qroots.len(), 1);
        assert!(s.residual[0].abs() < 1e-9);
        let d = drude_scalars(0.5 * w, &state).unwrap();
        assert!((s.n_index[0] - (d.eps / d.mu_inv).sqrt()).abs() < 1e-3);
    }

    #[test]
    fn self_consistent_roots_have_small_residual() {
        let state = ThermoState::degenerate(2.0).unwrap();
        let gas = ElectronGas::new(state);
        let w = 0.05;
        let s = solve_dispersion(
            w,
            &gas,
            DispersionMode::SelfConsistent,
            &DispersionConfig::default(),
        )
        .unwrap();
        assert!(!s.qroots.is_empty());
        for ((q, r), n) in s.qroots.iter().zip(&s.residual).zip(&s.n_index) {
            let again = dispersion_residual(&gas.responses(w, *q).unwrap(), w, *q).unwrap();
            assert!(r.abs() < 1e-9 && again.abs() < 1e-9, "q={q}");
            assert_eq!(*n, q / w);
        }
    }

    #[test]
    fn empty_medium_has_no_band() {
        let gas = ElectronGas::new(ThermoState::degenerate(1.0).unwrap());
        let r = negative_index_scan(&gas, 0.01, 0.3, 50).unwrap();
        assert!(r.negative_band.is_empty());
    }

    #[test]
    fn band_edge_is_plasma_zero() {
        let state = ThermoState::degenerate(2.0).unwrap();
        let gas = ElectronGas::new(state).with_tol(1e-12);
        let ae = drude_ae2(2.0, E2_DEFAULT).sqrt();
        let r = negative_index_scan(&gas, 0.2 * ae, 6.0 * ae, 200).unwrap();
        assert_eq!(r.negative_band.len(), 1);
        let (lo, hi) = r.negative_band[0];
        assert_eq!(lo, r.omega_grid[0]);
        let (_, big) = plasmon_frequency(&state, 1e-12).unwrap();
        assert!(((hi - big) / big).abs() < 1e-4, "{hi} vs {big}");
        for w in r.omega_grid.windows(2) {
            assert!(w[1] > w[0]);
        }
    }

    #[test]
    fn band_does_not_shrink_on_finer_grid() {
        let gas = ElectronGas::new(ThermoState::degenerate(3.0).unwrap());
        let ae = drude_ae2(3.0, E2_DEFAULT).sqrt();
        let coarse = negative_index_scan(&gas, 0.2 * ae, 6.0 * ae, 40).unwrap();
        let fine = negative_index_scan(&gas, 0.2 * ae, 6.0 * ae, 160).unwrap();
        let cell = 5.8 * ae / 39.0;
        let width = |r: &BandReport| r.negative_band.iter().map(|(a, b)| b - a).sum::<f64>();
        assert!(width(&fine) >= width(&coarse) - cell);
    }
}
