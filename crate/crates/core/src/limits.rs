//! Nonrelativistic reference formulas and the screening and plasma scales.
//!
//! The nonrelativistic gas is described by the kinetic chemical potential
//! `xi' = zeta - 1` and the occupation `1 / (exp((p^2/2 - xi') / t) + 1)`.

use std::f64::consts::PI;

use log::warn;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_to_infinity, IntegralResult};
use crate::response::assemble_responses;
use crate::roots::bisect;
use crate::scalar::{
    drude_ae2, drude_scalars, evaluate_scalars, g_electric, log_ratio, moment_integrals_closed,
    static_integrals, static_integrals_closed, static_integrals_quadrature, Estimate, Regime,
    RegimeChoice,
};
use crate::state::{logistic_tail, Kinematics, ThermoState, E2_DEFAULT};

/// Above these the nonrelativistic formulas are used outside their range.
pub const NR_MAX_XI_PRIME: f64 = 0.1;
pub const NR_MAX_T: f64 = 0.1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NRState {
    pub xi_prime: f64,
    pub t: f64,
    /// `sqrt(2 xi')`; the Fermi momentum when `t = 0`.
    pub p_f: f64,
    pub e2: f64,
}

impl NRState {
    pub fn new(xi_prime: f64, t: f64) -> Result<Self> {
        Self::with_coupling(xi_prime, t, E2_DEFAULT)
    }

    pub fn with_coupling(xi_prime: f64, t: f64, e2: f64) -> Result<Self> {
        if !xi_prime.is_finite() || !(t.is_finite() && t >= 0.0) || !(e2 > 0.0 && e2.is_finite()) {
            return Err(Error::domain(format!(
                "bad nonrelativistic state xi'={xi_prime} t={t} e2={e2}"
            )));
        }
        if t == 0.0 && xi_prime < 0.0 {
            return Err(Error::domain("a degenerate gas needs xi' >= 0"));
        }
        if xi_prime > NR_MAX_XI_PRIME || t > NR_MAX_T {
            warn!("nonrelativistic formulas used at xi'={xi_prime}, t={t}; expect relativistic corrections");
        }
        Ok(Self {
            xi_prime,
            t,
            p_f: (2.0 * xi_prime.max(0.0)).sqrt(),
            e2,
        })
    }

    /// The nonrelativistic counterpart of a relativistic state.
    pub fn from_state(state: &ThermoState) -> Result<Self> {
        Self::with_coupling(state.zeta - 1.0, state.t, state.e2)
    }

    pub fn occupation(&self, p: f64) -> f64 {
        if self.t == 0.0 {
            let e = 0.5 * p * p;
            if e < self.xi_prime {
                1.0
            } else if e > self.xi_prime {
                0.0
            } else {
                0.5
            }
        } else {
            logistic_tail((0.5 * p * p - self.xi_prime) / self.t)
        }
    }

    /// `Integral_0^inf f(p) n'(p) dp`.
    fn integrate_occupied<F: Fn(f64) -> f64>(
        &self,
        f: F,
        breaks: &[f64],
        tol: f64,
    ) -> Result<IntegralResult> {
        if self.t == 0.0 {
            return integrate(f, 0.0, self.p_f, breaks, tol);
        }
        let mut pts = breaks.to_vec();
        for k in [-12.0, -4.0, 0.0, 4.0, 12.0] {
            let e = self.xi_prime + k * self.t;
            if e > 0.0 {
                pts.push((2.0 * e).sqrt());
            }
        }
        let start = (2.0 * (self.xi_prime.max(0.0) + 30.0 * self.t)).sqrt();
        let step = 10.0 * self.t / start;
        integrate_to_infinity(|p| self.occupation(p) * f(p), 0.0, start, step, &pts, tol)
    }
}

/// Real part of the Lindhard electric susceptibility.
///
/// After the angular integration,
///
/// ```text
/// chi_e = -(e^2 / 2 pi^2 |q|^3) Integral dp p n'(p)
///         [ ln|(p q - q^2/2 - omega)/(p q + q^2/2 + omega)|
///         + ln|(p q - q^2/2 + omega)/(p q + q^2/2 - omega)| ]
/// ```
pub fn lindhard_chi_e(omega: f64, qmag: f64, nr: &NRState, tol: f64) -> Result<Estimate> {
    if !(qmag > 0.0 && qmag.is_finite()) {
        return Err(Error::domain(format!(
            "Lindhard susceptibility needs |q| > 0, got {qmag}"
        )));
    }
    if !(omega.is_finite() && omega >= 0.0) {
        return Err(Error::domain(format!(
            "frequency must be finite and >= 0, got {omega}"
        )));
    }
    if nr.t == 0.0 && nr.p_f == 0.0 {
        return Ok(Estimate::exact(0.0));
    }
    let half = 0.5 * qmag * qmag;
    let breaks = [(half + omega) / qmag, (half - omega).abs() / qmag];
    let k = -nr.e2 / (2.0 * PI * PI * qmag.powi(3));
    let r = nr.integrate_occupied(
        |p| {
            // deep refinement can land a node exactly on a breakpoint
            let v = p * (log_ratio(p * qmag, half + omega) + log_ratio(p * qmag, half - omega));
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        &breaks,
        tol / k.abs(),
    )?;
    Ok(Estimate {
        value: k * r.value,
        err_est: k.abs() * r.err_est,
    })
}

/// Static zero-temperature Lindhard function
/// `(m_TF^2 / |q|^2) [1/2 + (1 - u^2)/(4u) ln|(1+u)/(1-u)|]`, `u = |q| / 2 p_F`.
pub fn lindhard_static_closed(qmag: f64, nr: &NRState) -> f64 {
    if nr.p_f == 0.0 {
        return 0.0;
    }
    let u = qmag / (2.0 * nr.p_f);
    let shape = if u == 1.0 {
        0.5
    } else {
        0.5 + (1.0 - u * u) / (4.0 * u) * ((1.0 + u) / (1.0 - u)).abs().ln()
    };
    nr.e2 / (PI * PI) * nr.p_f / (qmag * qmag) * shape
}

/// `omega_e^2 = (e^2 / pi^2) Integral dp p^2 n'(p)`, i.e. `(e^2/3 pi^2) p_F^3` at `t = 0`.
pub fn nr_plasmon_omega2(nr: &NRState, tol: f64) -> Result<f64> {
    if nr.t == 0.0 {
        return Ok(nr.e2 / (3.0 * PI * PI) * nr.p_f.powi(3));
    }
    let r = nr.integrate_occupied(|p| p * p, &[], tol)?;
    Ok(nr.e2 / (PI * PI) * r.value)
}

/// Spin and orbital magnetic susceptibilities `(e^2/4 pi^2) p_F` and `-(e^2/12 pi^2) p_F`.
pub fn pauli_landau(nr: &NRState) -> Result<(f64, f64)> {
    if nr.t != 0.0 {
        return Err(Error::domain(
            "Pauli and Landau susceptibilities are zero-temperature forms",
        ));
    }
    let pauli = nr.e2 / (4.0 * PI * PI) * nr.p_f;
    Ok((pauli, -pauli / 3.0))
}

/// Relativistic screening mass `(e^2/pi^2) Integral dp n_F (1 + 3p^2/2) / omega_p`,
/// closed form `(e^2/4 pi^2)[arccosh zeta + 3 zeta sqrt(zeta^2-1)]` at `t = 0`.
pub fn thomas_fermi_mass2(state: &ThermoState, tol: f64) -> Result<Estimate> {
    let k = state.e2 / (PI * PI);
    let j1 = static_integrals(state, tol / k)?.j1;
    Ok(Estimate {
        value: k * j1.value,
        err_est: k * j1.err_est,
    })
}

/// [`thomas_fermi_mass2`] by quadrature even at `t = 0`.
pub fn thomas_fermi_mass2_quadrature(state: &ThermoState, tol: f64) -> Result<Estimate> {
    let k = state.e2 / (PI * PI);
    let j1 = static_integrals_quadrature(state, tol / k)?.j1;
    Ok(Estimate {
        value: k * j1.value,
        err_est: k * j1.err_est,
    })
}

/// `(e^2/pi^2) Integral dp n'(p)`, which is `(e^2/pi^2) p_F` at `t = 0`.
pub fn thomas_fermi_mass2_nr(nr: &NRState, tol: f64) -> Result<f64> {
    if nr.t == 0.0 {
        return Ok(nr.e2 / (PI * PI) * nr.p_f);
    }
    let r = nr.integrate_occupied(|_| 1.0, &[], tol)?;
    Ok(nr.e2 / (PI * PI) * r.value)
}

/// Long-wavelength permittivity at frequency `omega`.
pub fn longwave_eps(omega: f64, state: &ThermoState, tol: f64) -> Result<f64> {
    let kin = Kinematics::new(omega, 0.0)?;
    let s = evaluate_scalars(
        &kin,
        state,
        RegimeChoice::Fixed(Regime::LongWavelength),
        tol,
    )?;
    Ok(assemble_responses(&s, &kin)?.eps)
}

/// Long-wavelength inverse permeability at frequency `omega`.
pub fn longwave_mu_inv(omega: f64, state: &ThermoState, tol: f64) -> Result<f64> {
    let kin = Kinematics::new(omega, 0.0)?;
    let s = evaluate_scalars(
        &kin,
        state,
        RegimeChoice::Fixed(Regime::LongWavelength),
        tol,
    )?;
    Ok(assemble_responses(&s, &kin)?.mu_inv)
}

/// Drude plasma frequency `omega_e = 2 sqrt(a_e^2)` and the zero `Omega_e`
/// of the long-wavelength permittivity, searched in `[omega_e/2, 2 omega_e]`.
pub fn plasmon_frequency(state: &ThermoState, tol: f64) -> Result<(f64, f64)> {
    if !state.is_degenerate() || !(state.zeta > 1.0) {
        return Err(Error::domain("plasmon frequency needs t = 0 and zeta > 1"));
    }
    let omega_e = 2.0 * drude_ae2(state.zeta, state.e2).sqrt();
    let big = bisect(
        |w| longwave_eps(w, state, tol),
        0.5 * omega_e,
        (2.0 * omega_e).min(1.999),
    )?;
    Ok((omega_e, big))
}

/// `Omega_e^2 ~ omega_e^2 / (1 + (e^2/3 pi^2) g_e)` from the Drude form.
pub fn drude_plasmon_omega2(state: &ThermoState) -> f64 {
    let ae2 = drude_ae2(state.zeta, state.e2);
    4.0 * ae2 / (1.0 + state.e2 / (3.0 * PI * PI) * g_electric(state.zeta))
}

/// Which family of limiting forms a report row belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LimitGroup {
    /// Static screening and magnetic susceptibility.
    Stationary,
    /// Plasma frequencies and the long-wavelength moments.
    Drude,
}

impl std::str::FromStr for LimitGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stationary" => Ok(Self::Stationary),
            "drude" => Ok(Self::Drude),
            other => Err(Error::domain(format!("unknown limit group '{other}'"))),
        }
    }
}

/// One line of the limits comparison: a value against its reference.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitRow {
    pub group: LimitGroup,
    pub quantity: &'static str,
    pub reference_label: &'static str,
    pub reference: f64,
    pub value_label: &'static str,
    pub value: f64,
    pub deviation: f64,
    /// `None` for informational rows.
    pub tolerance: Option<f64>,
}

impl LimitRow {
    fn new(
        group: LimitGroup,
        quantity: &'static str,
        (reference_label, reference): (&'static str, f64),
        (value_label, value): (&'static str, f64),
        tolerance: Option<f64>,
    ) -> Self {
        let deviation = if reference == value {
            0.0
        } else if reference == 0.0 {
            value.abs()
        } else {
            ((value - reference) / reference).abs()
        };
        Self {
            group,
            quantity,
            reference_label,
            reference,
            value_label,
            value,
            deviation,
            tolerance,
        }
    }

    pub fn passed(&self) -> bool {
        self.tolerance.is_none_or(|tol| self.deviation <= tol)
    }
}

/// Chemical potentials up to this `xi'` count as nonrelativistic for the report.
pub const NR_REPORT_MAX_XI_PRIME: f64 = 1e-3;

/// Closed forms, quadrature and nonrelativistic values side by side.
///
/// Rows comparing against nonrelativistic formulas carry a tolerance only when
/// `xi' <= NR_REPORT_MAX_XI_PRIME`.
pub fn limits_report(state: &ThermoState, tol: f64) -> Result<Vec<LimitRow>> {
    let e2 = state.e2;
    let mut rows = Vec::new();
    let nr_tol = |t: f64| (state.zeta - 1.0 <= NR_REPORT_MAX_XI_PRIME).then_some(t);
    let quad = static_integrals_quadrature(state, tol)?;
    let tf_quad = e2 / (PI * PI) * quad.j1.value;
    let chi_m_quad = e2 / (6.0 * PI * PI) * quad.j0.value;
    let nr = NRState::from_state(state)?;

    if state.is_degenerate() {
        let closed = static_integrals_closed(state.zeta);
        let tf_closed = e2 / (PI * PI) * closed.j1.value;
        let chi_m_closed = e2 / (6.0 * PI * PI) * closed.j0.value;
        rows.push(LimitRow::new(
            LimitGroup::Stationary,
            "m_TF^2",
            ("closed", tf_closed),
            ("quadrature", tf_quad),
            Some(1e-8),
        ));
        rows.push(LimitRow::new(
            LimitGroup::Stationary,
            "chi_m static",
            ("closed", chi_m_closed),
            ("quadrature", chi_m_quad),
            Some(1e-8),
        ));
        let (pauli, landau) = pauli_landau(&nr)?;
        rows.push(LimitRow::new(
            LimitGroup::Stationary,
            "chi_m static",
            ("closed", chi_m_closed),
            ("Pauli+Landau", pauli + landau),
            nr_tol(5e-3),
        ));

        let ae2 = drude_ae2(state.zeta, e2);
        let am2 = if state.zeta > 1.0 {
            drude_scalars(1.0, state)?.am2
        } else {
            0.0
        };
        let m = moment_integrals_closed(0.0, state.zeta)?;
        let ae2_moments = e2 / (12.0 * PI * PI) * (2.0 * m.i0 + m.i1);
        rows.push(LimitRow::new(
            LimitGroup::Drude,
            "a_e^2",
            ("closed", ae2),
            ("moments", ae2_moments),
            Some(1e-10),
        ));
        rows.push(LimitRow::new(
            LimitGroup::Drude,
            "a_m^2 / 2",
            ("a_e^2", ae2),
            ("a_m^2 / 2", 0.5 * am2),
            Some(0.0),
        ));
        let nr_w2 = nr_plasmon_omega2(&nr, tol)?;
        rows.push(LimitRow::new(
            LimitGroup::Drude,
            "a_e^2",
            ("closed", ae2),
            ("NR omega_e^2/4", 0.25 * nr_w2),
            nr_tol(1e-2),
        ));

        let a2 = 0.01;
        let h = 1e-4;
        let fd = (moment_integrals_closed(a2 + h, state.zeta)?.i1
            - moment_integrals_closed(a2 - h, state.zeta)?.i1)
            / (2.0 * h);
        let i2 = moment_integrals_closed(a2, state.zeta)?.i2;
        rows.push(LimitRow::new(
            LimitGroup::Drude,
            "I2(0.01)",
            ("dI1/da^2", fd),
            ("closed", i2),
            (state.zeta > 1.0).then_some(1e-5),
        ));

        if state.zeta > 1.0 {
            let (_, big) = plasmon_frequency(state, tol)?;
            rows.push(LimitRow::new(
                LimitGroup::Drude,
                "Omega_e",
                ("Drude", drude_plasmon_omega2(state).sqrt()),
                ("zero of eps", big),
                None,
            ));
        }
    }
    let tf_nr = thomas_fermi_mass2_nr(&nr, tol)?;
    rows.push(LimitRow::new(
        LimitGroup::Stationary,
        "m_TF^2",
        ("quadrature", tf_quad),
        ("NR", tf_nr),
        nr_tol(1e-3),
    ));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn lindhard_static_long_wavelength_is_thomas_fermi() {
        let nr = NRState::new(5e-5, 0.0).unwrap();
        assert!((nr.p_f - 0.01).abs() < 1e-15);
        let q = 1e-2 * nr.p_f;
        let chi = lindhard_chi_e(0.0, q, &nr, 1e-6).unwrap().value;
        let tf = thomas_fermi_mass2_nr(&nr, 1e-12).unwrap() / (q * q);
        assert!(rel(chi, tf) < 1e-4, "{chi} vs {tf}");
    }

    #[test]
    fn lindhard_static_shape() {
        let nr = NRState::new(5e-3, 0.0).unwrap();
        for &u in &[0.3, 0.9, 1.0, 1.5, 3.0] {
            let q = 2.0 * nr.p_f * u;
            let chi = lindhard_chi_e(0.0, q, &nr, 1e-10).unwrap().value;
            let closed = lindhard_static_closed(q, &nr);
            assert!(rel(chi, closed) < 1e-8, "u={u}: {chi} vs {closed}");
        }
        let q = 2.0 * nr.p_f;
        let small = 1e-4 * nr.p_f;
        let ratio = lindhard_static_closed(q, &nr) * q * q
            / (lindhard_static_closed(small, &nr) * small * small);
        assert!((ratio - 0.5).abs() < 1e-6);
    }

    #[test]
    fn lindhard_empty_gas() {
        let nr = NRState::new(0.0, 0.0).unwrap();
        assert_eq!(lindhard_chi_e(0.1, 0.01, &nr, 1e-9).unwrap().value, 0.0);
        assert!(lindhard_chi_e(0.0, 0.0, &nr, 1e-9).is_err());
    }

    #[test]
    fn lindhard_dynamic_long_wavelength_is_drude() {
        // omega >> q p_F: chi_e -> -omega_e^2 / omega^2
        let nr = NRState::new(5e-3, 0.0).unwrap();
        let w = 0.01;
        let chi = lindhard_chi_e(w, 1e-5, &nr, 1e-6).unwrap().value;
        let drude = -nr_plasmon_omega2(&nr, 1e-12).unwrap() / (w * w);
        assert!(rel(chi, drude) < 1e-4, "{chi} vs {drude}");
    }

    #[test]
    fn plasmon_examples() {
        let nr = NRState::new(0.0, 0.0).unwrap();
        assert_eq!(nr_plasmon_omega2(&nr, 1e-9).unwrap(), 0.0);
        let nr = NRState::new(5e-5, 0.0).unwrap();
        let w2 = nr_plasmon_omega2(&nr, 1e-9).unwrap();
        assert!((w2 - E2_DEFAULT / (3.0 * PI * PI) * 1e-6).abs() < 1e-20);
        assert!((w2 - 3.097e-9).abs() < 1e-12);
    }

    #[test]
    fn finite_temperature_plasmon_approaches_degenerate() {
        let cold = NRState::new(5e-3, 0.0).unwrap();
        let warm = NRState::new(5e-3, 1e-6).unwrap();
        let a = nr_plasmon_omega2(&cold, 1e-16).unwrap();
        let b = nr_plasmon_omega2(&warm, 1e-16).unwrap();
        assert!(rel(b, a) < 1e-6);
    }

    #[test]
    fn relativistic_drude_meets_nonrelativistic_plasmon() {
        let pf: f64 = 0.05;
        let zeta = (1.0 + pf * pf).sqrt();
        let nr = NRState::new(zeta - 1.0, 0.0).unwrap();
        let nr_direct = E2_DEFAULT / (3.0 * PI * PI) * pf.powi(3);
        let ratio = drude_ae2(zeta, E2_DEFAULT) * 4.0 / nr_direct;
        assert!((ratio - 1.0).abs() < 0.01, "{ratio}");
        // p_F = sqrt(2 xi') differs from sqrt(zeta^2 - 1) at O(p_F^2)
        let ratio_nr = drude_ae2(zeta, E2_DEFAULT) * 4.0 / nr_plasmon_omega2(&nr, 1e-12).unwrap();
        assert!((ratio_nr - 1.0).abs() < 0.01, "{ratio_nr}");
    }

    #[test]
    fn pauli_landau_ratio() {
        let (p, l) = pauli_landau(&NRState::new(0.0, 0.0).unwrap()).unwrap();
        assert_eq!((p, l), (0.0, 0.0));
        let nr = NRState::new(5e-5, 0.0).unwrap();
        let (p, l) = pauli_landau(&nr).unwrap();
        assert_eq!(p / l, -3.0);
        let sum = E2_DEFAULT / (6.0 * PI * PI) * nr.p_f;
        assert!(rel(p + l, sum) < 1e-14);
        assert!((sum - 1.549e-5).abs() < 1e-8);
        assert!(pauli_landau(&NRState::new(5e-5, 0.01).unwrap()).is_err());
    }

    #[test]
    fn thomas_fermi_examples() {
        assert_eq!(
            thomas_fermi_mass2(&ThermoState::degenerate(1.0).unwrap(), 1e-9)
                .unwrap()
                .value,
            0.0
        );
        let s = ThermoState::degenerate(2.0).unwrap();
        let closed = thomas_fermi_mass2(&s, 1e-9).unwrap().value;
        let quad = thomas_fermi_mass2_quadrature(&s, 1e-14).unwrap().value;
        assert!(rel(quad, closed) < 1e-10);
        assert!((closed - 2.7196e-2).abs() < 2e-5);

        let zeta = 1.0 + 5e-5;
        let s = ThermoState::degenerate(zeta).unwrap();
        let pf = s.fermi_momentum();
        let nr_value = E2_DEFAULT / (PI * PI) * pf;
        assert!(rel(thomas_fermi_mass2(&s, 1e-9).unwrap().value, nr_value) < 1e-3);
    }

    #[test]
    fn nr_state_validation() {
        assert!(NRState::new(-0.1, 0.0).is_err());
        assert!(NRState::new(0.1, -1.0).is_err());
        let warm = NRState::new(-0.01, 0.01).unwrap();
        assert_eq!(warm.p_f, 0.0);
    }

    #[test]
    fn plasmon_root_is_true_zero() {
        let s = ThermoState::degenerate(2.0).unwrap();
        let (we, big) = plasmon_frequency(&s, 1e-12).unwrap();
        assert!(
            (we - 2.0 * (E2_DEFAULT / (12.0 * PI * PI) * 1.5 * 3.0f64.sqrt()).sqrt()).abs() < 1e-15
        );
        assert!((we - 0.08970).abs() < 5e-5);
        assert!(longwave_eps(big, &s, 1e-12).unwrap().abs() < 1e-10);
        assert!(rel(big * big, we * we) < 2e-3);
        assert!(rel(big * big, drude_plasmon_omega2(&s)) < 1e-3);
    }

    #[test]
    fn plasmon_vanishes_near_empty_sea() {
        let s = ThermoState::degenerate(1.0 + 1e-6).unwrap();
        let (we, big) = plasmon_frequency(&s, 1e-12).unwrap();
        assert!(we < 1e-4 && big < 1e-4);
        assert!(plasmon_frequency(&ThermoState::degenerate(1.0).unwrap(), 1e-9).is_err());
    }

    #[test]
    fn report_rows_pass() {
        for zeta in [2.0, 1.0 + 5e-5] {
            let rows = limits_report(&ThermoState::degenerate(zeta).unwrap(), 1e-12).unwrap();
            for r in &rows {
                assert!(r.passed(), "zeta={zeta}: {r:?}");
            }
        }
    }

    #[test]
    fn report_of_empty_sea_is_zero() {
        let rows = limits_report(&ThermoState::degenerate(1.0).unwrap(), 1e-9).unwrap();
        assert!(!rows.is_empty());
        for r in &rows {
            assert_eq!(
                (r.reference, r.value, r.deviation),
                (0.0, 0.0, 0.0),
                "{r:?}"
            );
        }
    }
}
