//! Thermodynamic state, probe kinematics and the Fermi occupation.
//!
//! Everything is expressed in units of the electron mass with
//! `hbar = c = m = 1`: temperatures, chemical potentials, frequencies and
//! wavevectors are all plain ratios to `m`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Squared coupling fixed by `e^2 / 4 pi = 1/137`.
pub const E2_DEFAULT: f64 = 4.0 * PI / 137.0;

/// Default absolute quadrature tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Temperature, chemical potential and coupling of the gas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermoState {
    /// `T / m`; zero selects the exact step-function occupation.
    pub t: f64,
    /// `xi / m`.
    pub zeta: f64,
    pub e2: f64,
}

impl ThermoState {
    pub fn new(t: f64, zeta: f64) -> Result<Self> {
        Self::with_coupling(t, zeta, E2_DEFAULT)
    }

    pub fn with_coupling(t: f64, zeta: f64, e2: f64) -> Result<Self> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::domain(format!(
                "temperature must be finite and >= 0, got {t}"
            )));
        }
        if !(zeta.is_finite() && zeta >= 0.0) {
            return Err(Error::domain(format!(
                "chemical potential must be finite and >= 0, got {zeta}"
            )));
        }
        if !(e2.is_finite() && e2 > 0.0) {
            return Err(Error::domain(format!(
                "coupling must be finite and > 0, got {e2}"
            )));
        }
        Ok(Self { t, zeta, e2 })
    }

    /// Zero-temperature gas.
    pub fn degenerate(zeta: f64) -> Result<Self> {
        Self::new(0.0, zeta)
    }

    pub fn is_degenerate(&self) -> bool {
        self.t == 0.0
    }

    /// No particles at all: the medium contributions vanish identically.
    pub fn is_empty(&self) -> bool {
        self.t == 0.0 && self.zeta <= 1.0
    }

    /// Fermi momentum `sqrt(zeta^2 - 1)`; zero below the mass shell.
    pub fn fermi_momentum(&self) -> f64 {
        if self.zeta > 1.0 {
            ((self.zeta - 1.0) * (self.zeta + 1.0)).sqrt()
        } else {
            0.0
        }
    }

    pub fn occupation(&self, x: f64) -> Result<f64> {
        fermi_occupation(x, self)
    }
}

/// Probe frequency and wavevector magnitude.
///
/// `a = omega / 2` and `b = qmag / 2` are the halved variables used by the
/// angular-integrated kernels; `qm2 = omega^2 - qmag^2` is the Minkowski
/// invariant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kinematics {
    pub omega: f64,
    pub qmag: f64,
    pub a: f64,
    pub b: f64,
    pub qm2: f64,
}

impl Kinematics {
    pub fn new(omega: f64, qmag: f64) -> Result<Self> {
        make_kinematics(omega, qmag)
    }

    /// Kinematics from the halved variables.
    pub fn from_halved(a: f64, b: f64) -> Result<Self> {
        make_kinematics(2.0 * a, 2.0 * b)
    }
}

pub fn make_kinematics(omega: f64, qmag: f64) -> Result<Kinematics> {
    if !(omega.is_finite() && omega >= 0.0) {
        return Err(Error::domain(format!(
            "frequency must be finite and >= 0, got {omega}"
        )));
    }
    if !(qmag.is_finite() && qmag >= 0.0) {
        return Err(Error::domain(format!(
            "wavevector must be finite and >= 0, got {qmag}"
        )));
    }
    Ok(Kinematics {
        omega,
        qmag,
        a: 0.5 * omega,
        b: 0.5 * qmag,
        qm2: omega * omega - qmag * qmag,
    })
}

/// `1 / (exp(u) + 1)` without overflow for large `|u|`.
#[inline]
pub(crate) fn logistic_tail(u: f64) -> f64 {
    if u > 0.0 {
        let e = (-u).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + u.exp())
    }
}

/// Particle plus antiparticle occupation at energy `x = omega_p / m`.
///
/// At `t = 0` this is the step `Theta(zeta - x)` with the midpoint value at
/// the Fermi surface.
pub fn fermi_occupation(x: f64, state: &ThermoState) -> Result<f64> {
    if !(x >= 1.0) {
        return Err(Error::domain(format!(
            "energy must be >= 1 (mass shell), got {x}"
        )));
    }
    Ok(occupation_unchecked(x, state))
}

#[inline]
pub(crate) fn occupation_unchecked(x: f64, state: &ThermoState) -> f64 {
    if state.t == 0.0 {
        if x < state.zeta {
            1.0
        } else if x > state.zeta {
            0.0
        } else {
            0.5
        }
    } else {
        logistic_tail((x - state.zeta) / state.t) + logistic_tail((x + state.zeta) / state.t)
    }
}
