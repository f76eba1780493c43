//! The three scalar functions that fix the linear response of the gas.
//!
//! `C*` is the vacuum polarization; `A*` and `B*` (and the auxiliary
//! combination `D*`) are the medium parts. Each medium function is
//! available through several independent routes:
//!
//! * full kinematics: one-dimensional Fermi-weighted integrals of the
//!   angular-integrated logarithmic kernels `f1`, `f2`;
//! * long wavelength (`|q| -> 0` at fixed `omega`): combinations of the
//!   moment integrals `I0`, `I1`, `I2`;
//! * stationary (`omega = 0`, `|q| -> 0`);
//! * zero-temperature closed forms for all of the above.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_momentum, integrate_semi_infinite, Breakpoints, IntegralResult};
use crate::state::{Kinematics, ThermoState};

/// Full-kinematics formulas are refused for `|q_M^2|` below this.
pub const LIGHT_CONE_GUARD: f64 = 1e-8;

/// Auto-selection uses the long-wavelength route for `b` below this.
pub const LONGWAVE_MAX_B: f64 = 1e-3;

/// ... and for `a` below this.
pub const LONGWAVE_MAX_A: f64 = 0.9;

// Below this |q_M^2| the vacuum function is summed from its power series.
const VACUUM_SERIES_RADIUS: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "full")]
    FullKinematics,
    #[serde(rename = "longwave")]
    LongWavelength,
    #[serde(rename = "stationary")]
    Stationary,
    #[serde(rename = "vacuum")]
    Vacuum,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::FullKinematics => "full",
            Regime::LongWavelength => "longwave",
            Regime::Stationary => "stationary",
            Regime::Vacuum => "vacuum",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum RegimeChoice {
    #[default]
    Auto,
    Fixed(Regime),
}

impl std::str::FromStr for RegimeChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "auto" => RegimeChoice::Auto,
            "full" => RegimeChoice::Fixed(Regime::FullKinematics),
            "longwave" => RegimeChoice::Fixed(Regime::LongWavelength),
            "stationary" => RegimeChoice::Fixed(Regime::Stationary),
            "vacuum" => RegimeChoice::Fixed(Regime::Vacuum),
            other => return Err(Error::domain(format!("unknown regime '{other}'"))),
        })
    }
}

/// A value together with its numerical error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Estimate {
    pub value: f64,
    pub err_est: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            err_est: 0.0,
        }
    }

    fn scaled(r: IntegralResult, factor: f64) -> Self {
        Self {
            value: factor * r.value,
            err_est: factor.abs() * r.err_est,
        }
    }
}

/// Scalar functions at one kinematic point.
///
/// `b_ratio = (omega^2 / |q|^2) B*` and `c_ratio = C* / q_M^2` stay finite
/// in the limits where `B*` or `1/q_M^2` alone do not (long wavelength and
/// the light cone respectively).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalarTriple {
    pub a_star: f64,
    pub b_star: f64,
    pub c_star: f64,
    pub d_star: f64,
    pub b_ratio: f64,
    pub c_ratio: f64,
    pub err_est: f64,
    pub regime: Regime,
}

impl ScalarTriple {
    /// Vacuum-only scalars (medium parts set to zero) at the same point.
    pub fn vacuum_part(&self) -> Self {
        Self {
            a_star: 0.0,
            b_star: 0.0,
            d_star: 0.0,
            b_ratio: 0.0,
            err_est: 0.0,
            ..*self
        }
    }
}

fn e2_over_pi2(e2: f64) -> f64 {
    e2 / (PI * PI)
}

/// `(n + 1)!^2 / ((2n + 3)! n)` for n = 1, 2, ...
fn vacuum_series_sum(qm2: f64, skip_one_power: bool) -> f64 {
    // Beta(n + 2, n + 2)
    let mut beta = 1.0 / 30.0;
    let mut power = if skip_one_power { 1.0 } else { qm2 };
    let mut sum = 0.0;
    for n in 1..200 {
        let term = power * beta / n as f64;
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
        let nf = n as f64;
        beta *= (nf + 2.0) * (nf + 2.0) / ((2.0 * nf + 4.0) * (2.0 * nf + 5.0));
        power *= qm2;
    }
    sum
}

fn vacuum_c_closed(qm2: f64, e2: f64) -> f64 {
    // h * arccot(h) with h = sqrt(4/q^2 - 1), continued to q^2 < 0
    let h_arccot = if qm2 > 0.0 {
        let h = (4.0 / qm2 - 1.0).sqrt();
        h * (1.0 / h).atan()
    } else {
        let k = (1.0 - 4.0 / qm2).sqrt();
        k * (1.0 / k).atanh()
    };
    -e2 / (12.0 * PI * PI) * (1.0 / 3.0 + 2.0 * (1.0 + 2.0 / qm2) * (h_arccot - 1.0))
}

fn check_vacuum_domain(qm2: f64) -> Result<()> {
    if !qm2.is_finite() {
        return Err(Error::domain(format!("q_M^2 must be finite, got {qm2}")));
    }
    if qm2 >= 4.0 {
        return Err(Error::domain(format!(
            "q_M^2 = {qm2} is at or above the pair threshold 4 m^2"
        )));
    }
    Ok(())
}

/// Renormalized vacuum polarization `C*(q_M^2)` below the pair threshold.
///
/// Real for spacelike `q_M^2 < 0` through the continuation
/// `h arccot h -> (k/2) ln((k+1)/(k-1))`, `k = sqrt(1 - 4/q_M^2)`.
pub fn vacuum_c(qm2: f64, e2: f64) -> Result<f64> {
    check_vacuum_domain(qm2)?;
    if qm2 == 0.0 {
        return Ok(0.0);
    }
    if qm2.abs() < VACUUM_SERIES_RADIUS {
        return Ok(e2 / (2.0 * PI * PI) * vacuum_series_sum(qm2, false));
    }
    Ok(vacuum_c_closed(qm2, e2))
}

/// `C* / q_M^2`, finite on the light cone where it equals `e^2 / 60 pi^2`.
pub fn vacuum_c_ratio(qm2: f64, e2: f64) -> Result<f64> {
    check_vacuum_domain(qm2)?;
    if qm2.abs() < VACUUM_SERIES_RADIUS {
        return Ok(e2 / (2.0 * PI * PI) * vacuum_series_sum(qm2, true));
    }
    Ok(vacuum_c_closed(qm2, e2) / qm2)
}

/// `ln |(c - d) / (c + d)|`, accurate when `d << c` or `c << d`.
#[inline]
pub fn log_ratio(c: f64, d: f64) -> f64 {
    if c == 0.0 && d == 0.0 {
        return 0.0;
    }
    let r = if d.abs() <= c.abs() { d / c } else { c / d };
    -2.0 * r.atanh()
}

/// Angular-integrated logarithmic kernels at one energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogKernels {
    pub f1: f64,
    pub f2: f64,
}

/// [`log_kernels`] for either sign of the halved variables, without the
/// domain checks. Singular energies give non-finite values.
#[inline]
pub fn log_kernels_signed(x: f64, a: f64, b: f64) -> LogKernels {
    let bs = b * (x * x - 1.0).max(0.0).sqrt();
    let ax = a * x;
    let a2 = a * a;
    let c1 = a2 - b * b;
    LogKernels {
        f1: log_ratio(ax + c1, bs) + log_ratio(c1 - ax, bs),
        f2: log_ratio(a2 - ax, bs) - log_ratio(a2 + ax, bs),
    }
}

/// `f1` and `f2` at `x = omega_p / m`.
///
/// With `L1(a, b) = ln|a x + b sqrt(x^2-1) + a^2 - b^2|` and
/// `L2(a, b) = ln|a x + b sqrt(x^2-1) + a^2|`,
///
/// ```text
/// f1 = -L1(a,b) - L1(-a,b) + L1(a,-b) + L1(-a,-b)
/// f2 =  L2(a,b) + L2(-a,-b) - L2(a,-b) - L2(-a,b)
/// ```
///
/// The logarithms are paired so that each pair is one `atanh`, which keeps
/// full relative precision as `b -> 0`.
pub fn log_kernels(x: f64, kin: &Kinematics) -> Result<LogKernels> {
    if !(kin.b > 0.0) {
        return Err(Error::domain("log kernels need |q| > 0"));
    }
    if !(x >= 1.0) {
        return Err(Error::domain(format!("energy must be >= 1, got {x}")));
    }
    let k = log_kernels_signed(x, kin.a, kin.b);
    if !(k.f1.is_finite() && k.f2.is_finite()) {
        return Err(Error::domain(format!(
            "x = {x} is a logarithmic singularity of the kernels"
        )));
    }
    Ok(k)
}

/// Energies `x >= 1` where one of the eight logarithm arguments vanishes.
///
/// Each family `(+-a) x + (+-b) sqrt(x^2-1) + c = 0` with `c = a^2 - b^2`
/// or `c = a^2` squares to `(a^2-b^2) x^2 +- 2 a c x + c^2 + b^2 = 0`;
/// candidates are kept only if the unsquared equation holds for one sign
/// of `b`.
pub fn locate_log_singularities(kin: &Kinematics) -> Breakpoints {
    let (a, b) = (kin.a, kin.b);
    let lead = a * a - b * b;
    let mut found = Vec::new();
    for sa in [1.0, -1.0] {
        for c in [a * a - b * b, a * a] {
            let lin = 2.0 * sa * a * c;
            let cst = c * c + b * b;
            let mut cands = Vec::new();
            if lead.abs() <= 1e-14 * (a * a + b * b) {
                if lin != 0.0 {
                    cands.push(-cst / lin);
                }
            } else {
                let disc = lin * lin - 4.0 * lead * cst;
                if disc >= 0.0 {
                    let sq = disc.sqrt();
                    let qq = -0.5 * (lin + lin.signum() * sq);
                    if qq != 0.0 {
                        cands.push(qq / lead);
                        cands.push(cst / qq);
                    } else {
                        cands.push(0.5 * sq / lead);
                        cands.push(-0.5 * sq / lead);
                    }
                }
            }
            for x in cands {
                if !(x.is_finite() && x >= 1.0) {
                    continue;
                }
                if (a * x).abs() + c.abs() == 0.0 {
                    // ln|b s| pairs cancel identically in f2
                    continue;
                }
                let s = (x * x - 1.0).sqrt();
                let scale = 1.0f64.max((a * x).abs() + (b * s).abs() + c.abs());
                let res = (sa * a * x + b * s + c)
                    .abs()
                    .min((sa * a * x - b * s + c).abs());
                if res < 1e-12 * scale {
                    found.push(x);
                }
            }
        }
    }
    Breakpoints::new(found)
}

fn full_kinematics_guard(kin: &Kinematics) -> Result<()> {
    if !(kin.qmag > 0.0) {
        return Err(Error::domain("full kinematics needs |q| > 0"));
    }
    if kin.qm2.abs() < LIGHT_CONE_GUARD {
        return Err(Error::LightConeSingular { qm2: kin.qm2 });
    }
    Ok(())
}

/// `atanh(u) - u`.
#[inline]
fn atanh_excess(u: f64) -> f64 {
    if u.abs() >= 0.1 {
        return u.atanh() - u;
    }
    let u2 = u * u;
    let mut p = u * u2;
    let mut sum = 0.0f64;
    let mut k = 3.0;
    while p.abs() > 1e-18 * sum.abs() && k < 60.0 {
        sum += p / k;
        p *= u2;
        k += 2.0;
    }
    sum
}

// Integrands in x; the common prefactor is -e^2 / (pi^2 q_M^2).
#[inline]
fn b_integrand(x: f64, a: f64, b: f64) -> f64 {
    let s = (x * x - 1.0).sqrt();
    let bs = b * s;
    let a2 = a * a;
    let c1 = a2 - b * b;
    let u1 = bs / (a * x + c1);
    let u2 = bs / (c1 - a * x);
    let v1 = bs / (a2 - a * x);
    let v2 = bs / (a2 + a * x);
    if u1.abs().max(u2.abs()).max(v1.abs()).max(v2.abs()) < 0.5 {
        // The O(b) parts of the logarithms cancel the sqrt term exactly;
        // what is left is written out so that nothing large cancels.
        let x2 = x * x;
        let linear =
            -bs * b * x2 * (x2 + 3.0 * a2 - 2.0 * b * b) / ((x2 - a2) * (a2 * x2 - c1 * c1));
        let g1 = atanh_excess(u1) + atanh_excess(u2);
        let g2 = atanh_excess(v1) - atanh_excess(v2);
        return linear - (x2 + c1) / (2.0 * b) * g1 + x * a / b * g2;
    }
    let k = log_kernels_signed(x, a, b);
    s + (x * x + a * a - b * b) / (4.0 * b) * k.f1 - x * a / (2.0 * b) * k.f2
}

#[inline]
fn d_integrand(x: f64, a: f64, b: f64) -> f64 {
    let k = log_kernels_signed(x, a, b);
    (x * x - 1.0).sqrt() + (1.0 + 2.0 * a * a - 2.0 * b * b) / (8.0 * b) * k.f1
}

fn full_prefactor(kin: &Kinematics, state: &ThermoState) -> f64 {
    -state.e2 / (PI * PI * kin.qm2)
}

/// `1 + 3 q_M^2 / (2 |q|^2)`, the weight of `B*` in `A* = D* + k B*`.
pub fn d_weight(kin: &Kinematics) -> f64 {
    1.0 + 1.5 * kin.qm2 / (kin.qmag * kin.qmag)
}

/// `B*` from the full-kinematics integral.
pub fn medium_b_full(kin: &Kinematics, state: &ThermoState, tol: f64) -> Result<Estimate> {
    full_kinematics_guard(kin)?;
    let pref = full_prefactor(kin, state);
    let breaks = locate_log_singularities(kin);
    let (a, b) = (kin.a, kin.b);
    let r = integrate_semi_infinite(|x| b_integrand(x, a, b), state, &breaks, tol / pref.abs())?;
    Ok(Estimate::scaled(r, pref))
}

/// `D* = A* - (1 + 3 q_M^2 / 2|q|^2) B*` from its own integral.
pub fn medium_d_full(kin: &Kinematics, state: &ThermoState, tol: f64) -> Result<Estimate> {
    full_kinematics_guard(kin)?;
    let pref = full_prefactor(kin, state);
    let breaks = locate_log_singularities(kin);
    let (a, b) = (kin.a, kin.b);
    let r = integrate_semi_infinite(|x| d_integrand(x, a, b), state, &breaks, tol / pref.abs())?;
    Ok(Estimate::scaled(r, pref))
}

/// `A* = D* + (1 + 3 q_M^2 / 2|q|^2) B*`.
///
/// The two integrands are combined pointwise before integration; near
/// `|q| -> 0` the weight grows like `a^2 / b^2` and the large pieces cancel.
pub fn medium_a_full(kin: &Kinematics, state: &ThermoState, tol: f64) -> Result<Estimate> {
    full_kinematics_guard(kin)?;
    let pref = full_prefactor(kin, state);
    let w = d_weight(kin);
    let breaks = locate_log_singularities(kin);
    let (a, b) = (kin.a, kin.b);
    let r = integrate_semi_infinite(
        |x| d_integrand(x, a, b) + w * b_integrand(x, a, b),
        state,
        &breaks,
        tol / pref.abs(),
    )?;
    Ok(Estimate::scaled(r, pref))
}

/// `I(j)(a^2) = Integral_1^inf n_F(x) sqrt(x^2 - 1) / (x^2 - a^2)^j dx`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MomentIntegrals {
    pub i0: f64,
    pub i1: f64,
    pub i2: f64,
    pub err_est: f64,
}

/// `y / sqrt|1 - y^2|`.
pub fn sigma_helper(y: f64) -> f64 {
    y / (1.0 - y * y).abs().sqrt()
}

fn check_a2(a2: f64) -> Result<()> {
    if !(0.0..1.0).contains(&a2) {
        return Err(Error::domain(format!("a^2 must lie in [0, 1), got {a2}")));
    }
    Ok(())
}

/// Zero-temperature closed forms.
///
/// `I1 = arccosh(zeta) - arctan(s_a / s_z) / s_a` with `s = sigma_helper`.
/// Writing `y = s_a / s_z`, its `a^2` derivative is
///
/// ```text
/// I2 = [arctan(y) - y / (1 + y^2)] / (2 y^3 s_z^3 (1 - a^2)^2)
/// ```
///
/// which is summed as `(2/3 - 4/5 y^2 + 6/7 y^4 - ...) / (2 s_z^3 (1-a^2)^2)`
/// for small `y`.
pub fn moment_integrals_closed(a2: f64, zeta: f64) -> Result<MomentIntegrals> {
    check_a2(a2)?;
    if zeta <= 1.0 {
        return Ok(MomentIntegrals::default());
    }
    let w = ((zeta - 1.0) * (zeta + 1.0)).sqrt();
    let acosh = zeta.acosh();
    let sz = zeta / w;
    let sa = sigma_helper(a2.sqrt());
    let y = sa / sz;
    let i0 = 0.5 * (zeta * w - acosh);
    let j = if y < 1e-8 { 1.0 / sz } else { y.atan() / sa };
    let one_minus = 1.0 - a2;
    let i2 = if y < 0.1 {
        let y2 = y * y;
        let mut sum = 0.0;
        let mut p = 1.0;
        for k in 1..40 {
            let kf = k as f64;
            let term = p * 2.0 * kf / (2.0 * kf + 1.0);
            sum += if k % 2 == 1 { term } else { -term };
            p *= y2;
            if p < 1e-18 {
                break;
            }
        }
        sum / (2.0 * sz.powi(3) * one_minus * one_minus)
    } else {
        (y.atan() - y / (1.0 + y * y)) / (2.0 * (y * sz).powi(3) * one_minus * one_minus)
    };
    Ok(MomentIntegrals {
        i0,
        i1: acosh - j,
        i2,
        err_est: 0.0,
    })
}

/// Moment integrals by quadrature, at any temperature.
pub fn moment_integrals_quadrature(
    a2: f64,
    state: &ThermoState,
    tol: f64,
) -> Result<MomentIntegrals> {
    check_a2(a2)?;
    let none = Breakpoints::empty();
    let r0 = integrate_semi_infinite(|x| (x * x - 1.0).sqrt(), state, &none, tol)?;
    let r1 = integrate_semi_infinite(|x| (x * x - 1.0).sqrt() / (x * x - a2), state, &none, tol)?;
    let r2 = integrate_semi_infinite(
        |x| {
            let d = x * x - a2;
            (x * x - 1.0).sqrt() / (d * d)
        },
        state,
        &none,
        tol,
    )?;
    Ok(MomentIntegrals {
        i0: r0.value,
        i1: r1.value,
        i2: r2.value,
        err_est: r0.err_est.max(r1.err_est).max(r2.err_est),
    })
}

/// Closed forms at `t = 0`, quadrature otherwise.
pub fn moment_integrals(a2: f64, state: &ThermoState, tol: f64) -> Result<MomentIntegrals> {
    if state.is_degenerate() {
        moment_integrals_closed(a2, state.zeta)
    } else {
        moment_integrals_quadrature(a2, state, tol)
    }
}

fn check_longwave_a(a: f64) -> Result<()> {
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::domain(format!(
            "long-wavelength expansion needs 0 < a < 1, got {a}"
        )));
    }
    Ok(())
}

/// `(a^2 / b^2) B*` as `b -> 0`.
pub fn longwave_b(a: f64, state: &ThermoState, tol: f64) -> Result<Estimate> {
    check_longwave_a(a)?;
    let a2 = a * a;
    let m = moment_integrals(a2, state, tol * a2)?;
    let k = state.e2 / (4.0 * PI * PI);
    let c0 = 2.0 / (3.0 * a2);
    let c1 = (1.0 + 14.0 * a2) / (3.0 * a2);
    let c2 = 4.0 * a2;
    Ok(Estimate {
        value: k * (c0 * m.i0 + c1 * m.i1 + c2 * m.i2),
        err_est: k * (c0 + c1 + c2) * m.err_est,
    })
}

/// `A*` as `b -> 0`: `(3 e^2 / 2 pi^2) [I1 + a^2 I2]`.
///
/// The sign is the one obtained by taking `b -> 0` in the full-kinematics
/// integrals.
pub fn longwave_a(a: f64, state: &ThermoState, tol: f64) -> Result<Estimate> {
    check_longwave_a(a)?;
    let a2 = a * a;
    let m = moment_integrals(a2, state, tol)?;
    let k = 1.5 * state.e2 / (PI * PI);
    Ok(Estimate {
        value: k * (m.i1 + a2 * m.i2),
        err_est: k * (1.0 + a2) * m.err_est,
    })
}

/// `D*` as `b -> 0`: `-(e^2 / 4 pi^2 a^2) [I0 + (1 + 2a^2) I1 / 2]`.
pub fn longwave_d(a: f64, state: &ThermoState, tol: f64) -> Result<Estimate> {
    check_longwave_a(a)?;
    let a2 = a * a;
    let m = moment_integrals(a2, state, tol * a2)?;
    let k = -state.e2 / (4.0 * PI * PI * a2);
    Ok(Estimate {
        value: k * (m.i0 + 0.5 * (1.0 + 2.0 * a2) * m.i1),
        err_est: k.abs() * 2.0 * m.err_est,
    })
}

/// The two static momentum integrals
/// `j0 = Integral dp n_F / omega_p` and
/// `j1 = Integral dp n_F (1 + 3p^2/2) / omega_p`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StaticIntegrals {
    pub j0: Estimate,
    pub j1: Estimate,
}

pub fn static_integrals_closed(zeta: f64) -> StaticIntegrals {
    if zeta <= 1.0 {
        return StaticIntegrals::default();
    }
    let w = ((zeta - 1.0) * (zeta + 1.0)).sqrt();
    let acosh = zeta.acosh();
    StaticIntegrals {
        j0: Estimate::exact(acosh),
        j1: Estimate::exact(0.25 * acosh + 0.75 * zeta * w),
    }
}

pub fn static_integrals_quadrature(state: &ThermoState, tol: f64) -> Result<StaticIntegrals> {
    let r0 = integrate_momentum(|p| 1.0 / (1.0 + p * p).sqrt(), state, tol)?;
    let r1 = integrate_momentum(|p| (1.0 + 1.5 * p * p) / (1.0 + p * p).sqrt(), state, tol)?;
    Ok(StaticIntegrals {
        j0: Estimate::scaled(r0, 1.0),
        j1: Estimate::scaled(r1, 1.0),
    })
}

pub fn static_integrals(state: &ThermoState, tol: f64) -> Result<StaticIntegrals> {
    if state.is_degenerate() {
        Ok(static_integrals_closed(state.zeta))
    } else {
        static_integrals_quadrature(state, tol)
    }
}

/// `(A*, B*)` at `omega = 0` in the long-wavelength limit:
/// `A* = -(e^2/6 pi^2) j0` and `B* = (e^2/pi^2) j1 / |q|^2`.
pub fn stationary_scalars(
    qmag: f64,
    state: &ThermoState,
    tol: f64,
) -> Result<(Estimate, Estimate)> {
    if !(qmag > 0.0 && qmag.is_finite()) {
        return Err(Error::domain(format!(
            "stationary scalars need |q| > 0, got {qmag}"
        )));
    }
    let s = static_integrals(state, tol)?;
    let ka = -state.e2 / (6.0 * PI * PI);
    let kb = e2_over_pi2(state.e2) / (qmag * qmag);
    Ok((
        Estimate {
            value: ka * s.j0.value,
            err_est: ka.abs() * s.j0.err_est,
        },
        Estimate {
            value: kb * s.j1.value,
            err_est: kb * s.j1.err_est,
        },
    ))
}

/// Zero-temperature Drude truncation of the long-wavelength responses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrudeScalars {
    pub eps: f64,
    pub mu_inv: f64,
    /// `omega_e^2 / 4 m^2`.
    pub ae2: f64,
    /// `omega_m^2 / 4 m^2`, always `2 ae2`.
    pub am2: f64,
}

/// `omega_e^2 / 4m^2 = (e^2 / 12 pi^2) (zeta^2 - 1)^{3/2} / zeta`.
pub fn drude_ae2(zeta: f64, e2: f64) -> f64 {
    if zeta <= 1.0 {
        return 0.0;
    }
    let w2 = (zeta - 1.0) * (zeta + 1.0);
    e2 / (12.0 * PI * PI) * w2 * w2.sqrt() / zeta
}

/// O(e^2) constant in the electric Drude form,
/// `arccosh(zeta) - 1/s - 1/(12 s^3)` with `s = zeta / sqrt(zeta^2 - 1)`.
///
/// This is `I1(0) - I2(0)/4`, the `a^0` term of `1 + A* - (a^2/b^2) B*`.
pub fn g_electric(zeta: f64) -> f64 {
    if zeta <= 1.0 {
        return 0.0;
    }
    let s = sigma_helper(zeta);
    zeta.acosh() - 1.0 / s - 1.0 / (12.0 * s.powi(3))
}

/// O(e^2) constant in the magnetic Drude form,
/// `arccosh(zeta) - 1/s + 1/(15 s^3)`, i.e. `I1(0) + I2(0)/5`.
pub fn g_magnetic(zeta: f64) -> f64 {
    if zeta <= 1.0 {
        return 0.0;
    }
    let s = sigma_helper(zeta);
    zeta.acosh() - 1.0 / s + 1.0 / (15.0 * s.powi(3))
}

/// `eps = 1 - ae2/a^2 + (e^2/3 pi^2) g_e` and
/// `1/mu = 1 - am2/a^2 - (5 e^2/6 pi^2) g_m`, dropping O(a^2).
pub fn drude_scalars(a: f64, state: &ThermoState) -> Result<DrudeScalars> {
    if !state.is_degenerate() {
        return Err(Error::domain("Drude forms are zero-temperature only"));
    }
    if !(state.zeta > 1.0) {
        return Err(Error::domain(format!(
            "Drude forms need zeta > 1, got {}",
            state.zeta
        )));
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain(format!("Drude forms need a > 0, got {a}")));
    }
    let e2 = state.e2;
    let ae2 = drude_ae2(state.zeta, e2);
    let am2 = 2.0 * ae2;
    let a2 = a * a;
    Ok(DrudeScalars {
        eps: 1.0 - ae2 / a2 + e2 / (3.0 * PI * PI) * g_electric(state.zeta),
        mu_inv: 1.0 - am2 / a2 - 5.0 * e2 / (6.0 * PI * PI) * g_magnetic(state.zeta),
        ae2,
        am2,
    })
}

/// Regime used by [`RegimeChoice::Auto`].
pub fn select_regime(kin: &Kinematics, state: &ThermoState) -> Regime {
    if state.is_empty() {
        Regime::Vacuum
    } else if kin.omega == 0.0 {
        Regime::Stationary
    } else if kin.b < LONGWAVE_MAX_B && kin.a < LONGWAVE_MAX_A {
        Regime::LongWavelength
    } else {
        Regime::FullKinematics
    }
}

/// Evaluate all scalar functions at one point.
pub fn evaluate_scalars(
    kin: &Kinematics,
    state: &ThermoState,
    choice: RegimeChoice,
    tol: f64,
) -> Result<ScalarTriple> {
    let regime = match choice {
        RegimeChoice::Auto => select_regime(kin, state),
        RegimeChoice::Fixed(r) => r,
    };
    let c_star = vacuum_c(kin.qm2, state.e2)?;
    let c_ratio = vacuum_c_ratio(kin.qm2, state.e2)?;
    let vacuum = ScalarTriple {
        a_star: 0.0,
        b_star: 0.0,
        c_star,
        d_star: 0.0,
        b_ratio: 0.0,
        c_ratio,
        err_est: 0.0,
        regime,
    };
    let identity_d = |a: f64, b: f64| {
        if kin.qmag > 0.0 {
            a - d_weight(kin) * b
        } else {
            f64::NAN
        }
    };

    match regime {
        Regime::Vacuum => Ok(vacuum),
        Regime::Stationary => {
            if kin.omega != 0.0 {
                return Err(Error::domain("stationary regime needs omega = 0"));
            }
            let (a, b) = stationary_scalars(kin.qmag, state, tol)?;
            Ok(ScalarTriple {
                a_star: a.value,
                b_star: b.value,
                d_star: identity_d(a.value, b.value),
                err_est: a.err_est.max(b.err_est),
                ..vacuum
            })
        }
        Regime::LongWavelength => {
            let a = longwave_a(kin.a, state, tol)?;
            let br = longwave_b(kin.a, state, tol)?;
            let (b_star, d_star) = if kin.qmag > 0.0 {
                let b = br.value * (kin.b * kin.b) / (kin.a * kin.a);
                (b, identity_d(a.value, b))
            } else {
                (0.0, a.value - 1.5 * br.value)
            };
            Ok(ScalarTriple {
                a_star: a.value,
                b_star,
                d_star,
                b_ratio: br.value,
                err_est: a.err_est.max(br.err_est),
                ..vacuum
            })
        }
        Regime::FullKinematics => {
            let b = medium_b_full(kin, state, tol)?;
            let a = medium_a_full(kin, state, tol)?;
            Ok(ScalarTriple {
                a_star: a.value,
                b_star: b.value,
                d_star: identity_d(a.value, b.value),
                b_ratio: b.value * (kin.a * kin.a) / (kin.b * kin.b),
                err_est: a.err_est.max(b.err_est),
                ..vacuum
            })
        }
    }
}
