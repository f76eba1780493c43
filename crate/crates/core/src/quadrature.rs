//! Adaptive Gauss-Kronrod integration over Fermi-weighted half lines.
//!
//! Panels are refined globally (largest error first) with the 21-point
//! Kronrod extension of the 10-point Gauss rule. Both rules are open, so an
//! integrable logarithmic singularity placed on a panel edge is never
//! evaluated. Callers pass such points as [`Breakpoints`].

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::state::{occupation_unchecked, ThermoState};

/// Maximum number of panels before giving up.
pub const PANEL_BUDGET: usize = 10_000;

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208980478405,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralResult {
    pub value: f64,
    /// A-posteriori error estimate (sum over panels).
    pub err_est: f64,
    pub panels: usize,
    pub converged: bool,
    /// Upper integration limit actually used.
    pub upper: f64,
}

impl IntegralResult {
    fn zero(upper: f64) -> Self {
        Self {
            value: 0.0,
            err_est: 0.0,
            panels: 0,
            converged: true,
            upper,
        }
    }
}

/// Sorted, deduplicated points where an integrand has an integrable
/// logarithmic singularity.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Breakpoints {
    points: Vec<f64>,
}

impl Breakpoints {
    /// Keeps finite points `>= 1`, sorted, with near-duplicates merged.
    pub fn new(points: impl IntoIterator<Item = f64>) -> Self {
        let mut v: Vec<f64> = points
            .into_iter()
            .filter(|p| p.is_finite() && *p >= 1.0)
            .collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * b.abs().max(1.0));
        Self { points: v }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn within(&self, lo: f64, hi: f64) -> Vec<f64> {
        self.points
            .iter()
            .copied()
            .filter(|&p| p > lo && p < hi)
            .collect()
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    lo: f64,
    hi: f64,
    value: f64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err.total_cmp(&other.err)
    }
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Panel {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut resk = WGK[10] * fc;
    let mut resg = 0.0;
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[10] * (fc - reskh).abs();
    for j in 0..10 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let value = resk * half;
    resabs *= half.abs();
    resasc *= half.abs();
    let mut err = ((resk - resg) * half).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    if !value.is_finite() {
        err = f64::INFINITY;
    }
    Panel { lo, hi, value, err }
}

// Absolute tolerances below what double precision can resolve are relaxed.
const RELATIVE_FLOOR: f64 = 1e-11;

fn target(tol: f64, value: f64) -> f64 {
    tol.max(RELATIVE_FLOOR * value.abs())
}

/// Adaptive integration of `f` over `[lo, hi]`, with initial panel edges at
/// every breakpoint strictly inside the interval.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    tol: f64,
) -> Result<IntegralResult> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if !(lo.is_finite() && hi.is_finite()) || hi < lo {
        return Err(Error::domain(format!("bad interval [{lo}, {hi}]")));
    }
    if hi == lo {
        return Ok(IntegralResult::zero(hi));
    }

    let mut edges = vec![lo];
    let mut inner: Vec<f64> = breaks
        .iter()
        .copied()
        .filter(|&p| p > lo && p < hi)
        .collect();
    inner.sort_by(|a, b| a.partial_cmp(b).unwrap());
    edges.extend(inner);
    edges.push(hi);
    edges.dedup();

    let mut heap = BinaryHeap::new();
    // Panels too narrow to split further; their error is final.
    let mut frozen_value = 0.0;
    let mut frozen_err = 0.0;
    for w in edges.windows(2) {
        heap.push(gauss_kronrod(&f, w[0], w[1]));
    }
    let mut panels = heap.len();
    let mut running_err: f64 = heap.iter().map(|p| p.err).sum();
    let mut running_value: f64 = heap.iter().map(|p| p.value).sum();

    loop {
        if running_err <= target(tol, running_value + frozen_value) {
            // exact resummation before declaring success
            let (value, err) = heap.iter().fold((frozen_value, frozen_err), |(v, e), p| {
                (v + p.value, e + p.err)
            });
            if err <= target(tol, value) {
                return Ok(IntegralResult {
                    value,
                    err_est: err,
                    panels,
                    converged: true,
                    upper: hi,
                });
            }
            running_err = err;
        }
        let worst = match heap.peek() {
            Some(_) if panels < PANEL_BUDGET => heap.pop().unwrap(),
            _ => {
                let (value, err) = heap.iter().fold((frozen_value, frozen_err), |(v, e), p| {
                    (v + p.value, e + p.err)
                });
                return Err(Error::NonConvergence {
                    value,
                    err_est: err,
                    panels,
                });
            }
        };
        let mid = 0.5 * (worst.lo + worst.hi);
        let width = worst.hi - worst.lo;
        if mid <= worst.lo
            || mid >= worst.hi
            || width <= 4.0 * f64::EPSILON * worst.lo.abs().max(worst.hi.abs())
        {
            frozen_value += worst.value;
            frozen_err += worst.err;
            running_value -= worst.value;
            if heap.is_empty() {
                return Err(Error::NonConvergence {
                    value: frozen_value,
                    err_est: frozen_err,
                    panels,
                });
            }
            continue;
        }
        let left = gauss_kronrod(&f, worst.lo, mid);
        let right = gauss_kronrod(&f, mid, worst.hi);
        running_err += left.err + right.err - worst.err;
        running_value += left.value + right.value - worst.value;
        heap.push(left);
        heap.push(right);
        panels += 1;
        if !running_err.is_finite() || panels % 512 == 0 {
            running_err = heap.iter().map(|p| p.err).sum::<f64>() + frozen_err;
            running_value = heap.iter().map(|p| p.value).sum();
        }
    }
}

/// Integrates a decaying integrand `g` over `[lo, inf)`.
///
/// The upper cut starts at `start` and moves out in steps of `step` until a
/// whole step contributes less than `tol / 10`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(
    g: F,
    lo: f64,
    start: f64,
    step: f64,
    breaks: &[f64],
    tol: f64,
) -> Result<IntegralResult> {
    if !(step > 0.0) {
        return Err(Error::domain(format!(
            "tail step must be positive, got {step}"
        )));
    }
    let mut cut = start.max(lo);
    let mut tail_bound = f64::INFINITY;
    for _ in 0..400 {
        let piece = integrate(&g, cut, cut + step, &[], tol / 20.0)?;
        let bound = piece.value.abs() + piece.err_est;
        if bound <= tol / 10.0 {
            tail_bound = bound;
            break;
        }
        cut += step;
    }
    if !tail_bound.is_finite() {
        return Err(Error::NonConvergence {
            value: f64::NAN,
            err_est: f64::INFINITY,
            panels: 0,
        });
    }
    let mut main = integrate(&g, lo, cut, breaks, tol - tol / 10.0)?;
    main.err_est += tail_bound;
    main.converged = main.err_est <= target(tol, main.value);
    Ok(main)
}

/// `Integral_1^inf f(x) n_F(x) dx` in the energy variable `x = omega_p / m`.
///
/// At zero temperature the occupation is a step and the range is exactly
/// `[1, zeta]`.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(
    f: F,
    state: &ThermoState,
    breaks: &Breakpoints,
    tol: f64,
) -> Result<IntegralResult> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    if state.t == 0.0 {
        if state.zeta <= 1.0 {
            return Ok(IntegralResult::zero(1.0));
        }
        return integrate(f, 1.0, state.zeta, breaks.points(), tol);
    }
    // resolve the thermal edge, which can be much narrower than a panel
    let mut pts = breaks.points().to_vec();
    for k in [-12.0, -4.0, 0.0, 4.0, 12.0] {
        let x = state.zeta + k * state.t;
        if x > 1.0 {
            pts.push(x);
        }
    }
    let t = state.t;
    let g = |x: f64| {
        let n = occupation_unchecked(x, state);
        if n == 0.0 {
            0.0
        } else {
            n * f(x)
        }
    };
    let start = state.zeta.max(1.0) + 30.0 * t;
    integrate_to_infinity(g, 1.0, start, 10.0 * t, &pts, tol)
}

/// `Integral_0^inf f(p) n_F(sqrt(1 + p^2)) dp` in the momentum variable.
pub fn integrate_momentum<F: Fn(f64) -> f64>(
    f: F,
    state: &ThermoState,
    tol: f64,
) -> Result<IntegralResult> {
    if !(tol > 0.0) {
        return Err(Error::domain(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let pf = state.fermi_momentum();
    if state.t == 0.0 {
        if pf == 0.0 {
            return Ok(IntegralResult::zero(0.0));
        }
        return integrate(f, 0.0, pf, &[], tol);
    }
    let g = |p: f64| {
        let n = occupation_unchecked((1.0 + p * p).sqrt(), state);
        if n == 0.0 {
            0.0
        } else {
            n * f(p)
        }
    };
    let x0 = state.zeta.max(1.0) + 30.0 * state.t;
    let start = (x0 * x0 - 1.0).sqrt();
    // dp = x dx / p, so a step of 10 t in energy is at most this in momentum.
    let step = 10.0 * state.t * x0 / start.max(1e-3) + 10.0 * state.t;
    let pts: Vec<f64> = [-12.0, -4.0, 0.0, 4.0, 12.0]
        .iter()
        .map(|k| state.zeta + k * state.t)
        .filter(|&x| x > 1.0)
        .map(|x| (x * x - 1.0).sqrt())
        .collect();
    integrate_to_infinity(g, 0.0, start, step, &pts, tol)
}
