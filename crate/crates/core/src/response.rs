//! Permittivities, permeabilities and magnetoelectric couplings.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{evaluate_scalars, Regime, RegimeChoice, ScalarTriple, LIGHT_CONE_GUARD};
use crate::state::{Kinematics, ThermoState, DEFAULT_TOL};

/// The six response coefficients.
///
/// `sigma` is the magnetoelectric coefficient in `H = mu^-1 B + sigma E`;
/// it is unrelated to [`crate::scalar::sigma_helper`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResponseSet {
    pub eps: f64,
    pub mu_inv: f64,
    pub eps_prime: f64,
    pub mu_prime_inv: f64,
    pub tau: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Susceptibilities {
    pub chi_e: f64,
    pub chi_e_prime: f64,
    pub chi_em: f64,
    pub chi_m: f64,
    pub chi_m_prime: f64,
    pub chi_me: f64,
}

/// Assemble the response coefficients with `q^2 = q_M^2`:
///
/// ```text
/// eps   = 1 + (2 - omega^2/q_M^2) C* + A* + (1 - omega^2/|q|^2) B*
/// mu^-1 = 1 + (2 + |q|^2/q_M^2) C* + A* - 2 (omega^2/|q|^2) B*
/// eps'  = -mu'^-1 = (|q|^2/q_M^2) C* - A*
/// tau   = sigma = (omega/|q|) ((|q|^2/q_M^2) C* - B*)
/// ```
///
/// In the long-wavelength regime the `|q| -> 0` forms
/// `eps = 1 + C* + A* + (1 - a^2/b^2) B*` and
/// `mu^-1 = 1 + 2 C* + A* - 2 (a^2/b^2) B*` are used instead.
pub fn assemble_responses(s: &ScalarTriple, kin: &Kinematics) -> Result<ResponseSet> {
    let (w, q) = (kin.omega, kin.qmag);
    if w == 0.0 && q == 0.0 {
        return Err(Error::domain("responses need omega > 0 or |q| > 0"));
    }
    let longwave = s.regime == Regime::LongWavelength;
    if !longwave && q == 0.0 && (s.a_star != 0.0 || s.b_star != 0.0 || s.b_ratio != 0.0) {
        return Err(Error::domain(
            "medium responses at |q| = 0 need the long-wavelength regime",
        ));
    }
    if s.regime == Regime::FullKinematics && kin.qm2.abs() < LIGHT_CONE_GUARD {
        return Err(Error::LightConeSingular { qm2: kin.qm2 });
    }

    // (|q|^2 / q_M^2) C*
    let qc = q * q * s.c_ratio;
    let (eps, mu_inv) = if longwave {
        (
            1.0 + s.c_star + s.a_star + s.b_star - s.b_ratio,
            1.0 + 2.0 * s.c_star + s.a_star - 2.0 * s.b_ratio,
        )
    } else {
        (
            1.0 + 2.0 * s.c_star - w * w * s.c_ratio + s.a_star + s.b_star - s.b_ratio,
            1.0 + 2.0 * s.c_star + qc + s.a_star - 2.0 * s.b_ratio,
        )
    };
    let eps_prime = qc - s.a_star;
    // (omega/|q|) B* = (|q|/omega) (omega^2/|q|^2) B*
    let tau = if q > 0.0 {
        let wb = if w > 0.0 { q / w * s.b_ratio } else { 0.0 };
        w * q * s.c_ratio - wb
    } else {
        0.0
    };
    Ok(ResponseSet {
        eps,
        mu_inv,
        eps_prime,
        mu_prime_inv: -eps_prime,
        tau,
        sigma: tau,
    })
}

/// Medium susceptibilities from the full and vacuum-only response sets.
pub fn susceptibilities(full: &ResponseSet, vacuum_only: &ResponseSet) -> Susceptibilities {
    Susceptibilities {
        chi_e: full.eps - vacuum_only.eps,
        chi_e_prime: full.eps_prime - vacuum_only.eps_prime,
        chi_em: full.tau - vacuum_only.tau,
        chi_m: -(full.mu_inv - vacuum_only.mu_inv),
        chi_m_prime: -(full.mu_prime_inv - vacuum_only.mu_prime_inv),
        chi_me: -(full.sigma - vacuum_only.sigma),
    }
}

pub type Matrix3 = [[f64; 3]; 3];

/// Response tensors for a given propagation direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstitutiveTensors {
    pub eps_t: Matrix3,
    pub mu_inv_t: Matrix3,
    pub tau_t: Matrix3,
    pub sigma_t: Matrix3,
    pub qhat: [f64; 3],
}

fn levi_civita(j: usize, k: usize, l: usize) -> f64 {
    match (j, k, l) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1.0,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1.0,
        _ => 0.0,
    }
}

/// `eps^{jk} = eps delta + eps' q^j q^k`, `tau^{jk} = tau e^{jkl} q^l`, and
/// likewise for `mu^-1` and `sigma`.
pub fn constitutive_tensors(r: &ResponseSet, qdir: [f64; 3]) -> Result<ConstitutiveTensors> {
    let norm = qdir.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::domain(
            "propagation direction must be a nonzero finite vector",
        ));
    }
    let qhat = qdir.map(|c| c / norm);
    let mut t = ConstitutiveTensors {
        eps_t: [[0.0; 3]; 3],
        mu_inv_t: [[0.0; 3]; 3],
        tau_t: [[0.0; 3]; 3],
        sigma_t: [[0.0; 3]; 3],
        qhat,
    };
    for j in 0..3 {
        for k in 0..3 {
            let delta = if j == k { 1.0 } else { 0.0 };
            let qq = qhat[j] * qhat[k];
            t.eps_t[j][k] = r.eps * delta + r.eps_prime * qq;
            t.mu_inv_t[j][k] = r.mu_inv * delta + r.mu_prime_inv * qq;
            let eq: f64 = (0..3).map(|l| levi_civita(j, k, l) * qhat[l]).sum();
            t.tau_t[j][k] = r.tau * eq;
            t.sigma_t[j][k] = r.sigma * eq;
        }
    }
    Ok(t)
}

fn mat_vec(m: &Matrix3, v: [f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (o, row) in out.iter_mut().zip(m) {
        *o = row.iter().zip(v).map(|(a, b)| a * b).sum();
    }
    out
}

impl ConstitutiveTensors {
    /// `D = eps E + tau B`.
    pub fn displacement(&self, e: [f64; 3], b: [f64; 3]) -> [f64; 3] {
        let de = mat_vec(&self.eps_t, e);
        let db = mat_vec(&self.tau_t, b);
        [de[0] + db[0], de[1] + db[1], de[2] + db[2]]
    }

    /// `H = mu^-1 B + sigma E`.
    pub fn magnetic_field(&self, e: [f64; 3], b: [f64; 3]) -> [f64; 3] {
        let hb = mat_vec(&self.mu_inv_t, b);
        let he = mat_vec(&self.sigma_t, e);
        [hb[0] + he[0], hb[1] + he[1], hb[2] + he[2]]
    }
}

/// Everything computed at one kinematic point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub scalars: ScalarTriple,
    pub responses: ResponseSet,
    pub vacuum: ResponseSet,
    pub chi: Susceptibilities,
}

/// The electron gas as a response model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElectronGas {
    pub state: ThermoState,
    pub regime: RegimeChoice,
    pub tol: f64,
}

impl ElectronGas {
    pub fn new(state: ThermoState) -> Self {
        Self {
            state,
            regime: RegimeChoice::Auto,
            tol: DEFAULT_TOL,
        }
    }

    pub fn with_regime(mut self, regime: RegimeChoice) -> Self {
        self.regime = regime;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn evaluate(&self, kin: &Kinematics) -> Result<Evaluation> {
        let scalars = evaluate_scalars(kin, &self.state, self.regime, self.tol)?;
        let responses = assemble_responses(&scalars, kin)?;
        let vacuum = assemble_responses(&scalars.vacuum_part(), kin)?;
        Ok(Evaluation {
            scalars,
            responses,
            vacuum,
            chi: susceptibilities(&responses, &vacuum),
        })
    }

    pub fn responses(&self, omega: f64, qmag: f64) -> Result<ResponseSet> {
        Ok(self.evaluate(&Kinematics::new(omega, qmag)?)?.responses)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::drude_ae2;
    use crate::state::E2_DEFAULT;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn zero_scalars(regime: Regime) -> ScalarTriple {
        ScalarTriple {
            a_star: 0.0,
            b_star: 0.0,
            c_star: 0.0,
            d_star: 0.0,
            b_ratio: 0.0,
            c_ratio: 0.0,
            err_est: 0.0,
            regime,
        }
    }

    #[test]
    fn empty_vacuum_is_trivial() {
        let kin = Kinematics::new(0.3, 0.2).unwrap();
        let r = assemble_responses(&zero_scalars(Regime::FullKinematics), &kin).unwrap();
        assert_eq!(
            r,
            ResponseSet {
                eps: 1.0,
                mu_inv: 1.0,
                eps_prime: 0.0,
                mu_prime_inv: 0.0,
                tau: 0.0,
                sigma: 0.0
            }
        );
    }

    #[test]
    fn vacuum_only_structure() {
        let kin = Kinematics::new(0.3, 0.2).unwrap();
        let c = crate::scalar::vacuum_c(kin.qm2, E2_DEFAULT).unwrap();
        let s = ScalarTriple {
            c_star: c,
            c_ratio: c / kin.qm2,
            ..zero_scalars(Regime::Vacuum)
        };
        let r = assemble_responses(&s, &kin).unwrap();
        let expected_prime = 0.04 / kin.qm2 * c;
        assert!((r.eps_prime - expected_prime).abs() < 1e-18);
        assert_eq!(r.mu_prime_inv, -r.eps_prime);
        let expected_tau = 0.3 * 0.2 / kin.qm2 * c;
        assert!((r.tau - expected_tau).abs() < 1e-18);
        assert_eq!(r.tau, r.sigma);
    }

    #[test]
    fn longwave_drude_point_is_doubly_negative() {
        let state = ThermoState::degenerate(2.0).unwrap();
        let a = 0.5 * drude_ae2(2.0, E2_DEFAULT).sqrt();
        let gas = ElectronGas::new(state).with_regime(RegimeChoice::Fixed(Regime::LongWavelength));
        let r = gas.responses(2.0 * a, 0.0).unwrap();
        assert!((r.eps + 3.0).abs() < 0.01, "{}", r.eps);
        assert!((r.mu_inv + 7.0).abs() < 0.01, "{}", r.mu_inv);
    }

    #[test]
    fn susceptibility_of_vacuum_is_zero() {
        let r = ResponseSet {
            eps: 1.3,
            mu_inv: 0.7,
            eps_prime: 0.1,
            mu_prime_inv: -0.1,
            tau: 0.02,
            sigma: 0.02,
        };
        let chi = susceptibilities(&r, &r);
        assert_eq!(chi.chi_e, 0.0);
        assert_eq!(chi.chi_m, 0.0);
        assert_eq!(chi.chi_me, 0.0);
    }

    #[test]
    fn stationary_susceptibilities() {
        let gas = ElectronGas::new(ThermoState::degenerate(2.0).unwrap());
        let ev = gas
            .evaluate(&Kinematics::from_halved(0.0, 1e-4).unwrap())
            .unwrap();
        let expected = E2_DEFAULT / (6.0 * PI * PI) * 2.0f64.acosh();
        assert!((ev.chi.chi_e_prime - expected).abs() < 1e-12);
        assert!((ev.chi.chi_m - expected).abs() < 1e-12);
        assert!((ev.chi.chi_m_prime - expected).abs() < 1e-12);
    }

    #[test]
    fn nonrelativistic_magnetic_susceptibility() {
        let zeta = 1.0 + 5e-5;
        let gas = ElectronGas::new(ThermoState::degenerate(zeta).unwrap());
        let ev = gas
            .evaluate(&Kinematics::from_halved(0.0, 1e-6).unwrap())
            .unwrap();
        let pf = ((zeta - 1.0) * (zeta + 1.0)).sqrt();
        let pauli = E2_DEFAULT / (4.0 * PI * PI) * pf;
        let landau = -E2_DEFAULT / (12.0 * PI * PI) * pf;
        let rel = (ev.chi.chi_m - (pauli + landau)) / (pauli + landau);
        assert!(rel.abs() < 5e-3, "{rel}");
        // screening dominates the electric response
        assert!((ev.chi.chi_m / ev.chi.chi_e).abs() < 1e-6);
    }

    #[test]
    fn medium_vanishes_near_empty_sea() {
        let gas = ElectronGas::new(ThermoState::degenerate(1.0 + 1e-6).unwrap());
        for &(w, q) in &[(0.0, 0.05), (0.1, 1e-4), (0.6, 0.3)] {
            let chi = gas.evaluate(&Kinematics::new(w, q).unwrap()).unwrap().chi;
            for v in [
                chi.chi_e_prime,
                chi.chi_em,
                chi.chi_m,
                chi.chi_m_prime,
                chi.chi_me,
            ] {
                assert!(v.abs() < 1e-4, "w={w} q={q}: {chi:?}");
            }
        }
    }

    #[test]
    fn longwave_and_full_assembly_agree_at_small_q() {
        let gas = ElectronGas::new(ThermoState::degenerate(2.0).unwrap()).with_tol(1e-11);
        let (w, q) = (0.2, 2e-4);
        let kin = Kinematics::new(w, q).unwrap();
        let lw = gas
            .with_regime(RegimeChoice::Fixed(Regime::LongWavelength))
            .evaluate(&kin)
            .unwrap();
        let full = gas
            .with_regime(RegimeChoice::Fixed(Regime::FullKinematics))
            .evaluate(&kin)
            .unwrap();
        assert!((lw.responses.eps - full.responses.eps).abs() < 1e-4);
        assert!((lw.responses.mu_inv - full.responses.mu_inv).abs() < 1e-4);
    }

    #[test]
    fn tensors_along_z() {
        let r = ResponseSet {
            eps: 1.5,
            mu_inv: 0.8,
            eps_prime: 0.0,
            mu_prime_inv: 0.0,
            tau: 0.3,
            sigma: 0.3,
        };
        let t = constitutive_tensors(&r, [0.0, 0.0, 2.0]).unwrap();
        for j in 0..3 {
            for k in 0..3 {
                assert_eq!(t.eps_t[j][k], if j == k { 1.5 } else { 0.0 });
            }
        }
        assert_eq!(t.tau_t[0][1], 0.3);
        assert_eq!(t.tau_t[1][0], -0.3);
        let others: f64 = [(0, 0), (0, 2), (1, 1), (1, 2), (2, 0), (2, 1), (2, 2)]
            .iter()
            .map(|&(j, k)| t.tau_t[j][k].abs())
            .sum();
        assert_eq!(others, 0.0);
        assert!(constitutive_tensors(&r, [0.0; 3]).is_err());
    }

    #[test]
    fn displacement_matches_hand_expansion() {
        // D = eps E + eps' (q.E) q + tau (B x q)... written out by components
        let r = ResponseSet {
            eps: 1.2,
            mu_inv: 0.9,
            eps_prime: 0.4,
            mu_prime_inv: -0.4,
            tau: 0.25,
            sigma: 0.25,
        };
        let t = constitutive_tensors(&r, [0.0, 0.0, 1.0]).unwrap();
        let d = t.displacement([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        // tau^{jk} B^k = tau e^{jkl} B^k q^l: only j = x survives, e^{xyz} = 1
        assert_eq!(d, [1.2 + 0.25, 0.0, 0.0]);
        let h = t.magnetic_field([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        // sigma e^{jkl} E^k q^l with E = x: j = y, e^{yxz} = -1
        assert_eq!(h, [0.0, 0.9 - 0.25, 0.0]);
    }

    fn random_rotation(rng: &mut ChaCha8Rng) -> Matrix3 {
        let mut axis = [
            rng.gen::<f64>() - 0.5,
            rng.gen::<f64>() - 0.5,
            rng.gen::<f64>() - 0.5,
        ];
        let n = axis.iter().map(|c| c * c).sum::<f64>().sqrt();
        axis.iter_mut().for_each(|c| *c /= n);
        let th = rng.gen::<f64>() * 2.0 * PI;
        let (s, c) = th.sin_cos();
        let [x, y, z] = axis;
        [
            [
                c + x * x * (1.0 - c),
                x * y * (1.0 - c) - z * s,
                x * z * (1.0 - c) + y * s,
            ],
            [
                y * x * (1.0 - c) + z * s,
                c + y * y * (1.0 - c),
                y * z * (1.0 - c) - x * s,
            ],
            [
                z * x * (1.0 - c) - y * s,
                z * y * (1.0 - c) + x * s,
                c + z * z * (1.0 - c),
            ],
        ]
    }

    fn conjugate(r: &Matrix3, m: &Matrix3) -> Matrix3 {
        let mut out = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    for l in 0..3 {
                        out[i][j] += r[i][k] * m[k][l] * r[j][l];
                    }
                }
            }
        }
        out
    }

    #[test]
    fn rotational_covariance() {
        let r = ResponseSet {
            eps: 1.2,
            mu_inv: 0.9,
            eps_prime: 0.4,
            mu_prime_inv: -0.4,
            tau: 0.25,
            sigma: 0.25,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let q = [0.3, -0.5, 0.8];
        let base = constitutive_tensors(&r, q).unwrap();
        for _ in 0..10 {
            let rot = random_rotation(&mut rng);
            let rq = mat_vec(&rot, base.qhat);
            let turned = constitutive_tensors(&r, rq).unwrap();
            for (a, b) in [
                (turned.eps_t, conjugate(&rot, &base.eps_t)),
                (turned.mu_inv_t, conjugate(&rot, &base.mu_inv_t)),
                (turned.tau_t, conjugate(&rot, &base.tau_t)),
                (turned.sigma_t, conjugate(&rot, &base.sigma_t)),
            ] {
                for i in 0..3 {
                    for j in 0..3 {
                        assert!((a[i][j] - b[i][j]).abs() < 1e-12);
                    }
                }
            }
        }
    }
}
