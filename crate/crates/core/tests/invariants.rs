use proptest::prelude::*;

use relplasma::response::ElectronGas;
use relplasma::scalar::{log_kernels_signed, RegimeChoice};
use relplasma::state::{fermi_occupation, ThermoState};
use relplasma::sweep::{read_csv, render, run_sweep, OutputFormat, SweepSpec};

proptest! {
    #[test]
    fn occupation_is_monotone_and_bounded(t in 0.0f64..1.0, zeta in 0.0f64..5.0, x in 1.0f64..10.0, dx in 0.0f64..2.0) {
        let s = ThermoState::new(t, zeta).unwrap();
        let lo = fermi_occupation(x, &s).unwrap();
        let hi = fermi_occupation(x + dx, &s).unwrap();
        prop_assert!((0.0..=2.0).contains(&lo));
        prop_assert!(hi <= lo);
    }

    #[test]
    fn kernel_parities(a in 0.01f64..1.5, b in 0.01f64..1.5, x in 1.0f64..6.0) {
        prop_assume!((a - b).abs() > 1e-3);
        let p = log_kernels_signed(x, a, b);
        let ma = log_kernels_signed(x, -a, b);
        let mb = log_kernels_signed(x, a, -b);
        prop_assume!(p.f1.is_finite() && p.f2.is_finite());
        let tol = 1e-12 * (1.0 + p.f1.abs() + p.f2.abs());
        prop_assert!((ma.f1 - p.f1).abs() <= tol);
        prop_assert!((mb.f1 + p.f1).abs() <= tol);
        prop_assert!((ma.f2 + p.f2).abs() <= tol);
    }

    #[test]
    fn primed_responses_cancel(t in 0.0f64..0.3, zeta in 0.5f64..4.0, omega in 0.0f64..1.5, q in 1e-3f64..1.5) {
        prop_assume!((omega * omega - q * q).abs() > 1e-3);
        let gas = ElectronGas::new(ThermoState::new(t, zeta).unwrap()).with_regime(RegimeChoice::Auto).with_tol(1e-7);
        let r = gas.responses(omega, q).unwrap();
        prop_assert_eq!(r.eps_prime + r.mu_prime_inv, 0.0);
        prop_assert_eq!(r.tau, r.sigma);
    }
}

#[test]
fn csv_round_trip_is_bit_exact() {
    let spec = SweepSpec {
        t: vec![0.0, 0.02],
        zeta: vec![0.9, 2.0],
        omega: vec![0.0, 0.05, 0.4, 0.7],
        qmag: vec![1e-4, 0.3, 0.7],
        ..Default::default()
    };
    let records = run_sweep(&spec).unwrap().records;
    let text = render(&records, OutputFormat::Csv).unwrap();
    let back = read_csv(text.as_slice()).unwrap();
    assert_eq!(back, records);
    assert_eq!(render(&back, OutputFormat::Csv).unwrap(), text);
}
