//! Below the plasma frequency the degenerate gas has eps < 0 and 1/mu < 0
//! at the same time.

use relplasma::dispersion::negative_index_scan;
use relplasma::limits::plasmon_frequency;
use relplasma::response::ElectronGas;
use relplasma::scalar::{drude_ae2, drude_scalars};
use relplasma::state::{ThermoState, E2_DEFAULT};

fn main() -> relplasma::error::Result<()> {
    let zeta = 2.0;
    let state = ThermoState::degenerate(zeta)?;
    let ae = drude_ae2(zeta, E2_DEFAULT).sqrt();
    let (omega_e, big) = plasmon_frequency(&state, 1e-12)?;
    println!(
        "omega_e = {omega_e:.6e}, omega_m = {:.6e}, Omega_e = {big:.6e}",
        omega_e * 2f64.sqrt()
    );

    for frac in [0.25, 0.5, 0.9, 1.2, 1.6] {
        let d = drude_scalars(frac * ae, &state)?;
        println!(
            "a = {frac:.2} a_e: eps = {:>9.4}, 1/mu = {:>9.4}",
            d.eps, d.mu_inv
        );
    }

    let gas = ElectronGas::new(state).with_tol(1e-12);
    let band = negative_index_scan(&gas, 0.2 * ae, 6.0 * ae, 120)?;
    for (lo, hi) in &band.negative_band {
        println!("doubly negative for omega in [{lo:.6e}, {hi:.6e}]");
    }
    Ok(())
}
