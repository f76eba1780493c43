//! Propagating wavenumbers from the long-wavelength responses and from the
//! self-consistent responses at the root.

use relplasma::dispersion::{solve_dispersion, ConstantMedium, DispersionConfig, DispersionMode};
use relplasma::response::ElectronGas;
use relplasma::state::ThermoState;

fn main() -> relplasma::error::Result<()> {
    let glass = ConstantMedium {
        eps: 2.0,
        mu_inv: 1.0,
        tau: 0.0,
    };
    let s = solve_dispersion(
        0.3,
        &glass,
        DispersionMode::SelfConsistent,
        &DispersionConfig::default(),
    )?;
    println!("constant medium: n = {:?}", s.n_index);

    let gas = ElectronGas::new(ThermoState::degenerate(2.0)?);
    let config = DispersionConfig::default();
    for omega in [0.05, 0.12, 0.3] {
        for mode in [
            DispersionMode::LongWavelength,
            DispersionMode::SelfConsistent,
        ] {
            let s = solve_dispersion(omega, &gas, mode, &config)?;
            println!("omega = {omega:<5} {mode:?}: n = {:?}", s.n_index);
        }
    }
    Ok(())
}
