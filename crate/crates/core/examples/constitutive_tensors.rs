//! Fields D and H for a plane wave, built from the response tensors.

use relplasma::response::{constitutive_tensors, ElectronGas};
use relplasma::state::ThermoState;

fn main() -> relplasma::error::Result<()> {
    let gas = ElectronGas::new(ThermoState::new(0.01, 1.8)?);
    let ev = gas.evaluate(&relplasma::state::Kinematics::new(0.6, 0.3)?)?;
    let r = ev.responses;
    println!(
        "eps = {:.6}, 1/mu = {:.6}, eps' = {:.3e}, tau = {:.3e}",
        r.eps, r.mu_inv, r.eps_prime, r.tau
    );
    println!("chi_e = {:.3e}, chi_m = {:.3e}", ev.chi.chi_e, ev.chi.chi_m);

    let qdir = [0.0, 0.0, 1.0];
    let t = constitutive_tensors(&r, qdir)?;
    let e = [1.0, 0.0, 0.2];
    let b = [0.0, 0.5, 0.0];
    println!("E = {e:?}, B = {b:?}");
    println!("D = {:?}", t.displacement(e, b));
    println!("H = {:?}", t.magnetic_field(e, b));
    Ok(())
}
