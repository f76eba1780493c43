//! The scalar functions A*, B*, C* along a line of fixed frequency, with the
//! regime chosen automatically at each point.

use relplasma::response::ElectronGas;
use relplasma::scalar::{evaluate_scalars, RegimeChoice};
use relplasma::state::{Kinematics, ThermoState};

fn main() -> relplasma::error::Result<()> {
    let state = ThermoState::new(0.02, 2.0)?;
    let gas = ElectronGas::new(state);
    let omega = 0.4;
    println!(
        "{:>8} {:>11} {:>13} {:>13} {:>13}",
        "|q|", "regime", "A*", "B*", "C*"
    );
    for q in [1e-4, 0.05, 0.2, 0.35, 0.6, 1.0] {
        let kin = Kinematics::new(omega, q)?;
        let s = evaluate_scalars(&kin, &gas.state, RegimeChoice::Auto, gas.tol)?;
        println!(
            "{q:>8.4} {:>11} {:>13.6e} {:>13.6e} {:>13.6e}",
            s.regime.to_string(),
            s.a_star,
            s.b_star,
            s.c_star
        );
    }
    Ok(())
}
