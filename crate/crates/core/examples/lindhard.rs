//! The nonrelativistic Lindhard susceptibility: the static shape, its
//! Thomas-Fermi limit and a Monte Carlo cross-check.

use relplasma::limits::{lindhard_chi_e, lindhard_static_closed, thomas_fermi_mass2_nr, NRState};
use relplasma::validation::lindhard_monte_carlo;

fn main() -> relplasma::error::Result<()> {
    let nr = NRState::new(1.25e-3, 0.0)?;
    let tf = thomas_fermi_mass2_nr(&nr, 1e-12)?;
    println!("p_F = {}, m_TF^2 = {tf:.6e}", nr.p_f);
    for u in [0.01, 0.5, 1.0, 1.5, 3.0] {
        let q = 2.0 * nr.p_f * u;
        let chi = lindhard_chi_e(0.0, q, &nr, 1e-10)?.value;
        println!(
            "u = {u:<4}  chi_e q^2 / m_TF^2 = {:.8}  closed {:.8}",
            chi * q * q / tf,
            lindhard_static_closed(q, &nr) * q * q / tf
        );
    }

    let warm = NRState::new(1.25e-3, 6.25e-5)?;
    let q = warm.p_f;
    let reduced = lindhard_chi_e(0.0, q, &warm, 1e-10)?.value;
    let (mc, se) = lindhard_monte_carlo(q, &warm, 2_000_000, 7);
    println!("warm gas at u = 0.5: reduced {reduced:.6e}, Monte Carlo {mc:.6e} +- {se:.1e}");

    let w = 0.02;
    let chi = lindhard_chi_e(w, 1e-5, &nr, 1e-8)?.value;
    println!("omega = {w}, q -> 0: chi_e = {chi:.6e} (Drude -omega_e^2/omega^2)");
    Ok(())
}
