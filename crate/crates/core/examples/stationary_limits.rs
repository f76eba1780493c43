//! Static screening and magnetic susceptibility: closed forms, quadrature
//! and the nonrelativistic Pauli and Landau terms.

use relplasma::limits::limits_report;
use relplasma::state::ThermoState;

fn main() -> relplasma::error::Result<()> {
    for zeta in [1.0 + 5e-5, 1.2, 2.0, 5.0] {
        println!("zeta = {zeta}");
        for row in limits_report(&ThermoState::degenerate(zeta)?, 1e-12)? {
            let tol = row
                .tolerance
                .map(|t| format!("{t:.0e}"))
                .unwrap_or_else(|| "-".into());
            println!(
                "  {:<13} {:>10} {:>14.8e}  {:>15} {:>14.8e}  dev {:>9.2e}  tol {tol}",
                row.quantity,
                row.reference_label,
                row.reference,
                row.value_label,
                row.value,
                row.deviation
            );
        }
    }
    Ok(())
}
