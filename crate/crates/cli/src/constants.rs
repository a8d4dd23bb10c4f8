use std::fmt::Write;

use anyhow::Result;
use etdms::integrator::{cstar_squared_exact, reference_order_four_a};
use etdms::{LagrangeTable, LipschitzIndices, StabilizationParams};

/// Human-readable table of every constant the stabilization bound is built
/// from, plus the constraint slacks.
pub fn constants_report(k: usize, lip: LipschitzIndices) -> Result<String> {
    let table = LagrangeTable::new(k)?;
    let params = StabilizationParams::new(k, lip)?;
    let exact = cstar_squared_exact(&table);
    let mut s = String::new();

    writeln!(s, "order k = {k}, beta = {}, gamma = {}, C_L = {}", lip.beta, lip.gamma, lip.c_l)?;
    writeln!(s)?;
    writeln!(s, "xi_hat[i][j]  (l_i(sigma) = sum_j xi_hat[i][j] sigma^j)")?;
    for (i, row) in table.xi_hat().iter().enumerate() {
        let cells: Vec<String> = row.iter().map(|x| format!("{x:>12.6}")).collect();
        writeln!(s, "  i={i}: {}", cells.join(" "))?;
    }
    writeln!(s)?;
    for (j, (r, c)) in exact.iter().zip(&params.cstar).enumerate() {
        writeln!(s, "C*_{j}^2 = {r}    C*_{j} = sqrt({r}) = {c:.15}")?;
    }
    for (j, c) in params.cbar.iter().enumerate() {
        writeln!(s, "Cbar_{j} = {c:.15}")?;
    }
    writeln!(s)?;
    writeln!(s, "p = {}", params.p)?;
    writeln!(s, "q = {}", params.q)?;
    writeln!(s, "C_hat = {:.15}", params.c_hat)?;
    writeln!(s, "C1 = {:.15}", params.c1)?;
    writeln!(s, "C2 = {:.15}", params.c2)?;
    writeln!(s, "C3 = {:.15}", params.c3)?;
    writeln!(s, "C4 = {:.15}", params.c4)?;
    writeln!(s)?;
    writeln!(s, "A (auto, C_L (C2 + C4) Cbar_0) = {:.15}", params.a)?;
    writeln!(s, "slack 1 - C_L (C1 + C3) Cbar_0 = {:.3e}", params.energy_slack())?;
    writeln!(s, "slack A - C_L (C2 + C4) Cbar_0 = {:.3e}", params.stabilization_slack(params.a))?;
    if k == 4 && lip.beta == 0.5 && lip.gamma == 0.5 && lip.c_l == 1.0 {
        let reference = reference_order_four_a();
        writeln!(s)?;
        writeln!(s, "A (reference, 27 (1 + Cbar_1)^4 / 512 with C*_2^2 = 157441/7560) = {reference:.15}")?;
        writeln!(s, "slack A_reference - C_L (C2 + C4) Cbar_0 = {:.6}", params.stabilization_slack(reference))?;
    }
    Ok(s)
}
