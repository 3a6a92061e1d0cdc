//! Empirical constants read off a ledger: the uniform bound on `[0, T0]`
//! and the viscosity absorption ratio in the `σ = τ − 1` regime.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{EnergyLedger, LedgerRow};
use crate::rhs::SystemParams;

/// `‖u‖²_{H^τ} + ‖ω‖²_{H^σ}` at one row.
fn energy(r: &LedgerRow) -> f64 {
    r.u_h_tau * r.u_h_tau + r.w_h_sigma * r.w_h_sigma
}

/// `∫(‖u‖²_{Ḣ^{τ+1}} + ‖ω‖²_{H^{σ+1}})` up to one row.
fn dissipation(r: &LedgerRow) -> f64 {
    r.int_u_frac_grad_sq + r.int_w_frac_l2_sq + r.int_w_frac_grad_sq
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformBound {
    /// `None` when the initial energy vanishes.
    pub constant: Option<f64>,
    pub sup_energy: f64,
    pub dissipation: f64,
    pub initial_energy: f64,
    /// Time of the last row used.
    pub t0: f64,
}

/// Smallest `C` with
/// `sup_t (‖u‖²_{H^τ} + ‖ω‖²_{H^σ}) + ∫_0^{T0} (‖u‖²_{Ḣ^{τ+1}} + ‖ω‖²_{H^{σ+1}}) ≤ C (‖u0‖²_{H^τ} + ‖ω0‖²_{H^σ})`
/// over the rows with `t ≤ t0`.
pub fn uniform_bound_constant(ledger: &EnergyLedger, t0: f64) -> Result<UniformBound> {
    let first = ledger.first()?;
    let rows: Vec<&LedgerRow> = ledger.rows.iter().take_while(|r| r.t <= t0 * (1.0 + 1e-12)).collect();
    let last = rows.last().copied().unwrap_or(first);
    let sup_energy = rows.iter().map(|r| energy(r)).fold(0.0, f64::max);
    let initial_energy = energy(first);
    let diss = dissipation(last);
    let constant = (initial_energy > 0.0).then(|| (sup_energy + diss) / initial_energy);
    Ok(UniformBound {
        constant,
        sup_energy,
        dissipation: diss,
        initial_energy,
        t0: last.t,
    })
}

/// `|∫⟨D^τ ∇∧ω, D^τ u⟩| / (√(μν) (∫‖ω‖²_{Ḣ^{σ+1}})^{1/2} (∫‖u‖²_{Ḣ^{τ+1}})^{1/2})`
/// at the end of the ledger. Only meaningful for `σ = τ − 1`.
pub fn viscosity_absorption_report(ledger: &EnergyLedger, p: &SystemParams) -> Result<f64> {
    if !p.is_critical_coupling() {
        return Err(Error::Rejected(format!(
            "absorption ratio needs sigma = tau - 1, got tau = {}, sigma = {}",
            p.tau, p.sigma
        )));
    }
    let r = ledger.last()?;
    let den = (p.mu * p.nu).sqrt() * r.int_w_hdot_sigma1_sq.sqrt() * r.int_u_frac_grad_sq.sqrt();
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok(r.int_u_frac_coupling.abs() / den)
}
