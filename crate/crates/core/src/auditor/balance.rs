//! Integrated energy balances evaluated on ledger rows.
//!
//! Velocity, L²:
//! `‖u(t)‖² + 2ν∫‖∇u‖² − ‖u(0)‖² − ∫∫(∇∧ω)·u`
//!
//! Angular, L²:
//! `‖ω(t)‖² + 2∫(μ‖∇ω‖² + ‖ω‖² + ‖∇·ω‖²) − ‖ω(0)‖² − ∫∫(∇∧u)·ω`
//!
//! The fractional versions apply `D^τ` to the velocity and `L^σ` to the
//! angular velocity and keep the advection and pressure pairings, which no
//! longer vanish.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::integrator::{EnergyLedger, LedgerRow};
use crate::rhs::SystemParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Which {
    Velocity,
    Angular,
}

pub fn l2_residual_row(row: &LedgerRow, first: &LedgerRow, p: &SystemParams, which: Which) -> f64 {
    match which {
        Which::Velocity => row.u_l2_sq + 2.0 * p.nu * row.int_u_grad_sq - first.u_l2_sq - row.int_flux_u,
        Which::Angular => {
            row.w_l2_sq + 2.0 * (p.mu * row.int_w_grad_sq + row.int_w_l2_sq + row.int_w_div_sq)
                - first.w_l2_sq
                - row.int_flux_w
        }
    }
}

pub fn fractional_residual_row(row: &LedgerRow, first: &LedgerRow, p: &SystemParams, which: Which) -> f64 {
    match which {
        Which::Velocity => {
            row.u_frac_sq + 2.0 * p.nu * row.int_u_frac_grad_sq - first.u_frac_sq
                + 2.0 * row.int_u_frac_adv
                + 2.0 * row.int_u_frac_press
                - row.int_u_frac_coupling
        }
        Which::Angular => {
            row.w_frac_sq + 2.0 * (p.mu * row.int_w_frac_grad_sq + row.int_w_frac_l2_sq + row.int_w_frac_div_sq)
                - first.w_frac_sq
                + 2.0 * row.int_w_frac_adv
                - row.int_w_frac_coupling
        }
    }
}

/// L² residual at every ledger row.
pub fn l2_balance_residual(ledger: &EnergyLedger, p: &SystemParams, which: Which) -> Result<Vec<f64>> {
    let first = ledger.first()?;
    Ok(ledger
        .rows
        .iter()
        .map(|r| l2_residual_row(r, first, p, which))
        .collect())
}

/// Fractional residual at every ledger row.
pub fn fractional_balance_residual(ledger: &EnergyLedger, p: &SystemParams, which: Which) -> Result<Vec<f64>> {
    let first = ledger.first()?;
    Ok(ledger
        .rows
        .iter()
        .map(|r| fractional_residual_row(r, first, p, which))
        .collect())
}

/// `‖u(0)‖² + ‖ω(0)‖²`.
pub fn l2_energy_scale(ledger: &EnergyLedger) -> Result<f64> {
    let f = ledger.first()?;
    Ok(f.u_l2_sq + f.w_l2_sq)
}

/// `‖D^τ u(0)‖² + ‖L^σ ω(0)‖²`.
pub fn fractional_energy_scale(ledger: &EnergyLedger) -> Result<f64> {
    let f = ledger.first()?;
    Ok(f.u_frac_sq + f.w_frac_sq)
}

/// `max_t |r(t)| / scale`, or the raw maximum when the scale vanishes.
pub fn max_relative(residuals: &[f64], scale: f64) -> f64 {
    let m = residuals.iter().fold(0.0f64, |a, r| a.max(r.abs()));
    if scale > 0.0 {
        m / scale
    } else {
        m
    }
}
