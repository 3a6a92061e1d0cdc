//! Checks of the energy balances, primitive inequalities, the Grönwall
//! lemma and the existence-time formula, on ledgers and on raw inputs.

pub mod balance;
pub mod bounds;
pub mod existence;
pub mod gronwall;
pub mod inequalities;
pub mod report;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::EnergyLedger;
use crate::rhs::SystemParams;

pub use balance::{fractional_balance_residual, l2_balance_residual, Which};
pub use bounds::{uniform_bound_constant, viscosity_absorption_report, UniformBound};
pub use existence::{existence_time, existence_time_from_norms, Calibration, ExistenceBranch, ExistenceEstimate};
pub use gronwall::{gronwall_check, gronwall_horizon, GronwallOutcome, GronwallProblem, GronwallStatus};
pub use inequalities::{
    duality_pairing_check, interpolation_check, product_law_report, young_split, Margin, YoungSplit,
};
pub use report::{AuditReport, CheckResult, CheckStatus};

/// Ledger-level audits that a run configuration can request.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditName {
    L2BalanceVelocity,
    L2BalanceAngular,
    FractionalBalanceVelocity,
    FractionalBalanceAngular,
    Divergence,
    UniformBound,
    ViscosityAbsorption,
    ExistenceTime,
}

impl AuditName {
    pub const ALL: [AuditName; 8] = [
        AuditName::L2BalanceVelocity,
        AuditName::L2BalanceAngular,
        AuditName::FractionalBalanceVelocity,
        AuditName::FractionalBalanceAngular,
        AuditName::Divergence,
        AuditName::UniformBound,
        AuditName::ViscosityAbsorption,
        AuditName::ExistenceTime,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AuditName::L2BalanceVelocity => "l2_balance_velocity",
            AuditName::L2BalanceAngular => "l2_balance_angular",
            AuditName::FractionalBalanceVelocity => "fractional_balance_velocity",
            AuditName::FractionalBalanceAngular => "fractional_balance_angular",
            AuditName::Divergence => "divergence",
            AuditName::UniformBound => "uniform_bound",
            AuditName::ViscosityAbsorption => "viscosity_absorption",
            AuditName::ExistenceTime => "existence_time",
        }
    }

    /// Tolerance used when the configuration gives none; `None` for
    /// report-only checks.
    pub fn default_tolerance(self) -> Option<f64> {
        match self {
            AuditName::L2BalanceVelocity
            | AuditName::L2BalanceAngular
            | AuditName::FractionalBalanceVelocity
            | AuditName::FractionalBalanceAngular => Some(1e-5),
            AuditName::Divergence => Some(1e-10),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditSpec {
    pub name: AuditName,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

impl AuditSpec {
    pub fn all_default() -> Vec<AuditSpec> {
        AuditName::ALL
            .iter()
            .map(|&name| AuditSpec { name, tolerance: None })
            .collect()
    }
}

/// Run-level inputs needed by some audits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuditContext {
    pub calibration: Calibration,
    pub t_end: f64,
}

fn threshold(name: &str, value: f64, tol: f64, detail: String) -> CheckResult {
    CheckResult {
        name: name.into(),
        status: if value <= tol {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        },
        value: Some(value),
        tolerance: Some(tol),
        detail,
    }
}

/// Existence time from the initial norms recorded in the ledger's first row.
pub fn existence_from_ledger(ledger: &EnergyLedger, p: &SystemParams, cal: &Calibration) -> Result<ExistenceEstimate> {
    let f = ledger.first()?;
    let un = if (p.tau - 0.5).abs() <= 1e-12 {
        f.u_h_tau
    } else {
        f.u_hdot_tau
    };
    existence_time_from_norms(p.tau, p.sigma, un, f.w_h_sigma, cal)
}

/// Evaluate every requested audit once, in the order given.
pub fn run_audits(
    ledger: &EnergyLedger,
    p: &SystemParams,
    specs: &[AuditSpec],
    ctx: &AuditContext,
) -> Result<AuditReport> {
    let mut seen = std::collections::HashSet::new();
    let mut report = AuditReport::default();
    let existence = existence_from_ledger(ledger, p, &ctx.calibration);
    for spec in specs {
        if !seen.insert(spec.name) {
            return Err(Error::Config(format!("audit {} listed twice", spec.name.as_str())));
        }
        let name = spec.name.as_str();
        let tol = spec.tolerance.or(spec.name.default_tolerance());
        let check = match spec.name {
            AuditName::L2BalanceVelocity | AuditName::L2BalanceAngular => {
                let which = if spec.name == AuditName::L2BalanceVelocity {
                    Which::Velocity
                } else {
                    Which::Angular
                };
                let r = l2_balance_residual(ledger, p, which)?;
                let scale = balance::l2_energy_scale(ledger)?;
                let v = balance::max_relative(&r, scale);
                threshold(
                    name,
                    v,
                    tol.unwrap_or(1e-5),
                    format!("max |residual| / initial energy ({scale:e})"),
                )
            }
            AuditName::FractionalBalanceVelocity | AuditName::FractionalBalanceAngular => {
                let which = if spec.name == AuditName::FractionalBalanceVelocity {
                    Which::Velocity
                } else {
                    Which::Angular
                };
                let r = fractional_balance_residual(ledger, p, which)?;
                let scale = balance::fractional_energy_scale(ledger)?;
                let v = balance::max_relative(&r, scale);
                threshold(
                    name,
                    v,
                    tol.unwrap_or(1e-5),
                    format!("max |residual| / initial fractional energy ({scale:e})"),
                )
            }
            AuditName::Divergence => {
                let v = ledger.rows.iter().fold(0.0f64, |m, r| m.max(r.u_div_rel));
                threshold(name, v, tol.unwrap_or(1e-10), "max relative divergence of u".into())
            }
            AuditName::UniformBound => {
                let t0 = match &existence {
                    Ok(ExistenceEstimate { t_e: Some(te), .. }) => ctx.t_end.min(*te),
                    _ => ctx.t_end,
                };
                let b = uniform_bound_constant(ledger, t0)?;
                CheckResult {
                    name: name.into(),
                    status: CheckStatus::ReportOnly,
                    value: b.constant,
                    tolerance: tol,
                    detail: match b.constant {
                        Some(_) => format!("empirical constant on [0, {}]", b.t0),
                        None => "degenerate: zero initial energy".into(),
                    },
                }
            }
            AuditName::ViscosityAbsorption => match viscosity_absorption_report(ledger, p) {
                Ok(v) => CheckResult {
                    name: name.into(),
                    status: CheckStatus::ReportOnly,
                    value: Some(v),
                    tolerance: tol,
                    detail: format!("coupling flux over sqrt(mu nu) dissipation, mu nu = {}", p.mu * p.nu),
                },
                Err(e) => CheckResult {
                    name: name.into(),
                    status: CheckStatus::Inapplicable,
                    value: None,
                    tolerance: tol,
                    detail: e.to_string(),
                },
            },
            AuditName::ExistenceTime => match &existence {
                Ok(e) => CheckResult {
                    name: name.into(),
                    status: match e.t_e {
                        Some(_) => CheckStatus::ReportOnly,
                        None => CheckStatus::Inapplicable,
                    },
                    value: e.t_e,
                    tolerance: tol,
                    detail: match e.t_e {
                        Some(te) => format!(
                            "T_E = {te:e}; t_end = {} {} T_E",
                            ctx.t_end,
                            if ctx.t_end <= te { "<=" } else { ">" }
                        ),
                        None => "initial data not admissible for tau = 1/2".into(),
                    },
                },
                Err(e) => CheckResult {
                    name: name.into(),
                    status: CheckStatus::Inapplicable,
                    value: None,
                    tolerance: tol,
                    detail: e.to_string(),
                },
            },
        };
        report.checks.push(check);
    }
    Ok(report)
}
