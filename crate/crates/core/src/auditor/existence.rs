//! Existence time of the constructed solution,
//! `T_E = C1 (1 + ‖u0‖_{Ḣ^τ} + ‖ω0‖_{H^σ})^{−2/(2τ−1)}` for `τ > 1/2`, and
//! the small-data branch at `τ = 1/2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rhs::SystemParams;
use crate::spectral::{sobolev_norm, SobolevIndex, VectorField};

/// Tolerance used to recognise `τ = 1/2`.
const HALF_TOL: f64 = 1e-12;

/// Calibration constants the theory leaves unspecified.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Calibration {
    pub c1: f64,
    /// Small-data threshold for `τ = 1/2`.
    #[serde(default)]
    pub eps0: Option<f64>,
    /// Existence time granted by the `τ = 1/2` branch.
    #[serde(default)]
    pub te_half: Option<f64>,
}

impl Calibration {
    pub fn new(c1: f64) -> Self {
        Calibration {
            c1,
            eps0: None,
            te_half: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExistenceBranch {
    /// `τ > 1/2`, closed formula.
    Formula,
    /// `τ = 1/2` and the data are below `ε0`.
    SmallData,
    /// `τ = 1/2` and the data are too large.
    NotAdmissible,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExistenceEstimate {
    pub c1: f64,
    pub tau: f64,
    pub sigma: f64,
    /// `‖u0‖_{Ḣ^τ}`, or `‖u0‖_{H^{1/2}}` on the small-data branch.
    pub u0_norm: f64,
    /// `‖ω0‖_{H^σ}`.
    pub w0_norm: f64,
    pub branch: ExistenceBranch,
    /// `None` when not admissible.
    pub t_e: Option<f64>,
}

/// Evaluate the estimate from precomputed norms.
pub fn existence_time_from_norms(
    tau: f64,
    sigma: f64,
    u0_norm: f64,
    w0_norm: f64,
    cal: &Calibration,
) -> Result<ExistenceEstimate> {
    if !(cal.c1 > 0.0 && cal.c1.is_finite()) {
        return Err(Error::InvalidParameter(format!("C1 must be positive, got {}", cal.c1)));
    }
    if !(u0_norm >= 0.0 && w0_norm >= 0.0 && u0_norm.is_finite() && w0_norm.is_finite()) {
        return Err(Error::Rejected(format!(
            "norms must be finite and non-negative, got {u0_norm}, {w0_norm}"
        )));
    }
    if !tau.is_finite() || tau < 0.5 - HALF_TOL {
        return Err(Error::Rejected(format!("existence time needs tau >= 1/2, got {tau}")));
    }
    let mut est = ExistenceEstimate {
        c1: cal.c1,
        tau,
        sigma,
        u0_norm,
        w0_norm,
        branch: ExistenceBranch::Formula,
        t_e: None,
    };
    if (tau - 0.5).abs() <= HALF_TOL {
        let (Some(eps0), Some(te)) = (cal.eps0, cal.te_half) else {
            return Err(Error::InvalidParameter(
                "tau = 1/2 needs both eps0 and te_half to be configured".into(),
            ));
        };
        if u0_norm + w0_norm < eps0 {
            est.branch = ExistenceBranch::SmallData;
            est.t_e = Some(te);
        } else {
            est.branch = ExistenceBranch::NotAdmissible;
        }
        return Ok(est);
    }
    let exponent = -2.0 / (2.0 * tau - 1.0);
    est.t_e = Some(cal.c1 * (1.0 + u0_norm + w0_norm).powf(exponent));
    Ok(est)
}

/// Evaluate the estimate for initial data `(u0, ω0)`.
pub fn existence_time(
    u0: &VectorField,
    w0: &VectorField,
    p: &SystemParams,
    cal: &Calibration,
) -> Result<ExistenceEstimate> {
    let small = (p.tau - 0.5).abs() <= HALF_TOL;
    if !p.tau.is_finite() || p.tau < 0.5 - HALF_TOL {
        return Err(Error::Rejected(format!(
            "existence time needs tau >= 1/2, got {}",
            p.tau
        )));
    }
    let u_idx = if small {
        SobolevIndex::inhomogeneous(0.5)
    } else {
        SobolevIndex::homogeneous(p.tau)
    };
    let un = sobolev_norm(u0, u_idx)?;
    let wn = sobolev_norm(w0, SobolevIndex::inhomogeneous(p.sigma))?;
    existence_time_from_norms(p.tau, p.sigma, un, wn, cal)
}
