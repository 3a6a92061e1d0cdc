//! Nonlinear Grönwall lemma.
//!
//! If a non-negative `α` satisfies `α(t) ≤ A + B ∫_0^t (α + α^b)` then
//!
//! * for `b > 1`: `α ≤ 3A` on `[0, T0]`, with
//!   `T0 = min{T1, 1 / (3^b B (A^{b−1} + (B T1)^{b−1}))}`;
//! * for `b = 1`: `α ≤ 2A` on `[0, 1/(4B)]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative slack allowed when testing the integral hypothesis on samples.
pub const HYPOTHESIS_TOLERANCE: f64 = 1e-9;

/// Sampled instance of the lemma.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GronwallProblem {
    /// `A > 0`.
    pub a: f64,
    /// `B > 0`.
    pub b_coef: f64,
    /// Exponent `b ≥ 1`.
    pub b: f64,
    /// `T1 > 0`, used when `b > 1`.
    pub t1: f64,
    /// Strictly increasing sample times starting at 0.
    pub times: Vec<f64>,
    /// Non-negative samples of `α`.
    pub alpha: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GronwallStatus {
    Pass,
    Fail,
    /// The samples do not satisfy the hypothesis, so the lemma says nothing.
    Inapplicable,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GronwallOutcome {
    pub status: GronwallStatus,
    pub t0: f64,
    pub bound: f64,
    /// `max α` over samples in `[0, T0]`.
    pub max_alpha: f64,
    /// Smallest `A + B∫(α+α^b) − α(t)` over the samples (trapezoidal rule).
    pub hypothesis_margin: f64,
    /// Whether the samples reach `T0`.
    pub covers_horizon: bool,
}

/// `(T0, bound)` for the given constants.
pub fn gronwall_horizon(a: f64, b_coef: f64, b: f64, t1: f64) -> Result<(f64, f64)> {
    if !(a > 0.0 && b_coef > 0.0 && b >= 1.0 && a.is_finite() && b_coef.is_finite() && b.is_finite()) {
        return Err(Error::Rejected(format!(
            "need A > 0, B > 0, b >= 1, got A = {a}, B = {b_coef}, b = {b}"
        )));
    }
    if b == 1.0 {
        return Ok((1.0 / (4.0 * b_coef), 2.0 * a));
    }
    if !(t1 > 0.0 && t1.is_finite()) {
        return Err(Error::Rejected(format!("need T1 > 0, got {t1}")));
    }
    let den = 3f64.powf(b) * b_coef * (a.powf(b - 1.0) + (b_coef * t1).powf(b - 1.0));
    Ok((t1.min(1.0 / den), 3.0 * a))
}

pub fn gronwall_check(p: &GronwallProblem) -> Result<GronwallOutcome> {
    let (t0, bound) = gronwall_horizon(p.a, p.b_coef, p.b, p.t1)?;
    if p.times.len() != p.alpha.len() || p.times.is_empty() {
        return Err(Error::Rejected(
            "times and alpha must be non-empty and of equal length".into(),
        ));
    }
    if p.times[0] != 0.0 || p.times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Rejected(
            "sample times must start at 0 and increase strictly".into(),
        ));
    }
    if p.alpha.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
        return Err(Error::Rejected("alpha samples must be finite and non-negative".into()));
    }

    let integrand: Vec<f64> = p.alpha.iter().map(|&x| x + x.powf(p.b)).collect();
    let mut integral = 0.0;
    let mut hyp = f64::INFINITY;
    let mut hyp_ok = true;
    for i in 0..p.times.len() {
        if i > 0 {
            integral += 0.5 * (p.times[i] - p.times[i - 1]) * (integrand[i] + integrand[i - 1]);
        }
        let rhs = p.a + p.b_coef * integral;
        let m = rhs - p.alpha[i];
        hyp = hyp.min(m);
        if m < -HYPOTHESIS_TOLERANCE * rhs {
            hyp_ok = false;
        }
    }

    let max_alpha = p
        .times
        .iter()
        .zip(&p.alpha)
        .filter(|(t, _)| **t <= t0)
        .fold(0.0f64, |m, (_, &a)| m.max(a));
    let status = if !hyp_ok {
        GronwallStatus::Inapplicable
    } else if max_alpha <= bound {
        GronwallStatus::Pass
    } else {
        GronwallStatus::Fail
    };
    Ok(GronwallOutcome {
        status,
        t0,
        bound,
        max_alpha,
        hypothesis_margin: hyp,
        covers_horizon: *p.times.last().unwrap() >= t0,
    })
}
