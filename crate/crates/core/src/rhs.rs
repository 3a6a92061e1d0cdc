//! Right-hand sides of the mollified micropolar system
//!
//! ```text
//! ∂t u = ν Δu − ∇·(v ⊗ u) − ∇p + ½ ∇∧ω
//! ∂t ω = μ Δω − ∇·(v ⊗ ω) + ½ ∇∧u − ω + ∇(∇·ω)
//! ∇·u = 0,   v = θ_ε * u
//! ```
//!
//! With `ν = μ = 1` and `ε = 0` this is the unmollified system. The
//! pressure is never formed inside the time loop: `−∇p − ∇·(v⊗u)` equals
//! `−P[∇·(v⊗u)]` for the Leray projector `P`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::field::to_physical_pair;
use crate::spectral::ops::{curl_at, tensor_divergence_physical};
use crate::spectral::{divergence_norm, leray_project, mollify, GridSpec, SpectralField, VectorField};

/// Relative divergence allowed on a velocity field entering the solver.
pub const DIVERGENCE_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    /// Velocity viscosity.
    pub nu: f64,
    /// Angular viscosity.
    pub mu: f64,
    /// Mollification width of the transporting velocity.
    #[serde(default)]
    pub eps: f64,
    /// Regularity index tracked for the velocity.
    pub tau: f64,
    /// Regularity index tracked for the angular velocity.
    pub sigma: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            nu: 1.0,
            mu: 1.0,
            eps: 0.0,
            tau: 1.0,
            sigma: 0.2,
        }
    }
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(Error::InvalidParameter(format!("{what} = {v}")));
        if !(self.nu.is_finite() && self.nu > 0.0) {
            return bad("nu must be positive, got nu", self.nu);
        }
        if !(self.mu.is_finite() && self.mu > 0.0) {
            return bad("mu must be positive, got mu", self.mu);
        }
        if !(self.eps.is_finite() && self.eps >= 0.0) {
            return bad("eps must be non-negative, got eps", self.eps);
        }
        if !self.tau.is_finite() || !self.sigma.is_finite() {
            return Err(Error::InvalidParameter("tau and sigma must be finite".into()));
        }
        Ok(())
    }

    /// `σ = τ − 1`, the regime where the coupling has to be absorbed by
    /// the viscosities.
    pub fn is_critical_coupling(&self) -> bool {
        (self.sigma - (self.tau - 1.0)).abs() <= 1e-12
    }

    /// Human-readable notes when `(τ, σ)` leaves the windows where the
    /// existence results apply. Never an error.
    pub fn window_warnings(&self) -> Vec<String> {
        let (t, s) = (self.tau, self.sigma);
        let mut out = Vec::new();
        let general = 0.5 < t && t < 1.5 && t - 1.0 < s && s < 1.5;
        let half = (t - 0.5).abs() <= 1e-12 && -0.5 < s && s < 1.5;
        let critical = (0.5..1.5).contains(&t) && self.is_critical_coupling();
        if !(general || half || critical) {
            out.push(format!(
                "(tau, sigma) = ({t}, {s}) is outside 1/2 < tau < 3/2, tau - 1 < sigma < 3/2, \
                 the tau = 1/2 small-data window and the sigma = tau - 1 window"
            ));
        }
        if critical {
            out.push(format!(
                "sigma = tau - 1: existence needs mu * nu large enough (mu * nu = {})",
                self.mu * self.nu
            ));
        }
        out
    }
}

/// Velocity and angular velocity at time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    pub u: VectorField,
    pub w: VectorField,
    pub t: f64,
}

impl State {
    pub fn zeros(grid: GridSpec) -> Self {
        State {
            u: VectorField::zeros(grid),
            w: VectorField::zeros(grid),
            t: 0.0,
        }
    }

    /// Checked constructor: `u` must be mean-free and divergence-free.
    pub fn new(u: VectorField, w: VectorField, t: f64) -> Result<Self> {
        let s = State { u, w, t };
        s.check_invariants()?;
        Ok(s)
    }

    /// Initial state of the mollified problem: both fields restricted to
    /// the dealias mask, `u` projected and made mean-free, `ω` mollified.
    pub fn initial(u0: &VectorField, w0: &VectorField, eps: f64) -> Result<Self> {
        if !u0.grid().same_lattice(w0.grid()) {
            return Err(Error::GridMismatch);
        }
        let mut u = leray_project(u0);
        for c in u.comps_mut() {
            c.coeffs_mut()[0] = Complex64::default();
        }
        u.apply_dealias();
        let mut w = mollify(w0, eps);
        w.apply_dealias();
        State::new(u, w, 0.0)
    }

    pub fn grid(&self) -> &GridSpec {
        self.u.grid()
    }

    pub fn check_invariants(&self) -> Result<()> {
        if !self.u.grid().same_lattice(self.w.grid()) {
            return Err(Error::GridMismatch);
        }
        if self.u.comps().iter().any(|c| c.zero_mode() != Complex64::default()) {
            return Err(Error::Rejected("velocity must be mean-free".into()));
        }
        let div = divergence_norm(&self.u);
        let un = self.u.norm_sq().sqrt();
        if div > DIVERGENCE_TOLERANCE * un.max(f64::MIN_POSITIVE) && div > 0.0 {
            return Err(Error::Rejected(format!(
                "velocity is not divergence-free: |div u| / |u| = {:e}",
                div / un
            )));
        }
        Ok(())
    }
}

/// Advection terms in divergence form, unprojected.
#[derive(Clone, Debug)]
pub struct Advection {
    /// `∇·(v ⊗ u)`.
    pub u: VectorField,
    /// `∇·(v ⊗ ω)`.
    pub w: VectorField,
    /// `max_x |v(x)|` on the grid.
    pub max_speed: f64,
}

/// Both advection terms sharing one set of grid transforms.
pub fn advection(state: &State, eps: f64) -> Advection {
    let g = *state.grid();
    let v = mollify(&state.u, eps);
    let vp = v.to_physical();
    let up = state.u.to_physical();
    let (w0, w1) = to_physical_pair(&state.w.comps()[0], &state.w.comps()[1]);
    let wp = [w0, w1, state.w.comps()[2].to_physical()];
    let max_speed = (0..g.len())
        .map(|i| (vp[0][i] * vp[0][i] + vp[1][i] * vp[1][i] + vp[2][i] * vp[2][i]).sqrt())
        .fold(0.0, f64::max);
    Advection {
        u: tensor_divergence_physical(g, &vp, &up),
        w: tensor_divergence_physical(g, &vp, &wp),
        max_speed,
    }
}

/// `p̂(k) = −Σ_ij k_i k_j (v_i u_j)^(k) / |k|^2 = Σ_ij R_i R_j (v_i u_j)` with
/// dealiased products and `p̂(0) = 0`.
pub fn pressure(u: &VectorField, eps: f64) -> SpectralField {
    let g = *u.grid();
    let v = mollify(u, eps);
    let vp = v.to_physical();
    let up = u.to_physical();
    let mut p = SpectralField::zeros(g);
    let wv = g.wavevectors();
    for i in 0..3 {
        for j in 0..3 {
            let prod: Vec<f64> = vp[i].iter().zip(&up[j]).map(|(a, b)| a * b).collect();
            let mut pij = SpectralField::from_physical(g, &prod).expect("grid sized buffer");
            pij.apply_dealias();
            for ((dst, c), k) in p.coeffs_mut().iter_mut().zip(pij.coeffs()).zip(&wv) {
                let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                if k2 > 0.0 {
                    *dst -= c * (k[i] * k[j] / k2);
                }
            }
        }
    }
    p
}

/// `ν Δu − P[∇·(v⊗u)] + ½ ∇∧ω`.
pub fn rhs_velocity(s: &State, p: &SystemParams) -> VectorField {
    let adv = advection(s, p.eps);
    velocity_from_parts(s, p, &adv.u)
}

/// `μ Δω − ∇·(v⊗ω) + ½ ∇∧u − ω + ∇(∇·ω)`.
pub fn rhs_angular(s: &State, p: &SystemParams) -> VectorField {
    let adv = advection(s, p.eps);
    angular_from_parts(s, p, &adv.w)
}

pub(crate) fn velocity_from_parts(s: &State, p: &SystemParams, adv_u: &VectorField) -> VectorField {
    let g = *s.grid();
    let proj = leray_project(adv_u);
    let mut out = VectorField::zeros(g);
    for idx in 0..g.len() {
        let k = g.wavevector(idx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let u = s.u.at(idx);
        let a = proj.at(idx);
        let c = curl_at(k, s.w.at(idx));
        out.set_at(idx, std::array::from_fn(|i| -p.nu * k2 * u[i] - a[i] + 0.5 * c[i]));
    }
    out
}

pub(crate) fn angular_from_parts(s: &State, p: &SystemParams, adv_w: &VectorField) -> VectorField {
    let g = *s.grid();
    let mut out = VectorField::zeros(g);
    for idx in 0..g.len() {
        let k = g.wavevector(idx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        let w = s.w.at(idx);
        let a = adv_w.at(idx);
        let c = curl_at(k, s.u.at(idx));
        let kw = w[0] * k[0] + w[1] * k[1] + w[2] * k[2];
        out.set_at(
            idx,
            std::array::from_fn(|i| -p.mu * k2 * w[i] - a[i] + 0.5 * c[i] - w[i] - kw * k[i]),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::curl;

    fn grid16() -> GridSpec {
        GridSpec::cube(16).unwrap()
    }

    #[test]
    fn zero_state_has_zero_rhs() {
        let s = State::zeros(grid16());
        let p = SystemParams::default();
        assert!(rhs_velocity(&s, &p).is_zero());
        assert!(rhs_angular(&s, &p).is_zero());
        assert!(pressure(&s.u, 0.1).is_zero());
    }

    #[test]
    fn angular_single_mode_decays_at_mu_plus_one() {
        let g = grid16();
        let a = 0.7;
        let w = VectorField::single_mode(g, [0, 1, 0], [1.0, 0.0, 0.0], a).unwrap();
        let s = State::new(VectorField::zeros(g), w.clone(), 0.0).unwrap();
        let p = SystemParams {
            mu: 2.5,
            ..Default::default()
        };
        let r = rhs_angular(&s, &p);
        let mut expect = w.clone();
        expect *= -(p.mu + 1.0);
        let mut d = r.clone();
        d -= &expect;
        assert!(d.norm_sq().sqrt() < 1e-14);
        // the coupling injects ½ ∇∧ω into the velocity equation
        let rv = rhs_velocity(&s, &p);
        let mut half = curl(&w);
        half *= 0.5;
        let mut d = rv;
        d -= &half;
        assert!(d.norm_sq().sqrt() < 1e-14);
    }

    #[test]
    fn velocity_only_couples_through_half_curl() {
        let g = grid16();
        let u = VectorField::single_mode(g, [1, 1, 0], [1.0, -1.0, 0.0], 0.4).unwrap();
        let s = State::new(u.clone(), VectorField::zeros(g), 0.0).unwrap();
        let r = rhs_angular(&s, &SystemParams::default());
        let mut half = curl(&u);
        half *= 0.5;
        let mut d = r;
        d -= &half;
        assert!(d.norm_sq().sqrt() < 1e-14);
    }

    #[test]
    fn params_validation_and_windows() {
        assert!(SystemParams::default().validate().is_ok());
        let bad = SystemParams {
            nu: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        let bad = SystemParams {
            eps: -1.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
        assert!(SystemParams::default().window_warnings().is_empty());
        let out = SystemParams {
            tau: 2.0,
            ..Default::default()
        };
        assert_eq!(out.window_warnings().len(), 1);
        let crit = SystemParams {
            tau: 1.0,
            sigma: 0.0,
            ..Default::default()
        };
        assert!(crit.is_critical_coupling());
        assert_eq!(crit.window_warnings().len(), 1);
    }

    #[test]
    fn state_rejects_compressible_velocity() {
        let g = grid16();
        let u = VectorField::single_mode(g, [1, 0, 0], [1.0, 0.0, 0.0], 1.0).unwrap();
        assert!(State::new(u.clone(), VectorField::zeros(g), 0.0).is_err());
        let s = State::initial(&u, &VectorField::zeros(g), 0.0).unwrap();
        assert!(s.u.is_zero());
    }
}
