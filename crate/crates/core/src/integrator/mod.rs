//! Time integration of the mollified system.
//!
//! The linear parts are integrated exactly per mode (integrating factor),
//! advection and the two coupling rotations by a two-stage Heun scheme:
//!
//! ```text
//! N0 = N(y_n)
//! y* = E(h) (y_n + h N0)
//! y_{n+1} = E(h) (y_n + h/2 N0) + h/2 N(y*)
//! ```
//!
//! followed by a Leray projection of `u` and the dealias mask.

pub mod ledger;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::auditor::balance::{self, Which};
use crate::error::{Error, Result};
use crate::rhs::{advection, Advection, State, SystemParams};
use crate::spectral::ops::curl_at;
use crate::spectral::{leray_project, GridSpec, VectorField};

pub use ledger::{EnergyLedger, LedgerRow};

/// Fixed step size or `"auto"` (CFL-controlled).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DtRepr", into = "DtRepr")]
pub enum TimeStep {
    Fixed(f64),
    Auto,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum DtRepr {
    Value(f64),
    Word(String),
}

impl TryFrom<DtRepr> for TimeStep {
    type Error = String;

    fn try_from(r: DtRepr) -> std::result::Result<Self, String> {
        match r {
            DtRepr::Value(v) if v.is_finite() && v > 0.0 => Ok(TimeStep::Fixed(v)),
            DtRepr::Value(v) => Err(format!("dt must be positive, got {v}")),
            DtRepr::Word(w) if w == "auto" => Ok(TimeStep::Auto),
            DtRepr::Word(w) => Err(format!("dt must be a number or \"auto\", got {w:?}")),
        }
    }
}

impl From<TimeStep> for DtRepr {
    fn from(t: TimeStep) -> Self {
        match t {
            TimeStep::Fixed(v) => DtRepr::Value(v),
            TimeStep::Auto => DtRepr::Word("auto".into()),
        }
    }
}

fn default_cfl() -> f64 {
    0.5
}

fn default_stride() -> usize {
    1
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepPolicy {
    pub dt: TimeStep,
    #[serde(default = "default_cfl")]
    pub cfl_safety: f64,
    pub t_end: f64,
    /// Steps between ledger rows. The last step always gets a row.
    #[serde(default = "default_stride")]
    pub ledger_stride: usize,
    /// Steps between kept states; 0 keeps only the first and last.
    #[serde(default)]
    pub snapshot_stride: usize,
    /// Upper bound on the automatic step.
    #[serde(default)]
    pub dt_max: Option<f64>,
}

impl StepPolicy {
    pub fn fixed(dt: f64, t_end: f64) -> Self {
        StepPolicy {
            dt: TimeStep::Fixed(dt),
            cfl_safety: default_cfl(),
            t_end,
            ledger_stride: 1,
            snapshot_stride: 0,
            dt_max: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_end.is_finite() && self.t_end > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        if !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "cfl_safety must lie in (0, 1], got {}",
                self.cfl_safety
            )));
        }
        if self.ledger_stride == 0 {
            return Err(Error::InvalidParameter("ledger_stride must be positive".into()));
        }
        if let TimeStep::Fixed(dt) = self.dt {
            if !(dt.is_finite() && dt > 0.0) {
                return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
            }
        }
        if let Some(m) = self.dt_max {
            if !(m.is_finite() && m > 0.0) {
                return Err(Error::InvalidParameter(format!("dt_max must be positive, got {m}")));
            }
        }
        Ok(())
    }

    /// Step size from the state's transport speed. Besides the advective
    /// limit `Δx / max|v|` the explicit coupling `½ ∇∧` bounds the step by
    /// `2 / |k|_max`.
    fn next_dt(&self, grid: &GridSpec, max_speed: f64, t: f64) -> f64 {
        let remaining = self.t_end - t;
        let dt = match self.dt {
            TimeStep::Fixed(dt) => dt,
            TimeStep::Auto => {
                let k_max = 3f64.sqrt() * grid.cutoff().max(1) as f64 * grid.k_unit();
                let mut dt = 2.0 / k_max;
                if max_speed > 0.0 {
                    dt = dt.min(grid.dx() / max_speed);
                }
                dt *= self.cfl_safety;
                if let Some(m) = self.dt_max {
                    dt = dt.min(m);
                }
                dt
            }
        };
        // land exactly on t_end rather than leaving a sliver
        if dt >= remaining * (1.0 - 1e-9) {
            remaining
        } else {
            dt
        }
    }
}

/// States kept at the snapshot stride together with the ledger.
#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub snapshots: Vec<(f64, State)>,
    pub ledger: EnergyLedger,
}

impl Trajectory {
    pub fn final_state(&self) -> Option<&State> {
        self.snapshots.last().map(|(_, s)| s)
    }
}

/// Exact propagator of the linear part over `h`: `e^{−ν|k|²h}` on `u`, and
/// on `ω` the exponential of `−(μ|k|²+1) I − k kᵀ`, which damps the
/// component along `k` by the extra factor `e^{−|k|²h}`.
struct Propagator {
    eu: Vec<f64>,
    ew: Vec<f64>,
    ew_par: Vec<f64>,
    wv: Vec<[f64; 3]>,
}

impl Propagator {
    fn new(grid: &GridSpec, wv: &[[f64; 3]], p: &SystemParams, h: f64) -> Self {
        let n = grid.len();
        let mut eu = Vec::with_capacity(n);
        let mut ew = Vec::with_capacity(n);
        let mut ew_par = Vec::with_capacity(n);
        for k in wv {
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            eu.push((-p.nu * k2 * h).exp());
            ew.push((-(p.mu * k2 + 1.0) * h).exp());
            ew_par.push((-k2 * h).exp());
        }
        Propagator {
            eu,
            ew,
            ew_par,
            wv: wv.to_vec(),
        }
    }

    fn apply(&self, u: &mut VectorField, w: &mut VectorField) {
        for idx in 0..self.eu.len() {
            let a = u.at(idx);
            let e = self.eu[idx];
            u.set_at(idx, [a[0] * e, a[1] * e, a[2] * e]);

            let k = self.wv[idx];
            let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
            let b = w.at(idx);
            let e = self.ew[idx];
            if k2 == 0.0 {
                w.set_at(idx, [b[0] * e, b[1] * e, b[2] * e]);
                continue;
            }
            let kb = (b[0] * k[0] + b[1] * k[1] + b[2] * k[2]) / k2;
            let par: [Complex64; 3] = std::array::from_fn(|i| kb * k[i]);
            let ep = self.ew_par[idx];
            w.set_at(idx, std::array::from_fn(|i| e * ((b[i] - par[i]) + ep * par[i])));
        }
    }
}

/// Explicit part `N(y)`: `(−P ∇·(v⊗u) + ½∇∧ω, −∇·(v⊗ω) + ½∇∧u)`.
fn explicit_part(s: &State, adv: &Advection, wv: &[[f64; 3]]) -> (VectorField, VectorField) {
    let g = *s.grid();
    let pu = leray_project(&adv.u);
    let mut nu = VectorField::zeros(g);
    let mut nw = VectorField::zeros(g);
    for (idx, &k) in wv.iter().enumerate() {
        let cw = curl_at(k, s.w.at(idx));
        let cu = curl_at(k, s.u.at(idx));
        let a = pu.at(idx);
        let b = adv.w.at(idx);
        nu.set_at(idx, std::array::from_fn(|i| 0.5 * cw[i] - a[i]));
        nw.set_at(idx, std::array::from_fn(|i| 0.5 * cu[i] - b[i]));
    }
    (nu, nw)
}

fn finish(mut u: VectorField, mut w: VectorField, t: f64) -> Result<State> {
    u = leray_project(&u);
    for c in u.comps_mut() {
        c.coeffs_mut()[0] = Complex64::default();
    }
    u.apply_dealias();
    w.apply_dealias();
    if !u.is_finite() || !w.is_finite() {
        return Err(Error::BlowUp { t, partial: None });
    }
    Ok(State { u, w, t })
}

/// One step reusing the advection terms already evaluated at `s`.
fn step_with(s: &State, adv0: &Advection, p: &SystemParams, dt: f64, wv: &[[f64; 3]]) -> Result<State> {
    let g = *s.grid();
    let prop = Propagator::new(&g, wv, p, dt);
    let (n0u, n0w) = explicit_part(s, adv0, wv);

    let mut su = s.u.clone();
    su.axpy(dt, &n0u);
    let mut sw = s.w.clone();
    sw.axpy(dt, &n0w);
    prop.apply(&mut su, &mut sw);
    let stage = finish(su, sw, s.t + dt)?;

    let adv1 = advection(&stage, p.eps);
    let (n1u, n1w) = explicit_part(&stage, &adv1, wv);

    let mut u = s.u.clone();
    u.axpy(0.5 * dt, &n0u);
    let mut w = s.w.clone();
    w.axpy(0.5 * dt, &n0w);
    prop.apply(&mut u, &mut w);
    u.axpy(0.5 * dt, &n1u);
    w.axpy(0.5 * dt, &n1w);
    finish(u, w, s.t + dt)
}

/// Advance `s` by `dt`. Fails with [`Error::BlowUp`] on non-finite values.
pub fn imex_step(s: &State, p: &SystemParams, dt: f64) -> Result<State> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let wv = s.grid().wavevectors();
    let adv = advection(s, p.eps);
    step_with(s, &adv, p, dt, &wv)
}

/// Per-mode weights used by the diagnostics, computed once per run.
struct Weights {
    wv: Vec<[f64; 3]>,
    k2: Vec<f64>,
    /// `|k|^{2τ}`
    d_tau: Vec<f64>,
    /// `(1+|k|²)^τ`
    l_tau: Vec<f64>,
    /// `(1+|k|²)^σ`
    l_sigma: Vec<f64>,
    /// `|k|^{2(σ+1)}`, zero at `k = 0`.
    d_sigma1: Vec<f64>,
}

impl Weights {
    fn new(grid: &GridSpec, p: &SystemParams) -> Self {
        let wv = grid.wavevectors();
        let k2: Vec<f64> = wv.iter().map(|k| k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).collect();
        let hom = |s: f64| -> Vec<f64> {
            k2.iter()
                .map(|&q| {
                    if q == 0.0 {
                        if s == 0.0 {
                            1.0
                        } else {
                            0.0
                        }
                    } else {
                        q.powf(s)
                    }
                })
                .collect()
        };
        let inh = |s: f64| -> Vec<f64> { k2.iter().map(|&q| (1.0 + q).powf(s)).collect() };
        let d_tau = hom(p.tau);
        let mut d_sigma1 = hom(p.sigma + 1.0);
        d_sigma1[0] = 0.0;
        Weights {
            d_tau,
            l_tau: inh(p.tau),
            l_sigma: inh(p.sigma),
            d_sigma1,
            wv,
            k2,
        }
    }
}

#[inline]
fn re_dot(a: [Complex64; 3], b: [Complex64; 3]) -> f64 {
    (a[0].conj() * b[0] + a[1].conj() * b[1] + a[2].conj() * b[2]).re
}

#[inline]
fn sq(a: [Complex64; 3]) -> f64 {
    a[0].norm_sqr() + a[1].norm_sqr() + a[2].norm_sqr()
}

fn diagnostics(s: &State, adv: &Advection, wt: &Weights) -> LedgerRow {
    let mut r = LedgerRow {
        t: s.t,
        max_speed: adv.max_speed,
        ..Default::default()
    };
    let (mut u_h_tau, mut u_div) = (0.0, 0.0);
    let mut w_h_sigma1 = 0.0;
    for (idx, &k) in wt.wv.iter().enumerate() {
        let u = s.u.at(idx);
        let w = s.w.at(idx);
        let k2 = wt.k2[idx];
        let su = sq(u);
        let sw = sq(w);
        if su == 0.0 && sw == 0.0 {
            continue;
        }
        let ku = u[0] * k[0] + u[1] * k[1] + u[2] * k[2];
        let kw = w[0] * k[0] + w[1] * k[1] + w[2] * k[2];
        let cu = curl_at(k, u);
        let cw = curl_at(k, w);
        let au = adv.u.at(idx);
        let aw = adv.w.at(idx);

        r.u_l2_sq += su;
        r.w_l2_sq += sw;
        r.u_grad_sq += k2 * su;
        r.w_grad_sq += k2 * sw;
        r.w_div_sq += kw.norm_sqr();
        r.flux_u += re_dot(cw, u);
        r.flux_w += re_dot(cu, w);
        u_div += ku.norm_sqr();

        let dt = wt.d_tau[idx];
        r.u_frac_sq += dt * su;
        r.u_frac_grad_sq += dt * k2 * su;
        r.u_frac_adv += dt * re_dot(au, u);
        if k2 > 0.0 {
            // ∇p = −(I − P) ∇·(v⊗u)
            let ka = (au[0] * k[0] + au[1] * k[1] + au[2] * k[2]) / k2;
            let gp: [Complex64; 3] = std::array::from_fn(|i| -ka * k[i]);
            r.u_frac_press += dt * re_dot(gp, u);
        }
        r.u_frac_coupling += dt * re_dot(cw, u);
        u_h_tau += wt.l_tau[idx] * su;

        let ls = wt.l_sigma[idx];
        r.w_frac_sq += ls * sw;
        r.w_frac_grad_sq += ls * k2 * sw;
        r.w_frac_div_sq += ls * kw.norm_sqr();
        r.w_frac_adv += ls * re_dot(aw, w);
        r.w_frac_coupling += ls * re_dot(cu, w);
        w_h_sigma1 += ls * (1.0 + k2) * sw;
        r.w_hdot_sigma1_sq += wt.d_sigma1[idx] * sw;
    }
    r.u_l2 = r.u_l2_sq.sqrt();
    r.w_l2 = r.w_l2_sq.sqrt();
    r.u_h_tau = u_h_tau.sqrt();
    r.u_hdot_tau = r.u_frac_sq.sqrt();
    r.u_hdot_tau1 = r.u_frac_grad_sq.sqrt();
    r.w_h_sigma = r.w_frac_sq.sqrt();
    r.w_h_sigma1 = w_h_sigma1.sqrt();
    r.u_div_rel = if r.u_l2 > 0.0 { u_div.sqrt() / r.u_l2 } else { 0.0 };
    r
}

/// Trapezoidal update of every `int_*` column of `next` from `prev`.
fn accumulate(prev: &LedgerRow, next: &mut LedgerRow, h: f64) {
    let tr = |a: f64, b: f64, acc: f64| acc + 0.5 * h * (a + b);
    next.int_u_grad_sq = tr(prev.u_grad_sq, next.u_grad_sq, prev.int_u_grad_sq);
    next.int_w_grad_sq = tr(prev.w_grad_sq, next.w_grad_sq, prev.int_w_grad_sq);
    next.int_w_l2_sq = tr(prev.w_l2_sq, next.w_l2_sq, prev.int_w_l2_sq);
    next.int_w_div_sq = tr(prev.w_div_sq, next.w_div_sq, prev.int_w_div_sq);
    next.int_flux_u = tr(prev.flux_u, next.flux_u, prev.int_flux_u);
    next.int_flux_w = tr(prev.flux_w, next.flux_w, prev.int_flux_w);
    next.int_u_frac_grad_sq = tr(prev.u_frac_grad_sq, next.u_frac_grad_sq, prev.int_u_frac_grad_sq);
    next.int_u_frac_adv = tr(prev.u_frac_adv, next.u_frac_adv, prev.int_u_frac_adv);
    next.int_u_frac_press = tr(prev.u_frac_press, next.u_frac_press, prev.int_u_frac_press);
    next.int_u_frac_coupling = tr(prev.u_frac_coupling, next.u_frac_coupling, prev.int_u_frac_coupling);
    next.int_w_frac_l2_sq = tr(prev.w_frac_sq, next.w_frac_sq, prev.int_w_frac_l2_sq);
    next.int_w_frac_grad_sq = tr(prev.w_frac_grad_sq, next.w_frac_grad_sq, prev.int_w_frac_grad_sq);
    next.int_w_frac_div_sq = tr(prev.w_frac_div_sq, next.w_frac_div_sq, prev.int_w_frac_div_sq);
    next.int_w_frac_adv = tr(prev.w_frac_adv, next.w_frac_adv, prev.int_w_frac_adv);
    next.int_w_frac_coupling = tr(prev.w_frac_coupling, next.w_frac_coupling, prev.int_w_frac_coupling);
    next.int_w_hdot_sigma1_sq = tr(prev.w_hdot_sigma1_sq, next.w_hdot_sigma1_sq, prev.int_w_hdot_sigma1_sq);
}

fn fill_residuals(row: &mut LedgerRow, first: &LedgerRow, p: &SystemParams) {
    row.res_l2_u = balance::l2_residual_row(row, first, p, Which::Velocity);
    row.res_l2_w = balance::l2_residual_row(row, first, p, Which::Angular);
    row.res_frac_u = balance::fractional_residual_row(row, first, p, Which::Velocity);
    row.res_frac_w = balance::fractional_residual_row(row, first, p, Which::Angular);
}

/// Integrate from `initial` to `policy.t_end`.
///
/// On blow-up the error carries the trajectory up to the last finite state.
pub fn simulate(initial: State, params: &SystemParams, policy: &StepPolicy) -> Result<Trajectory> {
    params.validate()?;
    policy.validate()?;
    initial.check_invariants()?;
    let grid = *initial.grid();
    let wt = Weights::new(&grid, params);

    let mut s = initial;
    let mut adv = advection(&s, params.eps);
    let mut row = diagnostics(&s, &adv, &wt);
    let initial_row = row.clone();
    fill_residuals(&mut row, &initial_row, params);
    let first = row.clone();

    let mut traj = Trajectory {
        snapshots: vec![(s.t, s.clone())],
        ledger: EnergyLedger {
            rows: vec![row.clone()],
        },
    };
    let mut step: u64 = 0;
    while s.t < policy.t_end {
        let dt = policy.next_dt(&grid, adv.max_speed, s.t);
        let mut next = match step_with(&s, &adv, params, dt, &wt.wv) {
            Ok(n) => n,
            Err(Error::BlowUp { t, .. }) => {
                log::warn!("non-finite state at t = {t}");
                return Err(Error::BlowUp {
                    t,
                    partial: Some(Box::new(traj)),
                });
            }
            Err(e) => return Err(e),
        };
        step += 1;
        let last = policy.t_end - next.t <= policy.t_end * 1e-12;
        if last {
            next.t = policy.t_end;
        }
        let next_adv = advection(&next, params.eps);
        let mut next_row = diagnostics(&next, &next_adv, &wt);
        next_row.step = step;
        next_row.dt = dt;
        accumulate(&row, &mut next_row, dt);
        fill_residuals(&mut next_row, &first, params);

        if last || step.is_multiple_of(policy.ledger_stride as u64) {
            traj.ledger.rows.push(next_row.clone());
        }
        if last || (policy.snapshot_stride > 0 && step.is_multiple_of(policy.snapshot_stride as u64)) {
            traj.snapshots.push((next.t, next.clone()));
        }
        s = next;
        adv = next_adv;
        row = next_row;
        if last {
            break;
        }
    }
    log::debug!("simulated {step} steps to t = {}", s.t);
    Ok(traj)
}
