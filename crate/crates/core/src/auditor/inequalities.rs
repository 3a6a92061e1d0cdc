//! Primitive inequalities behind the a priori estimates: the split-weight
//! duality pairing, Sobolev interpolation, Young's inequality and the
//! product law.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::ops::curl_at;
use crate::spectral::{sobolev_norm, GridSpec, SobolevIndex, SobolevKind, SpectralData, SpectralField, VectorField};

/// A checked inequality `lhs ≤ rhs`, reported as `margin = rhs − lhs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    /// Magnitude against which the margin is judged.
    pub scale: f64,
}

impl Margin {
    fn new(lhs: f64, rhs: f64) -> Self {
        Margin {
            lhs,
            rhs,
            margin: rhs - lhs,
            scale: lhs.abs().max(rhs.abs()),
        }
    }

    /// `margin ≥ −tol · scale`.
    pub fn holds(&self, tol: f64) -> bool {
        self.margin >= -tol * self.scale
    }
}

/// `∫(∇∧ω)·u ≤ ‖ω‖_{Ḣ^a} ‖u‖_{Ḣ^b}` for `a + b = 1`.
pub fn duality_pairing_check(w: &VectorField, u: &VectorField, a: f64, b: f64) -> Result<Margin> {
    if !(a.is_finite() && b.is_finite() && ((a + b) - 1.0).abs() <= 1e-12) {
        return Err(Error::Rejected(format!(
            "exponents must satisfy a + b = 1, got a = {a}, b = {b}"
        )));
    }
    if !w.grid().same_lattice(u.grid()) {
        return Err(Error::GridMismatch);
    }
    let g = *w.grid();
    let mut pairing = 0.0;
    for idx in 0..g.len() {
        let c = curl_at(g.wavevector(idx), w.at(idx));
        let v = u.at(idx);
        pairing += (c[0].conj() * v[0] + c[1].conj() * v[1] + c[2].conj() * v[2]).re;
    }
    let nw = sobolev_norm(w, SobolevIndex::homogeneous(a))?;
    let nu = sobolev_norm(u, SobolevIndex::homogeneous(b))?;
    Ok(Margin::new(pairing, nw * nu))
}

/// `‖f‖_{s} ≤ ‖f‖_{s1}^θ ‖f‖_{s2}^{1−θ}` with `s = θ s1 + (1−θ) s2`.
pub fn interpolation_check<F: SpectralData>(f: &F, s1: f64, s2: f64, theta: f64, kind: SobolevKind) -> Result<Margin> {
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::Rejected(format!("theta must lie in [0, 1], got {theta}")));
    }
    let idx = |s| SobolevIndex { s, kind };
    let s = theta * s1 + (1.0 - theta) * s2;
    let lhs = sobolev_norm(f, idx(s))?;
    let n1 = sobolev_norm(f, idx(s1))?;
    let n2 = sobolev_norm(f, idx(s2))?;
    let rhs = if theta == 1.0 {
        n1
    } else if theta == 0.0 {
        n2
    } else {
        n1.powf(theta) * n2.powf(1.0 - theta)
    };
    Ok(Margin::new(lhs, rhs))
}

/// Young's inequality `x y ≤ C_δ x^p + δ y^q` with the optimal constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct YoungSplit {
    /// `C_δ = (δ q)^{−p/q} / p`.
    pub c_delta: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    /// The `y` at which equality holds for the given `x`.
    pub y_star: f64,
}

pub fn young_split(x: f64, y: f64, delta: f64, p: f64, q: f64) -> Result<YoungSplit> {
    if !(p > 1.0 && q > 1.0) || (1.0 / p + 1.0 / q - 1.0).abs() > 1e-12 {
        return Err(Error::Rejected(format!(
            "exponents must be conjugate and > 1, got p = {p}, q = {q}"
        )));
    }
    if !(x >= 0.0 && y >= 0.0 && x.is_finite() && y.is_finite()) {
        return Err(Error::Rejected(format!("x, y must be non-negative, got {x}, {y}")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::Rejected(format!("delta must be positive, got {delta}")));
    }
    let c_delta = (delta * q).powf(-p / q) / p;
    let lhs = x * y;
    let rhs = c_delta * x.powf(p) + delta * y.powf(q);
    let y_star = (x / (delta * q)).powf(1.0 / (q - 1.0));
    Ok(YoungSplit {
        c_delta,
        lhs,
        rhs,
        margin: rhs - lhs,
        y_star,
    })
}

/// Embed `f` in a finer lattice with the same box (zero padding).
fn pad(f: &SpectralField, big: GridSpec) -> SpectralField {
    let small = *f.grid();
    SpectralField::from_fn(big, |_, m| small.index_of(m).map(|i| f.coeffs()[i]).unwrap_or_default())
}

/// `‖fg‖_{Ḣ^{s1+s2−3/2}} / (‖f‖_{Ḣ^{s1}} ‖g‖_{Ḣ^{s2}})`, report only.
///
/// The product is formed without aliasing on a doubled grid. Its mean is
/// dropped before taking the norm, since the target index may be negative.
pub fn product_law_report(f: &SpectralField, g: &SpectralField, s1: f64, s2: f64) -> Result<f64> {
    if !(s1 < 1.5 && s2 < 1.5 && s1 + s2 > 0.0) {
        return Err(Error::Rejected(format!(
            "product law needs s1, s2 < 3/2 and s1 + s2 > 0, got ({s1}, {s2})"
        )));
    }
    if !f.grid().same_lattice(g.grid()) {
        return Err(Error::GridMismatch);
    }
    let denom = sobolev_norm(f, SobolevIndex::homogeneous(s1))? * sobolev_norm(g, SobolevIndex::homogeneous(s2))?;
    if denom == 0.0 {
        return Ok(0.0);
    }
    let small = *f.grid();
    let big = GridSpec::new(2 * small.n, small.box_length, small.dealias_fraction)?;
    let a = pad(f, big).to_physical();
    let b = pad(g, big).to_physical();
    let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    let mut fg = SpectralField::from_physical(big, &prod)?;
    fg.coeffs_mut()[0] = Complex64::default();
    Ok(sobolev_norm(&fg, SobolevIndex::homogeneous(s1 + s2 - 1.5))? / denom)
}
