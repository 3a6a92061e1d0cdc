//! Fourier-side calculus: fractional multipliers, Riesz transforms, the
//! Leray projection, differential operators, Sobolev norms, mollification
//! and dealiased products.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::field::{from_physical_pair, to_physical_pair, SpectralData, SpectralField, VectorField};
use super::grid::GridSpec;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SobolevKind {
    /// Weight `|k|^s` (`Ḣ^s`, `D^s`).
    Homogeneous,
    /// Weight `(1 + |k|^2)^{s/2}` (`H^s`, `L^s`).
    Inhomogeneous,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SobolevIndex {
    pub s: f64,
    pub kind: SobolevKind,
}

impl SobolevIndex {
    pub fn homogeneous(s: f64) -> Self {
        SobolevIndex {
            s,
            kind: SobolevKind::Homogeneous,
        }
    }

    pub fn inhomogeneous(s: f64) -> Self {
        SobolevIndex {
            s,
            kind: SobolevKind::Inhomogeneous,
        }
    }

    #[inline]
    pub fn weight(&self, k_sq: f64) -> f64 {
        multiplier_weight(k_sq, self.s, self.kind)
    }
}

/// Symbol of `D^s` or `L^s` at `|k|^2 = k_sq`.
///
/// `D^s` maps the zero mode to 0 for `s > 0` and leaves it alone for
/// `s = 0`; for `s < 0` callers must have checked that it vanishes.
#[inline]
pub fn multiplier_weight(k_sq: f64, s: f64, kind: SobolevKind) -> f64 {
    match kind {
        SobolevKind::Homogeneous => {
            if k_sq == 0.0 {
                if s == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else if s == 0.0 {
                1.0
            } else {
                k_sq.powf(0.5 * s)
            }
        }
        SobolevKind::Inhomogeneous => {
            if s == 0.0 {
                1.0
            } else {
                (1.0 + k_sq).powf(0.5 * s)
            }
        }
    }
}

fn check_mean<F: SpectralData>(f: &F, s: f64, kind: SobolevKind) -> Result<()> {
    if kind == SobolevKind::Homogeneous && s < 0.0 {
        for c in f.components() {
            let z = c.zero_mode();
            if z.re != 0.0 || z.im != 0.0 {
                return Err(Error::NonzeroMean { s, zero_mode: z.norm() });
            }
        }
    }
    Ok(())
}

/// `D^s f` (homogeneous) or `L^s f` (inhomogeneous).
pub fn fractional_multiplier<F: SpectralData>(f: &F, s: f64, kind: SobolevKind) -> Result<F> {
    check_mean(f, s, kind)?;
    let mut out = f.clone();
    let g = *f.grid();
    let w: Vec<f64> = (0..g.len())
        .map(|idx| multiplier_weight(g.k_sq(idx), s, kind))
        .collect();
    for c in out.components_mut() {
        c.coeffs_mut().iter_mut().zip(&w).for_each(|(a, &m)| *a *= m);
    }
    Ok(out)
}

/// Squared Sobolev norm `Σ_k m(k)^2 |f̂(k)|^2`, summed over components.
pub fn sobolev_norm_sq<F: SpectralData>(f: &F, idx: SobolevIndex) -> Result<f64> {
    check_mean(f, idx.s, idx.kind)?;
    let g = *f.grid();
    let mut total = 0.0;
    for c in f.components() {
        for (i, a) in c.coeffs().iter().enumerate() {
            let n2 = a.norm_sqr();
            if n2 != 0.0 {
                let w = idx.weight(g.k_sq(i));
                total += w * w * n2;
            }
        }
    }
    Ok(total)
}

pub fn sobolev_norm<F: SpectralData>(f: &F, idx: SobolevIndex) -> Result<f64> {
    Ok(sobolev_norm_sq(f, idx)?.sqrt())
}

/// Riesz transform `R_a` with symbol `-i k_a / |k|`.
///
/// With this sign `Σ_ab R_a R_b (u_a u_b)` has symbol `-k_a k_b / |k|^2`
/// and solves `-Δp = Σ ∂_a ∂_b (u_a u_b)`.
pub fn riesz(f: &SpectralField, axis: usize) -> SpectralField {
    assert!(axis < 3, "axis must be 0, 1 or 2");
    let g = *f.grid();
    let mut out = f.clone();
    for (idx, c) in out.coeffs_mut().iter_mut().enumerate() {
        let k = g.wavevector(idx);
        let kk = (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).sqrt();
        *c = if kk == 0.0 {
            Complex64::default()
        } else {
            *c * Complex64::new(0.0, -k[axis] / kk)
        };
    }
    out
}

/// Orthogonal projection onto divergence-free fields,
/// `û ← û - k (k·û) / |k|^2`; the zero mode passes through.
pub fn leray_project(u: &VectorField) -> VectorField {
    let g = *u.grid();
    let mut out = u.clone();
    for idx in 0..g.len() {
        let k = g.wavevector(idx);
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0.0 {
            continue;
        }
        let v = u.at(idx);
        let kv = (v[0] * k[0] + v[1] * k[1] + v[2] * k[2]) / k2;
        out.set_at(idx, [v[0] - kv * k[0], v[1] - kv * k[1], v[2] - kv * k[2]]);
    }
    out
}

#[inline]
pub(crate) fn curl_at(k: [f64; 3], v: [Complex64; 3]) -> [Complex64; 3] {
    let i = Complex64::i();
    [
        i * (v[2] * k[1] - v[1] * k[2]),
        i * (v[0] * k[2] - v[2] * k[0]),
        i * (v[1] * k[0] - v[0] * k[1]),
    ]
}

/// `∇ ∧ u`.
pub fn curl(u: &VectorField) -> VectorField {
    let g = *u.grid();
    let mut out = VectorField::zeros(g);
    for idx in 0..g.len() {
        out.set_at(idx, curl_at(g.wavevector(idx), u.at(idx)));
    }
    out
}

/// `∇ · u`.
pub fn divergence(u: &VectorField) -> SpectralField {
    let g = *u.grid();
    let mut out = SpectralField::zeros(g);
    let i = Complex64::i();
    for (idx, c) in out.coeffs_mut().iter_mut().enumerate() {
        let k = g.wavevector(idx);
        let v = u.at(idx);
        *c = i * (v[0] * k[0] + v[1] * k[1] + v[2] * k[2]);
    }
    out
}

/// `∇ f`.
pub fn gradient(f: &SpectralField) -> VectorField {
    let g = *f.grid();
    let mut out = VectorField::zeros(g);
    let i = Complex64::i();
    for (idx, &c) in f.coeffs().iter().enumerate() {
        let k = g.wavevector(idx);
        out.set_at(idx, [i * c * k[0], i * c * k[1], i * c * k[2]]);
    }
    out
}

/// `‖∇·u‖_{L²}`.
pub fn divergence_norm(u: &VectorField) -> f64 {
    divergence(u).norm_sq().sqrt()
}

/// Gaussian mollifier: multiply by `exp(-eps^2 |k|^2 / 2)`.
pub fn mollify<F: SpectralData>(f: &F, eps: f64) -> F {
    assert!(eps >= 0.0, "mollification width must be non-negative");
    let mut out = f.clone();
    if eps == 0.0 {
        return out;
    }
    let g = *f.grid();
    let w: Vec<f64> = (0..g.len()).map(|idx| (-0.5 * eps * eps * g.k_sq(idx)).exp()).collect();
    for c in out.components_mut() {
        c.coeffs_mut().iter_mut().zip(&w).for_each(|(a, &m)| *a *= m);
    }
    out
}

/// Dealiased product: multiply on the grid, transform back and apply the
/// 2/3 mask.
pub fn pointwise_product(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    if !f.grid().same_lattice(g.grid()) {
        return Err(Error::GridMismatch);
    }
    let (a, b) = to_physical_pair(f, g);
    let prod: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x * y).collect();
    let mut out = SpectralField::from_physical(*f.grid(), &prod)?;
    out.apply_dealias();
    Ok(out)
}

/// `∇·(v ⊗ f)`, i.e. component `i` is `Σ_j ∂_j (v_j f_i)`, from grid values
/// of `v` and `f`, with every product dealiased.
pub fn tensor_divergence_physical(grid: GridSpec, v: &[Vec<f64>; 3], f: &[Vec<f64>; 3]) -> VectorField {
    let products: Vec<(usize, usize, Vec<f64>)> = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .map(|(i, j)| (i, j, v[j].iter().zip(&f[i]).map(|(a, b)| a * b).collect()))
        .collect();
    let mut out = VectorField::zeros(grid);
    let zero = vec![0.0; grid.len()];
    let wv = grid.wavevectors();
    let im = Complex64::i();
    let accumulate = |i: usize, j: usize, p: &SpectralField, out: &mut VectorField| {
        let dst = &mut out.comps_mut()[i];
        for ((d, c), k) in dst.coeffs_mut().iter_mut().zip(p.coeffs()).zip(&wv) {
            *d += im * k[j] * c;
        }
    };
    for pair in products.chunks(2) {
        let (i0, j0, ref p0) = pair[0];
        let p1 = pair.get(1);
        let (fa, fb) = from_physical_pair(grid, p0, p1.map(|p| &p.2).unwrap_or(&zero));
        accumulate(i0, j0, &fa, &mut out);
        if let Some((i1, j1, _)) = p1 {
            accumulate(*i1, *j1, &fb, &mut out);
        }
    }
    out.apply_dealias();
    out
}

/// `∇·(v ⊗ f)` from spectral inputs.
pub fn tensor_divergence(v: &VectorField, f: &VectorField) -> Result<VectorField> {
    if !v.grid().same_lattice(f.grid()) {
        return Err(Error::GridMismatch);
    }
    Ok(tensor_divergence_physical(
        *v.grid(),
        &v.to_physical(),
        &f.to_physical(),
    ))
}
