//! Initial data with prescribed Sobolev regularity.
//!
//! Random spectra draw one independent complex Gaussian vector per
//! lattice mode and scale it by `|k|^{−(s + 3/2 + δ)}`. Each mode's draw
//! comes from its own generator seeded by `(seed, field, m)`, so a finer
//! grid reproduces every coarse coefficient and only adds new shells. The
//! sum `Σ |k|^{2s'} |k|^{−2(s+3/2+δ)}` over the lattice then converges for
//! `s' < s + δ` and grows with `n` for larger `s'`.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{leray_project, sobolev_norm, GridSpec, SobolevIndex, SpectralField, VectorField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IcKind {
    Zero,
    RandomSpectrum,
    /// `(sin x cos y cos z, −cos x sin y cos z, 0)` on the wavevector's scale.
    TaylorGreen,
    /// ABC flow with `A = B = C = 1`, an eigenfield of the curl.
    Beltrami,
    SingleMode,
}

fn default_delta() -> f64 {
    0.01
}

fn default_amplitude() -> f64 {
    1.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IcRecipe {
    pub kind: IcKind,
    /// Index in which the field is normalized to `amplitude`.
    pub target_index: SobolevIndex,
    #[serde(default = "default_delta")]
    pub spectral_slope_delta: f64,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default)]
    pub seed: u64,
    /// Integer wavevector for the analytic kinds. Taylor–Green and Beltrami
    /// use its first entry as the integer wavenumber.
    #[serde(default)]
    pub wavevector: Option<[i64; 3]>,
    /// Direction of a single mode; defaults to a unit vector normal to it.
    #[serde(default)]
    pub polarization: Option<[f64; 3]>,
}

impl IcRecipe {
    pub fn new(kind: IcKind, target_index: SobolevIndex, amplitude: f64) -> Self {
        IcRecipe {
            kind,
            target_index,
            spectral_slope_delta: default_delta(),
            amplitude,
            seed: 0,
            wavevector: None,
            polarization: None,
        }
    }

    pub fn random(target_index: SobolevIndex, amplitude: f64, seed: u64) -> Self {
        IcRecipe {
            seed,
            ..Self::new(IcKind::RandomSpectrum, target_index, amplitude)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.amplitude > 0.0 && self.amplitude.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "amplitude must be positive, got {}",
                self.amplitude
            )));
        }
        if !(self.spectral_slope_delta > 0.0 && self.spectral_slope_delta.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "spectral_slope_delta must be positive, got {}",
                self.spectral_slope_delta
            )));
        }
        if !self.target_index.s.is_finite() {
            return Err(Error::InvalidParameter("target index must be finite".into()));
        }
        Ok(())
    }
}

const SALT_VELOCITY: u64 = 0x7665_6c6f_6369_7479;
const SALT_ANGULAR: u64 = 0x616e_6775_6c61_7221;

/// splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn mode_seed(seed: u64, salt: u64, m: [i64; 3]) -> u64 {
    let mut h = mix(seed ^ salt);
    for c in m {
        h = mix(h ^ (c as u64).wrapping_add(0x9e37_79b9_7f4a_7c15));
    }
    h
}

/// Of each pair `±m` exactly one is canonical.
fn is_canonical(m: [i64; 3]) -> bool {
    m > [-m[0], -m[1], -m[2]]
}

fn random_spectrum(r: &IcRecipe, g: &GridSpec, salt: u64) -> VectorField {
    let slope = -(r.target_index.s + 1.5 + r.spectral_slope_delta);
    let draws: Vec<Option<[Complex64; 3]>> = (0..g.len())
        .into_par_iter()
        .map(|idx| {
            let m = g.lattice(idx);
            if g.is_nyquist(m) || !is_canonical(m) {
                return None;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(mode_seed(r.seed, salt, m));
            let w = g.k_sq(idx).powf(0.5 * slope);
            Some(std::array::from_fn(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(re, im) * w
            }))
        })
        .collect();
    let mut f = VectorField::zeros(*g);
    for (idx, d) in draws.into_iter().enumerate() {
        if let Some(v) = d {
            f.set_at(idx, v);
            f.set_at(g.neg_index(idx), [v[0].conj(), v[1].conj(), v[2].conj()]);
        }
    }
    f
}

/// Sample `f(x, y, z)` on the grid and transform.
fn from_physical_fn(g: &GridSpec, f: impl Fn([f64; 3]) -> [f64; 3] + Sync) -> Result<VectorField> {
    let n = g.n;
    let vals: Vec<[f64; 3]> = (0..g.len())
        .into_par_iter()
        .map(|idx| f(g.point(idx / (n * n), (idx / n) % n, idx % n)))
        .collect();
    let comp = |c: usize| -> Result<SpectralField> {
        let v: Vec<f64> = vals.iter().map(|p| p[c]).collect();
        SpectralField::from_physical(*g, &v)
    };
    VectorField::new(comp(0)?, comp(1)?, comp(2)?)
}

fn normal_to(m: [i64; 3]) -> [f64; 3] {
    let k = [m[0] as f64, m[1] as f64, m[2] as f64];
    // cross with the coordinate axis least aligned with k
    let axis = (0..3)
        .min_by(|&a, &b| k[a].abs().partial_cmp(&k[b].abs()).unwrap())
        .unwrap();
    let mut e = [0.0; 3];
    e[axis] = 1.0;
    let c = [
        k[1] * e[2] - k[2] * e[1],
        k[2] * e[0] - k[0] * e[2],
        k[0] * e[1] - k[1] * e[0],
    ];
    let n = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
    [c[0] / n, c[1] / n, c[2] / n]
}

fn wavenumber(r: &IcRecipe) -> Result<f64> {
    let m = r.wavevector.map(|w| w[0]).unwrap_or(1);
    if m <= 0 {
        return Err(Error::InvalidParameter(format!(
            "analytic data need a positive wavenumber, got {m}"
        )));
    }
    Ok(m as f64)
}

fn raw_field(r: &IcRecipe, g: &GridSpec, salt: u64) -> Result<VectorField> {
    let ku = g.k_unit();
    match r.kind {
        IcKind::Zero => Ok(VectorField::zeros(*g)),
        IcKind::RandomSpectrum => Ok(random_spectrum(r, g, salt)),
        IcKind::TaylorGreen => {
            let k = wavenumber(r)? * ku;
            from_physical_fn(g, move |[x, y, z]| {
                [
                    (k * x).sin() * (k * y).cos() * (k * z).cos(),
                    -(k * x).cos() * (k * y).sin() * (k * z).cos(),
                    0.0,
                ]
            })
        }
        IcKind::Beltrami => {
            let k = wavenumber(r)? * ku;
            from_physical_fn(g, move |[x, y, z]| {
                [
                    (k * z).sin() + (k * y).cos(),
                    (k * x).sin() + (k * z).cos(),
                    (k * y).sin() + (k * x).cos(),
                ]
            })
        }
        IcKind::SingleMode => {
            let m = r.wavevector.unwrap_or([1, 0, 0]);
            if m == [0, 0, 0] {
                return Err(Error::InvalidParameter("single mode needs a nonzero wavevector".into()));
            }
            let e = r.polarization.unwrap_or_else(|| normal_to(m));
            VectorField::single_mode(*g, m, e, 1.0)
        }
    }
}

fn normalize(mut f: VectorField, r: &IcRecipe) -> Result<VectorField> {
    if r.kind == IcKind::Zero {
        return Ok(f);
    }
    let norm = sobolev_norm(&f, r.target_index)?;
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(Error::Rejected(format!(
            "{:?} data have zero norm in the target index on this grid",
            r.kind
        )));
    }
    f *= r.amplitude / norm;
    Ok(f)
}

fn clear_mean(f: &mut VectorField) {
    for c in f.comps_mut() {
        c.coeffs_mut()[0] = Complex64::default();
    }
}

/// Mean-free, divergence-free velocity normalized to `amplitude` in the
/// target index.
pub fn make_velocity_ic(r: &IcRecipe, g: &GridSpec) -> Result<VectorField> {
    r.validate()?;
    g.validate()?;
    let mut f = leray_project(&raw_field(r, g, SALT_VELOCITY)?);
    clear_mean(&mut f);
    normalize(f, r)
}

/// Angular velocity normalized to `amplitude` in the target index; no
/// solenoidal constraint.
pub fn make_angular_ic(r: &IcRecipe, g: &GridSpec) -> Result<VectorField> {
    r.validate()?;
    g.validate()?;
    let mut f = raw_field(r, g, SALT_ANGULAR)?;
    if r.kind == IcKind::RandomSpectrum {
        clear_mean(&mut f);
    }
    normalize(f, r)
}
