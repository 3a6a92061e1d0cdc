use std::ops::{AddAssign, MulAssign, SubAssign};

use num_complex::Complex64;

use super::fft;
use super::grid::GridSpec;
use crate::error::{Error, Result};

/// Fourier coefficients of one real scalar field on the box.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        SpectralField {
            grid,
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} coefficients, got {}",
                grid.len(),
                coeffs.len()
            )));
        }
        Ok(SpectralField { grid, coeffs })
    }

    /// Build coefficients mode by mode from `(storage index, integer wavenumber)`.
    pub fn from_fn(grid: GridSpec, mut f: impl FnMut(usize, [i64; 3]) -> Complex64) -> Self {
        let coeffs = grid.modes().map(|(idx, m)| f(idx, m)).collect();
        SpectralField { grid, coeffs }
    }

    /// Real single mode `√2 a cos(k·x + phase)`; unit L² norm for `a = 1`.
    pub fn single_mode(grid: GridSpec, m: [i64; 3], amplitude: Complex64) -> Result<Self> {
        let mut f = SpectralField::zeros(grid);
        f.set_mode(m, amplitude / std::f64::consts::SQRT_2)?;
        Ok(f)
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn get(&self, m: [i64; 3]) -> Option<Complex64> {
        self.grid.index_of(m).map(|i| self.coeffs[i])
    }

    /// Set the coefficient at `m` and its conjugate partner at `-m`.
    pub fn set_mode(&mut self, m: [i64; 3], c: Complex64) -> Result<()> {
        let idx = self
            .grid
            .index_of(m)
            .ok_or_else(|| Error::Rejected(format!("wavenumber {m:?} outside the grid")))?;
        if self.grid.is_nyquist(m) {
            return Err(Error::Rejected(format!("wavenumber {m:?} lies on a Nyquist plane")));
        }
        let neg = self.grid.neg_index(idx);
        if neg == idx {
            self.coeffs[idx] = Complex64::new(c.re, 0.0);
        } else {
            self.coeffs[idx] = c;
            self.coeffs[neg] = c.conj();
        }
        Ok(())
    }

    #[inline]
    pub fn zero_mode(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// `Σ_k Re(conj(f̂) ĝ)`, the box average of `f g`.
    pub fn inner(&self, other: &SpectralField) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.re * b.re + a.im * b.im)
            .sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Multiply every coefficient by `m(idx, lattice)`.
    pub fn scale_modes(&mut self, mut m: impl FnMut(usize, [i64; 3]) -> f64) {
        let g = self.grid;
        for (idx, lat) in g.modes() {
            self.coeffs[idx] *= m(idx, lat);
        }
    }

    /// Zero every coefficient outside the dealias mask (and on Nyquist planes).
    pub fn apply_dealias(&mut self) {
        let g = self.grid;
        for (idx, m) in g.modes() {
            if !g.is_retained(m) {
                self.coeffs[idx] = Complex64::default();
            }
        }
    }

    /// Project onto Hermitian-symmetric coefficients, i.e. onto real fields.
    pub fn symmetrize(&mut self) {
        let g = self.grid;
        for idx in 0..g.len() {
            let neg = g.neg_index(idx);
            if neg > idx {
                let a = self.coeffs[idx];
                let b = self.coeffs[neg].conj();
                let avg = (a + b) * 0.5;
                self.coeffs[idx] = avg;
                self.coeffs[neg] = avg.conj();
            } else if neg == idx {
                self.coeffs[idx].im = 0.0;
            }
        }
    }

    /// Largest `|f̂(k) - conj(f̂(-k))|`.
    pub fn hermitian_defect(&self) -> f64 {
        let g = self.grid;
        (0..g.len())
            .map(|idx| (self.coeffs[idx] - self.coeffs[g.neg_index(idx)].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Grid-point values including the (roundoff-level) imaginary part.
    pub fn to_physical_complex(&self) -> Vec<Complex64> {
        let mut data = self.coeffs.clone();
        fft::plan(self.grid.n).inverse(&mut data);
        data
    }

    /// Real grid-point values `f(x_j)`.
    pub fn to_physical(&self) -> Vec<f64> {
        self.to_physical_complex().into_iter().map(|c| c.re).collect()
    }

    /// Coefficients of real grid data, Hermitian-symmetrized.
    pub fn from_physical(grid: GridSpec, values: &[f64]) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} grid values, got {}",
                grid.len(),
                values.len()
            )));
        }
        let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft::plan(grid.n).forward(&mut data);
        let s = 1.0 / grid.len() as f64;
        data.iter_mut().for_each(|c| *c *= s);
        let mut f = SpectralField { grid, coeffs: data };
        f.symmetrize();
        Ok(f)
    }

    fn check_grid(&self, other: &SpectralField) {
        assert!(
            self.grid.same_lattice(&other.grid),
            "arithmetic between fields on different grids"
        );
    }
}

/// Physical values of two real fields at the cost of one complex transform.
pub(crate) fn to_physical_pair(a: &SpectralField, b: &SpectralField) -> (Vec<f64>, Vec<f64>) {
    let i = Complex64::i();
    let mut data: Vec<Complex64> = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + i * y).collect();
    fft::plan(a.grid.n).inverse(&mut data);
    data.into_iter().map(|c| (c.re, c.im)).unzip()
}

/// Coefficients of two real grid functions from one complex transform.
/// The split `A = (Z(k) + conj Z(-k))/2`, `B = (Z(k) - conj Z(-k))/2i` is
/// exactly Hermitian.
pub(crate) fn from_physical_pair(grid: GridSpec, a: &[f64], b: &[f64]) -> (SpectralField, SpectralField) {
    let mut z: Vec<Complex64> = a.iter().zip(b).map(|(&x, &y)| Complex64::new(x, y)).collect();
    fft::plan(grid.n).forward(&mut z);
    let s = 0.5 / grid.len() as f64;
    let mut fa = vec![Complex64::default(); grid.len()];
    let mut fb = vec![Complex64::default(); grid.len()];
    for idx in 0..grid.len() {
        let zk = z[idx];
        let zn = z[grid.neg_index(idx)].conj();
        fa[idx] = (zk + zn) * s;
        let d = (zk - zn) * s;
        // d / i
        fb[idx] = Complex64::new(d.im, -d.re);
    }
    (SpectralField { grid, coeffs: fa }, SpectralField { grid, coeffs: fb })
}

impl AddAssign<&SpectralField> for SpectralField {
    fn add_assign(&mut self, rhs: &SpectralField) {
        self.check_grid(rhs);
        self.coeffs.iter_mut().zip(&rhs.coeffs).for_each(|(a, b)| *a += b);
    }
}

impl SubAssign<&SpectralField> for SpectralField {
    fn sub_assign(&mut self, rhs: &SpectralField) {
        self.check_grid(rhs);
        self.coeffs.iter_mut().zip(&rhs.coeffs).for_each(|(a, b)| *a -= b);
    }
}

impl MulAssign<f64> for SpectralField {
    fn mul_assign(&mut self, rhs: f64) {
        self.coeffs.iter_mut().for_each(|a| *a *= rhs);
    }
}

/// Three scalar fields on one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorField {
    c: [SpectralField; 3],
}

impl VectorField {
    pub fn zeros(grid: GridSpec) -> Self {
        VectorField {
            c: [
                SpectralField::zeros(grid),
                SpectralField::zeros(grid),
                SpectralField::zeros(grid),
            ],
        }
    }

    pub fn new(x: SpectralField, y: SpectralField, z: SpectralField) -> Result<Self> {
        if !(x.grid.same_lattice(&y.grid) && x.grid.same_lattice(&z.grid)) {
            return Err(Error::GridMismatch);
        }
        Ok(VectorField { c: [x, y, z] })
    }

    /// Real single mode `√2 a e cos(k·x)` with unit polarisation `e`.
    pub fn single_mode(grid: GridSpec, m: [i64; 3], polarization: [f64; 3], amplitude: f64) -> Result<Self> {
        let norm = polarization.iter().map(|p| p * p).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::Rejected("zero polarisation vector".into()));
        }
        let mk = |p: f64| SpectralField::single_mode(grid, m, Complex64::new(amplitude * p / norm, 0.0));
        VectorField::new(mk(polarization[0])?, mk(polarization[1])?, mk(polarization[2])?)
    }

    pub fn grid(&self) -> &GridSpec {
        self.c[0].grid()
    }

    pub fn x(&self) -> &SpectralField {
        &self.c[0]
    }

    pub fn y(&self) -> &SpectralField {
        &self.c[1]
    }

    pub fn z(&self) -> &SpectralField {
        &self.c[2]
    }

    pub fn comps(&self) -> &[SpectralField; 3] {
        &self.c
    }

    pub fn comps_mut(&mut self) -> &mut [SpectralField; 3] {
        &mut self.c
    }

    pub fn into_comps(self) -> [SpectralField; 3] {
        self.c
    }

    /// Coefficient vector at storage index `idx`.
    #[inline]
    pub fn at(&self, idx: usize) -> [Complex64; 3] {
        [self.c[0].coeffs[idx], self.c[1].coeffs[idx], self.c[2].coeffs[idx]]
    }

    #[inline]
    pub fn set_at(&mut self, idx: usize, v: [Complex64; 3]) {
        for (c, x) in self.c.iter_mut().zip(v) {
            c.coeffs[idx] = x;
        }
    }

    pub fn inner(&self, other: &VectorField) -> f64 {
        self.c.iter().zip(&other.c).map(|(a, b)| a.inner(b)).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.c.iter().map(SpectralField::norm_sq).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(SpectralField::is_zero)
    }

    pub fn is_finite(&self) -> bool {
        self.c.iter().all(SpectralField::is_finite)
    }

    pub fn apply_dealias(&mut self) {
        self.c.iter_mut().for_each(SpectralField::apply_dealias);
    }

    pub fn symmetrize(&mut self) {
        self.c.iter_mut().for_each(SpectralField::symmetrize);
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.c.iter().map(SpectralField::hermitian_defect).fold(0.0, f64::max)
    }

    /// `self += a * other`.
    pub fn axpy(&mut self, a: f64, other: &VectorField) {
        for (x, y) in self.c.iter_mut().zip(&other.c) {
            x.check_grid(y);
            x.coeffs.iter_mut().zip(&y.coeffs).for_each(|(p, q)| *p += q * a);
        }
    }

    /// Grid values of the three components.
    pub fn to_physical(&self) -> [Vec<f64>; 3] {
        let (x, y) = to_physical_pair(&self.c[0], &self.c[1]);
        [x, y, self.c[2].to_physical()]
    }
}

impl AddAssign<&VectorField> for VectorField {
    fn add_assign(&mut self, rhs: &VectorField) {
        for (a, b) in self.c.iter_mut().zip(&rhs.c) {
            *a += b;
        }
    }
}

impl SubAssign<&VectorField> for VectorField {
    fn sub_assign(&mut self, rhs: &VectorField) {
        for (a, b) in self.c.iter_mut().zip(&rhs.c) {
            *a -= b;
        }
    }
}

impl MulAssign<f64> for VectorField {
    fn mul_assign(&mut self, rhs: f64) {
        self.c.iter_mut().for_each(|a| *a *= rhs);
    }
}

/// Anything made of scalar spectral components: lets norms and multipliers
/// act uniformly on scalar and vector fields.
pub trait SpectralData: Clone {
    fn components(&self) -> &[SpectralField];
    fn components_mut(&mut self) -> &mut [SpectralField];

    fn grid(&self) -> &GridSpec {
        self.components()[0].grid()
    }
}

impl SpectralData for SpectralField {
    fn components(&self) -> &[SpectralField] {
        std::slice::from_ref(self)
    }

    fn components_mut(&mut self) -> &mut [SpectralField] {
        std::slice::from_mut(self)
    }
}

impl SpectralData for VectorField {
    fn components(&self) -> &[SpectralField] {
        &self.c
    }

    fn components_mut(&mut self) -> &mut [SpectralField] {
        &mut self.c
    }
}
