use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn default_box_length() -> f64 {
    2.0 * PI
}

fn default_dealias_fraction() -> f64 {
    2.0 / 3.0
}

/// Lattice description of the periodic box.
///
/// Coefficients are stored row-major over `(i, j, l) ∈ [0, n)^3` in FFT
/// order: storage index `i` holds the integer wavenumber `i` for
/// `i < n/2` and `i - n` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    #[serde(default = "default_box_length")]
    pub box_length: f64,
    #[serde(default = "default_dealias_fraction")]
    pub dealias_fraction: f64,
}

impl GridSpec {
    pub fn new(n: usize, box_length: f64, dealias_fraction: f64) -> Result<Self> {
        let g = GridSpec {
            n,
            box_length,
            dealias_fraction,
        };
        g.validate()?;
        Ok(g)
    }

    /// `n^3` grid on the `2π` box with the 2/3 rule.
    pub fn cube(n: usize) -> Result<Self> {
        Self::new(n, default_box_length(), default_dealias_fraction())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 || !self.n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "n must be an even integer >= 4, got {}",
                self.n
            )));
        }
        if !(self.box_length.is_finite() && self.box_length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box_length must be positive, got {}",
                self.box_length
            )));
        }
        if !(self.dealias_fraction > 0.0 && self.dealias_fraction <= 1.0) {
            return Err(Error::InvalidGrid(format!(
                "dealias_fraction must lie in (0, 1], got {}",
                self.dealias_fraction
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// `2π / L`, the physical size of one lattice step in Fourier space.
    #[inline]
    pub fn k_unit(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Physical grid spacing.
    #[inline]
    pub fn dx(&self) -> f64 {
        self.box_length / self.n as f64
    }

    #[inline]
    pub fn wrap(&self, i: usize) -> i64 {
        if i < self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    #[inline]
    fn unwrap_axis(&self, m: i64) -> Option<usize> {
        let h = (self.n / 2) as i64;
        if m < -h || m >= h {
            None
        } else if m >= 0 {
            Some(m as usize)
        } else {
            Some((m + self.n as i64) as usize)
        }
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize, l: usize) -> usize {
        (i * self.n + j) * self.n + l
    }

    /// Integer wavenumber of a storage index.
    #[inline]
    pub fn lattice(&self, idx: usize) -> [i64; 3] {
        let n = self.n;
        [self.wrap(idx / (n * n)), self.wrap((idx / n) % n), self.wrap(idx % n)]
    }

    /// Storage index of an integer wavenumber, `None` if outside `[-n/2, n/2)^3`.
    pub fn index_of(&self, m: [i64; 3]) -> Option<usize> {
        Some(self.index(
            self.unwrap_axis(m[0])?,
            self.unwrap_axis(m[1])?,
            self.unwrap_axis(m[2])?,
        ))
    }

    /// Storage index of `-m`. Nyquist planes map onto themselves.
    #[inline]
    pub fn neg_index(&self, idx: usize) -> usize {
        let n = self.n;
        let (i, j, l) = (idx / (n * n), (idx / n) % n, idx % n);
        self.index((n - i) % n, (n - j) % n, (n - l) % n)
    }

    #[inline]
    pub fn wavevector(&self, idx: usize) -> [f64; 3] {
        let m = self.lattice(idx);
        let s = self.k_unit();
        [m[0] as f64 * s, m[1] as f64 * s, m[2] as f64 * s]
    }

    #[inline]
    pub fn k_sq(&self, idx: usize) -> f64 {
        let k = self.wavevector(idx);
        k[0] * k[0] + k[1] * k[1] + k[2] * k[2]
    }

    /// Largest retained `|m_i|`: the greatest integer strictly below
    /// `dealias_fraction * n / 2`, never reaching the Nyquist index.
    pub fn cutoff(&self) -> i64 {
        let c = self.dealias_fraction * self.n as f64 / 2.0;
        let k = (c - 1e-9).ceil() as i64 - 1;
        k.min(self.n as i64 / 2 - 1)
    }

    #[inline]
    pub fn is_nyquist(&self, m: [i64; 3]) -> bool {
        let h = -((self.n / 2) as i64);
        m.contains(&h)
    }

    /// Whether a wavenumber survives the dealias mask.
    #[inline]
    pub fn is_retained(&self, m: [i64; 3]) -> bool {
        let c = self.cutoff();
        m.iter().all(|&x| x.abs() <= c)
    }

    /// Iterate `(storage index, integer wavenumber)` in storage order.
    pub fn modes(&self) -> impl Iterator<Item = (usize, [i64; 3])> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| {
            (0..n).flat_map(move |j| {
                (0..n).map(move |l| (self.index(i, j, l), [self.wrap(i), self.wrap(j), self.wrap(l)]))
            })
        })
    }

    /// Physical wavevector of every mode, in storage order.
    pub fn wavevectors(&self) -> Vec<[f64; 3]> {
        let s = self.k_unit();
        self.modes()
            .map(|(_, m)| [m[0] as f64 * s, m[1] as f64 * s, m[2] as f64 * s])
            .collect()
    }

    /// Physical coordinates of grid point `(i, j, l)`.
    #[inline]
    pub fn point(&self, i: usize, j: usize, l: usize) -> [f64; 3] {
        let h = self.dx();
        [i as f64 * h, j as f64 * h, l as f64 * h]
    }

    pub fn same_lattice(&self, other: &GridSpec) -> bool {
        self.n == other.n && self.box_length == other.box_length
    }
}
