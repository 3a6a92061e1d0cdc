use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

/// Cached 3-D transform of size `n^3` built from 1-D rustfft plans.
///
/// `forward` computes `Σ_x f(x) e^{-ik·x}` (unnormalised), `inverse`
/// computes `Σ_k f̂(k) e^{ik·x}`. Line batches run on the rayon pool; each
/// line is transformed independently so results do not depend on the
/// thread count.
pub(crate) struct Fft3 {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

static PLANS: OnceLock<Mutex<HashMap<usize, Arc<Fft3>>>> = OnceLock::new();

pub(crate) fn plan(n: usize) -> Arc<Fft3> {
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().expect("fft plan cache poisoned");
    map.entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Fft3 {
                n,
                fwd: planner.plan_fft_forward(n),
                inv: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

impl Fft3 {
    pub(crate) fn forward(&self, data: &mut [Complex64]) {
        self.run(data, &self.fwd);
    }

    pub(crate) fn inverse(&self, data: &mut [Complex64]) {
        self.run(data, &self.inv);
    }

    fn run(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let n = self.n;
        let slab = n * n;
        assert_eq!(data.len(), slab * n);

        // last axis: contiguous lines
        data.par_chunks_mut(slab).for_each(|chunk| {
            let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(chunk, &mut scratch);
        });

        // middle axis: transpose each slab, transform, transpose back
        data.par_chunks_mut(slab).for_each(|chunk| {
            let mut t = vec![Complex64::default(); slab];
            for j in 0..n {
                for l in 0..n {
                    t[l * n + j] = chunk[j * n + l];
                }
            }
            let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
            fft.process_with_scratch(&mut t, &mut scratch);
            for j in 0..n {
                for l in 0..n {
                    chunk[j * n + l] = t[l * n + j];
                }
            }
        });

        // first axis: gather lines of stride n^2 into a buffer ordered [j][l][i]
        let mut buf = vec![Complex64::default(); slab * n];
        {
            let src: &[Complex64] = data;
            buf.par_chunks_mut(slab).enumerate().for_each(|(j, chunk)| {
                for l in 0..n {
                    for i in 0..n {
                        chunk[l * n + i] = src[(i * n + j) * n + l];
                    }
                }
                let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
                fft.process_with_scratch(chunk, &mut scratch);
            });
        }
        let buf = &buf;
        data.par_chunks_mut(slab).enumerate().for_each(|(i, chunk)| {
            for j in 0..n {
                for l in 0..n {
                    chunk[j * n + l] = buf[(j * n + l) * n + i];
                }
            }
        });
    }
}
