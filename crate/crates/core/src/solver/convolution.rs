use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Full linear convolution `c[p] = Σ_j a[j] b[p − j]`, length `a.len() + b.len() − 1`.
pub(crate) fn linear_convolve(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let len = a.len() + b.len() - 1;
    let m = len.next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let mut fa = padded(a, m);
    let mut fb = padded(b, m);
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inv.process(&mut fa);
    let scale = 1.0 / m as f64;
    fa.truncate(len);
    fa.iter_mut().for_each(|v| *v *= scale);
    fa
}

fn padded(a: &[Complex64], m: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); m];
    v[..a.len()].copy_from_slice(a);
    v
}

/// Discrete linear convolution `c_i = dx Σ_j a_j b_{i − j + n/2}`: `b` is read as
/// centred on node n/2, values beyond either end count as zero.
pub fn convolve_space(a: &[Complex64], b: &[Complex64], dx: f64) -> Result<Vec<Complex64>> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    let n = a.len();
    let full = linear_convolve(a, b);
    Ok((0..n).map(|i| full[i + n / 2] * dx).collect())
}

/// Weights of the product-integration rule for
/// `∫_0^{t_n} (t_n − τ)^{a−1} φ(τ) dτ` with φ linear between nodes τ_j = j·h.
pub fn product_weights(a: f64, n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n + 1];
    for i in 0..n {
        // sub-interval [τ_i, τ_{i+1}] maps to s = t_n − τ in [u, v]
        let u = (n - i - 1) as f64 * h;
        let v = (n - i) as f64 * h;
        let m0 = (v.powf(a) - u.powf(a)) / a;
        let m1 = (v.powf(a + 1.0) - u.powf(a + 1.0)) / (a + 1.0);
        w[i] += (m1 - u * m0) / h;
        w[i + 1] += (v * m0 - m1) / h;
    }
    w
}

/// `∫_0^{t} (t − τ)^{alpha−1} φ(τ) dτ` at t = t_index·dt for vector-valued φ sampled
/// at τ_j = j·dt, j = 0..=t_index.
pub fn convolve_time_singular(kernel_values: &[Vec<Complex64>], alpha: f64, t_index: usize, dt: f64) -> Vec<Complex64> {
    let width = kernel_values.first().map_or(0, Vec::len);
    let mut out = vec![Complex64::new(0.0, 0.0); width];
    if t_index == 0 {
        return out;
    }
    let w = product_weights(alpha, t_index, dt);
    for (wj, phi) in w.iter().zip(kernel_values) {
        for (o, p) in out.iter_mut().zip(phi) {
            *o += *wj * p;
        }
    }
    out
}

/// Forward/inverse transforms on an M-point periodic grid with the crate's
/// convention `f*(k) = ∫ e^{ikx} f dx`. Origin phases cancel in convolutions and
/// are left out.
pub(crate) struct Spectral {
    pub m: usize,
    pub dx: f64,
    to_k: Arc<dyn Fft<f64>>,
    to_x: Arc<dyn Fft<f64>>,
}

impl Spectral {
    pub fn new(m: usize, dx: f64) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            m,
            dx,
            to_k: planner.plan_fft_inverse(m),
            to_x: planner.plan_fft_forward(m),
        }
    }

    pub fn wavenumber(&self, j: usize) -> f64 {
        let m = self.m as isize;
        let j = j as isize;
        let idx = if j < m / 2 { j } else { j - m };
        2.0 * std::f64::consts::PI * idx as f64 / (m as f64 * self.dx)
    }

    /// Samples (zero-padded to m) to transform values, without the origin phase.
    pub fn transform(&self, samples: &[Complex64]) -> Vec<Complex64> {
        let mut v = padded(samples, self.m);
        self.to_k.process(&mut v);
        v.iter_mut().for_each(|z| *z *= self.dx);
        v
    }

    /// Inverse of [`Spectral::transform`], truncated to `n` samples.
    pub fn inverse(&self, mut values: Vec<Complex64>, n: usize) -> Vec<Complex64> {
        self.to_x.process(&mut values);
        let scale = 1.0 / (self.m as f64 * self.dx);
        values.truncate(n);
        values.iter_mut().for_each(|z| *z *= scale);
        values
    }
}
