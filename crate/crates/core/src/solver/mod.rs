//! Solutions N(x, t) assembled from the Green kernels.
//!
//! `N = G⋆f + G2⋆g + (source integral)`, or `G3⋆f + G4⋆g` for the self-coupled
//! problem. Space convolutions use either the exact transforms on a zero-padded
//! grid (the default) or closed-form kernel samples; the source integral is done
//! mode by mode with the Mittag-Leffler factor integrated exactly against a
//! piecewise-linear source.

pub mod convolution;
mod field;
mod source;

use log::{debug, warn};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::QuadratureConfig;
use crate::error::{Error, Result};
use crate::fracmath::mittag_leffler;
use crate::green::{
    green_hat_unchecked, green_mass, green_point, green_point_closed, is_fourier_only, GreenKind, ProblemSpec, Regime,
};
use convolution::{linear_convolve, Spectral};
pub(crate) use source::TransformedSource;

pub use convolution::{convolve_space, convolve_time_singular, product_weights};
pub use field::{compare_fields, Field, Residual, SpaceTimeGrid};
pub use source::{SourceDescriptor, SourceTerm, Temporal};

/// Relative error allowed in the source time integral.
pub const SOURCE_TIME_TOL: f64 = 1e-3;
/// Kernel mass outside the window, relative to the total, above which a warning is issued.
pub const OUTSIDE_MASS_WARN: f64 = 1e-3;
/// Padded transform length as a multiple of nx.
const PAD_FACTOR: usize = 4;

/// How space convolutions are carried out.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    /// Periodic when the kernel is Fourier-only, spectral otherwise.
    #[default]
    Auto,
    /// Exact transforms on a zero-padded grid.
    Spectral,
    /// Closed-form kernel samples convolved in x; needs real λ > 0.
    RealSpace,
    /// Exact transforms on the window itself, periodically extended.
    Periodic,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SolveOptions {
    pub route: Route,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub field: Field,
    /// Route actually taken (never `Auto`).
    pub route: Route,
    /// Largest fraction of kernel mass found outside the window.
    pub outside_mass: f64,
    /// Estimated relative error of the source time integral.
    pub source_error: f64,
}

/// Checks every constraint and returns the spec unchanged when it is admissible.
pub fn validate_spec(spec: &ProblemSpec) -> Result<ProblemSpec> {
    spec.validate()?;
    Ok(*spec)
}

pub fn solve(
    spec: &ProblemSpec,
    f: &SourceDescriptor,
    g: &SourceDescriptor,
    u: &SourceTerm,
    grid: &SpaceTimeGrid,
    cfg: &QuadratureConfig,
) -> Result<Field> {
    solve_with(spec, f, g, u, grid, cfg, &SolveOptions::default()).map(|s| s.field)
}

pub fn solve_with(
    spec: &ProblemSpec,
    f: &SourceDescriptor,
    g: &SourceDescriptor,
    u: &SourceTerm,
    grid: &SpaceTimeGrid,
    cfg: &QuadratureConfig,
    opts: &SolveOptions,
) -> Result<Solution> {
    let spec = validate_spec(spec)?;
    grid.validate()?;
    cfg.validate()?;
    let has_g = !g.is_zero();
    if has_g && spec.regime == Regime::Diffusion {
        return Err(Error::Regime(format!(
            "a second initial condition g needs 1 < alpha <= 2 (alpha = {})",
            spec.alpha
        )));
    }
    u.check(grid)?;
    let coupled = matches!(u, SourceTerm::SelfCoupled);
    let (kf, kg) = if coupled {
        (GreenKind::G3, GreenKind::G4)
    } else {
        (GreenKind::G, GreenKind::G2)
    };
    let has_source = !coupled && !u.is_zero() && spec.mu != Complex64::new(0.0, 0.0);

    let route = match opts.route {
        Route::Auto => {
            if is_fourier_only(kf, &spec, cfg) || (has_g && is_fourier_only(kg, &spec, cfg)) {
                Route::Periodic
            } else {
                Route::Spectral
            }
        }
        Route::RealSpace if coupled => {
            return Err(Error::InvalidParameter(
                "the self-coupled kernels have no closed form; use the spectral route".into(),
            ))
        }
        r => r,
    };
    debug!(
        "solve: route {route:?}, nx {}, {} output times",
        grid.nx,
        grid.times.len()
    );

    let f_s = f.sample(grid)?;
    let g_s = g.sample(grid)?;
    let m = match route {
        Route::Periodic => grid.nx,
        _ => (PAD_FACTOR * grid.nx).next_power_of_two(),
    };
    let spectral = Spectral::new(m, grid.dx());
    let f_hat = spectral.transform(&f_s);
    let g_hat = if has_g { Some(spectral.transform(&g_s)) } else { None };
    let source = if has_source {
        TransformedSource::new(u, grid, |s| spectral.transform(s))?
    } else {
        None
    };

    let rows: Vec<(Vec<Complex64>, f64, f64)> = grid
        .times
        .par_iter()
        .map(|&t| -> Result<(Vec<Complex64>, f64, f64)> {
            let mut hat = vec![Complex64::new(0.0, 0.0); m];
            let mut real = vec![Complex64::new(0.0, 0.0); grid.nx];
            let mut outside: f64 = 0.0;
            if route == Route::RealSpace {
                let (v, out) = real_space_term(kf, &spec, &f_s, grid, t, cfg)?;
                add(&mut real, &v);
                outside = outside.max(out);
                if has_g {
                    let (v, out) = real_space_term(kg, &spec, &g_s, grid, t, cfg)?;
                    add(&mut real, &v);
                    outside = outside.max(out);
                }
            } else {
                let kernel = kernel_hat(kf, &spec, &spectral, t)?;
                if route == Route::Spectral {
                    outside = outside.max(outside_fraction(&spectral, &kernel, grid.nx));
                }
                for (h, (a, b)) in hat.iter_mut().zip(kernel.iter().zip(&f_hat)) {
                    *h += a * b;
                }
                if let Some(gh) = &g_hat {
                    let kernel = kernel_hat(kg, &spec, &spectral, t)?;
                    for (h, (a, b)) in hat.iter_mut().zip(kernel.iter().zip(gh)) {
                        *h += a * b;
                    }
                }
            }
            let mut source_error = 0.0;
            if let Some(src) = &source {
                let (v, err) = source_hat(&spec, src, &spectral, t, grid.dt, u.is_time_constant())?;
                source_error = err;
                add(&mut hat, &v);
            }
            if route != Route::RealSpace || source.is_some() {
                add(&mut real, &spectral.inverse(hat, grid.nx));
            }
            if real.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                return Err(Error::NonFinite("solve"));
            }
            Ok((real, outside, source_error))
        })
        .collect::<Result<_>>()?;

    let outside_mass = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let source_error = rows.iter().map(|r| r.2).fold(0.0, f64::max);
    if outside_mass > OUTSIDE_MASS_WARN {
        warn!("kernel mass outside the window is {outside_mass:.2e} of the total; widen the x-range");
    }
    if source_error > SOURCE_TIME_TOL {
        return Err(Error::TimeGridTooCoarse {
            estimate: source_error,
            tolerance: SOURCE_TIME_TOL,
        });
    }
    let field = Field {
        grid: grid.clone(),
        values: rows.into_iter().map(|r| r.0).collect(),
    };
    Ok(Solution {
        field,
        route,
        outside_mass,
        source_error,
    })
}

fn add(acc: &mut [Complex64], v: &[Complex64]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += b;
    }
}

fn kernel_hat(kind: GreenKind, spec: &ProblemSpec, spectral: &Spectral, t: f64) -> Result<Vec<Complex64>> {
    (0..spectral.m)
        .into_par_iter()
        .map(|j| green_hat_unchecked(kind, spectral.wavenumber(j), t, spec))
        .collect()
}

/// Fraction of the kernel's absolute mass at distances the window cannot hold.
fn outside_fraction(spectral: &Spectral, kernel: &[Complex64], nx: usize) -> f64 {
    let m = spectral.m;
    let g = spectral.inverse(kernel.to_vec(), m);
    let mut total = 0.0;
    let mut outside = 0.0;
    for (j, v) in g.iter().enumerate() {
        let d = j.min(m - j);
        total += v.norm();
        if d >= nx {
            outside += v.norm();
        }
    }
    if total > 0.0 {
        outside / total
    } else {
        0.0
    }
}

/// `dx Σ_j K(x_i − x_j) f_j` with K sampled from the closed form (quadrature at 0).
fn real_space_term(
    kind: GreenKind,
    spec: &ProblemSpec,
    f: &[Complex64],
    grid: &SpaceTimeGrid,
    t: f64,
    cfg: &QuadratureConfig,
) -> Result<(Vec<Complex64>, f64)> {
    let n = grid.nx;
    let dx = grid.dx();
    let kernel: Vec<Complex64> = (0..2 * n - 1)
        .into_par_iter()
        .map(|p| {
            let x = (p as f64 - (n - 1) as f64) * dx;
            let v = if p == n - 1 {
                green_point(kind, 0.0, t, spec, cfg)?.re
            } else {
                green_point_closed(kind, x, t, spec, cfg)?
            };
            Ok(Complex64::new(v, 0.0))
        })
        .collect::<Result<_>>()?;
    let mass = green_mass(kind, t, spec)?.re;
    let sampled: f64 = kernel.iter().map(|v| v.re).sum::<f64>() * dx;
    let outside = ((mass - sampled) / mass).abs();
    let full = linear_convolve(f, &kernel);
    Ok(((0..n).map(|i| full[i + n - 1] * dx).collect(), outside))
}

/// Transformed source contribution at time t and its estimated relative error.
///
/// Per mode, `−σ(k) ∫_0^t s^{α−1} E_{α,α}(−w s^α) Û(t − s) ds` with Û linear
/// between nodes. The moments of the kernel against 1 and s are exact:
/// `∫_0^s σ^{α−1}E_{α,α} = s^α E_{α,α+1}` and `∫_0^s σ^α E_{α,α} = s·A(s) − s^{α+1} E_{α,α+2}`.
/// The error estimate compares step h with 2h.
fn source_hat(
    spec: &ProblemSpec,
    source: &TransformedSource,
    spectral: &Spectral,
    t: f64,
    dt: f64,
    constant: bool,
) -> Result<(Vec<Complex64>, f64)> {
    let a = spec.alpha;
    let n = if constant {
        2
    } else {
        let steps = ((t / dt) * (1.0 - 1e-12)).ceil().max(4.0) as usize;
        steps + steps % 2
    };
    let h = t / n as f64;
    let per_mode: Vec<(Complex64, f64)> = (0..spectral.m)
        .into_par_iter()
        .map(|j| -> Result<(Complex64, f64)> {
            let k = spectral.wavenumber(j);
            let sigma = spec.source_symbol(k);
            if sigma == Complex64::new(0.0, 0.0) {
                return Ok((sigma, 0.0));
            }
            let w = spec.rate(GreenKind::G, k);
            let mut first = Vec::with_capacity(n + 1);
            let mut second = Vec::with_capacity(n + 1);
            for i in 0..=n {
                let s = i as f64 * h;
                if i == 0 {
                    first.push(Complex64::new(0.0, 0.0));
                    second.push(Complex64::new(0.0, 0.0));
                    continue;
                }
                let z = -w * s.powf(a);
                let m0 = mittag_leffler(a, a + 1.0, z)? * s.powf(a);
                let b = mittag_leffler(a, a + 2.0, z)? * s.powf(a + 1.0);
                first.push(m0);
                second.push(m0 * s - b);
            }
            let phi = |i: usize| source.at(j, i as f64 * h);
            let fine = hat_rule(&first, &second, n, h, 1, &phi);
            let coarse = hat_rule(&first, &second, n, h, 2, &phi);
            Ok((-sigma * fine, (sigma * (fine - coarse)).norm() / 3.0))
        })
        .collect::<Result<_>>()?;
    let norm = per_mode.iter().map(|p| p.0.norm_sqr()).sum::<f64>().sqrt();
    let err = per_mode.iter().map(|p| p.1 * p.1).sum::<f64>().sqrt();
    let rel = if norm > 0.0 { err / norm } else { 0.0 };
    Ok((per_mode.into_iter().map(|p| p.0).collect(), rel))
}

/// Product rule on every `stride`-th node. `first[i]`, `second[i]` are the
/// cumulative moments at s = i·h.
fn hat_rule(
    first: &[Complex64],
    second: &[Complex64],
    n: usize,
    h: f64,
    stride: usize,
    phi: &dyn Fn(usize) -> Complex64,
) -> Complex64 {
    let step = h * stride as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut i = 0;
    while i < n {
        // τ-interval [τ_i, τ_{i+stride}] is s ∈ [u, v]
        let (iu, iv) = (n - i - stride, n - i);
        let u = iu as f64 * h;
        let v = iv as f64 * h;
        let m0 = first[iv] - first[iu];
        let m1 = second[iv] - second[iu];
        acc += phi(i) * (m1 - m0 * u) / step + phi(i + stride) * (m0 * v - m1) / step;
        i += stride;
    }
    acc
}

#[cfg(test)]
mod tests;
