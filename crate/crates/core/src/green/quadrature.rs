//! Real-space kernels by Fourier inversion.
//!
//! The inverse transform is folded onto k ≥ 0,
//! `2π G(x) = ∫_0^∞ [e^{−ikx} Ĝ(k) + e^{ikx} Ĝ(−k)] dk`, and split at K1, the
//! wavenumber beyond which the Mittag-Leffler factor is in its algebraic tail
//! (or, at α = 1, exponentially negligible). Below K1: geometric panels towards
//! k = 0 where Ψ is not smooth, then half-period panels, each integrated
//! adaptively. Above K1 and x ≠ 0: half-period panels summed with Wynn's
//! epsilon. Above K1 and x = 0: the substitution k = K1·e^v turns the algebraic
//! decay into exponential decay.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;

use super::{check_time, green_hat_unchecked, GreenKind, ProblemSpec};
use crate::config::QuadratureConfig;
use crate::error::{Error, Result};
use crate::quad::{adaptive, wynn_epsilon};

/// Distance kept from the sector boundary of Mittag-Leffler decay, in radians.
const DECAY_MARGIN: f64 = 1e-6;
/// |w|·t^α beyond which E(−w t^α) is in its algebraic tail.
const ALGEBRAIC_LEVEL: f64 = 25.0;
/// Re(w)·t at which e^{−wt} is negligible.
const EXPONENTIAL_LEVEL: f64 = 40.0;
const MAX_TAIL_PANELS: usize = 4000;

/// Kernel value at (x, t) by numerical Fourier inversion.
pub fn green_point(kind: GreenKind, x: f64, t: f64, spec: &ProblemSpec, cfg: &QuadratureConfig) -> Result<Complex64> {
    spec.validate()?;
    kind.check_regime(spec)?;
    check_time(t)?;
    cfg.validate()?;
    if !x.is_finite() {
        return Err(Error::Domain(format!("x = {x} must be finite")));
    }
    let inv = Inversion::new(kind, t, spec, cfg)?;
    inv.evaluate(x)
}

/// True when the kernel has no real-space representation (its transform does
/// not decay along the real k-axis), so it can only act in Fourier space.
pub fn is_fourier_only(kind: GreenKind, spec: &ProblemSpec, cfg: &QuadratureConfig) -> bool {
    matches!(Inversion::new(kind, 1.0, spec, cfg), Err(Error::FourierOnly(_)))
}

pub(crate) struct Inversion<'a> {
    kind: GreenKind,
    t: f64,
    spec: &'a ProblemSpec,
    cfg: &'a QuadratureConfig,
    /// |w(k)| t^α = 1 here
    scale: f64,
    k1: f64,
    /// algebraic decay exponent of Ĝ beyond k1; infinite at α = 1
    tail_power: f64,
}

impl<'a> Inversion<'a> {
    pub(crate) fn new(kind: GreenKind, t: f64, spec: &'a ProblemSpec, cfg: &'a QuadratureConfig) -> Result<Self> {
        let ta = t.powf(spec.alpha);
        let level = |k: f64| spec.rate(kind, k).norm() * ta;
        let scale = search_upwards(1.0, &level);
        let exponential = spec.alpha == 1.0;
        let k1 = if exponential {
            search_upwards(EXPONENTIAL_LEVEL, &|k: f64| spec.rate(kind, k).re * ta)
        } else {
            search_upwards(ALGEBRAIC_LEVEL, &level)
        };
        let k1 = k1.min(cfg.k_max);
        let inv = Self {
            kind,
            t,
            spec,
            cfg,
            scale,
            k1,
            tail_power: if exponential {
                f64::INFINITY
            } else {
                tail_power(kind, spec)
            },
        };
        inv.check_decay()?;
        Ok(inv)
    }

    /// E_{α,·}(−w t^α) decays along the k-axis only while |arg w| stays inside
    /// (1 − α/2)π; otherwise the kernel exists only as a distribution.
    fn check_decay(&self) -> Result<()> {
        let bound = (1.0 - self.spec.alpha / 2.0) * PI - DECAY_MARGIN;
        for i in 0..=64 {
            let k = self.scale * 10f64.powf(6.0 * i as f64 / 64.0);
            for kk in [k, -k] {
                let w = self.spec.rate(self.kind, kk);
                if w.norm() == 0.0 {
                    continue;
                }
                if w.arg().abs() >= bound {
                    return Err(Error::FourierOnly(format!(
                        "arg of the rate {w} at k = {kk} is outside the decay sector |arg| < {:.6}",
                        bound + DECAY_MARGIN
                    )));
                }
            }
        }
        if self.tail_power <= 0.0 {
            return Err(Error::FourierOnly(format!(
                "{} does not decay in k (tail exponent {})",
                self.kind, self.tail_power
            )));
        }
        Ok(())
    }

    fn hat(&self, k: f64, failure: &RefCell<Option<Error>>) -> Complex64 {
        match green_hat_unchecked(self.kind, k, self.t, self.spec) {
            Ok(v) => v,
            Err(e) => {
                failure.borrow_mut().get_or_insert(e);
                Complex64::new(0.0, 0.0)
            }
        }
    }

    pub(crate) fn evaluate(&self, x: f64) -> Result<Complex64> {
        let failure = RefCell::new(None);
        let folded = |k: f64| -> Complex64 {
            let e = Complex64::from_polar(1.0, -k * x);
            e * self.hat(k, &failure) + e.conj() * self.hat(-k, &failure)
        };
        let abs_tol = self.cfg.abs_tol;
        let rel_tol = self.cfg.rel_tol;
        let half_period = if x != 0.0 { PI / x.abs() } else { f64::INFINITY };

        // [0, k1]
        let k_a = 0.5 * self.scale.min(half_period).min(self.k1);
        let mut edges = vec![0.0];
        for j in (0..40).rev() {
            edges.push(k_a * 0.5f64.powi(j));
        }
        let width = half_period.min(self.scale.max((self.k1 - k_a) / 64.0));
        let mut e = k_a;
        while e < self.k1 {
            e = (e + width).min(self.k1);
            edges.push(e);
        }
        let mut total = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        for w in edges.windows(2) {
            let est = adaptive(folded, w[0], w[1], abs_tol * 1e-2, rel_tol, 200);
            total += est.value;
            err += est.error;
        }

        // (k1, ∞)
        if self.k1 < self.cfg.k_max && self.tail_power.is_finite() {
            let (value, tail_err) = if x != 0.0 {
                self.oscillatory_tail(&folded, half_period, total)?
            } else {
                self.algebraic_tail(&folded)?
            };
            total += value;
            err += tail_err;
        }
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        let value = total / (2.0 * PI);
        let err = err / (2.0 * PI);
        let target = abs_tol.max(rel_tol * value.norm());
        if !(err <= 1e4 * target) {
            return Err(Error::Accuracy {
                what: "Fourier inversion",
                estimate: err,
                tolerance: target,
            });
        }
        if !value.re.is_finite() || !value.im.is_finite() {
            return Err(Error::NonFinite("Fourier inversion"));
        }
        Ok(value)
    }

    fn oscillatory_tail<F: Fn(f64) -> Complex64>(
        &self,
        folded: &F,
        half_period: f64,
        head: Complex64,
    ) -> Result<(Complex64, f64)> {
        let mut sums = Vec::new();
        let mut running = Complex64::new(0.0, 0.0);
        let mut panel_err = 0.0;
        let mut last = None::<Complex64>;
        let mut calm = 0;
        let mut a = self.k1;
        for j in 0..MAX_TAIL_PANELS {
            let b = (a + half_period).min(self.cfg.k_max);
            let est = adaptive(folded, a, b, self.cfg.abs_tol * 1e-3, self.cfg.rel_tol * 1e-1, 100);
            running += est.value;
            panel_err += est.error;
            sums.push(running);
            if b >= self.cfg.k_max {
                break;
            }
            a = b;
            if j >= 6 && j % 2 == 0 {
                let window = &sums[sums.len().saturating_sub(40)..];
                let (limit, _) = wynn_epsilon(window);
                if let Some(prev) = last {
                    let change = (limit - prev).norm();
                    let target = self.cfg.abs_tol.max(self.cfg.rel_tol * (head + limit).norm());
                    if change <= target {
                        calm += 1;
                        if calm >= 2 {
                            return Ok((limit, change + panel_err));
                        }
                    } else {
                        calm = 0;
                    }
                }
                last = Some(limit);
            }
        }
        let (limit, spread) = wynn_epsilon(&sums[sums.len().saturating_sub(40)..]);
        Ok((limit, spread + panel_err))
    }

    fn algebraic_tail<F: Fn(f64) -> Complex64>(&self, folded: &F) -> Result<(Complex64, f64)> {
        if self.tail_power <= 1.0 {
            return Err(Error::Domain(format!(
                "{} is unbounded at x = 0 (transform decays like k^-{})",
                self.kind, self.tail_power
            )));
        }
        let v_max = (self.cfg.k_max / self.k1).ln();
        let k1 = self.k1;
        let est = adaptive(
            |v: f64| {
                let k = k1 * v.exp();
                folded(k) * k
            },
            0.0,
            v_max,
            self.cfg.abs_tol * 1e-2,
            self.cfg.rel_tol,
            400,
        );
        // power-law remainder beyond k_max
        let k = self.cfg.k_max;
        let rest = folded(k) * k / (self.tail_power - 1.0);
        Ok((est.value + rest, est.error))
    }
}

/// Leading algebraic decay exponent of the transform for α ≠ 1. The first
/// asymptotic term of both E_{α,α} and E_{α,α−1} vanishes, leaving w^{−2}.
fn tail_power(kind: GreenKind, spec: &ProblemSpec) -> f64 {
    let mut order = spec.beta;
    if kind.coupled() && spec.mu != Complex64::new(0.0, 0.0) {
        if let super::SourceMode::RieszFeller = spec.source_mode {
            order = order.max(spec.gamma);
        }
    }
    let growth = match (kind, spec.source_mode) {
        (GreenKind::G1, super::SourceMode::RieszFeller) => spec.gamma,
        _ => 0.0,
    };
    2.0 * order - growth
}

/// Smallest k (to ~1e-10 relative) with `f(k) >= level`, for increasing f.
fn search_upwards(level: f64, f: &dyn Fn(f64) -> f64) -> f64 {
    let mut hi = 1.0;
    if f(hi) >= level {
        let mut lo = hi;
        while f(lo) >= level && lo > 1e-300 {
            hi = lo;
            lo *= 0.5;
        }
        return bisect(lo, hi, level, f);
    }
    let mut lo = hi;
    while f(hi) < level {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return hi;
        }
    }
    bisect(lo, hi, level, f)
}

fn bisect(mut lo: f64, mut hi: f64, level: f64, f: &dyn Fn(f64) -> f64) -> f64 {
    for _ in 0..200 {
        if hi - lo <= 1e-10 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if f(mid) >= level {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
