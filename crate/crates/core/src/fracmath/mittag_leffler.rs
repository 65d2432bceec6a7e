//! Two-parameter Mittag-Leffler function E_{α,β}(z) = Σ zⁿ / Γ(αn + β).
//!
//! Three evaluation regions:
//!
//! * small |z|: the power series, with a cancellation estimate;
//! * large |z| away from Stokes lines: the asymptotic expansion
//!   `(1/α) Σ ζ^{1-β} e^ζ − Σ z^{-n}/Γ(β − αn)`, accepted only when every
//!   recessive exponential it drops is below the target accuracy;
//! * everything else: inversion of the Laplace transform `s^{α-β}/(s^α − z)`
//!   along an optimally placed parabolic contour, with the residues of the
//!   poles left of the contour added back.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::gamma::rgamma;
use crate::error::{Error, Result};

const TAYLOR_MAX_TERMS: usize = 500;
const ASYMPTOTIC_RADIUS: f64 = 15.0;
/// Relative accuracy the region selection aims for.
const TARGET: f64 = 1e-14;
/// Largest acceptable contour-method accuracy after relaxation.
const ACCEPTABLE: f64 = 1e-10;
const LOG_EPS_MACHINE: f64 = -36.043_653_389_117_154;

/// Evaluation route chosen for a given argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MlRegion {
    Taylor,
    Asymptotic,
    Contour,
}

/// E_{α,β}(z) for α > 0, real β and complex z.
pub fn mittag_leffler(alpha: f64, beta: f64, z: Complex64) -> Result<Complex64> {
    mittag_leffler_traced(alpha, beta, z).map(|(v, _)| v)
}

/// As [`mittag_leffler`], also reporting which region produced the value.
pub fn mittag_leffler_traced(alpha: f64, beta: f64, z: Complex64) -> Result<(Complex64, MlRegion)> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Mittag-Leffler order alpha = {alpha} must be positive"
        )));
    }
    if !beta.is_finite() || !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "non-finite Mittag-Leffler input beta={beta}, z={z}"
        )));
    }
    // real coefficients: E(z̄) = conj E(z), kept exact by evaluating in Im z ≥ 0
    if z.im < 0.0 {
        return mittag_leffler_traced(alpha, beta, z.conj()).map(|(v, region)| (v.conj(), region));
    }
    let r = z.norm();
    if r == 0.0 {
        return Ok((Complex64::new(rgamma(beta), 0.0), MlRegion::Taylor));
    }
    if r <= taylor_radius(alpha) {
        if let Some(v) = taylor(alpha, beta, z) {
            return Ok((v, MlRegion::Taylor));
        }
    }
    if r >= ASYMPTOTIC_RADIUS {
        if let Some(v) = asymptotic(alpha, beta, z) {
            return Ok((v, MlRegion::Asymptotic));
        }
    }
    let v = contour(alpha, beta, z)?;
    let v = if z.im == 0.0 { Complex64::new(v.re, 0.0) } else { v };
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::NonFinite("Mittag-Leffler contour"));
    }
    Ok((v, MlRegion::Contour))
}

/// Radius inside which the power series keeps its cancellation below ~1e4.
fn taylor_radius(alpha: f64) -> f64 {
    if alpha < 0.15 {
        return 0.9;
    }
    (9.2f64).powf(alpha).min(5.0)
}

fn taylor(alpha: f64, beta: f64, z: Complex64) -> Option<Complex64> {
    let mut sum = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    let mut zn = Complex64::new(1.0, 0.0);
    let mut biggest: f64 = 0.0;
    let mut small_run = 0;
    for n in 0..TAYLOR_MAX_TERMS {
        let term = zn * rgamma(alpha * n as f64 + beta);
        biggest = biggest.max(term.norm());
        // Kahan-compensated accumulation
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
        if term.norm() <= 1e-17 * sum.norm() && n > 2 {
            small_run += 1;
            if small_run >= 3 {
                // the gamma reciprocals carry ~1e-15 relative error each
                let rounding = biggest * 4e-15;
                if rounding > 1e-12 * sum.norm() {
                    return None;
                }
                return Some(sum);
            }
        } else {
            small_run = 0;
        }
        zn *= z;
    }
    None
}

fn asymptotic(alpha: f64, beta: f64, z: Complex64) -> Option<Complex64> {
    let r = z.norm();
    let arg = z.arg();
    let root = r.powf(1.0 / alpha);

    // algebraic part, truncated once the terms grow. 1/Γ(β − αn) nearly
    // vanishes when β − αn sits next to a pole, so growth is judged against the
    // larger of the last two terms.
    let zinv = 1.0 / z;
    let mut zp = zinv;
    let mut alg = Complex64::new(0.0, 0.0);
    let (mut last, mut before) = (f64::INFINITY, f64::INFINITY);
    for n in 1..200 {
        let term = zp * rgamma(beta - alpha * n as f64);
        let m = term.norm();
        if m > last.max(before) && n > 2 {
            break;
        }
        alg -= term;
        if m > 0.0 {
            before = last;
            last = m;
        }
        if m > 0.0 && m < 1e-18 * alg.norm() {
            break;
        }
        zp *= zinv;
    }
    let smallest = if last.is_finite() {
        last.max(if before.is_finite() { before } else { 0.0 })
    } else {
        0.0
    };

    let mut exp_part = Complex64::new(0.0, 0.0);
    let mut recessive: f64 = 0.0;
    let mmax = (alpha / 2.0 + 1.0).ceil() as i64 + 1;
    for m in -mmax..=mmax {
        let phi = arg + 2.0 * PI * m as f64;
        let psi = phi / alpha;
        if psi.abs() > 1.5 * PI {
            continue;
        }
        let zeta = Complex64::from_polar(root, psi);
        let scale = root.powf(1.0 - beta) / alpha;
        if psi.abs() < 0.5 * PI && phi.abs() <= alpha * PI {
            exp_part += zeta.powf(1.0 - beta) * zeta.exp() / alpha;
        } else {
            recessive = recessive.max(scale * (root * psi.cos()).exp());
        }
    }
    let total = exp_part + alg;
    let mag = total.norm();
    if mag == 0.0 || !mag.is_finite() {
        return None;
    }
    if recessive > TARGET * mag || smallest > TARGET * mag {
        return None;
    }
    Some(total)
}

/// Optimal parameters (mu, h, N) of the parabolic contour for a bounded region
/// between two singularities.
fn optimal_param_bounded(phi_j: f64, phi_j1: f64, pj: f64, qj: f64, mut log_epsilon: f64) -> (f64, f64, f64) {
    let fac = 1.01;
    let f_max = (log_epsilon - LOG_EPS_MACHINE).exp();
    let sq_phi_j = phi_j.sqrt();
    let threshold = 2.0 * (log_epsilon - LOG_EPS_MACHINE).sqrt();
    let sq_phi_j1 = phi_j1.sqrt().min(threshold - sq_phi_j);
    let small = 1e-14;

    let mut f_bar = 1.0;
    let (sq_lo, sq_hi);
    if pj < small && qj < small {
        sq_lo = sq_phi_j;
        sq_hi = sq_phi_j1;
    } else if pj < small {
        sq_lo = sq_phi_j;
        let f_min = if sq_phi_j > 0.0 {
            fac * (sq_phi_j / (sq_phi_j1 - sq_phi_j)).powf(qj)
        } else {
            fac
        };
        if f_min >= f_max {
            return (0.0, 0.0, f64::INFINITY);
        }
        f_bar = f_min + f_min / f_max * (f_max - f_min);
        let fq = f_bar.powf(-1.0 / qj);
        sq_hi = (2.0 * sq_phi_j1 - fq * sq_phi_j) / (2.0 + fq);
    } else if qj < small {
        sq_hi = sq_phi_j1;
        let f_min = fac * (sq_phi_j1 / (sq_phi_j1 - sq_phi_j)).powf(pj);
        if f_min >= f_max {
            return (0.0, 0.0, f64::INFINITY);
        }
        f_bar = f_min + f_min / f_max * (f_max - f_min);
        let fp = f_bar.powf(-1.0 / pj);
        sq_lo = (2.0 * sq_phi_j + fp * sq_phi_j1) / (2.0 - fp);
    } else {
        let mut f_min = fac * ((sq_phi_j + sq_phi_j1) / (sq_phi_j1 - sq_phi_j)).powf(pj.max(qj));
        if f_min >= f_max {
            return (0.0, 0.0, f64::INFINITY);
        }
        f_min = f_min.max(1.5);
        f_bar = f_min + f_min / f_max * (f_max - f_min);
        let fp = f_bar.powf(-1.0 / pj);
        let fq = f_bar.powf(-1.0 / qj);
        let w = -phi_j1 / log_epsilon;
        let den = 2.0 + w - (1.0 + w) * fp + fq;
        sq_lo = ((2.0 + w + fq) * sq_phi_j + fp * sq_phi_j1) / den;
        sq_hi = (-(1.0 + w) * fq * sq_phi_j + (2.0 + w - (1.0 + w) * fp) * sq_phi_j1) / den;
    }
    log_epsilon -= f_bar.ln();
    let w = -sq_hi * sq_hi / log_epsilon;
    let mu = (((1.0 + w) * sq_lo + sq_hi) / (2.0 + w)).powi(2);
    let h = -2.0 * PI / log_epsilon * (sq_hi - sq_lo) / ((1.0 + w) * sq_lo + sq_hi);
    let n = ((1.0 - log_epsilon / mu).sqrt() / h).ceil();
    if !(mu > 0.0) || !(h > 0.0) || !n.is_finite() {
        return (0.0, 0.0, f64::INFINITY);
    }
    (mu, h, n)
}

/// Optimal parameters for the unbounded region right of the last singularity.
fn optimal_param_unbounded(phi_j: f64, pj: f64, log_epsilon: f64) -> (f64, f64, f64) {
    let sq_phi_j = phi_j.sqrt();
    let mut phibar = if phi_j > 0.0 { phi_j * 1.01 } else { 0.01 };
    let mut sq_phibar = phibar.sqrt();
    let (f_min, f_max, f_tar) = (1.0f64, 10.0f64, 5.0f64);
    let mut n;
    let mut a;
    let mut sq_mu;
    let mut guard = 0;
    loop {
        let phi_t = phibar;
        let log_eps_phi_t = log_epsilon / phi_t;
        n = (phi_t / PI * (1.0 - 1.5 * log_eps_phi_t + (1.0 - 2.0 * log_eps_phi_t).sqrt())).ceil();
        a = PI * n / phi_t;
        sq_mu = sq_phibar * (4.0 - a).abs() / (7.0 - (1.0 + 12.0 * a).sqrt()).abs();
        let fbar = ((sq_phibar - sq_phi_j) / sq_mu).powf(-pj);
        let stop = pj < 1e-14 || (f_min < fbar && fbar < f_max);
        guard += 1;
        if stop || guard > 100 {
            break;
        }
        sq_phibar = f_tar.powf(-1.0 / pj) * sq_mu + sq_phi_j;
        phibar = sq_phibar * sq_phibar;
    }
    let mut mu = sq_mu * sq_mu;
    let mut h = (-3.0 * a - 2.0 + 2.0 * (1.0 + 12.0 * a).sqrt()) / (4.0 - a) / n;
    let threshold = log_epsilon - LOG_EPS_MACHINE;
    if mu > threshold {
        let q = if pj.abs() < 1e-14 {
            0.0
        } else {
            f_tar.powf(-1.0 / pj) * mu.sqrt()
        };
        let phibar = (q + phi_j.sqrt()).powi(2);
        if phibar < threshold {
            let w = (LOG_EPS_MACHINE / (LOG_EPS_MACHINE - log_epsilon)).sqrt();
            let u = (-phibar / LOG_EPS_MACHINE).sqrt();
            mu = threshold;
            n = (w * log_epsilon / 2.0 / PI / (u * w - 1.0)).ceil();
            h = (LOG_EPS_MACHINE / (LOG_EPS_MACHINE - log_epsilon)).sqrt() / n;
        } else {
            return (0.0, 0.0, f64::INFINITY);
        }
    }
    (mu, h, n)
}

fn contour(alpha: f64, beta: f64, z: Complex64) -> Result<Complex64> {
    let mut log_epsilon = (1e-15f64).ln();
    let theta = z.arg();
    let kmin = (-alpha / 2.0 - theta / (2.0 * PI)).ceil() as i64;
    let kmax = (alpha / 2.0 - theta / (2.0 * PI)).floor() as i64;
    let root = z.norm().powf(1.0 / alpha);
    let mut stars: Vec<(f64, Complex64)> = (kmin..=kmax)
        .map(|k| {
            let s = Complex64::from_polar(root, (theta + 2.0 * PI * k as f64) / alpha);
            ((s.re + s.norm()) / 2.0, s)
        })
        .filter(|(phi, _)| *phi > 1e-15)
        .collect();
    stars.sort_by(|a, b| a.0.total_cmp(&b.0));
    stars.insert(0, (0.0, Complex64::new(0.0, 0.0)));
    let j1 = stars.len();
    let mut p = vec![1.0; j1];
    p[0] = (-2.0 * (alpha - beta + 1.0)).max(0.0);
    let mut q = vec![1.0; j1];
    q[j1 - 1] = f64::INFINITY;
    let mut phi: Vec<f64> = stars.iter().map(|s| s.0).collect();
    phi.push(f64::INFINITY);

    let admissible: Vec<usize> = (0..j1)
        .filter(|&j| phi[j] < (log_epsilon - LOG_EPS_MACHINE) && phi[j] < phi[j + 1])
        .collect();

    let (mu, h, n, region) = loop {
        let mut best = (0.0, 0.0, f64::INFINITY, 0usize);
        for &j in &admissible {
            let (m, hh, nn) = if j < j1 - 1 {
                optimal_param_bounded(phi[j], phi[j + 1], p[j], q[j], log_epsilon)
            } else {
                optimal_param_unbounded(phi[j], p[j], log_epsilon)
            };
            if nn < best.2 {
                best = (m, hh, nn, j);
            }
        }
        if best.2 > 200.0 {
            log_epsilon += 10f64.ln();
            if log_epsilon > ACCEPTABLE.ln() {
                return Err(Error::NonConvergence {
                    what: "Mittag-Leffler contour",
                    estimate: log_epsilon.exp(),
                });
            }
        } else {
            break best;
        }
    };

    let n = n as i64;
    let i = Complex64::i();
    let mut sum = Complex64::new(0.0, 0.0);
    for k in -n..=n {
        let u = h * k as f64;
        let s = mu * (1.0 + i * u).powi(2);
        let ds = 2.0 * mu * (i - u);
        let f = s.powf(alpha - beta) / (s.powf(alpha) - z) * ds;
        sum += s.exp() * f;
    }
    let integral = h * sum / (2.0 * PI * i);
    let mut residues = Complex64::new(0.0, 0.0);
    for (_, s) in &stars[region + 1..] {
        residues += s.powf(1.0 - beta) * s.exp() / alpha;
    }
    Ok(integral + residues)
}
