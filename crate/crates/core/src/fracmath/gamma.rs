//! Gamma function over the complex plane.
//!
//! Lanczos approximation (g = 7, nine coefficients) for `Re z >= 1/2`, reflection
//! formula elsewhere. The logarithmic form is used internally so that products of
//! many gamma factors along a Mellin-Barnes contour neither overflow nor underflow.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln(sqrt(2 pi))
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// True when `z` is exactly a pole of the gamma function.
fn is_pole(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// sin(pi x) with argument reduction so that integers give exact zeros.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let r = x - 2.0 * (0.5 * x).round();
    if r == r.round() {
        return 0.0;
    }
    (PI * r).sin()
}

fn lanczos_ln(z: Complex64) -> Complex64 {
    let x = z - 1.0;
    let mut a = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += *c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (x + 0.5) * t.ln() - t + a.ln() + LN_SQRT_2PI
}

fn lanczos_ln_real(x: f64) -> f64 {
    let x = x - 1.0;
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    (x + 0.5) * t.ln() - t + a.ln() + LN_SQRT_2PI
}

/// ln sin(pi z) for complex z, stable for large |Im z|. The imaginary part is only
/// meaningful modulo 2 pi.
fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im.abs() < 10.0 {
        let s = Complex64::new(sin_pi(z.re) * (PI * z.im).cosh(), cos_pi(z.re) * (PI * z.im).sinh());
        return s.ln();
    }
    // sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z}) for Im z > 0
    if z.im > 0.0 {
        let i = Complex64::i();
        let e = (2.0 * i * PI * z).exp();
        Complex64::new(0.5f64.ln(), PI / 2.0) - i * PI * z + (Complex64::new(1.0, 0.0) - e).ln()
    } else {
        ln_sin_pi(z.conj()).conj()
    }
}

pub(crate) fn cos_pi(x: f64) -> f64 {
    let r = x - 2.0 * (0.5 * x).round();
    if (r.abs() - 0.5).abs() == 0.0 {
        return 0.0;
    }
    (PI * r).cos()
}

/// Principal-branch-free logarithm of the gamma function: `exp` of the result equals
/// Γ(z). The real part is +inf at poles.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    if is_pole(z) {
        return Complex64::new(f64::INFINITY, 0.0);
    }
    if z.re >= 0.5 {
        lanczos_ln(z)
    } else {
        Complex64::new(PI.ln(), 0.0) - ln_sin_pi(z) - lanczos_ln(Complex64::new(1.0, 0.0) - z)
    }
}

/// Γ(z) for complex z; an error at the non-positive integers.
pub fn gamma_complex(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::InvalidParameter(format!("gamma of non-finite argument {z}")));
    }
    if is_pole(z) {
        return Err(Error::Pole(z.re));
    }
    if z.im == 0.0 {
        return Ok(Complex64::new(gamma_real(z.re), 0.0));
    }
    if z.re >= 0.5 {
        Ok(lanczos_ln(z).exp())
    } else {
        let one = Complex64::new(1.0, 0.0);
        let s = Complex64::new(sin_pi(z.re) * (PI * z.im).cosh(), cos_pi(z.re) * (PI * z.im).sinh());
        Ok(PI / (s * lanczos_ln(one - z).exp()))
    }
}

/// Γ(x) for real x; infinite at the poles.
pub fn gamma_real(x: f64) -> f64 {
    if x <= 0.0 && x == x.round() {
        return f64::INFINITY;
    }
    if x >= 0.5 {
        if x == x.round() && x <= 23.0 {
            // exact factorials
            return (1..x as u64).map(|k| k as f64).product();
        }
        lanczos_ln_real(x).exp()
    } else {
        PI / (sin_pi(x) * lanczos_ln_real(1.0 - x).exp())
    }
}

/// 1/Γ(x) for real x, zero at the poles.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.round() {
        return 0.0;
    }
    if x >= 0.5 {
        if x == x.round() && x <= 23.0 {
            return 1.0 / gamma_real(x);
        }
        (-lanczos_ln_real(x)).exp()
    } else {
        sin_pi(x) * lanczos_ln_real(1.0 - x).exp() / PI
    }
}

/// 1/Γ(z) for complex z, zero at the poles.
pub fn rgamma_complex(z: Complex64) -> Complex64 {
    if is_pole(z) {
        return Complex64::new(0.0, 0.0);
    }
    if z.im == 0.0 {
        return Complex64::new(rgamma(z.re), 0.0);
    }
    (-ln_gamma_complex(z)).exp()
}
