//! Green kernels of the unified space-time fractional equation
//! `D_t^α N = λ D_x^{β,θ} N + μ S U` with Riemann-Liouville time derivative and
//! Riesz-Feller space derivatives. `S` is either `D_x^{γ,φ}` or the identity.

mod quadrature;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use crate::config::QuadratureConfig;
use crate::error::{Error, Result, Violation};
use crate::fracmath::gamma::rgamma;
use crate::fracmath::hfunction::{h_function, HFunctionParams};
use crate::fracmath::mittag_leffler;
use crate::operators::{riesz_feller_symbol, SymbolParams};
use crate::quad::adaptive;

pub use quadrature::{green_point, is_fourier_only};

/// Which time-order range a spec belongs to. The wave-like range carries the
/// second initial condition `g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// 0 < α ≤ 1
    Diffusion,
    /// 1 < α ≤ 2
    DiffusionWave,
}

impl Regime {
    pub fn of(alpha: f64) -> Self {
        if alpha <= 1.0 {
            Regime::Diffusion
        } else {
            Regime::DiffusionWave
        }
    }
}

/// Operator applied to the source term.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceMode {
    RieszFeller,
    Identity,
}

/// All equation parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub theta: f64,
    pub phi: f64,
    pub lambda: Complex64,
    pub mu: Complex64,
    pub source_mode: SourceMode,
    pub regime: Regime,
}

impl ProblemSpec {
    /// Spec with λ = 1, no source (μ = 0, γ = 1, φ = 0) and the regime implied by α.
    pub fn new(alpha: f64, beta: f64, theta: f64) -> Self {
        Self {
            alpha,
            beta,
            gamma: 1.0,
            theta,
            phi: 0.0,
            lambda: Complex64::new(1.0, 0.0),
            mu: Complex64::new(0.0, 0.0),
            source_mode: SourceMode::RieszFeller,
            regime: Regime::of(alpha),
        }
    }

    pub fn with_lambda(mut self, lambda: Complex64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_source(mut self, gamma: f64, phi: f64, mu: Complex64, mode: SourceMode) -> Self {
        self.gamma = gamma;
        self.phi = phi;
        self.mu = mu;
        self.source_mode = mode;
        self
    }

    /// Every violated constraint, in a fixed order.
    pub fn violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if !(self.alpha > 0.0 && self.alpha <= 2.0) {
            out.push(Violation {
                parameter: "alpha",
                value: self.alpha,
                constraint: "0 < alpha <= 2".into(),
            });
        }
        out.extend(
            SymbolParams {
                order: self.beta,
                skew: self.theta,
            }
            .violations("beta", "theta"),
        );
        out.extend(
            SymbolParams {
                order: self.gamma,
                skew: self.phi,
            }
            .violations("gamma", "phi"),
        );
        for (name, v) in [("lambda", self.lambda), ("mu", self.mu)] {
            if !v.re.is_finite() || !v.im.is_finite() {
                out.push(Violation {
                    parameter: name,
                    value: v.norm(),
                    constraint: format!("{name} finite"),
                });
            }
        }
        out
    }

    /// Checks the parameter constraints and that the recorded regime matches α.
    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if !v.is_empty() {
            return Err(Error::Constraint(v));
        }
        if Regime::of(self.alpha) != self.regime {
            return Err(Error::Regime(match self.regime {
                Regime::Diffusion => format!("alpha = {} is outside 0 < alpha <= 1", self.alpha),
                Regime::DiffusionWave => format!("alpha = {} is outside 1 < alpha <= 2", self.alpha),
            }));
        }
        Ok(())
    }

    pub fn beta_symbol(&self) -> SymbolParams {
        SymbolParams {
            order: self.beta,
            skew: self.theta,
        }
    }

    pub fn gamma_symbol(&self) -> SymbolParams {
        SymbolParams {
            order: self.gamma,
            skew: self.phi,
        }
    }

    /// Fourier multiplier of the source operator: Ψ_γ^φ(k) or 1.
    pub fn source_multiplier(&self, k: f64) -> Complex64 {
        match self.source_mode {
            SourceMode::RieszFeller => riesz_feller_symbol(&self.gamma_symbol(), k),
            SourceMode::Identity => Complex64::new(1.0, 0.0),
        }
    }

    /// σ(k) such that the source contributes `−σ(k)·Û` to the transformed
    /// equation: μΨ_γ^φ(k) in Riesz-Feller mode, −μ in identity mode.
    pub fn source_symbol(&self, k: f64) -> Complex64 {
        match self.source_mode {
            SourceMode::RieszFeller => self.mu * riesz_feller_symbol(&self.gamma_symbol(), k),
            SourceMode::Identity => -self.mu,
        }
    }

    /// Decay rate w(k) entering `E(−w t^α)` for the given kernel.
    pub fn rate(&self, kind: GreenKind, k: f64) -> Complex64 {
        let w = self.lambda * riesz_feller_symbol(&self.beta_symbol(), k);
        if kind.coupled() {
            w + self.source_symbol(k)
        } else {
            w
        }
    }

    pub fn lambda_real_positive(&self) -> bool {
        self.lambda.im == 0.0 && self.lambda.re > 0.0
    }
}

/// The five canonical kernels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GreenKind {
    G,
    G1,
    G2,
    G3,
    G4,
}

impl GreenKind {
    /// Kernels multiplying g, only present for 1 < α ≤ 2.
    pub fn needs_second_condition(self) -> bool {
        matches!(self, GreenKind::G2 | GreenKind::G4)
    }

    /// Kernels of the self-coupled problem (U = N).
    pub fn coupled(self) -> bool {
        matches!(self, GreenKind::G3 | GreenKind::G4)
    }

    /// Second Mittag-Leffler parameter and the power of t in front.
    fn ml_beta_and_power(self, alpha: f64) -> (f64, Option<f64>) {
        match self {
            GreenKind::G | GreenKind::G3 => (alpha, Some(alpha - 1.0)),
            GreenKind::G1 => (alpha, None),
            GreenKind::G2 | GreenKind::G4 => (alpha - 1.0, Some(alpha - 2.0)),
        }
    }

    fn check_regime(self, spec: &ProblemSpec) -> Result<()> {
        if self.needs_second_condition() && spec.alpha <= 1.0 {
            return Err(Error::Regime(format!(
                "{self} needs 1 < alpha <= 2 (alpha = {})",
                spec.alpha
            )));
        }
        Ok(())
    }
}

impl fmt::Display for GreenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            GreenKind::G => "G",
            GreenKind::G1 => "G1",
            GreenKind::G2 => "G2",
            GreenKind::G3 => "G3",
            GreenKind::G4 => "G4",
        };
        f.write_str(s)
    }
}

impl FromStr for GreenKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "G" => Ok(GreenKind::G),
            "G1" => Ok(GreenKind::G1),
            "G2" => Ok(GreenKind::G2),
            "G3" => Ok(GreenKind::G3),
            "G4" => Ok(GreenKind::G4),
            _ => Err(Error::Parse(format!(
                "unknown kernel '{s}' (expected G, G1, G2, G3 or G4)"
            ))),
        }
    }
}

pub(crate) fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("time t = {t} must be positive and finite")))
    }
}

/// Fourier transform of a kernel at wavenumber k and time t.
pub fn green_hat(kind: GreenKind, k: f64, t: f64, spec: &ProblemSpec) -> Result<Complex64> {
    spec.validate()?;
    kind.check_regime(spec)?;
    check_time(t)?;
    green_hat_unchecked(kind, k, t, spec)
}

pub(crate) fn green_hat_unchecked(kind: GreenKind, k: f64, t: f64, spec: &ProblemSpec) -> Result<Complex64> {
    let a = spec.alpha;
    let (b, power) = kind.ml_beta_and_power(a);
    let ta = t.powf(a);
    let e = mittag_leffler(a, b, -spec.rate(kind, k) * ta)?;
    Ok(match power {
        Some(p) => e * t.powf(p),
        None => e * spec.source_multiplier(k),
    })
}

/// Total mass ∫ kernel dx, the k = 0 value of [`green_hat`].
pub fn green_mass(kind: GreenKind, t: f64, spec: &ProblemSpec) -> Result<Complex64> {
    spec.validate()?;
    check_time(t)?;
    let a = spec.alpha;
    let (b, power) = kind.ml_beta_and_power(a);
    // Ψ(0) = 0, but the identity source mode shifts the coupled rate by −μ
    let rate = spec.rate(kind, 0.0);
    let e = if rate == Complex64::new(0.0, 0.0) {
        Complex64::new(rgamma(b), 0.0)
    } else {
        mittag_leffler(a, b, -rate * t.powf(a))?
    };
    Ok(match power {
        Some(p) => e * t.powf(p),
        None => e * spec.source_multiplier(0.0),
    })
}

fn closed_form_params(kind: GreenKind, x: f64, t: f64, spec: &ProblemSpec) -> Result<(HFunctionParams, f64, f64)> {
    spec.validate()?;
    check_time(t)?;
    if !matches!(kind, GreenKind::G | GreenKind::G2) {
        return Err(Error::InvalidParameter(format!(
            "no closed form for {kind}; use green_point"
        )));
    }
    kind.check_regime(spec)?;
    if !spec.lambda_real_positive() {
        return Err(Error::InvalidParameter(format!(
            "closed form needs real positive lambda (got {})",
            spec.lambda
        )));
    }
    if x == 0.0 || !x.is_finite() {
        return Err(Error::Domain(format!("closed form is singular at x = {x}")));
    }
    let a = spec.alpha;
    let beta = spec.beta;
    // mirror symmetry: G(−x; θ) = G(x; −θ)
    let theta = if x > 0.0 { spec.theta } else { -spec.theta };
    let rho = HFunctionParams::rho(beta, theta)?;
    let (shift, power) = match kind {
        GreenKind::G => (a, a - 1.0),
        _ => (a - 1.0, a - 2.0),
    };
    let params = HFunctionParams::green_kernel(shift, a, beta, rho)?;
    let z = x.abs() / (spec.lambda.re * t.powf(a)).powf(1.0 / beta);
    let scale = t.powf(power) / (beta * x.abs());
    Ok((params, z, scale))
}

/// G or G2 through the H²¹₃₃ closed form; needs real λ > 0 and x ≠ 0.
pub fn green_point_closed(kind: GreenKind, x: f64, t: f64, spec: &ProblemSpec, cfg: &QuadratureConfig) -> Result<f64> {
    let (params, z, scale) = closed_form_params(kind, x, t, spec)?;
    Ok(scale * h_function(&params, z, cfg)?)
}

/// ∫ G dx (or G2) by integrating the closed form over log |x| on both half-lines.
///
/// With u = ln z and z the similarity variable, `∫ G dx = t^p/β ∫ [H_θ + H_{−θ}](e^u) du`.
/// The ends are closed with the power laws H ~ z^{min(1,β)} near 0 and H ~ z^{−β} at
/// infinity.
pub fn green_mass_numeric(kind: GreenKind, t: f64, spec: &ProblemSpec, cfg: &QuadratureConfig) -> Result<f64> {
    let (right, _, _) = closed_form_params(kind, 1.0, t, spec)?;
    let (left, _, _) = closed_form_params(kind, -1.0, t, spec)?;
    let power = if kind == GreenKind::G {
        spec.alpha - 1.0
    } else {
        spec.alpha - 2.0
    };
    let (u_lo, u_hi) = (-16.0, 10.0);
    let mut failure = None;
    let mut integrand = |u: f64| -> Complex64 {
        let z = u.exp();
        let mut s = 0.0;
        for p in [&right, &left] {
            match h_function(p, z, cfg) {
                Ok(v) => s += v,
                Err(e) => {
                    failure.get_or_insert(e);
                }
            }
        }
        Complex64::new(s, 0.0)
    };
    let body = adaptive(&mut integrand, u_lo, u_hi, 1e-9, 1e-9, 400);
    let lo_rate = spec.beta.min(1.0);
    let tail_lo = integrand(u_lo).re / lo_rate;
    let tail_hi = integrand(u_hi).re / spec.beta;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(t.powf(power) / spec.beta * (body.value.re + tail_lo + tail_hi))
}

#[cfg(test)]
mod tests;
