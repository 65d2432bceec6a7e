use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::SpaceTimeGrid;
use crate::error::{Error, Result};

/// Spatial profile of initial data or of a source slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceDescriptor {
    Zero,
    /// Unit impulse, realised as 1/dx at the node nearest `center`.
    DiracDelta {
        center: f64,
    },
    /// Normalised Gaussian with standard deviation `width`.
    Gaussian {
        center: f64,
        width: f64,
    },
    /// Indicator of [lo, hi].
    Box {
        lo: f64,
        hi: f64,
    },
    /// Values on a uniform grid, which must coincide with the solve grid.
    Samples {
        x_min: f64,
        x_max: f64,
        values: Vec<Complex64>,
    },
}

impl SourceDescriptor {
    pub fn is_zero(&self) -> bool {
        match self {
            SourceDescriptor::Zero => true,
            SourceDescriptor::Samples { values, .. } => values.iter().all(|v| *v == Complex64::new(0.0, 0.0)),
            _ => false,
        }
    }

    pub fn sample(&self, grid: &SpaceTimeGrid) -> Result<Vec<Complex64>> {
        let n = grid.nx;
        let dx = grid.dx();
        let zero = Complex64::new(0.0, 0.0);
        let real = |f: &dyn Fn(f64) -> f64| (0..n).map(|i| Complex64::new(f(grid.x(i)), 0.0)).collect();
        match self {
            SourceDescriptor::Zero => Ok(vec![zero; n]),
            SourceDescriptor::DiracDelta { center } => {
                let pos = (center - grid.x_min) / dx;
                if !(pos > -0.5 && pos < n as f64 - 0.5) {
                    return Err(Error::Domain(format!(
                        "delta at {center} lies outside [{}, {}]",
                        grid.x_min, grid.x_max
                    )));
                }
                let mut v = vec![zero; n];
                v[pos.round() as usize] = Complex64::new(1.0 / dx, 0.0);
                Ok(v)
            }
            SourceDescriptor::Gaussian { center, width } => {
                if !(*width > 0.0 && width.is_finite() && center.is_finite()) {
                    return Err(Error::InvalidParameter(format!(
                        "gaussian width {width} must be positive"
                    )));
                }
                let norm = 1.0 / (width * (2.0 * PI).sqrt());
                Ok(real(&|x| {
                    let z = (x - center) / width;
                    norm * (-0.5 * z * z).exp()
                }))
            }
            SourceDescriptor::Box { lo, hi } => {
                if !(lo < hi) {
                    return Err(Error::InvalidParameter(format!("box needs lo < hi (got {lo}, {hi})")));
                }
                Ok(real(&|x| if x >= *lo && x <= *hi { 1.0 } else { 0.0 }))
            }
            SourceDescriptor::Samples { x_min, x_max, values } => {
                if values.len() != n {
                    return Err(Error::LengthMismatch {
                        left: values.len(),
                        right: n,
                    });
                }
                let slack = 1e-9 * dx;
                if (x_min - grid.x_min).abs() > slack || (x_max - grid.x_max).abs() > slack {
                    return Err(Error::InvalidParameter(format!(
                        "samples on [{x_min}, {x_max}] do not match the grid [{}, {}]",
                        grid.x_min, grid.x_max
                    )));
                }
                Ok(values.clone())
            }
        }
    }
}

/// Time dependence of a separable source.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Temporal {
    Constant,
    /// e^{rate·τ}
    Exponential {
        rate: f64,
    },
}

impl Temporal {
    pub fn at(self, tau: f64) -> f64 {
        match self {
            Temporal::Constant => 1.0,
            Temporal::Exponential { rate } => (rate * tau).exp(),
        }
    }
}

/// The source U(x, τ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SourceTerm {
    Zero,
    /// profile(x)·temporal(τ)
    Separable {
        profile: SourceDescriptor,
        temporal: Temporal,
    },
    /// Grid slices at τ = j·dt, linearly interpolated in between.
    Sampled {
        dt: f64,
        slices: Vec<Vec<Complex64>>,
    },
    /// U = N: the self-coupled problem, solved with G3 and G4.
    SelfCoupled,
}

impl SourceTerm {
    pub fn is_zero(&self) -> bool {
        match self {
            SourceTerm::Zero => true,
            SourceTerm::Separable { profile, .. } => profile.is_zero(),
            SourceTerm::Sampled { slices, .. } => slices.iter().flatten().all(|v| *v == Complex64::new(0.0, 0.0)),
            SourceTerm::SelfCoupled => false,
        }
    }

    pub fn is_time_constant(&self) -> bool {
        match self {
            SourceTerm::Separable { temporal, .. } => matches!(temporal, Temporal::Constant),
            SourceTerm::Sampled { slices, .. } => slices.len() == 1,
            _ => true,
        }
    }

    pub(crate) fn check(&self, grid: &SpaceTimeGrid) -> Result<()> {
        match self {
            SourceTerm::Separable {
                profile: SourceDescriptor::DiracDelta { .. },
                ..
            } => Err(Error::InvalidParameter(
                "a delta profile is only admitted for initial data, not for the source".into(),
            )),
            SourceTerm::Sampled { dt, slices } => {
                if slices.is_empty() {
                    return Err(Error::InvalidParameter("sampled source has no slices".into()));
                }
                for s in slices {
                    if s.len() != grid.nx {
                        return Err(Error::LengthMismatch {
                            left: s.len(),
                            right: grid.nx,
                        });
                    }
                }
                let last = grid.times.last().copied().unwrap_or(0.0);
                let covered = *dt * (slices.len() - 1) as f64;
                if slices.len() > 1 && !(*dt > 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "source slice spacing {dt} must be positive"
                    )));
                }
                if slices.len() > 1 && covered < last * (1.0 - 1e-12) {
                    return Err(Error::InvalidParameter(format!(
                        "sampled source covers [0, {covered}] but output runs to t = {last}"
                    )));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// A source mapped through a linear transform of its slices, evaluated at any τ.
pub(crate) enum TransformedSource {
    Separable {
        profile: Vec<Complex64>,
        temporal: Temporal,
    },
    Sampled {
        dt: f64,
        slices: Vec<Vec<Complex64>>,
    },
}

impl TransformedSource {
    pub fn new(
        source: &SourceTerm,
        grid: &SpaceTimeGrid,
        map: impl Fn(&[Complex64]) -> Vec<Complex64>,
    ) -> Result<Option<Self>> {
        Ok(match source {
            SourceTerm::Zero | SourceTerm::SelfCoupled => None,
            SourceTerm::Separable { profile, temporal } => Some(TransformedSource::Separable {
                profile: map(&profile.sample(grid)?),
                temporal: *temporal,
            }),
            SourceTerm::Sampled { dt, slices } => Some(TransformedSource::Sampled {
                dt: *dt,
                slices: slices.iter().map(|s| map(s)).collect(),
            }),
        })
    }

    pub fn at(&self, index: usize, tau: f64) -> Complex64 {
        match self {
            TransformedSource::Separable { profile, temporal } => profile[index] * temporal.at(tau),
            TransformedSource::Sampled { dt, slices } => {
                if slices.len() == 1 {
                    return slices[0][index];
                }
                let pos = (tau / dt).max(0.0);
                let j = (pos.floor() as usize).min(slices.len() - 2);
                let frac = (pos - j as f64).min(1.0);
                slices[j][index] * (1.0 - frac) + slices[j + 1][index] * frac
            }
        }
    }
}
