use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncation, node densities and tolerances shared by the Fourier-inversion
/// quadrature, the Mellin-Barnes contour and the real-space operator quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Hard cap on the wavenumber reached by Fourier inversion.
    pub k_max: f64,
    /// Gauss nodes per unit length in panel quadratures.
    pub nodes_per_unit: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Largest |Im ξ| the Mellin-Barnes contour may reach.
    pub mb_contour_height: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            k_max: 1e6,
            nodes_per_unit: 16,
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            mb_contour_height: 2000.0,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.k_max > 0.0
            && self.nodes_per_unit > 0
            && self.abs_tol > 0.0
            && self.rel_tol > 0.0
            && self.mb_contour_height > 0.0
            && self.k_max.is_finite()
            && self.mb_contour_height.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "quadrature settings must be positive and finite: {self:?}"
            )))
        }
    }
}
