//! Special functions: complex gamma, two-parameter Mittag-Leffler, Fox H and
//! real zeta.

pub mod gamma;
pub mod hfunction;
pub mod mittag_leffler;
pub mod zeta;

use num_complex::Complex64;

pub type ComplexValue = Complex64;

pub use gamma::{gamma_complex, gamma_real, ln_gamma_complex, rgamma, rgamma_complex};
pub use hfunction::{h_function, HFunctionParams};
pub use mittag_leffler::{mittag_leffler, mittag_leffler_traced, MlRegion};
pub use zeta::zeta;
