//! Scalar special functions: Gamma, the kernel g_α, Mittag-Leffler and Wright.

mod gamma;
mod mittag_leffler;
mod wright;

pub use gamma::{cos_pi, g_kernel, gamma_fn, ln_gamma, rgamma, sin_pi};
pub use mittag_leffler::{
    mittag_leffler, mittag_leffler_capped, MLParams, DEFAULT_POSITIVE_CAP, SERIES_RADIUS,
};
pub use wright::{
    subordination_density, wright_phi, wright_phi_terms, wright_tail_cutoff, WrightParams,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecFunError {
    #[error("Gamma has a pole at {0}")]
    Pole(f64),
    #[error("invalid {name} = {value}: expected {expected}")]
    InvalidArgument {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("argument z = {z} exceeds the positive cap {cap}")]
    Overflow { z: f64, cap: f64 },
    #[error("unsupported: {0}")]
    Unsupported(&'static str),
}
