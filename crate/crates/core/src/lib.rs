//! Spectral pricing and hedging of FX claims in a target zone whose
//! fundamental follows a diffusion reflected at both edges of the band.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod eigen;
pub mod error;
pub mod hedging;
pub mod mc;
pub mod pricing;
pub mod quadrature;
pub mod robin;
pub mod tridiag;
pub mod zone_model;

pub use eigen::{EigenSystem, SystemKind};
pub use error::{Error, Result};
pub use pricing::{Claim, CoefficientSet, PriceResult, Pricer};
pub use zone_model::{Band, FxBand, ModelConfig, ModelKind, ScalarFn, ZoneModel};
