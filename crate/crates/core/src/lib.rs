//! Fitting single-peak time series with maximum entropy shapes and three
//! reference families.
//!
//! The crate is organized around the data flow of a fit:
//!
//! * [`model`]: the five families as peak-normalized curves on `[0, 1]`.
//! * [`fit`]: multi-start Nelder-Mead least squares with the amplitude
//!   solved in closed form.
//! * [`bench`]: synthetic cross-comparison of every family against every
//!   other.
//! * [`entropy`]: quadrature audit that the `MaxEnt` and `Beta` shapes are
//!   constrained entropy maximizers.
//! * [`data`] and [`plot`]: loading real series, unit-interval
//!   normalization, fit documents and SVG output.
//!
//! ```
//! use unimodal::{fit, CurveModel, FitConfig, ModelKind, ShapeParams};
//!
//! let truth = CurveModel::new(ShapeParams::maxent(2.0, 5.0)?, 1.0)?;
//! let series = truth.sample_series(101)?;
//! let result = fit(&series, ModelKind::MaxEnt, &FitConfig::default())?;
//! assert!(result.rms < 1e-3);
//! # Ok::<(), unimodal::Error>(())
//! ```

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod data;
pub mod entropy;
pub mod error;
pub mod fit;
pub mod model;
mod nelder_mead;
pub mod plot;
pub mod seed;
pub mod series;

pub use error::{Error, Result};
pub use fit::{fit, rms_loss, FitConfig, FitResult};
pub use model::{mode, numeric_mode, sample_series, shape_value, CurveModel, ModelKind, ShapeParams};
pub use series::SampledSeries;
