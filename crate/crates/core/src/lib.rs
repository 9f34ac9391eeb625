//! Continuous Tucker and tensor-train approximation of multivariate
//! functions sampled on product quadrature grids.
//!
//! The numerical layers (tensors, SVD, Tucker, TT) are generic over
//! [`Scalar`]; the aliases below fix the scalar to `f64`.
//!
//! ```
//! use lowrank::quadrature::sample;
//! use lowrank::tt::{tt_error, tt_svd_with_tolerance};
//! use lowrank::{DomainSpec, FunctionSpec, GridSpec};
//!
//! let spec = FunctionSpec::new("weighted_coupled", vec![1; 4])?;
//! let grid = GridSpec::trapezoid(9)?;
//! let t = sample::<f64>(&spec, &DomainSpec::new(vec![1; 4])?, &grid)?.tensor;
//!
//! let d = tt_svd_with_tolerance(&t, 1e-3)?;
//! assert!(tt_error(&t, &d)? <= 1e-3 * t.frobenius_norm());
//! # Ok::<(), lowrank::Error>(())
//! ```

pub mod cost;
pub mod error;
pub mod matrix;
pub mod quadrature;
pub mod scalar;
pub mod schedule;
pub mod svd;
pub mod tensor;
pub mod testbed;
pub mod tt;
pub mod tucker;

pub use cost::Cost;
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use quadrature::{DomainSpec, GridSpec, QuadratureRule, SampledFunction};
pub use scalar::Scalar;
pub use schedule::{RankSchedule, Regime, SchedulerParams};
pub use svd::{DecayFit, GramSpectrum, SingularSpectrum, TruncatedSvd, TruncationRule};
pub use tensor::{DenseTensor, Shape, UnfoldingSpec, DEFAULT_ELEMENT_CAP};
pub use testbed::{FunctionSpec, Smoothness};
pub use tt::{TtDecomposition, TtStep};
pub use tucker::TuckerDecomposition;

pub type Tensor = DenseTensor<f64>;
pub type Tensor32 = DenseTensor<f32>;
pub type Mat = Matrix<f64>;
pub type Mat32 = Matrix<f32>;
pub type Spectrum = SingularSpectrum<f64>;
pub type Tucker = TuckerDecomposition<f64>;
pub type Tucker32 = TuckerDecomposition<f32>;
pub type TensorTrain = TtDecomposition<f64>;
pub type TensorTrain32 = TtDecomposition<f32>;
