//! Achievable rates of the complex AWGN channel under symmetric output
//! quantization and scaled nearest-neighbor decoding.
//!
//! The analytic side reduces every quantizer to two coefficients `A` and `B`
//! and the nonlinearity parameter `gamma = 1 - A^2/B`, from which the GMI
//! follows at any SNR. The [`montecarlo`] module checks those quantities by
//! direct simulation.

pub mod cli;
pub mod error;
pub mod gmi;
pub mod highres;
pub mod montecarlo;
pub mod numerics;
pub mod quantizer;

pub use error::{Error, Result};
pub use gmi::{gamma, gamma_uniform, gmi_rate, GmiReport};
pub use highres::{gamma_bar, loading_estimate, optimal_loading, LoadingAnalysis};
pub use montecarlo::{estimate_moments, ChannelParams, MomentEstimate};
pub use numerics::Tolerance;
pub use quantizer::{SymmetricQuantizer, UniformSpec};
