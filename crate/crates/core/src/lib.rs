//! Rydberg noisy-dressing interactions and the condensate physics they drive.

pub mod bogoliubov;
pub mod error;
pub mod features;
pub mod gpe;
pub mod interp;
pub mod model;
pub mod sampling;
pub mod scalar;
pub mod stability;
pub mod steady;
pub mod units;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision instantiations.
pub type DressingParams = model::DressingParams<f64>;
pub type InteractionProfile = steady::InteractionProfile<f64>;
pub type FeatureSet = features::FeatureSet<f64>;
pub type Grid = gpe::Grid<f64>;
pub type Kernel = gpe::Kernel<f64>;
pub type Field = gpe::Field<f64>;
pub type Gpe = gpe::Gpe<f64>;
pub type BogoliubovSpectrum = bogoliubov::BogoliubovSpectrum<f64>;
pub type RadialKernel = stability::RadialKernel<f64>;

/// Single-precision instantiations.
pub type DressingParams32 = model::DressingParams<f32>;
pub type InteractionProfile32 = steady::InteractionProfile<f32>;
pub type FeatureSet32 = features::FeatureSet<f32>;
pub type Grid32 = gpe::Grid<f32>;
pub type Kernel32 = gpe::Kernel<f32>;
pub type Field32 = gpe::Field<f32>;
pub type Gpe32 = gpe::Gpe<f32>;
pub type BogoliubovSpectrum32 = bogoliubov::BogoliubovSpectrum<f32>;
pub type RadialKernel32 = stability::RadialKernel<f32>;
