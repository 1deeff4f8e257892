pub mod abel;
pub mod direct;
pub mod error;
pub mod hodograph;
pub mod inversion;
pub mod kernels;
pub mod quadrature;
pub mod reference;
pub mod sampled;
pub mod scaling;
pub mod special;
pub mod wave_reference;

pub use error::{Result, RunupError};
pub use sampled::{Interpolation, SampledFunction};
