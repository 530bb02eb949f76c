//! Fractional Sobolev geometry on diffeomorphism groups of the circle and
//! the line: spectral norms, flows, explicit short paths, geodesic
//! equations and Bessel-potential kernels.

pub mod error;
pub mod flow;
pub mod geodesic;
pub mod interp;
pub mod kernels;
pub mod norms;
pub mod quad;
pub mod shortpath;
pub mod spectral;

pub use error::{Error, Result};
pub use flow::{FlowResult, VelocityPath};
pub use geodesic::{GeodesicState, NamedEquation, SolverConfig};
pub use kernels::RadialKernel;
pub use norms::{Diffeo1D, Domain, MetricSpec, Variant};
pub use spectral::{Field, Grid1D, MultiplierOp, SpectralField};
