//! Distribution of the endpoint of a planar random walk with unit steps
//! whose directions are uniform on a symmetric arc.

pub mod error;
pub mod exact_two;
pub mod genchi2;
pub mod large_n;
pub mod mc;
pub mod quadrature;
pub mod recursion;
pub mod support;
pub mod walk;

pub use error::{Error, Result};
pub use exact_two::ExactTwoStep;
pub use support::{min_radius, uniqueness_threshold, BoundarySample, SupportBoundary};
pub use walk::{clt_moments, MomentSet, PolarPoint, WalkConfig};
pub use recursion::{GridSpec, JointSource, PolarGridDistribution};
pub use genchi2::GenChi2Params;
pub use large_n::LargeNModel;
pub use mc::{EmpiricalDistribution, SampleBatch, TabulatedCdf};
