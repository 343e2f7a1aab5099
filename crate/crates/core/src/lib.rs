//! Explicit global Darboux coordinates for rotation-invariant Kähler
//! potentials on `C^n`, with numerical verification of the geometry around
//! them: the soliton profile ODE, curvature, geodesics, and the totally
//! geodesic submanifolds of products of cigars.

#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod curvature;
pub mod darboux;
pub mod error;
pub mod fd;
pub mod geodesic;
pub mod plot;
pub mod potential;
pub mod quad;
pub mod sampling;
pub mod soliton;
pub mod special;
pub mod submanifold;
pub mod suite;

pub use darboux::{DarbouxMap, JacobianMatrix, StdSymplectic};
pub use error::{Error, Result};
pub use potential::{
    ComplexVector, HermitianMetric, KahlerPotential, ModelDescriptor, PotentialModel,
    RadialCoordinates, TwoFormMatrix,
};
pub use soliton::{FIntegral, SolitonProfile};
