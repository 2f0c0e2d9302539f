//! Optimal estimation of group elements from covariant probe states.
//!
//! A cost function on a compact group is expanded in irreducible characters,
//! turned into a real symmetric cost matrix over a chosen set of irreps, and
//! minimized over normalized nonnegative coefficient vectors. The optimum is
//! cross-checked by direct integration over the group and, for small qubit
//! counts, by brute-force linear algebra on the full Hilbert space.

pub mod cost;
pub mod dense;
pub mod error;
pub mod estimation;
pub mod group;
pub mod protocols;

pub use cost::CostSpec;
pub use error::{Error, Result};
pub use estimation::{optimize_coefficients, CoefficientVector, CostMatrix, EstimationResult};
pub use group::{ClassPoint, Group, IrrepLabel, IrrepSet};
