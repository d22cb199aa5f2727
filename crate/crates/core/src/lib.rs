//! Spectral identification of networks of identical linear units.
//!
//! Given a single input-driven trajectory measured at a handful of nodes,
//! this crate estimates the eigenvalues of the network Laplacian and turns
//! them into global network statistics: mean and quadratic-mean node degree,
//! bounds on the minimum and maximum degree, and a ratio-based clustering of
//! the measured nodes.
//!
//! The pipeline is organized as
//!
//! 1. [`graph`] — weighted digraphs, random generators, the Laplacian and an
//!    exact dense spectral oracle,
//! 2. [`dynamics`] — assembly of the networked system `K = I⊗A − L⊗BCᵀ` and
//!    exact zero-order-hold simulation,
//! 3. [`dmdc`] — delay-embedded data matrices and dynamic mode decomposition
//!    with control,
//! 4. [`spectral_id`] — mapping the identified spectrum back to Laplacian
//!    eigenvalues and eigenvector component ratios,
//! 5. [`analysis`] — spectral moments, convex-hull area moments, degree
//!    bounds and k-means clustering of ratio vectors,
//! 6. [`pipeline`] — a config-driven end-to-end runner with bundled example
//!    scenarios.

pub mod analysis;
pub mod dmdc;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod linalg;
pub mod pipeline;
pub mod scenario;
pub mod spectral_id;

pub use error::{Error, Result};
