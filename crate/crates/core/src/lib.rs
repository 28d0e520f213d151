//! Grover walks on finite graphs with semi-infinite tails.
//!
//! A finite connected graph receives a constant-frequency inflow `z = e^{iθ}`
//! through tails attached to its boundary vertices. In the long-time limit the
//! walk settles onto a stationary state on the internal arcs. This crate
//! computes that state, the boundary scattering matrix and the stored energy
//! ("comfortability") for any frequency on the unit circle, including the
//! frequencies where the generalized Laplacian is singular.
//!
//! Two independent routes are provided throughout:
//!
//! * [`walk`] iterates the truncated walk operator until it converges. It is
//!   slow but makes no use of the potential-theoretic machinery.
//! * [`stationary`] solves a Poisson equation for the generalized Laplacian
//!   [`laplacian::GeneralizedLaplacian`] and takes a twisted gradient.
//!
//! [`complete`] holds closed forms for the complete graph.

pub mod complete;
pub mod error;
pub mod generators;
pub mod graph;
pub mod laplacian;
pub mod observables;
pub mod state;
pub mod stationary;
pub mod verify;
pub mod walk;

pub use error::{Error, Result};
pub use graph::{Bipartition, Graph, GraphSpec, VertexMatrices};
pub use laplacian::{GeneralizedLaplacian, SingularFrequency, SingularSet};
pub use observables::{ComfortabilityResult, ScatteringMatrix};
pub use state::{ArcState, Inflow, VertexPotential};
pub use stationary::StationarySolver;

pub use num_complex::Complex64;

/// Dense complex matrix used for all vertex and arc operators.
pub type CMatrix = nalgebra::DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<Complex64>;

/// `e^{iθ}`.
pub fn unit(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}
