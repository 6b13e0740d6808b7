//! Numerical toolkit: jets for forward-mode differentiation, small dense
//! linear algebra and symmetric eigensolvers.

pub mod eigen;
pub mod jet;
pub mod linalg;
pub mod maps;
pub mod real;
pub mod sampling;
pub mod tol;

pub use eigen::{gen_sym_eig, sym_eig, SymEig};
pub use jet::{Jet1, Jet2};
pub use linalg::Mat;
pub use maps::{jacobian, lie_bracket, MapFn, SharedMap, VectorField, VectorMap};
pub use real::Real;
pub use tol::Tolerances;
