//! Exact computer algebra for Jacobi diagrams: canonical forms, relation quotients, the
//! standard operations on diagram spaces, wheels and the sl2 weight system.

pub mod coeff;
pub mod diagram;
pub mod element;
pub mod engine;
pub mod error;
pub mod linalg;
pub mod ops;
pub mod quotient;
pub mod series;
pub mod sl2;
pub mod suites;
pub mod wheels;

pub use coeff::{Coeff, Laurent, Q};
pub use diagram::{Diagram, DiagramBuilder, Signature, SkeletonKind};
pub use element::Element;
pub use engine::Engine;
pub use error::{Error, Result};
