//! Lattice data of the quintic, (0,2) model data, and the exact linear
//! algebra behind the chiral-ring complexes.

pub mod cohomology;
pub mod int;
pub mod lattice;
pub mod model;
pub mod oracle;
pub mod poly;
pub mod sample;
pub mod sparse;

pub use cohomology::{cohomology_dims, ComputeOptions, GradedDimTable, Ring};
pub use lattice::{LatticeEnv, MPoint, MQPoint, NPoint};
pub use model::{FivePolys, GParams, Model};
pub use poly::Poly;
