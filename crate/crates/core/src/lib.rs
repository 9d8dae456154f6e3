//! Iterative smoothing of planar and surface meshes made of triangles,
//! quadrilaterals, or both.
//!
//! Every element proposes, for each of its nodes, the position that would
//! make it ideal (equilateral or square) with the other nodes held fixed.
//! The proposals are assembled into one sparse operator scaled by the
//! number of elements at each node; applying it once is a Jacobi sweep.
//! Planar meshes are smoothed by repeating the sweep, surface meshes add
//! feature detection, projection back onto the input surface and inversion
//! checks. Laplacian smoothing is provided as the baseline.

pub mod assembly;
pub mod error;
pub mod geom;
pub mod history;
pub mod io;
pub mod mesh;
pub mod meshgen;
pub mod planar;
pub mod quality;
pub mod surface;

pub use assembly::{assemble, element_target, target_oracle, JacobiMatrix};
pub use error::{Error, Result};
pub use history::{IterationRecord, SmoothResult};
pub use mesh::{boundary_nodes, build_adjacency, validate_orientation, Adjacency, Element, ElementKind, Mesh};
pub use planar::{smooth_planar, Method, PlanarConfig, Tolerance};
pub use quality::{summarize, QualitySummary};
pub use surface::{classify, smooth_surface, NodeClassification, NodeLabel, SurfaceConfig, WeightMode};
