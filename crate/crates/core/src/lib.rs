//! Density-equalizing maps on toroidal surfaces.
//!
//! A population prescribed on the faces of a torus mesh is equalized by
//! diffusing the induced density on the doubly periodic planar domain
//! `[0, 2πR) × [−πr, πr)` and advecting the mesh vertices with the resulting
//! velocity field. The same machinery yields toroidal parameterizations of
//! arbitrary genus-one meshes, including area-preserving ones.
//!
//! - [`mesh`]: triangle meshes, OBJ/PLY I/O, torus generation, cut graphs.
//! - [`torus`]: the toroidal projection, its inverse and the periodic planar mesh.
//! - [`ops`]: lumped mass, cotangent Laplacian, gradients and the implicit diffusion step.
//! - [`engine`]: the iterative density-equalizing map on a torus.
//! - [`param`]: genus-one parameterization and area-distortion metrics.

mod error;
pub mod geom;

pub mod engine;
pub mod mesh;
pub mod ops;
pub mod param;
pub mod torus;

pub use error::{Error, Result};

pub use engine::{run_tdem, run_tdem_planar, PopulationSpec, TdemConfig, TdemReport, TdemRun};
pub use mesh::{
    compute_cut_graph, cut_along, euler_genus, generate_torus_mesh, load_mesh, save_mesh, CutGraph,
    MeshFormat, SeamCorrespondence, TriangleMesh,
};
pub use param::{
    area_distortion, area_preserving_population, initial_parameterization, run_parameterization,
    AreaDistortion, HarmonicWeights, Parameterization, ParameterizationRun,
};
pub use torus::{PeriodicPlanarMesh, TorusSpec};
