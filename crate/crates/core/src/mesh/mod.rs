//! Indexed triangle meshes.
//!
//! [`TriangleMesh`] is the interchange type for every other module. Meshes are
//! immutable once validated; operations that change connectivity (cutting)
//! return new meshes.

mod cut;
mod io;
mod topology;
mod torus_grid;

pub use cut::{compute_cut_graph, cut_along, CutGraph, SeamCorrespondence};
pub use io::{load_mesh, save_mesh, save_obj_with_seam_uv, MeshFormat};
pub use topology::{EdgeTopology, VertexFans};
pub use torus_grid::{generate_torus_mesh, TorusGrid};

use crate::geom::{triangle_area3, Point3};
use crate::{Error, Result};

/// Faces whose area falls below this fraction of the mean face area are rejected.
pub const DEGENERATE_AREA_FRACTION: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleMesh {
    pub vertices: Vec<Point3>,
    pub faces: Vec<[usize; 3]>,
    /// Optional per-face population, strictly positive when present.
    pub population: Option<Vec<f64>>,
}

impl TriangleMesh {
    /// Builds a mesh after checking index bounds and distinct face corners.
    pub fn new(vertices: Vec<Point3>, faces: Vec<[usize; 3]>) -> Result<Self> {
        let n = vertices.len();
        for (fi, f) in faces.iter().enumerate() {
            if f.iter().any(|&v| v >= n) {
                return Err(Error::InvalidMesh(format!(
                    "face {fi} references a vertex outside [0, {n})"
                )));
            }
            if f[0] == f[1] || f[1] == f[2] || f[0] == f[2] {
                return Err(Error::InvalidMesh(format!(
                    "face {fi} has repeated vertex indices {f:?}"
                )));
            }
        }
        if let Some((vi, _)) = vertices
            .iter()
            .enumerate()
            .find(|(_, p)| p.iter().any(|c| !c.is_finite()))
        {
            return Err(Error::InvalidMesh(format!("vertex {vi} is not finite")));
        }
        Ok(Self {
            vertices,
            faces,
            population: None,
        })
    }

    pub fn with_population(mut self, population: Vec<f64>) -> Result<Self> {
        if population.len() != self.faces.len() {
            return Err(Error::InvalidParameter(format!(
                "population has {} entries, mesh has {} faces",
                population.len(),
                self.faces.len()
            )));
        }
        if let Some((i, p)) = population
            .iter()
            .enumerate()
            .find(|(_, p)| !(p.is_finite() && **p > 0.0))
        {
            return Err(Error::InvalidParameter(format!(
                "population must be positive, face {i} has {p}"
            )));
        }
        self.population = Some(population);
        Ok(self)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn face_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.faces[f];
        triangle_area3(self.vertices[a], self.vertices[b], self.vertices[c])
    }

    pub fn face_areas(&self) -> Vec<f64> {
        (0..self.faces.len()).map(|f| self.face_area(f)).collect()
    }

    pub fn total_area(&self) -> f64 {
        self.face_areas().iter().sum()
    }

    pub fn edge_topology(&self) -> Result<EdgeTopology> {
        EdgeTopology::build(self.vertices.len(), &self.faces)
    }

    /// Rejects faces whose area is negligible relative to the mean face area.
    pub fn check_degenerate_faces(&self) -> Result<()> {
        if self.faces.is_empty() {
            return Ok(());
        }
        let areas = self.face_areas();
        let mean = areas.iter().sum::<f64>() / areas.len() as f64;
        match areas
            .iter()
            .enumerate()
            .find(|(_, a)| **a < DEGENERATE_AREA_FRACTION * mean)
        {
            Some((face, &area)) => Err(Error::DegenerateFace { face, area }),
            None => Ok(()),
        }
    }

    /// Succeeds when every edge is shared by exactly two consistently oriented faces.
    pub fn check_closed_manifold(&self) -> Result<EdgeTopology> {
        let topo = self.edge_topology()?;
        topo.require_closed()?;
        Ok(topo)
    }

    /// Returns a copy with every face winding reversed.
    pub fn flipped(&self) -> Self {
        Self {
            vertices: self.vertices.clone(),
            faces: self.faces.iter().map(|&[a, b, c]| [a, c, b]).collect(),
            population: self.population.clone(),
        }
    }
}

/// Genus of a closed orientable manifold mesh, `(2 − V + E − F) / 2`.
pub fn euler_genus(mesh: &TriangleMesh) -> Result<i64> {
    let topo = mesh.check_closed_manifold()?;
    let chi = mesh.num_vertices() as i64 - topo.num_edges() as i64 + mesh.num_faces() as i64;
    Ok((2 - chi) / 2)
}
