//! Discrete operators on the seam-identified vertex set of a planar mesh.
//!
//! Every seam copy of a vertex shares one quotient index, so the operators
//! below act on the torus itself: a quotient vertex's face neighbourhood is the
//! union of the neighbourhoods of all its copies. Face geometry is always taken
//! from the cut (unwrapped) planar positions.

mod embedding;
mod sparse;

pub use embedding::{solve_embedding, OffsetAdjacency};
pub use sparse::{solve_cg, CgOutcome, SparseOperator, DROP_TOLERANCE};

use crate::geom::{cot_at2, signed_area2, sub2, Point2};
use crate::mesh::{SeamCorrespondence, DEGENERATE_AREA_FRACTION};
use crate::torus::PeriodicPlanarMesh;
use crate::{Error, Result};

/// Relative residual at which the implicit diffusion solve stops.
pub const SOLVER_TOLERANCE: f64 = 1e-12;

/// Map from cut-mesh vertex ids to quotient ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientIndex {
    pub map: Vec<usize>,
    pub count: usize,
}

impl QuotientIndex {
    pub fn identity(n: usize) -> Self {
        Self {
            map: (0..n).collect(),
            count: n,
        }
    }

    /// Seam copies map to the id of the original vertex.
    pub fn from_seams(seams: &SeamCorrespondence) -> Self {
        Self {
            map: seams.origin.clone(),
            count: seams.num_original(),
        }
    }
}

/// Per-face planar corners with quotient vertex ids, the input to every assembly routine.
#[derive(Debug, Clone)]
pub struct QuotientGeometry {
    pub faces: Vec<[usize; 3]>,
    pub corners: Vec<[Point2; 3]>,
    pub num_vertices: usize,
    /// Signed planar area of every face.
    pub areas: Vec<f64>,
}

impl QuotientGeometry {
    pub fn from_corners(
        faces: Vec<[usize; 3]>,
        corners: Vec<[Point2; 3]>,
        num_vertices: usize,
    ) -> Self {
        let areas = corners
            .iter()
            .map(|&[a, b, c]| signed_area2(a, b, c))
            .collect();
        Self {
            faces,
            corners,
            num_vertices,
            areas,
        }
    }

    /// Geometry of a cut mesh whose seam copies are identified by `q`.
    pub fn from_cut(positions: &[Point2], faces: &[[usize; 3]], q: &QuotientIndex) -> Self {
        Self::from_corners(
            faces.iter().map(|f| f.map(|v| q.map[v])).collect(),
            faces.iter().map(|f| f.map(|v| positions[v])).collect(),
            q.count,
        )
    }

    pub fn from_periodic(mesh: &PeriodicPlanarMesh) -> Self {
        Self::from_cut(
            &mesh.positions,
            &mesh.faces,
            &QuotientIndex::from_seams(&mesh.seams),
        )
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    fn require_positive(&self) -> Result<()> {
        match self.areas.iter().enumerate().find(|(_, &a)| !(a > 0.0)) {
            Some((face, &area)) => Err(Error::NonPositiveArea { face, area }),
            None => Ok(()),
        }
    }

    fn require_nondegenerate(&self) -> Result<()> {
        self.require_positive()?;
        let mean = self.total_area() / self.num_faces().max(1) as f64;
        match self
            .areas
            .iter()
            .enumerate()
            .find(|(_, &a)| a < DEGENERATE_AREA_FRACTION * mean)
        {
            Some((face, &area)) => Err(Error::DegenerateFace { face, area }),
            None => Ok(()),
        }
    }

    /// Sum of incident face areas per quotient vertex.
    fn incident_areas(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.num_vertices];
        for (f, face) in self.faces.iter().enumerate() {
            for &v in face {
                s[v] += self.areas[f];
            }
        }
        s
    }
}

/// Per-face population and densities of a density-equalization state.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub population: Vec<f64>,
    /// Area of each face's torus image.
    pub reference_areas: Vec<f64>,
    /// `population / reference_areas`, face by face.
    pub face_density: Vec<f64>,
    /// Quotient-vertex density `M · face_density`.
    pub vertex_density: Vec<f64>,
}

impl DensityField {
    pub fn new(
        population: Vec<f64>,
        reference_areas: Vec<f64>,
        m: &SparseOperator,
    ) -> Result<Self> {
        if population.len() != reference_areas.len() || m.cols() != population.len() {
            return Err(Error::InvalidParameter(format!(
                "population has {} entries, mesh has {} faces",
                population.len(),
                reference_areas.len()
            )));
        }
        if let Some((face, &area)) = reference_areas
            .iter()
            .enumerate()
            .find(|(_, &a)| !(a > 0.0))
        {
            return Err(Error::NonPositiveArea { face, area });
        }
        if let Some((i, p)) = population
            .iter()
            .enumerate()
            .find(|(_, &p)| !(p > 0.0 && p.is_finite()))
        {
            return Err(Error::InvalidParameter(format!(
                "population must be positive, face {i} has {p}"
            )));
        }
        let face_density: Vec<f64> = population
            .iter()
            .zip(&reference_areas)
            .map(|(p, a)| p / a)
            .collect();
        let vertex_density = m.mul_vec(&face_density);
        Ok(Self {
            population,
            reference_areas,
            face_density,
            vertex_density,
        })
    }
}

/// Diagonal lumped mass: one third of the incident face areas of every quotient vertex.
pub fn lumped_mass(geom: &QuotientGeometry) -> Result<SparseOperator> {
    geom.require_positive()?;
    let diag: Vec<f64> = geom.incident_areas().iter().map(|s| s / 3.0).collect();
    Ok(SparseOperator::diagonal(&diag))
}

/// Cotangent Laplacian, `L_ij = −½(cot α_ij + cot β_ij)` with zero row sums.
///
/// The matrix is positive semi-definite; the sign convention makes
/// `(A + δt·L)` the backward-Euler system of the heat equation.
pub fn cotangent_laplacian(geom: &QuotientGeometry) -> Result<SparseOperator> {
    geom.require_nondegenerate()?;
    let n = geom.num_vertices;
    let mut off = Vec::with_capacity(6 * geom.num_faces());
    for (face, corners) in geom.faces.iter().zip(&geom.corners) {
        for k in 0..3 {
            let (i, j) = (face[(k + 1) % 3], face[(k + 2) % 3]);
            let w = -0.5 * cot_at2(corners[k], corners[(k + 1) % 3], corners[(k + 2) % 3]);
            off.push((i, j, w));
            off.push((j, i, w));
        }
    }
    let off = SparseOperator::from_triplets(n, n, off);
    let mut triplets: Vec<(usize, usize, f64)> = off.entries().collect();
    for (i, s) in off.row_sums().into_iter().enumerate() {
        triplets.push((i, i, -s));
    }
    Ok(SparseOperator::from_triplets(n, n, triplets))
}

/// Face-to-vertex averaging matrix `M` (`|V_q| × |F|`), area weighted and row stochastic.
pub fn face_to_vertex(geom: &QuotientGeometry) -> Result<SparseOperator> {
    geom.require_positive()?;
    let total = geom.incident_areas();
    let mut t = Vec::with_capacity(3 * geom.num_faces());
    for (f, face) in geom.faces.iter().enumerate() {
        for &v in face {
            t.push((v, f, geom.areas[f] / total[v]));
        }
    }
    Ok(SparseOperator::from_triplets(
        geom.num_vertices,
        geom.num_faces(),
        t,
    ))
}

/// Gradient of the piecewise-linear interpolant of `values` on every face.
pub fn face_gradient(geom: &QuotientGeometry, values: &[f64]) -> Result<Vec<Point2>> {
    assert_eq!(values.len(), geom.num_vertices);
    geom.require_nondegenerate()?;
    Ok(geom
        .faces
        .iter()
        .zip(&geom.corners)
        .zip(&geom.areas)
        .map(|((face, x), &area)| {
            let mut w = [0.0, 0.0];
            for k in 0..3 {
                let e = sub2(x[(k + 2) % 3], x[(k + 1) % 3]);
                let rho = values[face[k]];
                w[0] += rho * e[0];
                w[1] += rho * e[1];
            }
            // n × w with n = (0, 0, 1)
            let s = 1.0 / (2.0 * area);
            [-w[1] * s, w[0] * s]
        })
        .collect())
}

/// Result of one implicit diffusion step.
#[derive(Debug, Clone)]
pub struct DiffusionStep {
    pub density: Vec<f64>,
    pub solver: CgOutcome,
    /// `1ᵀAρ` before and after the step.
    pub mass_before: f64,
    pub mass_after: f64,
}

/// Solves `(A + dt·L) ρ' = A ρ`, warm started from `ρ`.
pub fn backward_euler_step(
    a: &SparseOperator,
    l: &SparseOperator,
    rho: &[f64],
    dt: f64,
) -> Result<DiffusionStep> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "time step must be positive, got {dt}"
        )));
    }
    let system = a.add_scaled(l, dt);
    let b = a.mul_vec(rho);
    let mut x = rho.to_vec();
    let max_iter = 20 * rho.len().max(10);
    let solver = solve_cg(&system, &b, &mut x, SOLVER_TOLERANCE, max_iter)?;
    let mass_before = b.iter().sum();
    let mass_after = a.mul_vec(&x).iter().sum();
    Ok(DiffusionStep {
        density: x,
        solver,
        mass_before,
        mass_after,
    })
}
