//! Toroidal parameterization of genus-one meshes.
//!
//! The source mesh is cut into a disk and mapped to the fundamental rectangle
//! by a doubly periodic harmonic map `h` (seam copies tied by the lattice
//! translations `(2πR, 0)` and `(0, 2πr)`). A density-equalizing run on the
//! resulting planar mesh then gives `g`, and `f = g ∘ h`. With the source face
//! areas as population, `f` is area preserving up to the global scale.

use std::fmt;
use std::str::FromStr;

use crate::engine::{run_tdem_planar, validate_population, TdemConfig, TdemReport};
use crate::geom::{add2, cot_at3, sub2, Point2, Point3};
use crate::mesh::{compute_cut_graph, cut_along, euler_genus, CutGraph, TriangleMesh};
use crate::ops::{solve_embedding, OffsetAdjacency};
use crate::torus::{PeriodicPlanarMesh, TorusSpec};
use crate::{Error, Result};

/// Edge weights of the harmonic initial map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HarmonicWeights {
    /// Tutte weights; always fold-free.
    #[default]
    Uniform,
    /// Cotangent weights of the source mesh, falling back to uniform weights
    /// when an edge weight is nonpositive or the layout folds.
    Cotangent,
}

impl FromStr for HarmonicWeights {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(HarmonicWeights::Uniform),
            "cotangent" => Ok(HarmonicWeights::Cotangent),
            _ => Err(Error::InvalidParameter(format!(
                "unknown weights '{s}', expected uniform or cotangent"
            ))),
        }
    }
}

impl fmt::Display for HarmonicWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HarmonicWeights::Uniform => "uniform",
            HarmonicWeights::Cotangent => "cotangent",
        })
    }
}

/// A map from a genus-one mesh onto a torus, with its periodic planar layout.
#[derive(Debug, Clone)]
pub struct Parameterization {
    pub source: TriangleMesh,
    pub target_spec: TorusSpec,
    /// Cut mesh in the plane; its faces are the source faces in the same order.
    pub planar: PeriodicPlanarMesh,
    /// Torus image of every source vertex.
    pub vertex_images: Vec<Point3>,
    /// Weights actually used by the initial map.
    pub weights: HarmonicWeights,
}

impl Parameterization {
    /// The image mesh on the torus, with the source connectivity.
    pub fn mapped(&self) -> TriangleMesh {
        TriangleMesh {
            vertices: self.vertex_images.clone(),
            faces: self.source.faces.clone(),
            population: None,
        }
    }

    /// Per-cut-vertex planar coordinates scaled to `[0, 1]²` over the fundamental rectangle.
    pub fn normalized_uv(&self) -> Vec<Point2> {
        let (w, h) = (self.target_spec.width(), self.target_spec.height());
        let base = self.planar.positions[self.planar.seams.corner_ids[0]];
        self.planar
            .positions
            .iter()
            .map(|p| [(p[0] - base[0]) / w, (p[1] - base[1]) / h])
            .collect()
    }

    fn from_planar(
        source: &TriangleMesh,
        planar: PeriodicPlanarMesh,
        weights: HarmonicWeights,
    ) -> Self {
        let n = source.num_vertices();
        let vertex_images = planar.torus_points()[..n].to_vec();
        Self {
            source: source.clone(),
            target_spec: planar.spec,
            planar,
            vertex_images,
            weights,
        }
    }
}

/// Computes the harmonic initial map `h` of a closed genus-one mesh onto the torus `spec`.
///
/// The bottom-left copy of the cut base vertex is pinned at the domain corner
/// `(0, −πr)`; any other translation in `v` would change the torus image. If the layout comes out
/// clockwise, `loop_a` is reversed, which swaps the roles of the bottom and
/// top copies and restores a counterclockwise layout.
pub fn initial_parameterization(
    mesh: &TriangleMesh,
    spec: &TorusSpec,
    cut: Option<&CutGraph>,
    weights: HarmonicWeights,
) -> Result<Parameterization> {
    let genus = euler_genus(mesh)?;
    if genus != 1 {
        return Err(Error::Genus { found: genus });
    }
    mesh.check_degenerate_faces()?;
    let mut cut = match cut {
        Some(c) => {
            let mut c = c.clone();
            c.normalize(mesh)?;
            c
        }
        None => compute_cut_graph(mesh, None)?,
    };

    let (mut planar, mut used) = harmonic_layout(mesh, spec, &cut, weights)?;
    if planar.signed_areas().iter().sum::<f64>() < 0.0 {
        cut.loop_a[1..].reverse();
        cut.normalize(mesh)?;
        (planar, used) = harmonic_layout(mesh, spec, &cut, weights)?;
    }
    if used == HarmonicWeights::Cotangent && planar.count_folds() > 0 {
        (planar, used) = harmonic_layout(mesh, spec, &cut, HarmonicWeights::Uniform)?;
    }
    let folds = planar.count_folds();
    if folds > 0 {
        return Err(Error::Folded(format!(
            "harmonic layout has {folds} folded faces with {used} weights"
        )));
    }
    Ok(Parameterization::from_planar(mesh, planar, used))
}

fn harmonic_layout(
    mesh: &TriangleMesh,
    spec: &TorusSpec,
    cut: &CutGraph,
    weights: HarmonicWeights,
) -> Result<(PeriodicPlanarMesh, HarmonicWeights)> {
    let (cut_mesh, seams) = cut_along(mesh, cut)?;
    let shift_lr = [spec.width(), 0.0];
    let shift_tb = [0.0, spec.height()];
    let offsets = seams.offsets(shift_lr, shift_tb);
    let n = mesh.num_vertices();

    let mut adj = None;
    if weights == HarmonicWeights::Cotangent {
        let cot = cotangent_weights(mesh);
        let a = OffsetAdjacency::build(&cut_mesh.faces, &seams.origin, &offsets, n, |f, k| {
            cot[f][k]
        });
        if a.neighbors.iter().flatten().all(|&(_, _, w)| w > 0.0) {
            adj = Some(a);
        }
    }
    let (adj, used) = match adj {
        Some(a) => (a, weights),
        None if weights == HarmonicWeights::Cotangent => {
            // nonpositive weights: fall back right away
            return harmonic_layout(mesh, spec, cut, HarmonicWeights::Uniform);
        }
        None => (
            OffsetAdjacency::uniform(&cut_mesh.faces, &seams.origin, &offsets, n),
            HarmonicWeights::Uniform,
        ),
    };

    let bl = seams.corner_ids[0];
    let base = seams.origin[bl];
    let mut x = vec![[0.0, 0.0]; n];
    x[base] = sub2([0.0, -0.5 * spec.height()], offsets[bl]);
    let mut free = vec![true; n];
    free[base] = false;
    if let Err(e) = solve_embedding(&adj, &free, &mut x) {
        return match used {
            HarmonicWeights::Cotangent => {
                harmonic_layout(mesh, spec, cut, HarmonicWeights::Uniform)
            }
            HarmonicWeights::Uniform => Err(e),
        };
    }

    let positions = seams
        .origin
        .iter()
        .zip(&offsets)
        .map(|(&q, &d)| add2(x[q], d))
        .collect();
    let planar = PeriodicPlanarMesh {
        positions,
        faces: cut_mesh.faces,
        seams,
        spec: *spec,
        shift_lr,
        shift_tb,
    };
    Ok((planar, used))
}

/// `½ cot` of each corner angle, i.e. the contribution of face `f` to the edge opposite corner `k`.
fn cotangent_weights(mesh: &TriangleMesh) -> Vec<[f64; 3]> {
    mesh.faces
        .iter()
        .map(|face| {
            let p = face.map(|v| mesh.vertices[v]);
            [0, 1, 2].map(|k| 0.5 * cot_at3(p[k], p[(k + 1) % 3], p[(k + 2) % 3]))
        })
        .collect()
}

/// The initial map, the density-equalized map and the run diagnostics.
#[derive(Debug, Clone)]
pub struct ParameterizationRun {
    /// `h`.
    pub initial: Parameterization,
    /// `f = g ∘ h`.
    pub result: Parameterization,
    pub report: TdemReport,
}

/// Computes `h`, then equalizes `P(T) / Area(h(T))` on the torus to obtain `f = g ∘ h`.
pub fn run_parameterization(
    mesh: &TriangleMesh,
    spec: &TorusSpec,
    population: &[f64],
    cut: Option<&CutGraph>,
    weights: HarmonicWeights,
    config: &TdemConfig,
) -> Result<ParameterizationRun> {
    config.validate()?;
    validate_population(population, mesh.num_faces())?;
    let initial = initial_parameterization(mesh, spec, cut, weights)?;
    let run = run_tdem_planar(initial.planar.clone(), population, config)?;
    let result = Parameterization::from_planar(mesh, run.planar, initial.weights);
    Ok(ParameterizationRun {
        initial,
        result,
        report: run.report,
    })
}

/// Source face areas: with this population a constant final density means
/// `Area(T) / Area(f(T))` is constant.
pub fn area_preserving_population(mesh: &TriangleMesh) -> Vec<f64> {
    mesh.face_areas()
}

pub const HISTOGRAM_BINS: usize = 50;
pub const HISTOGRAM_RANGE: (f64, f64) = (-3.0, 3.0);

/// Per-face area distortion and its summary.
#[derive(Debug, Clone, PartialEq)]
pub struct AreaDistortion {
    /// `log((Area(T)/A) / (Area(f(T))/A_f))`.
    pub per_face: Vec<f64>,
    pub mean_abs: f64,
    /// Counts over [`HISTOGRAM_BINS`] equal bins of [`HISTOGRAM_RANGE`];
    /// values outside the range go to the end bins.
    pub histogram: Vec<usize>,
}

impl AreaDistortion {
    /// Lower edge of every bin.
    pub fn bin_edges() -> Vec<f64> {
        let (lo, hi) = HISTOGRAM_RANGE;
        let w = (hi - lo) / HISTOGRAM_BINS as f64;
        (0..HISTOGRAM_BINS).map(|b| lo + w * b as f64).collect()
    }
}

/// Area distortion between a source mesh and its image with the same connectivity.
pub fn area_distortion(source: &TriangleMesh, image: &TriangleMesh) -> Result<AreaDistortion> {
    if source.faces != image.faces || source.num_vertices() != image.num_vertices() {
        return Err(Error::InvalidParameter(
            "source and image meshes have different connectivity".into(),
        ));
    }
    let sa = source.face_areas();
    let ia = image.face_areas();
    for (areas, _) in [(&sa, "source"), (&ia, "image")] {
        if let Some(f) = areas.iter().position(|&a| !(a > 0.0)) {
            return Err(Error::DegenerateFace {
                face: f,
                area: areas[f],
            });
        }
    }
    let (ts, ti): (f64, f64) = (sa.iter().sum(), ia.iter().sum());
    let per_face: Vec<f64> = sa
        .iter()
        .zip(&ia)
        .map(|(s, i)| ((s / ts) / (i / ti)).ln())
        .collect();
    let mean_abs = per_face.iter().map(|d| d.abs()).sum::<f64>() / per_face.len() as f64;
    let (lo, hi) = HISTOGRAM_RANGE;
    let width = (hi - lo) / HISTOGRAM_BINS as f64;
    let mut histogram = vec![0; HISTOGRAM_BINS];
    for d in &per_face {
        let b = ((d - lo) / width)
            .floor()
            .clamp(0.0, (HISTOGRAM_BINS - 1) as f64);
        histogram[b as usize] += 1;
    }
    Ok(AreaDistortion {
        per_face,
        mean_abs,
        histogram,
    })
}
