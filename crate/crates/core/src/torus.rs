//! The torus `𝒯` and its fundamental planar domain `[0, 2πR) × [−πr, πr)`.
//!
//! The toroidal projection maps `(u, v)` to
//! `((R + r cos(v/r)) cos(u/R), (R + r cos(v/r)) sin(u/R), r sin(v/r))`,
//! which is doubly periodic with periods `2πR` and `2πr`. A cut torus mesh laid
//! out in the plane is a [`PeriodicPlanarMesh`]: opposite seam copies differ by
//! a fixed translation.

use std::collections::VecDeque;
use std::f64::consts::PI;

use crate::geom::{add2, signed_area2, sub2, triangle_area3, Point2, Point3};
use crate::mesh::{compute_cut_graph, cut_along, CutGraph, SeamCorrespondence, TriangleMesh};
use crate::{Error, Result};

/// Points farther than this multiple of `r` from the surface are rejected by [`inverse_project`].
pub const SURFACE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorusSpec {
    pub major: f64,
    pub minor: f64,
}

impl TorusSpec {
    pub fn new(major: f64, minor: f64) -> Result<Self> {
        if !(major.is_finite() && minor.is_finite() && major > minor && minor > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "require R > r > 0, got R = {major}, r = {minor}"
            )));
        }
        Ok(Self { major, minor })
    }

    /// Period along `u`, `2πR`.
    pub fn width(&self) -> f64 {
        2.0 * PI * self.major
    }

    /// Period along `v`, `2πr`.
    pub fn height(&self) -> f64 {
        2.0 * PI * self.minor
    }

    /// Residual of the implicit equation `(√(X²+Y²) − R)² + Z² − r²`.
    pub fn implicit(&self, q: Point3) -> f64 {
        let s = q[0].hypot(q[1]) - self.major;
        s * s + q[2] * q[2] - self.minor * self.minor
    }

    /// Euclidean distance from `q` to the torus surface.
    pub fn distance(&self, q: Point3) -> f64 {
        let s = q[0].hypot(q[1]) - self.major;
        (s.hypot(q[2]) - self.minor).abs()
    }
}

pub fn project_to_torus(p: Point2, spec: &TorusSpec) -> Point3 {
    let (su, cu) = (p[0] / spec.major).sin_cos();
    let (sv, cv) = (p[1] / spec.minor).sin_cos();
    let ring = spec.major + spec.minor * cv;
    [ring * cu, ring * su, spec.minor * sv]
}

/// Inverse of [`project_to_torus`] onto the fundamental domain.
///
/// The branches follow the sign conventions of the piecewise arcsine formulas:
/// `u` splits on `X ≥ 0, Y ≥ 0` / `X ≥ 0, Y < 0` / otherwise, and `v` splits
/// on `X² + Y² ≥ R²` / `Z > 0` / otherwise. Each branch evaluates its arcsine
/// through the equivalent `atan2`, which stays accurate near `±π/2` and
/// projects slightly off-surface points radially within the tube.
pub fn inverse_project(q: Point3, spec: &TorusSpec) -> Result<Point2> {
    let [x, y, z] = q;
    let dist = spec.distance(q);
    if !(dist <= SURFACE_TOLERANCE * spec.minor) {
        return Err(Error::OffSurface {
            x,
            y,
            z,
            distance: dist,
        });
    }
    let (major, minor) = (spec.major, spec.minor);
    let u = if x >= 0.0 && y >= 0.0 {
        major * y.atan2(x)
    } else if x >= 0.0 {
        major * (2.0 * PI + y.atan2(x))
    } else {
        major * (PI - y.atan2(-x))
    };
    // signed distance from the tube centre circle, zero exactly when X² + Y² = R²
    let s = x.hypot(y) - major;
    let v = if s >= 0.0 {
        minor * z.atan2(s)
    } else if z > 0.0 {
        minor * (PI - z.atan2(-s))
    } else {
        -minor * (PI + z.atan2(-s))
    };
    Ok(canonicalize([u, v], spec))
}

/// Recovers `(R, r)` from points lying on an axis-aligned torus centred at the origin.
///
/// Every point satisfies `2Rρ − (R² − r²) = ρ² + z²` with `ρ = hypot(x, y)`,
/// which is linear in `R` and `R² − r²`; the least-squares solution is then
/// checked against the surface tolerance of [`inverse_project`].
pub fn infer_torus_spec(points: &[Point3]) -> Result<TorusSpec> {
    let (mut s11, mut s12, mut s22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for q in points {
        let rho = q[0].hypot(q[1]);
        let rhs = rho * rho + q[2] * q[2];
        let (a1, a2) = (2.0 * rho, -1.0);
        s11 += a1 * a1;
        s12 += a1 * a2;
        s22 += a2 * a2;
        b1 += a1 * rhs;
        b2 += a2 * rhs;
    }
    let det = s11 * s22 - s12 * s12;
    if !(det.abs() > 1e-12 * s11 * s22) {
        return Err(Error::InvalidParameter(
            "cannot infer torus radii from these points".into(),
        ));
    }
    let major = (b1 * s22 - b2 * s12) / det;
    let c = (s11 * b2 - s12 * b1) / det;
    let minor = (major * major - c).max(0.0).sqrt();
    let spec = TorusSpec::new(major, minor)?;
    let worst = points.iter().map(|&q| spec.distance(q)).fold(0.0, f64::max);
    if worst > SURFACE_TOLERANCE * minor {
        return Err(Error::InvalidParameter(format!(
            "points do not lie on a torus (best fit R = {major}, r = {minor}, off by {worst:e})"
        )));
    }
    Ok(spec)
}

/// Wraps `p` into `[0, 2πR) × [−πr, πr)` by whole periods.
pub fn canonicalize(p: Point2, spec: &TorusSpec) -> Point2 {
    let (w, h) = (spec.width(), spec.height());
    let mut u = p[0] - w * (p[0] / w).floor();
    if u >= w {
        u -= w;
    }
    if u < 0.0 {
        u = 0.0;
    }
    let lo = -0.5 * h;
    let mut v = p[1] - h * ((p[1] - lo) / h).floor();
    if v >= -lo {
        v -= h;
    }
    if v < lo {
        v = lo;
    }
    [u, v]
}

/// Image of `q` under the lattice translation that brings it closest to `reference`.
pub fn nearest_image(q: Point2, reference: Point2, spec: &TorusSpec) -> Point2 {
    let (w, h) = (spec.width(), spec.height());
    let ku = ((reference[0] - q[0]) / w).round();
    let kv = ((reference[1] - q[1]) / h).round();
    [q[0] + ku * w, q[1] + kv * h]
}

/// Area of the straight-edged triangle through the torus images of `a`, `b`, `c`.
pub fn image_area(a: Point2, b: Point2, c: Point2, spec: &TorusSpec) -> f64 {
    triangle_area3(
        project_to_torus(a, spec),
        project_to_torus(b, spec),
        project_to_torus(c, spec),
    )
}

/// A cut genus-one mesh embedded in the plane with doubly periodic seams.
///
/// Vertex `i < seams.num_original()` is the representative copy of original
/// vertex `i`; the remaining vertices are seam duplicates. Every right copy sits
/// at `left + shift_lr`, every top copy at `bottom + shift_tb`.
#[derive(Debug, Clone)]
pub struct PeriodicPlanarMesh {
    pub positions: Vec<Point2>,
    pub faces: Vec<[usize; 3]>,
    pub seams: SeamCorrespondence,
    pub spec: TorusSpec,
    /// Translation from left copies to right copies, `(2πR, 0)` for a standard cut.
    pub shift_lr: Point2,
    /// Translation from bottom copies to top copies, `(0, 2πr)` for a standard cut.
    pub shift_tb: Point2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeamFamily {
    LeftRight,
    BottomTop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeamViolation {
    pub family: SeamFamily,
    pub first: usize,
    pub second: usize,
    pub residual: f64,
}

impl PeriodicPlanarMesh {
    pub fn num_vertices(&self) -> usize {
        self.positions.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    pub fn corners(&self, f: usize) -> [Point2; 3] {
        self.faces[f].map(|v| self.positions[v])
    }

    pub fn signed_area(&self, f: usize) -> f64 {
        let [a, b, c] = self.corners(f);
        signed_area2(a, b, c)
    }

    pub fn signed_areas(&self) -> Vec<f64> {
        (0..self.faces.len()).map(|f| self.signed_area(f)).collect()
    }

    /// Number of faces with nonpositive signed area.
    pub fn count_folds(&self) -> usize {
        (0..self.faces.len())
            .filter(|&f| self.signed_area(f) <= 0.0)
            .count()
    }

    /// Areas of the straight-edged torus images of every face.
    pub fn image_areas(&self) -> Vec<f64> {
        (0..self.faces.len())
            .map(|f| {
                let [a, b, c] = self.corners(f);
                image_area(a, b, c, &self.spec)
            })
            .collect()
    }

    /// Face centroids wrapped into the fundamental domain.
    pub fn centroids(&self) -> Vec<Point2> {
        (0..self.faces.len())
            .map(|f| {
                let [a, b, c] = self.corners(f);
                canonicalize(
                    [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0],
                    &self.spec,
                )
            })
            .collect()
    }

    /// Translation of every vertex relative to its representative copy.
    pub fn offsets(&self) -> Vec<Point2> {
        self.seams.offsets(self.shift_lr, self.shift_tb)
    }

    /// Torus images of the original vertices, taken from their representative copies.
    pub fn torus_points(&self) -> Vec<Point3> {
        (0..self.seams.num_original())
            .map(|v| project_to_torus(self.positions[v], &self.spec))
            .collect()
    }

    /// Largest seam translation residual over both families.
    pub fn max_seam_residual(&self) -> f64 {
        self.seam_residuals()
            .map(|v| v.residual)
            .fold(0.0, f64::max)
    }

    fn seam_residuals(&self) -> impl Iterator<Item = SeamViolation> + '_ {
        let lr = self
            .seams
            .pairs_lr
            .iter()
            .map(move |&(l, r)| (SeamFamily::LeftRight, l, r, self.shift_lr));
        let tb = self
            .seams
            .pairs_tb
            .iter()
            .map(move |&(b, t)| (SeamFamily::BottomTop, b, t, self.shift_tb));
        lr.chain(tb).map(move |(family, a, b, shift)| {
            let d = sub2(self.positions[b], add2(self.positions[a], shift));
            SeamViolation {
                family,
                first: a,
                second: b,
                residual: d[0].hypot(d[1]),
            }
        })
    }

    /// Positions of the representative copies, one per original vertex.
    pub fn quotient_positions(&self) -> Vec<Point2> {
        self.positions[..self.seams.num_original()].to_vec()
    }

    /// Places every copy at its representative position plus its lattice offset.
    pub fn set_quotient_positions(&mut self, x: &[Point2]) {
        debug_assert_eq!(x.len(), self.seams.num_original());
        let offsets = self.offsets();
        for (c, p) in self.positions.iter_mut().enumerate() {
            *p = add2(x[self.seams.origin[c]], offsets[c]);
        }
    }

    /// Moves every copy of each original vertex by the same displacement.
    pub fn displace(&mut self, displacement: &[Point2]) {
        let x: Vec<Point2> = self
            .quotient_positions()
            .iter()
            .zip(displacement)
            .map(|(&p, &d)| add2(p, d))
            .collect();
        self.set_quotient_positions(&x);
    }
}

/// Every seam pair whose translation residual exceeds `tol`.
pub fn check_seam_constraints(mesh: &PeriodicPlanarMesh, tol: f64) -> Vec<SeamViolation> {
    mesh.seam_residuals().filter(|v| v.residual > tol).collect()
}

/// Cuts a mesh lying on the torus and lays it out with `φ⁻¹`.
///
/// Returns the planar mesh and whether the face winding had to be reversed to
/// obtain counterclockwise planar faces. Faces of the returned planar mesh keep
/// the order of the input faces.
pub fn flatten_torus_mesh(
    mesh: &TriangleMesh,
    spec: &TorusSpec,
    cut: Option<&CutGraph>,
) -> Result<(PeriodicPlanarMesh, bool)> {
    let canonical: Vec<Point2> = mesh
        .vertices
        .iter()
        .map(|&q| inverse_project(q, spec))
        .collect::<Result<_>>()?;
    mesh.check_closed_manifold()?;

    // Orientation: the first face laid out by nearest images decides.
    let [a, b, c] = mesh
        .faces
        .first()
        .ok_or_else(|| Error::InvalidMesh("mesh has no faces".into()))?
        .map(|v| canonical[v]);
    let flipped = signed_area2(a, nearest_image(b, a, spec), nearest_image(c, a, spec)) < 0.0;
    let working;
    let mesh = if flipped {
        working = mesh.flipped();
        &working
    } else {
        mesh
    };

    let mut c = match cut {
        Some(c) => {
            let mut c = c.clone();
            c.normalize(mesh)?;
            c
        }
        None => compute_cut_graph(mesh, None)?,
    };
    let mut layout = layout_with_cut(mesh, &c, &canonical, spec)?;
    // prefer the orientation in which the right seam lies at larger u
    if layout.3[0] < 0.0 || (layout.3[0] == 0.0 && layout.3[1] < 0.0) {
        c.loop_a[1..].reverse();
        c.normalize(mesh)?;
        layout = layout_with_cut(mesh, &c, &canonical, spec)?;
    }
    let (cut_mesh, seams, positions, shift_lr, shift_tb) = layout;
    let det = shift_lr[0] * shift_tb[1] - shift_lr[1] * shift_tb[0];
    let cell = spec.width() * spec.height();
    if (det - cell).abs() > 1e-9 * cell {
        return Err(Error::InvalidCut(format!(
            "seam translations span a cell of area {det}, expected {cell}"
        )));
    }
    let mut planar = PeriodicPlanarMesh {
        positions,
        faces: cut_mesh.faces,
        seams,
        spec: *spec,
        shift_lr,
        shift_tb,
    };
    // Copies are placed exactly relative to their representative.
    let offsets = planar.offsets();
    for c in planar.seams.num_original()..planar.num_vertices() {
        let rep = planar.positions[planar.seams.origin[c]];
        let expected = add2(rep, offsets[c]);
        let d = sub2(planar.positions[c], expected);
        if d[0].hypot(d[1]) > 1e-6 * (spec.major + spec.minor) {
            return Err(Error::InvalidCut(format!(
                "seam copy {c} is inconsistent with the torus chart"
            )));
        }
        planar.positions[c] = expected;
    }
    if let Some(f) = (0..planar.num_faces()).find(|&f| planar.signed_area(f) <= 0.0) {
        return Err(Error::Folded(format!(
            "face {f} is folded in the (u, v) chart; the mesh is not a valid torus triangulation"
        )));
    }
    Ok((planar, flipped))
}

type Layout = (
    TriangleMesh,
    SeamCorrespondence,
    Vec<Point2>,
    Point2,
    Point2,
);

fn layout_with_cut(
    mesh: &TriangleMesh,
    cut: &CutGraph,
    canonical: &[Point2],
    spec: &TorusSpec,
) -> Result<Layout> {
    let (cut_mesh, seams) = cut_along(mesh, cut)?;
    let positions = unwrap_layout(&cut_mesh.faces, &seams.origin, canonical, spec)?;
    let [bl, br, _, tl] = seams.corner_ids;
    let snap = |d: Point2| {
        [
            (d[0] / spec.width()).round() * spec.width(),
            (d[1] / spec.height()).round() * spec.height(),
        ]
    };
    let shift_lr = snap(sub2(positions[br], positions[bl]));
    let shift_tb = snap(sub2(positions[tl], positions[bl]));
    Ok((cut_mesh, seams, positions, shift_lr, shift_tb))
}

/// Lays out a disk-topology mesh by walking across faces and choosing, for each
/// newly reached vertex, the lattice image closest to an already placed neighbour.
fn unwrap_layout(
    faces: &[[usize; 3]],
    origin: &[usize],
    canonical: &[Point2],
    spec: &TorusSpec,
) -> Result<Vec<Point2>> {
    let n = origin.len();
    let topo = crate::mesh::EdgeTopology::build(n, faces)?;
    let mut placed: Vec<Option<Point2>> = vec![None; n];
    let mut visited = vec![false; faces.len()];
    let mut queue = VecDeque::new();
    if faces.is_empty() {
        return Err(Error::InvalidMesh("mesh has no faces".into()));
    }
    let f0 = faces[0];
    placed[f0[0]] = Some(canonical[origin[f0[0]]]);
    visited[0] = true;
    queue.push_back(0usize);
    while let Some(f) = queue.pop_front() {
        let face = faces[f];
        let anchor = face
            .iter()
            .find_map(|&v| placed[v])
            .expect("queued faces have a placed corner");
        for &v in &face {
            if placed[v].is_none() {
                placed[v] = Some(nearest_image(canonical[origin[v]], anchor, spec));
            }
        }
        for k in 0..3 {
            let (a, b) = (face[k], face[(k + 1) % 3]);
            if let Some(g) = topo.face_of_half_edge(b, a) {
                if !visited[g] {
                    visited[g] = true;
                    queue.push_back(g);
                }
            }
        }
    }
    placed
        .into_iter()
        .enumerate()
        .map(|(v, p)| p.ok_or_else(|| Error::InvalidCut(format!("vertex {v} unreachable"))))
        .collect()
}
