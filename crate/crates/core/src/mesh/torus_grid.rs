use std::f64::consts::PI;

use super::TriangleMesh;
use crate::geom::Point2;
use crate::torus::{project_to_torus, TorusSpec};
use crate::Result;

/// Grid metadata of a generated torus: vertex `j * nu + i` sits at `uv[j * nu + i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusGrid {
    pub spec: TorusSpec,
    pub nu: usize,
    pub nv: usize,
    /// Exact planar coordinates of every vertex in `[0, 2πR) × [−πr, πr)`.
    pub uv: Vec<Point2>,
}

impl TorusGrid {
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        (j % self.nv) * self.nu + (i % self.nu)
    }
}

/// Triangulates the torus over a regular `nu × nv` grid of the fundamental domain.
///
/// Row `j` sits at `v = −πr + 2πr·j/nv`, so row 0 is the innermost loop. Each
/// grid quad `(i, j)` is split along the diagonal from `(i, j)` to `(i+1, j+1)`,
/// with faces counterclockwise in `(u, v)` and outward on the torus.
pub fn generate_torus_mesh(
    major: f64,
    minor: f64,
    nu: usize,
    nv: usize,
) -> Result<(TriangleMesh, TorusGrid)> {
    let spec = TorusSpec::new(major, minor)?;
    if nu < 3 || nv < 3 {
        return Err(crate::Error::InvalidParameter(format!(
            "require nu >= 3 and nv >= 3, got nu = {nu}, nv = {nv}"
        )));
    }
    let mut uv = Vec::with_capacity(nu * nv);
    for j in 0..nv {
        let v = -PI * minor + 2.0 * PI * minor * (j as f64) / (nv as f64);
        for i in 0..nu {
            let u = 2.0 * PI * major * (i as f64) / (nu as f64);
            uv.push([u, v]);
        }
    }
    let vertices = uv.iter().map(|&p| project_to_torus(p, &spec)).collect();
    let grid = TorusGrid { spec, nu, nv, uv };
    let mut faces = Vec::with_capacity(2 * nu * nv);
    for j in 0..nv {
        for i in 0..nu {
            let a = grid.index(i, j);
            let b = grid.index(i + 1, j);
            let c = grid.index(i + 1, j + 1);
            let d = grid.index(i, j + 1);
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    let mesh = TriangleMesh::new(vertices, faces)?;
    Ok((mesh, grid))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::euler_genus;

    #[test]
    fn counts_and_genus() {
        let (m, g) = generate_torus_mesh(3.0, 1.0, 4, 3).unwrap();
        assert_eq!(m.num_vertices(), 12);
        assert_eq!(m.num_faces(), 24);
        assert_eq!(g.uv.len(), 12);
        let topo = m.check_closed_manifold().unwrap();
        assert_eq!(12 - topo.num_edges() as i64 + 24, 0);
        assert_eq!(euler_genus(&m).unwrap(), 1);
    }

    #[test]
    fn vertices_on_surface() {
        let (m, _) = generate_torus_mesh(3.0, 1.0, 37, 23).unwrap();
        for p in &m.vertices {
            let s = (p[0].hypot(p[1]) - 3.0).powi(2) + p[2] * p[2];
            assert!((s - 1.0).abs() < 1e-12, "residual {}", s - 1.0);
        }
    }

    #[test]
    fn total_area_close_to_analytic() {
        let (m, _) = generate_torus_mesh(3.0, 1.0, 256, 128).unwrap();
        let exact = 4.0 * PI * PI * 3.0;
        let rel = (m.total_area() - exact).abs() / exact;
        assert!(rel < 5e-3, "relative error {rel}");
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(generate_torus_mesh(1.0, 3.0, 8, 8).is_err());
        assert!(generate_torus_mesh(3.0, 1.0, 2, 8).is_err());
        assert!(generate_torus_mesh(3.0, 0.0, 8, 8).is_err());
    }

    #[test]
    fn faces_are_outward() {
        let (m, _) = generate_torus_mesh(3.0, 1.0, 12, 8).unwrap();
        for f in &m.faces {
            let [a, b, c] = f.map(|v| m.vertices[v]);
            let n = crate::geom::cross3(crate::geom::sub3(b, a), crate::geom::sub3(c, a));
            let centroid = [
                (a[0] + b[0] + c[0]) / 3.0,
                (a[1] + b[1] + c[1]) / 3.0,
                (a[2] + b[2] + c[2]) / 3.0,
            ];
            let rho = centroid[0].hypot(centroid[1]);
            let tube_center = [3.0 * centroid[0] / rho, 3.0 * centroid[1] / rho, 0.0];
            let out = crate::geom::sub3(centroid, tube_center);
            assert!(crate::geom::dot3(n, out) > 0.0);
        }
    }
}
