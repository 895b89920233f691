//! Regenerates the genus-one sample meshes in `tests/data`.
//!
//! ```text
//! cargo run -p tdem-core --example make_samples -- crates/core/tests/data
//! ```

use std::f64::consts::PI;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tdem_core::geom::{cross3, norm3, sub3, Point3};
use tdem_core::mesh::{save_mesh, MeshFormat, TriangleMesh};

/// Quad grid over `[0,1)²` with the same diagonal split as the generated tori.
fn grid_faces(nu: usize, nv: usize) -> Vec<[usize; 3]> {
    let idx = |i: usize, j: usize| (j % nv) * nu + (i % nu);
    let mut faces = Vec::with_capacity(2 * nu * nv);
    for j in 0..nv {
        for i in 0..nu {
            let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    faces
}

fn sample(
    nu: usize,
    nv: usize,
    s: &[f64],
    t: &[f64],
    f: impl Fn(f64, f64) -> Point3,
) -> TriangleMesh {
    let mut vertices = Vec::with_capacity(nu * nv);
    for &tj in t {
        for &si in s {
            vertices.push(f(si, tj));
        }
    }
    TriangleMesh::new(vertices, grid_faces(nu, nv)).expect("valid grid")
}

fn uniform(n: usize) -> Vec<f64> {
    (0..n).map(|k| k as f64 / n as f64).collect()
}

/// Torus with a radial bump pattern on the tube.
fn bumpy_torus() -> TriangleMesh {
    let (nu, nv) = (72, 24);
    sample(nu, nv, &uniform(nu), &uniform(nv), |s, t| {
        let (th, ph) = (2.0 * PI * s, 2.0 * PI * t);
        let r = 0.7 * (1.0 + 0.25 * (3.0 * th).sin() * (2.0 * ph).cos());
        let rr = 2.0 + r * ph.cos();
        [rr * th.cos(), rr * th.sin(), r * ph.sin()]
    })
}

fn trefoil(s: f64) -> Point3 {
    let t = 2.0 * PI * s;
    [
        t.sin() + 2.0 * (2.0 * t).sin(),
        t.cos() - 2.0 * (2.0 * t).cos(),
        -(3.0 * t).sin(),
    ]
}

/// Tube of radius 0.35 around a trefoil knot, framed by finite differences.
fn trefoil_tube() -> TriangleMesh {
    let (nu, nv) = (160, 12);
    let h = 1e-5;
    sample(nu, nv, &uniform(nu), &uniform(nv), |s, t| {
        let c = trefoil(s);
        let d1 = sub3(trefoil(s + h), trefoil(s - h));
        let d2 = sub3(sub3(trefoil(s + h), c), sub3(c, trefoil(s - h)));
        let tangent = d1.map(|x| x / norm3(d1));
        let b = cross3(d1, d2);
        let binormal = b.map(|x| x / norm3(b));
        let normal = cross3(binormal, tangent);
        let ph = 2.0 * PI * t;
        let (cp, sp) = (0.35 * ph.cos(), 0.35 * ph.sin());
        [0, 1, 2].map(|k| c[k] + cp * normal[k] + sp * binormal[k])
    })
}

/// Torus with strongly graded spacing in both directions plus vertex jitter,
/// so face areas span more than two orders of magnitude.
fn graded_torus() -> TriangleMesh {
    let (nu, nv) = (64, 28);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let grade = |n: usize, strength: f64| -> Vec<f64> {
        (0..n)
            .map(|k| {
                let x = k as f64 / n as f64;
                x + strength * (2.0 * PI * x).sin() / (2.0 * PI)
            })
            .collect()
    };
    let s = grade(nu, 0.85);
    let t = grade(nv, 0.6);
    let mut mesh = sample(nu, nv, &s, &t, |s, t| {
        let (th, ph) = (2.0 * PI * s, 2.0 * PI * t);
        let rr = 3.0 + ph.cos();
        [rr * th.cos(), rr * th.sin(), ph.sin()]
    });
    for j in 0..nv {
        for i in 0..nu {
            let ds = (s[(i + 1) % nu] + if i + 1 == nu { 1.0 } else { 0.0 }) - s[i];
            let dt = (t[(j + 1) % nv] + if j + 1 == nv { 1.0 } else { 0.0 }) - t[j];
            let (a, b): (f64, f64) = (rng.gen_range(-0.2..0.2), rng.gen_range(-0.2..0.2));
            let (th, ph) = (2.0 * PI * (s[i] + a * ds), 2.0 * PI * (t[j] + b * dt));
            let rr = 3.0 + ph.cos();
            mesh.vertices[j * nu + i] = [rr * th.cos(), rr * th.sin(), ph.sin()];
        }
    }
    mesh
}

fn main() {
    let dir = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "crates/core/tests/data".into()),
    );
    std::fs::create_dir_all(&dir).expect("create output directory");
    for (name, mesh) in [
        ("bumpy_torus", bumpy_torus()),
        ("trefoil_tube", trefoil_tube()),
        ("graded_torus", graded_torus()),
    ] {
        let areas = mesh.face_areas();
        let (lo, hi) = areas.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &a| {
            (lo.min(a), hi.max(a))
        });
        let path = dir.join(format!("{name}.obj"));
        save_mesh(&mesh, &path, MeshFormat::Obj, None).expect("write mesh");
        println!(
            "{}: {} vertices, {} faces, area ratio {:.1}",
            path.display(),
            mesh.num_vertices(),
            mesh.num_faces(),
            hi / lo
        );
    }
}
