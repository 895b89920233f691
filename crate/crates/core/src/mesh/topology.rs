use std::collections::HashMap;

use crate::{Error, Result};

/// Undirected edges of a face list with their incident faces.
///
/// Edge ids follow the lexicographic order of `(min, max)` vertex pairs, so
/// they depend only on the face list.
#[derive(Debug, Clone)]
pub struct EdgeTopology {
    edges: Vec<[usize; 2]>,
    edge_faces: Vec<Vec<usize>>,
    index: HashMap<(usize, usize), usize>,
    half_edges: HashMap<(usize, usize), usize>,
}

impl EdgeTopology {
    pub fn build(num_vertices: usize, faces: &[[usize; 3]]) -> Result<Self> {
        let mut raw: Vec<((usize, usize), usize)> = Vec::with_capacity(3 * faces.len());
        let mut half_edges = HashMap::with_capacity(3 * faces.len());
        let mut misoriented = None;
        for (fi, f) in faces.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                debug_assert!(a < num_vertices && b < num_vertices);
                raw.push(((a.min(b), a.max(b)), fi));
                if half_edges.insert((a, b), fi).is_some() && misoriented.is_none() {
                    misoriented = Some((a, b));
                }
            }
        }
        raw.sort_unstable();
        let mut edges = Vec::new();
        let mut edge_faces: Vec<Vec<usize>> = Vec::new();
        for (key, f) in raw {
            if edges.last() != Some(&[key.0, key.1]) {
                edges.push([key.0, key.1]);
                edge_faces.push(Vec::with_capacity(2));
            }
            edge_faces.last_mut().unwrap().push(f);
        }
        for (e, fs) in edge_faces.iter().enumerate() {
            if fs.len() > 2 {
                return Err(Error::NonManifoldEdge {
                    edge: e,
                    a: edges[e][0],
                    b: edges[e][1],
                    count: fs.len(),
                });
            }
        }
        if let Some((a, b)) = misoriented {
            return Err(Error::InvalidMesh(format!(
                "inconsistent face orientation at edge ({a}, {b})"
            )));
        }
        let index = edges
            .iter()
            .enumerate()
            .map(|(i, e)| ((e[0], e[1]), i))
            .collect();
        Ok(Self {
            edges,
            edge_faces,
            index,
            half_edges,
        })
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn edge_faces(&self, e: usize) -> &[usize] {
        &self.edge_faces[e]
    }

    pub fn edge_id(&self, a: usize, b: usize) -> Option<usize> {
        self.index.get(&(a.min(b), a.max(b))).copied()
    }

    /// Face that contains the directed edge `a → b` in its winding.
    pub fn face_of_half_edge(&self, a: usize, b: usize) -> Option<usize> {
        self.half_edges.get(&(a, b)).copied()
    }

    pub fn boundary_edges(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.edges.len()).filter(|&e| self.edge_faces[e].len() == 1)
    }

    pub fn require_closed(&self) -> Result<()> {
        match self.boundary_edges().next() {
            Some(e) => Err(Error::OpenMesh {
                a: self.edges[e][0],
                b: self.edges[e][1],
            }),
            None => Ok(()),
        }
    }
}

/// Counterclockwise one-rings of every vertex of a closed oriented mesh.
#[derive(Debug, Clone)]
pub struct VertexFans {
    /// `neighbors[v][k]` is the k-th neighbor around `v`.
    pub neighbors: Vec<Vec<usize>>,
    /// `faces[v][k]` is the face spanned by `v`, `neighbors[v][k]` and `neighbors[v][k+1]`.
    pub faces: Vec<Vec<usize>>,
}

impl VertexFans {
    pub fn build(num_vertices: usize, faces: &[[usize; 3]], topo: &EdgeTopology) -> Result<Self> {
        let mut first_face = vec![usize::MAX; num_vertices];
        for (fi, f) in faces.iter().enumerate() {
            for &v in f {
                if first_face[v] == usize::MAX {
                    first_face[v] = fi;
                }
            }
        }
        let mut neighbors = Vec::with_capacity(num_vertices);
        let mut fan_faces = Vec::with_capacity(num_vertices);
        for v in 0..num_vertices {
            let start = first_face[v];
            if start == usize::MAX {
                return Err(Error::InvalidMesh(format!("vertex {v} is isolated")));
            }
            let mut nbrs = Vec::new();
            let mut fs = Vec::new();
            let mut f = start;
            loop {
                let face = faces[f];
                let k = face.iter().position(|&x| x == v).unwrap();
                let b = face[(k + 1) % 3];
                let c = face[(k + 2) % 3];
                nbrs.push(b);
                fs.push(f);
                f = topo.face_of_half_edge(v, c).ok_or_else(|| {
                    Error::InvalidMesh(format!("vertex {v} has an open one-ring"))
                })?;
                if f == start {
                    break;
                }
                if fs.len() > faces.len() {
                    return Err(Error::InvalidMesh(format!("vertex {v} is non-manifold")));
                }
            }
            neighbors.push(nbrs);
            fan_faces.push(fs);
        }
        // A single fan per vertex must account for every incident face.
        let mut incidence = vec![0usize; num_vertices];
        for f in faces {
            for &v in f {
                incidence[v] += 1;
            }
        }
        if let Some(v) = (0..num_vertices).find(|&v| incidence[v] != fan_faces[v].len()) {
            return Err(Error::InvalidMesh(format!("vertex {v} is non-manifold")));
        }
        Ok(Self {
            neighbors,
            faces: fan_faces,
        })
    }
}
