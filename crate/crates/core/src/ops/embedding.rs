use std::collections::BTreeMap;

use super::{solve_cg, SparseOperator};
use crate::geom::{sub2, Point2};
use crate::{Error, Result};

/// Weighted quotient-vertex adjacency of a cut mesh, with the lattice
/// translation carried by every edge.
///
/// For an edge between cut-mesh copies `c_i` and `c_j`, the planar edge vector
/// is `X[q(c_j)] + offset(c_j) − X[q(c_i)] − offset(c_i)`; `delta` stores
/// `offset(c_j) − offset(c_i)`.
#[derive(Debug, Clone)]
pub struct OffsetAdjacency {
    /// `neighbors[i]` lists `(j, delta_ij, w_ij)` sorted by `j`.
    pub neighbors: Vec<Vec<(usize, Point2, f64)>>,
}

impl OffsetAdjacency {
    /// `weight(f, k)` is the contribution of face `f` to the edge opposite its corner `k`.
    pub fn build(
        faces: &[[usize; 3]],
        origin: &[usize],
        offsets: &[Point2],
        num_quotient: usize,
        weight: impl Fn(usize, usize) -> f64,
    ) -> Self {
        let mut edges: BTreeMap<(usize, usize), (Point2, f64)> = BTreeMap::new();
        for (f, face) in faces.iter().enumerate() {
            for k in 0..3 {
                let (ci, cj) = (face[(k + 1) % 3], face[(k + 2) % 3]);
                let w = weight(f, k);
                let (qi, qj) = (origin[ci], origin[cj]);
                let d = sub2(offsets[cj], offsets[ci]);
                edges.entry((qi, qj)).or_insert((d, 0.0)).1 += w;
                edges.entry((qj, qi)).or_insert(([-d[0], -d[1]], 0.0)).1 += w;
            }
        }
        let mut neighbors = vec![Vec::new(); num_quotient];
        for ((i, j), (d, w)) in edges {
            neighbors[i].push((j, d, w));
        }
        Self { neighbors }
    }

    /// Every face contributes ½ to each of its edges, so closed-mesh edges get weight 1.
    pub fn uniform(faces: &[[usize; 3]], origin: &[usize], offsets: &[Point2], n: usize) -> Self {
        Self::build(faces, origin, offsets, n, |_, _| 0.5)
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }
}

/// Solves the weighted Laplace equation `Σ_j w_ij (X_j + δ_ij − X_i) = 0` for
/// the vertices with `free[i]` set, holding the others at `x`.
///
/// The system is solved in place; `x` keeps the fixed positions and receives
/// the new free positions.
pub fn solve_embedding(adj: &OffsetAdjacency, free: &[bool], x: &mut [Point2]) -> Result<()> {
    let n = adj.len();
    let mut local = vec![usize::MAX; n];
    let mut ids = Vec::new();
    for i in 0..n {
        if free[i] {
            local[i] = ids.len();
            ids.push(i);
        }
    }
    if ids.is_empty() {
        return Ok(());
    }
    if ids.len() == n {
        return Err(Error::InvalidParameter(
            "embedding needs at least one fixed vertex".into(),
        ));
    }
    let m = ids.len();
    let mut t = Vec::new();
    let mut rhs = vec![[0.0, 0.0]; m];
    for (li, &i) in ids.iter().enumerate() {
        let mut diag = 0.0;
        for &(j, d, w) in &adj.neighbors[i] {
            diag += w;
            rhs[li][0] += w * d[0];
            rhs[li][1] += w * d[1];
            if free[j] {
                t.push((li, local[j], -w));
            } else {
                rhs[li][0] += w * x[j][0];
                rhs[li][1] += w * x[j][1];
            }
        }
        t.push((li, li, diag));
    }
    let k = SparseOperator::from_triplets(m, m, t);
    for c in 0..2 {
        let b: Vec<f64> = rhs.iter().map(|r| r[c]).collect();
        let mut sol: Vec<f64> = ids.iter().map(|&i| x[i][c]).collect();
        solve_cg(&k, &b, &mut sol, 1e-13, 50 * m.max(20))?;
        for (li, &i) in ids.iter().enumerate() {
            x[i][c] = sol[li];
        }
    }
    Ok(())
}
