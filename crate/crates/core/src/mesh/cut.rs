//! Cutting a genus-one mesh into a topological disk.
//!
//! A [`CutGraph`] is a pair of simple loops through a common base vertex that
//! cross transversally there and nowhere else. Cutting along both loops turns
//! the torus into a quadrilateral whose four sides are copies of the loops:
//! bottom and top copies of `loop_a`, left and right copies of `loop_b`, and
//! four copies of the base vertex at the corners.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use super::{euler_genus, EdgeTopology, TorusGrid, TriangleMesh, VertexFans};
use crate::geom::{dist3, Point2};
use crate::{Error, Result};

/// Two loops through `base_vertex`. Each loop lists its vertices starting at
/// the base, without repeating it at the end.
///
/// At the base the counterclockwise order of the loop edges is: outgoing
/// `loop_a`, outgoing `loop_b`, incoming `loop_a`, incoming `loop_b`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CutGraph {
    pub loop_a: Vec<usize>,
    pub loop_b: Vec<usize>,
    pub base_vertex: usize,
}

/// How the vertices of a cut mesh relate to the closed mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct SeamCorrespondence {
    /// `(left, right)` copies of every vertex of `loop_b`, bottom to top,
    /// including the corner pairs `(BL, BR)` and `(TL, TR)`.
    pub pairs_lr: Vec<(usize, usize)>,
    /// `(bottom, top)` copies of every vertex of `loop_a`, left to right,
    /// including the corner pairs `(BL, TL)` and `(BR, TR)`.
    pub pairs_tb: Vec<(usize, usize)>,
    /// Copies of the base vertex: bottom-left, bottom-right, top-right, top-left.
    pub corner_ids: [usize; 4],
    /// Original vertex of every cut-mesh vertex.
    pub origin: Vec<usize>,
    /// Lattice offset of every cut-mesh vertex, in units of the right and top seam translations.
    pub lattice: Vec<[i32; 2]>,
}

impl SeamCorrespondence {
    /// Number of vertices of the uncut mesh; these keep their ids in the cut mesh.
    pub fn num_original(&self) -> usize {
        self.origin.len() - (self.pairs_lr.len() + self.pairs_tb.len() - 1)
    }

    /// Planar translation of every cut-mesh vertex relative to its original copy.
    pub fn offsets(&self, shift_lr: Point2, shift_tb: Point2) -> Vec<Point2> {
        self.lattice
            .iter()
            .map(|&[i, j]| {
                let (i, j) = (i as f64, j as f64);
                [
                    i * shift_lr[0] + j * shift_tb[0],
                    i * shift_lr[1] + j * shift_tb[1],
                ]
            })
            .collect()
    }
}

impl CutGraph {
    /// The standard cut of a generated grid torus: the row and the column
    /// through grid vertex `(i0, j0)`, both traversed in increasing index.
    pub fn torus_grid(grid: &TorusGrid, i0: usize, j0: usize) -> Self {
        let loop_a = (0..grid.nu).map(|k| grid.index(i0 + k, j0)).collect();
        let loop_b = (0..grid.nv).map(|k| grid.index(i0, j0 + k)).collect();
        Self {
            loop_a,
            loop_b,
            base_vertex: grid.index(i0, j0),
        }
    }

    /// Checks that both loops are simple edge cycles through the base that meet
    /// only there and cross transversally. Reverses `loop_b` if needed so the
    /// orientation convention at the base holds.
    pub fn normalize(&mut self, mesh: &TriangleMesh) -> Result<()> {
        let topo = mesh.check_closed_manifold()?;
        let fans = VertexFans::build(mesh.num_vertices(), &mesh.faces, &topo)?;
        self.normalize_with(mesh, &topo, &fans)
    }

    fn normalize_with(
        &mut self,
        mesh: &TriangleMesh,
        topo: &EdgeTopology,
        fans: &VertexFans,
    ) -> Result<()> {
        let base = self.base_vertex;
        for (name, lp) in [("loop_a", &self.loop_a), ("loop_b", &self.loop_b)] {
            if lp.len() < 3 {
                return Err(Error::InvalidCut(format!(
                    "{name} has fewer than 3 vertices"
                )));
            }
            if lp[0] != base {
                return Err(Error::InvalidCut(format!(
                    "{name} does not start at the base"
                )));
            }
            let mut seen = HashSet::with_capacity(lp.len());
            for (k, &v) in lp.iter().enumerate() {
                if v >= mesh.num_vertices() {
                    return Err(Error::InvalidCut(format!("{name} vertex {v} out of range")));
                }
                if !seen.insert(v) {
                    return Err(Error::InvalidCut(format!("{name} visits vertex {v} twice")));
                }
                let w = lp[(k + 1) % lp.len()];
                if topo.edge_id(v, w).is_none() {
                    return Err(Error::InvalidCut(format!(
                        "{name} step {v} -> {w} is not a mesh edge"
                    )));
                }
            }
        }
        let on_a: HashSet<usize> = self.loop_a.iter().copied().collect();
        if let Some(&v) = self.loop_b[1..].iter().find(|v| on_a.contains(v)) {
            return Err(Error::InvalidCut(format!(
                "loops meet at vertex {v} besides the base"
            )));
        }

        let ring = &fans.neighbors[base];
        let pos = |v: usize| {
            ring.iter()
                .position(|&x| x == v)
                .expect("loop neighbour in fan")
        };
        let n = ring.len();
        let a_out = pos(self.loop_a[1]);
        let a_in = pos(*self.loop_a.last().unwrap());
        let b_out = pos(self.loop_b[1]);
        let b_in = pos(*self.loop_b.last().unwrap());
        // counterclockwise angular position relative to a_out
        let rel = |p: usize| (p + n - a_out) % n;
        let (ra, rb_out, rb_in) = (rel(a_in), rel(b_out), rel(b_in));
        let b_out_first = rb_out < ra;
        let b_in_first = rb_in < ra;
        if b_out_first == b_in_first {
            return Err(Error::InvalidCut(
                "loops touch at the base without crossing".into(),
            ));
        }
        if !b_out_first {
            self.loop_b[1..].reverse();
        }
        Ok(())
    }

    pub fn len_a(&self) -> usize {
        self.loop_a.len()
    }

    pub fn len_b(&self) -> usize {
        self.loop_b.len()
    }

    fn directed_edges(lp: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..lp.len()).map(move |k| (lp[k], lp[(k + 1) % lp.len()]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HeapItem {
    dist: f64,
    vertex: usize,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Multi-source Dijkstra over mesh edges weighted by 3D length. Vertices with
/// `blocked[v]` set are never entered.
fn dijkstra(
    mesh: &TriangleMesh,
    fans: &VertexFans,
    sources: &[(usize, f64)],
    blocked: &[bool],
) -> (Vec<f64>, Vec<usize>) {
    let n = mesh.num_vertices();
    let mut dist = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    for &(s, d) in sources {
        if d < dist[s] {
            dist[s] = d;
            heap.push(HeapItem { dist: d, vertex: s });
        }
    }
    while let Some(HeapItem { dist: d, vertex: v }) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        for &w in &fans.neighbors[v] {
            if blocked[w] {
                continue;
            }
            let nd = d + dist3(mesh.vertices[v], mesh.vertices[w]);
            if nd < dist[w] {
                dist[w] = nd;
                parent[w] = v;
                heap.push(HeapItem {
                    dist: nd,
                    vertex: w,
                });
            }
        }
    }
    (dist, parent)
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// True when removing the edges of `cycle` leaves the faces connected.
fn is_non_separating(mesh: &TriangleMesh, topo: &EdgeTopology, cycle: &[usize]) -> bool {
    let cut: HashSet<usize> = CutGraph::directed_edges(cycle)
        .filter_map(|(a, b)| topo.edge_id(a, b))
        .collect();
    let mut ds = DisjointSet::new(mesh.num_faces());
    for e in 0..topo.num_edges() {
        if cut.contains(&e) {
            continue;
        }
        if let [f, g] = topo.edge_faces(e) {
            ds.union(*f, *g);
        }
    }
    let root = ds.find(0);
    (1..mesh.num_faces()).all(|f| ds.find(f) == root)
}

fn loop_length(mesh: &TriangleMesh, lp: &[usize]) -> f64 {
    CutGraph::directed_edges(lp)
        .map(|(a, b)| dist3(mesh.vertices[a], mesh.vertices[b]))
        .sum()
}

/// Computes a cut graph for a closed genus-one mesh.
///
/// The first loop is the shortest non-separating cycle through the base made
/// of two shortest paths and one edge. The second loop is the shortest path
/// that leaves the base on one side of the first loop and returns on the
/// other without touching it elsewhere. The longer of the two (in 3D length)
/// becomes `loop_a`. The base defaults to vertex 0.
pub fn compute_cut_graph(mesh: &TriangleMesh, base: Option<usize>) -> Result<CutGraph> {
    let genus = euler_genus(mesh)?;
    if genus != 1 {
        return Err(Error::Genus { found: genus });
    }
    let topo = mesh.edge_topology()?;
    let fans = VertexFans::build(mesh.num_vertices(), &mesh.faces, &topo)?;
    let base = base.unwrap_or(0);
    if base >= mesh.num_vertices() {
        return Err(Error::InvalidParameter(format!(
            "base vertex {base} out of range"
        )));
    }
    let n = mesh.num_vertices();

    // Loop 1.
    let (dist, parent) = dijkstra(mesh, &fans, &[(base, 0.0)], &vec![false; n]);
    let mut branch = vec![usize::MAX; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| dist[a].total_cmp(&dist[b]));
    for &v in &order {
        if v == base {
            branch[v] = base;
        } else if parent[v] == base {
            branch[v] = v;
        } else {
            branch[v] = branch[parent[v]];
        }
    }
    let mut candidates: Vec<(f64, usize)> = topo
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, &[u, w])| parent[u] != w && parent[w] != u && branch[u] != branch[w])
        .map(|(e, &[u, w])| {
            let len = dist[u] + dist[w] + dist3(mesh.vertices[u], mesh.vertices[w]);
            (len, e)
        })
        .collect();
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let path_to_base = |mut v: usize| {
        let mut p = Vec::new();
        while v != base {
            p.push(v);
            v = parent[v];
        }
        p
    };
    let mut loop1 = None;
    for &(_, e) in &candidates {
        let [u, w] = topo.edges()[e];
        let mut cycle = vec![base];
        let mut up = path_to_base(u);
        up.reverse();
        cycle.extend(up);
        cycle.extend(path_to_base(w));
        if is_non_separating(mesh, &topo, &cycle) {
            loop1 = Some(cycle);
            break;
        }
    }
    let loop1 = loop1.ok_or_else(|| Error::InvalidCut("no non-separating loop found".into()))?;

    // Loop 2: split the base fan into the two sides of loop 1.
    let ring = &fans.neighbors[base];
    let m = ring.len();
    let pos = |v: usize| ring.iter().position(|&x| x == v).unwrap();
    let p_out = pos(loop1[1]);
    let p_in = pos(*loop1.last().unwrap());
    let mut side1 = Vec::new();
    let mut side2 = HashSet::new();
    let mut k = (p_out + 1) % m;
    while k != p_in {
        side1.push(ring[k]);
        k = (k + 1) % m;
    }
    k = (p_in + 1) % m;
    while k != p_out {
        side2.insert(ring[k]);
        k = (k + 1) % m;
    }
    let mut blocked = vec![false; n];
    for &v in &loop1 {
        blocked[v] = true;
    }
    let sources: Vec<(usize, f64)> = side1
        .iter()
        .filter(|&&s| !blocked[s])
        .map(|&s| (s, dist3(mesh.vertices[base], mesh.vertices[s])))
        .collect();
    let (dist2, parent2) = dijkstra(mesh, &fans, &sources, &blocked);
    let target = side2
        .iter()
        .copied()
        .filter(|&t| !blocked[t] && dist2[t].is_finite())
        .min_by(|&a, &b| {
            let da = dist2[a] + dist3(mesh.vertices[a], mesh.vertices[base]);
            let db = dist2[b] + dist3(mesh.vertices[b], mesh.vertices[base]);
            da.total_cmp(&db).then(a.cmp(&b))
        })
        .ok_or_else(|| Error::InvalidCut("no loop crossing the first loop".into()))?;
    let mut loop2 = Vec::new();
    let mut v = target;
    while v != usize::MAX {
        loop2.push(v);
        v = parent2[v];
    }
    loop2.push(base);
    loop2.reverse();

    let (loop_a, loop_b) = if loop_length(mesh, &loop1) >= loop_length(mesh, &loop2) {
        (loop1, loop2)
    } else {
        (loop2, loop1)
    };
    let mut cut = CutGraph {
        loop_a,
        loop_b,
        base_vertex: base,
    };
    cut.normalize_with(mesh, &topo, &fans)?;
    Ok(cut)
}

/// Cuts `mesh` along both loops of `cut`.
///
/// Vertices off the cut and the bottom copies of `loop_a`, the left copies of
/// `loop_b` and the bottom-left copy of the base keep their ids. The remaining
/// copies are appended: top copies of `loop_a`, then right copies of `loop_b`,
/// then the bottom-right, top-right and top-left corners. The cut mesh has
/// `|V| + |loop_a| + |loop_b| + 1` vertices and the same faces in the same order.
pub fn cut_along(
    mesh: &TriangleMesh,
    cut: &CutGraph,
) -> Result<(TriangleMesh, SeamCorrespondence)> {
    let topo = mesh.check_closed_manifold()?;
    let fans = VertexFans::build(mesh.num_vertices(), &mesh.faces, &topo)?;
    let mut cut = cut.clone();
    cut.normalize_with(mesh, &topo, &fans)?;

    let cut_edges: HashSet<usize> = CutGraph::directed_edges(&cut.loop_a)
        .chain(CutGraph::directed_edges(&cut.loop_b))
        .map(|(a, b)| topo.edge_id(a, b).unwrap())
        .collect();

    let nf = mesh.num_faces();
    let corner = |f: usize, v: usize| 3 * f + mesh.faces[f].iter().position(|&x| x == v).unwrap();
    let mut ds = DisjointSet::new(3 * nf);
    for e in 0..topo.num_edges() {
        if cut_edges.contains(&e) {
            continue;
        }
        let [a, b] = topo.edges()[e];
        if let [f, g] = topo.edge_faces(e) {
            ds.union(corner(*f, a), corner(*g, a));
            ds.union(corner(*f, b), corner(*g, b));
        }
    }

    let n = mesh.num_vertices();
    let (la, lb) = (cut.loop_a.len(), cut.loop_b.len());
    let total = n + la + lb + 1;
    let mut origin: Vec<usize> = (0..n).collect();
    let mut lattice = vec![[0i32, 0]; n];
    // corner-group root -> new vertex id
    let mut group_id = std::collections::HashMap::new();
    let group_of_half_edge = |ds: &mut DisjointSet, a: usize, b: usize| -> usize {
        let f = topo.face_of_half_edge(a, b).unwrap();
        ds.find(corner(f, a))
    };

    let mut pairs_tb = Vec::with_capacity(la + 1);
    let mut pairs_lr = Vec::with_capacity(lb + 1);
    let base = cut.base_vertex;

    // Groups at the base: the face to the left of each outgoing or incoming loop edge.
    let g_bl = group_of_half_edge(&mut ds, base, cut.loop_a[1]);
    let g_br = group_of_half_edge(&mut ds, base, cut.loop_b[1]);
    let g_tr = group_of_half_edge(&mut ds, base, *cut.loop_a.last().unwrap());
    let g_tl = group_of_half_edge(&mut ds, base, *cut.loop_b.last().unwrap());
    if HashSet::from([g_bl, g_br, g_tr, g_tl]).len() != 4 {
        return Err(Error::InvalidCut(
            "base vertex does not split into four corners".into(),
        ));
    }

    let push =
        |origin_v: usize, lat: [i32; 2], origin: &mut Vec<usize>, lattice: &mut Vec<[i32; 2]>| {
            origin.push(origin_v);
            lattice.push(lat);
            origin.len() - 1
        };

    group_id.insert(g_bl, base);
    let mut tops = Vec::with_capacity(la);
    for k in 1..la {
        let x = cut.loop_a[k];
        let next = cut.loop_a[(k + 1) % la];
        let bottom = group_of_half_edge(&mut ds, x, next);
        group_id.insert(bottom, x);
        let top_id = push(x, [0, 1], &mut origin, &mut lattice);
        tops.push((x, top_id));
    }
    let mut rights = Vec::with_capacity(lb);
    for k in 1..lb {
        let x = cut.loop_b[k];
        let next = cut.loop_b[(k + 1) % lb];
        let right = group_of_half_edge(&mut ds, x, next);
        let right_id = push(x, [1, 0], &mut origin, &mut lattice);
        group_id.insert(right, right_id);
        rights.push((x, right_id));
    }
    let br = push(base, [1, 0], &mut origin, &mut lattice);
    let tr = push(base, [1, 1], &mut origin, &mut lattice);
    let tl = push(base, [0, 1], &mut origin, &mut lattice);
    group_id.insert(g_br, br);
    group_id.insert(g_tr, tr);
    group_id.insert(g_tl, tl);
    debug_assert_eq!(origin.len(), total);

    let on_a: HashSet<usize> = cut.loop_a[1..].iter().copied().collect();
    let top_of: std::collections::HashMap<usize, usize> = tops.iter().copied().collect();
    let mut faces = Vec::with_capacity(nf);
    for (f, face) in mesh.faces.iter().enumerate() {
        let mut out = [0usize; 3];
        for k in 0..3 {
            let v = face[k];
            let root = ds.find(3 * f + k);
            // unlisted groups are top copies of loop_a, left copies of loop_b
            // and vertices off the cut
            out[k] = match group_id.get(&root) {
                Some(&id) => id,
                None if on_a.contains(&v) => top_of[&v],
                None => v,
            };
        }
        faces.push(out);
    }

    // Every vertex copy must be a single connected wedge.
    let mut seen_root: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    for (f, face) in faces.iter().enumerate() {
        for k in 0..3 {
            let root = ds.find(3 * f + k);
            if let Some(&prev) = seen_root.get(&face[k]) {
                if prev != root {
                    return Err(Error::InvalidCut(format!(
                        "vertex copy {} spans several wedges",
                        face[k]
                    )));
                }
            } else {
                seen_root.insert(face[k], root);
            }
        }
    }
    if seen_root.len() != total {
        return Err(Error::InvalidCut(format!(
            "cut produced {} vertex copies, expected {total}",
            seen_root.len()
        )));
    }

    pairs_tb.push((base, tl));
    for &(x, top) in &tops {
        pairs_tb.push((x, top));
    }
    pairs_tb.push((br, tr));
    pairs_lr.push((base, br));
    for &(x, right) in &rights {
        pairs_lr.push((x, right));
    }
    pairs_lr.push((tl, tr));

    let vertices = origin.iter().map(|&v| mesh.vertices[v]).collect();
    let mut cut_mesh = TriangleMesh::new(vertices, faces)?;
    cut_mesh.population = mesh.population.clone();
    let cut_topo = cut_mesh.edge_topology()?;
    let chi = total as i64 - cut_topo.num_edges() as i64 + nf as i64;
    if chi != 1 {
        return Err(Error::InvalidCut(format!(
            "cut mesh has Euler characteristic {chi}, expected 1"
        )));
    }
    Ok((
        cut_mesh,
        SeamCorrespondence {
            pairs_lr,
            pairs_tb,
            corner_ids: [base, br, tr, tl],
            origin,
            lattice,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generate_torus_mesh;
    use crate::mesh::tests::tetrahedron;

    #[test]
    fn grid_cut_counts() {
        let (m, g) = generate_torus_mesh(3.0, 1.0, 4, 3).unwrap();
        let cut = CutGraph::torus_grid(&g, 0, 0);
        assert_eq!(cut.len_a(), 4);
        assert_eq!(cut.len_b(), 3);
        let (cm, seams) = cut_along(&m, &cut).unwrap();
        assert_eq!(cm.num_vertices(), 20);
        assert_eq!(cm.num_faces(), 24);
        let topo = cm.edge_topology().unwrap();
        assert_eq!(20 - topo.num_edges() as i64 + 24, 1);
        assert_eq!(topo.boundary_edges().count(), 2 * (4 + 3));
        assert_eq!(seams.num_original(), 12);
        assert_eq!(seams.pairs_tb.len(), 5);
        assert_eq!(seams.pairs_lr.len(), 4);
        assert_eq!(seams.corner_ids[0], 0);
    }

    #[test]
    fn regluing_recovers_the_mesh() {
        let (m, g) = generate_torus_mesh(3.0, 1.0, 9, 5).unwrap();
        let cut = CutGraph::torus_grid(&g, 3, 2);
        let (cm, seams) = cut_along(&m, &cut).unwrap();
        let glued: Vec<[usize; 3]> = cm
            .faces
            .iter()
            .map(|f| f.map(|v| seams.origin[v]))
            .collect();
        assert_eq!(glued, m.faces);
        for &(a, b) in seams.pairs_lr.iter().chain(&seams.pairs_tb) {
            assert_eq!(seams.origin[a], seams.origin[b]);
            assert_ne!(a, b);
        }
    }

    #[test]
    fn grid_copies_have_expected_lattice_offsets() {
        let (m, g) = generate_torus_mesh(3.0, 1.0, 6, 4).unwrap();
        let cut = CutGraph::torus_grid(&g, 0, 0);
        let (cm, seams) = cut_along(&m, &cut).unwrap();
        let (w, h) = (g.spec.width(), g.spec.height());
        let offsets = seams.offsets([w, 0.0], [0.0, h]);
        let pos: Vec<Point2> = (0..cm.num_vertices())
            .map(|c| {
                let p = g.uv[seams.origin[c]];
                [p[0] + offsets[c][0], p[1] + offsets[c][1]]
            })
            .collect();
        for f in &cm.faces {
            let [a, b, c] = f.map(|v| pos[v]);
            assert!(crate::geom::signed_area2(a, b, c) > 0.0);
        }
    }

    #[test]
    fn computed_cut_is_valid() {
        for (nu, nv) in [(4, 3), (12, 6), (30, 10)] {
            let (m, _) = generate_torus_mesh(3.0, 1.0, nu, nv).unwrap();
            let cut = compute_cut_graph(&m, None).unwrap();
            let (cm, seams) = cut_along(&m, &cut).unwrap();
            assert_eq!(
                cm.num_vertices(),
                m.num_vertices() + cut.len_a() + cut.len_b() + 1
            );
            assert_eq!(seams.num_original(), m.num_vertices());
            assert!(loop_length(&m, &cut.loop_a) >= loop_length(&m, &cut.loop_b));
        }
    }

    #[test]
    fn computed_cut_from_other_base() {
        let (m, _) = generate_torus_mesh(3.0, 1.0, 16, 8).unwrap();
        let cut = compute_cut_graph(&m, Some(37)).unwrap();
        assert_eq!(cut.base_vertex, 37);
        assert!(cut_along(&m, &cut).is_ok());
    }

    #[test]
    fn reversed_loop_b_is_normalized() {
        let (m, g) = generate_torus_mesh(3.0, 1.0, 6, 4).unwrap();
        let mut cut = CutGraph::torus_grid(&g, 0, 0);
        let expected = cut.clone();
        cut.loop_b[1..].reverse();
        cut.normalize(&m).unwrap();
        assert_eq!(cut, expected);
    }

    #[test]
    fn invalid_cuts_rejected() {
        let (m, g) = generate_torus_mesh(3.0, 1.0, 6, 4).unwrap();
        let mut cut = CutGraph::torus_grid(&g, 0, 0);
        cut.loop_b = cut.loop_a.clone();
        assert!(cut_along(&m, &cut).is_err());
        let mut cut = CutGraph::torus_grid(&g, 0, 0);
        cut.loop_a.swap(1, 2);
        assert!(matches!(cut_along(&m, &cut), Err(Error::InvalidCut(_))));
    }

    #[test]
    fn sphere_has_no_cut() {
        assert!(matches!(
            compute_cut_graph(&tetrahedron(), None),
            Err(Error::Genus { found: 0 })
        ));
    }
}
