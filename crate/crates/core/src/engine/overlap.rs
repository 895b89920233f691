use crate::ops::{solve_embedding, OffsetAdjacency};
use crate::torus::PeriodicPlanarMesh;
use crate::Result;

/// Fold counts around one call of [`correct_overlaps`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OverlapOutcome {
    pub folds_before: usize,
    pub folds_after: usize,
    /// Rings grown around the folded faces in the successful attempt, 0 if none was needed or none succeeded.
    pub rings: usize,
}

/// Re-embeds the neighbourhood of folded faces with a uniform-weight Tutte system.
///
/// The free region starts as the vertices of folded faces plus one ring and
/// grows by one ring per attempt, up to `max_rings`. Seam copies move with
/// their representative, so the seam translations are untouched. If no attempt
/// removes every fold, the mesh is left unchanged.
pub fn correct_overlaps(mesh: &mut PeriodicPlanarMesh, max_rings: usize) -> Result<OverlapOutcome> {
    let folded: Vec<usize> = (0..mesh.num_faces())
        .filter(|&f| mesh.signed_area(f) <= 0.0)
        .collect();
    let folds_before = folded.len();
    if folds_before == 0 {
        return Ok(OverlapOutcome::default());
    }
    let n = mesh.seams.num_original();
    let adj = OffsetAdjacency::uniform(&mesh.faces, &mesh.seams.origin, &mesh.offsets(), n);
    let original = mesh.quotient_positions();

    let mut free = vec![false; n];
    for &f in &folded {
        for &c in &mesh.faces[f] {
            free[mesh.seams.origin[c]] = true;
        }
    }
    for rings in 1..=max_rings.max(1) {
        let frontier: Vec<usize> = (0..n).filter(|&i| free[i]).collect();
        for i in frontier {
            for &(j, _, _) in &adj.neighbors[i] {
                free[j] = true;
            }
        }
        let mut region = free.clone();
        if region.iter().all(|&b| b) {
            // keep one vertex fixed to remove the translational freedom
            region[0] = false;
        }
        let mut x = original.clone();
        solve_embedding(&adj, &region, &mut x)?;
        mesh.set_quotient_positions(&x);
        let folds_after = mesh.count_folds();
        if folds_after == 0 {
            return Ok(OverlapOutcome {
                folds_before,
                folds_after,
                rings,
            });
        }
        if !region.iter().any(|&b| !b) || region.iter().filter(|&&b| !b).count() <= 1 {
            break;
        }
    }
    mesh.set_quotient_positions(&original);
    Ok(OverlapOutcome {
        folds_before,
        folds_after: folds_before,
        rings: 0,
    })
}
