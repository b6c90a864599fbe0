use std::collections::BTreeMap;

use super::{Mesh, MeshError};

/// Closed cycle of boundary vertices.
///
/// Consecutive entries `(v[i], v[i+1])` are the missing twins of boundary
/// half-edges, so a triangle `(v[a], v[b], v[c])` with `a < b < c` has the
/// same orientation as the surrounding surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryLoop {
    pub vertex_indices: Vec<usize>,
}

impl BoundaryLoop {
    pub fn len(&self) -> usize {
        self.vertex_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertex_indices.is_empty()
    }

    /// Directed loop edges, closing back to the first vertex.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.vertex_indices.len();
        (0..n).map(move |i| (self.vertex_indices[i], self.vertex_indices[(i + 1) % n]))
    }
}

/// Directed half-edges grouped by undirected edge.
pub(crate) fn half_edges_by_edge(
    mesh: &Mesh,
) -> BTreeMap<(usize, usize), Vec<(usize, usize, usize)>> {
    let mut map: BTreeMap<(usize, usize), Vec<(usize, usize, usize)>> = BTreeMap::new();
    for (f, face) in mesh.faces.iter().enumerate() {
        for k in 0..3 {
            let (a, b) = (face[k], face[(k + 1) % 3]);
            map.entry((a.min(b), a.max(b))).or_default().push((a, b, f));
        }
    }
    map
}

pub fn find_boundary_loops(mesh: &Mesh) -> Result<Vec<BoundaryLoop>, MeshError> {
    let mut next: BTreeMap<usize, usize> = BTreeMap::new();
    for (&(lo, hi), halves) in &half_edges_by_edge(mesh) {
        match halves.as_slice() {
            [(a, b, _)] => {
                if next.insert(*b, *a).is_some() {
                    return Err(MeshError::NonManifoldVertex(*b));
                }
            }
            [(a0, _, _), (a1, _, _)] if a0 != a1 => {}
            _ => return Err(MeshError::NonManifoldEdge(lo, hi)),
        }
    }

    let mut loops = Vec::new();
    let mut visited = std::collections::BTreeSet::new();
    for &start in next.keys() {
        if visited.contains(&start) {
            continue;
        }
        let mut cycle = vec![start];
        visited.insert(start);
        let mut current = start;
        loop {
            let &succ = next
                .get(&current)
                .ok_or(MeshError::NonManifoldVertex(current))?;
            if succ == start {
                break;
            }
            if !visited.insert(succ) {
                return Err(MeshError::NonManifoldVertex(succ));
            }
            cycle.push(succ);
            current = succ;
        }
        loops.push(BoundaryLoop {
            vertex_indices: cycle,
        });
    }
    Ok(loops)
}
