use std::collections::BTreeMap;

use super::boundary::half_edges_by_edge;
use super::{compute_face_normals, Mesh};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeshReport {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub face_count: usize,
    /// V - E + F
    pub euler_characteristic: i64,
    /// Every edge in at most two faces and every vertex star a disk or half-disk.
    pub is_manifold: bool,
    /// Faces sharing an edge traverse it in opposite directions.
    pub is_consistently_oriented: bool,
    pub boundary_edge_count: usize,
    pub degenerate_face_count: usize,
}

impl MeshReport {
    pub fn is_watertight(&self) -> bool {
        self.boundary_edge_count == 0
    }
}

pub fn validate_mesh(mesh: &Mesh) -> MeshReport {
    let edges = half_edges_by_edge(mesh);
    let mut edge_manifold = true;
    let mut oriented = true;
    let mut boundary = 0;
    for halves in edges.values() {
        match halves.len() {
            1 => boundary += 1,
            2 => oriented &= halves[0].0 != halves[1].0,
            _ => edge_manifold = false,
        }
    }

    let degenerate = compute_face_normals(mesh)
        .iter()
        .filter(|n| n.degenerate)
        .count();

    let v = mesh.vertex_count() as i64;
    let e = edges.len() as i64;
    let f = mesh.face_count() as i64;
    MeshReport {
        vertex_count: mesh.vertex_count(),
        edge_count: edges.len(),
        face_count: mesh.face_count(),
        euler_characteristic: v - e + f,
        is_manifold: edge_manifold && stars_are_disks(mesh),
        is_consistently_oriented: oriented && edge_manifold,
        boundary_edge_count: boundary,
        degenerate_face_count: degenerate,
    }
}

/// The link of each referenced vertex must be a single path or a single cycle.
fn stars_are_disks(mesh: &Mesh) -> bool {
    let mut links: Vec<Vec<(usize, usize)>> = vec![Vec::new(); mesh.vertex_count()];
    for face in &mesh.faces {
        for k in 0..3 {
            let (a, b) = (face[(k + 1) % 3], face[(k + 2) % 3]);
            links[face[k]].push((a.min(b), a.max(b)));
        }
    }
    links
        .iter()
        .all(|link| link.is_empty() || link_is_path_or_cycle(link))
}

fn link_is_path_or_cycle(link: &[(usize, usize)]) -> bool {
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in link {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    if adj.values().any(|n| n.len() > 2) {
        return false;
    }
    let ends = adj.values().filter(|n| n.len() == 1).count();
    if ends != 0 && ends != 2 {
        return false;
    }
    // connectivity
    let start = *adj.keys().next().unwrap();
    let mut seen = std::collections::BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &w in &adj[&v] {
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.len() == adj.len()
}
