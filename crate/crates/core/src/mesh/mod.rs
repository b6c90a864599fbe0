//! Indexed triangle meshes: storage, OBJ I/O, normals, connectivity.

mod adjacency;
mod boundary;
mod normals;
mod obj;
mod validate;

pub use adjacency::{
    build_normalized_adjacency, unique_edges, vertex_neighbors, SparseMatrix, VertexGraph,
};
pub use boundary::{find_boundary_loops, BoundaryLoop};
pub(crate) use normals::face_normal;
pub use normals::{compute_face_normals, vertex_normals, FaceNormal};
pub use obj::{load_obj, save_obj};
pub use validate::{validate_mesh, MeshReport};

use nalgebra::Vector3;
use thiserror::Error;

pub type Vec3 = Vector3<f64>;

#[derive(Debug, Error, PartialEq)]
pub enum MeshError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("face {face} references vertex {index}, but the mesh has {vertex_count} vertices")]
    IndexOutOfRange {
        face: usize,
        index: usize,
        vertex_count: usize,
    },
    #[error("face {face} repeats vertex {index}")]
    RepeatedIndex { face: usize, index: usize },
    #[error("edge ({0}, {1}) is not manifold")]
    NonManifoldEdge(usize, usize),
    #[error("vertex {0} has more than one boundary fan")]
    NonManifoldVertex(usize),
    #[error("mesh has no edges")]
    NoEdges,
}

/// Indexed triangle mesh. Faces are 0-based vertex triples.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Mesh {
    pub vertices: Vec<Vec3>,
    pub faces: Vec<[usize; 3]>,
}

impl Mesh {
    /// Builds a mesh after checking index bounds and repeated indices.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        let mesh = Self { vertices, faces };
        mesh.check_indices()?;
        Ok(mesh)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn check_indices(&self) -> Result<(), MeshError> {
        let n = self.vertices.len();
        for (f, face) in self.faces.iter().enumerate() {
            for (k, &index) in face.iter().enumerate() {
                if index >= n {
                    return Err(MeshError::IndexOutOfRange {
                        face: f,
                        index,
                        vertex_count: n,
                    });
                }
                if face[(k + 1) % 3] == index {
                    return Err(MeshError::RepeatedIndex { face: f, index });
                }
            }
        }
        Ok(())
    }

    /// Same connectivity with new vertex positions.
    pub fn with_vertices(&self, vertices: Vec<Vec3>) -> Self {
        assert_eq!(vertices.len(), self.vertices.len());
        Self {
            vertices,
            faces: self.faces.clone(),
        }
    }

    pub fn face_positions(&self, face: usize) -> [Vec3; 3] {
        let [i, j, k] = self.faces[face];
        [self.vertices[i], self.vertices[j], self.vertices[k]]
    }
}

/// Arithmetic mean over unique undirected edges.
pub fn mean_edge_length(mesh: &Mesh) -> Result<f64, MeshError> {
    let edges = unique_edges(mesh);
    if edges.is_empty() {
        return Err(MeshError::NoEdges);
    }
    let total: f64 = edges
        .iter()
        .map(|&(a, b)| (mesh.vertices[a] - mesh.vertices[b]).norm())
        .sum();
    Ok(total / edges.len() as f64)
}
