//! Mesh preparation: smoothing, hole filling, synthetic noise, benchmark shapes.

mod fill;
mod noise;
mod shapes;
mod smooth;

pub use fill::{fill_holes, fill_holes_with, hole_polygon, FillOptions, HolePolygon, VertexMask};
pub use noise::add_gaussian_noise;
pub use shapes::{
    face_in_cap, generate_bumpy_sphere, icosphere, remove_cap, BumpyShape, BumpySphere, CapCut,
};
pub use smooth::{laplacian_smooth, SmoothingConfig};

use thiserror::Error;

use crate::mesh::MeshError;

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("every face is degenerate; vertex normals are undefined")]
    DegenerateNormals,
    #[error("mesh is not manifold")]
    NonManifold,
    #[error("boundary loop of length {0} cannot be filled")]
    LoopTooShort(usize),
}
