//! Unsupervised restoration of a single triangle mesh.
//!
//! A small graph convolutional network maps a fixed per-vertex random input
//! to vertex displacements from a Laplacian-smoothed copy of the mesh. The
//! network is trained on that one mesh only; its weight sharing acts as the
//! restoration prior for denoising and hole completion.

pub mod mesh;
pub mod metrics;
pub mod neural;
pub mod preprocess;
pub mod studies;
pub mod train;

pub use mesh::{Mesh, Vec3};
