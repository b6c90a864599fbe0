use crate::mesh::{vertex_neighbors, Mesh, Vec3};

use super::PreprocessError;

/// Uniform-weight Laplacian smoothing parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothingConfig {
    pub step_size: f64,
    /// Zero iterations leaves the mesh untouched.
    pub iterations: usize,
}

impl SmoothingConfig {
    pub fn new(step_size: f64, iterations: usize) -> Result<Self, PreprocessError> {
        if !(step_size > 0.0 && step_size <= 1.0) {
            return Err(PreprocessError::InvalidParameter(format!(
                "smoothing step size {step_size} outside (0, 1]"
            )));
        }
        Ok(Self {
            step_size,
            iterations,
        })
    }

    pub fn denoising() -> Self {
        Self {
            step_size: 0.5,
            iterations: 30,
        }
    }

    pub fn completion() -> Self {
        Self {
            step_size: 0.5,
            iterations: 10,
        }
    }

    pub fn none() -> Self {
        Self {
            step_size: 0.5,
            iterations: 0,
        }
    }
}

/// Moves every vertex toward its 1-ring centroid by `step_size`, all vertices
/// updated simultaneously each iteration. Boundary vertices use their
/// (boundary-included) ring. Connectivity is untouched.
pub fn laplacian_smooth(mesh: &Mesh, config: &SmoothingConfig) -> Mesh {
    let neighbors = vertex_neighbors(mesh);
    let isolated = neighbors.iter().filter(|n| n.is_empty()).count();
    if isolated > 0 && config.iterations > 0 {
        log::warn!("{isolated} isolated vertices left unmoved by smoothing");
    }
    let mut current = mesh.vertices.clone();
    let mut next = current.clone();
    for _ in 0..config.iterations {
        for (i, ring) in neighbors.iter().enumerate() {
            if ring.is_empty() {
                next[i] = current[i];
                continue;
            }
            let centroid =
                ring.iter().fold(Vec3::zeros(), |acc, &j| acc + current[j]) / ring.len() as f64;
            next[i] = current[i] + (centroid - current[i]) * config.step_size;
        }
        std::mem::swap(&mut current, &mut next);
    }
    mesh.with_vertices(current)
}
