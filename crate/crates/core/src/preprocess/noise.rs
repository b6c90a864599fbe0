use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::mesh::{compute_face_normals, mean_edge_length, vertex_normals, Mesh};

use super::PreprocessError;

/// Displaces each vertex along its area-weighted unit normal by a zero-mean
/// Gaussian sample with standard deviation `sigma_fraction * mean_edge_length`.
///
/// One sample is drawn per vertex in index order, so the result is fixed by
/// the seed. Vertices without a defined normal are left in place.
pub fn add_gaussian_noise(
    mesh: &Mesh,
    sigma_fraction: f64,
    seed: u64,
) -> Result<Mesh, PreprocessError> {
    if !(sigma_fraction >= 0.0) || !sigma_fraction.is_finite() {
        return Err(PreprocessError::InvalidParameter(format!(
            "noise level {sigma_fraction} must be finite and non-negative"
        )));
    }
    if sigma_fraction == 0.0 {
        return Ok(mesh.clone());
    }
    if compute_face_normals(mesh).iter().all(|n| n.degenerate) {
        return Err(PreprocessError::DegenerateNormals);
    }
    let sigma = sigma_fraction * mean_edge_length(mesh)?;
    let normal =
        Normal::new(0.0, sigma).map_err(|e| PreprocessError::InvalidParameter(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertices = mesh
        .vertices
        .iter()
        .zip(vertex_normals(mesh))
        .map(|(&p, n)| {
            let offset = normal.sample(&mut rng);
            match n {
                Some(n) => p + n * offset,
                None => p,
            }
        })
        .collect();
    Ok(mesh.with_vertices(vertices))
}
