use ndarray::Array2;

use crate::mesh::{vertex_neighbors, Mesh, Vec3};
use crate::preprocess::VertexMask;

use super::TrainError;

pub fn positions_matrix(vertices: &[Vec3]) -> Array2<f64> {
    let mut m = Array2::zeros((vertices.len(), 3));
    for (i, v) in vertices.iter().enumerate() {
        for k in 0..3 {
            m[[i, k]] = v[k];
        }
    }
    m
}

pub fn matrix_positions(m: &Array2<f64>) -> Vec<Vec3> {
    m.rows()
        .into_iter()
        .map(|r| Vec3::new(r[0], r[1], r[2]))
        .collect()
}

fn regularized_norm(x: [f64; 3], eps: f64) -> f64 {
    (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + eps).sqrt()
}

fn check_eps(eps: f64) -> Result<(), TrainError> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(TrainError::Config(format!(
            "epsilon {eps} must be positive"
        )))
    }
}

/// `Σ_mask √(‖(φ − Sφ) − F‖² + ε)`.
pub fn reconstruction_loss(
    original: &[Vec3],
    smoothed: &[Vec3],
    predicted: &Array2<f64>,
    mask: &VertexMask,
    eps: f64,
) -> Result<f64, TrainError> {
    check_eps(eps)?;
    let n = original.len();
    if smoothed.len() != n || predicted.dim() != (n, 3) || mask.len() != n {
        return Err(TrainError::Dimension(format!(
            "reconstruction inputs disagree on vertex count ({n}, {}, {}, {})",
            smoothed.len(),
            predicted.nrows(),
            mask.len()
        )));
    }
    if mask.count_true() == 0 {
        log::warn!("reconstruction loss over an empty mask is 0");
    }
    let mut total = 0.0;
    for i in (0..n).filter(|&i| mask.get(i)) {
        let d = original[i] - smoothed[i];
        let r = [
            d[0] - predicted[[i, 0]],
            d[1] - predicted[[i, 1]],
            d[2] - predicted[[i, 2]],
        ];
        total += regularized_norm(r, eps);
    }
    Ok(total)
}

/// `Σ_x √(‖|N(x)| φ(x) − Σ_{y∈N(x)} φ(y)‖² + ε)` over every vertex.
pub fn laplacian_loss(output: &[Vec3], mesh: &Mesh, eps: f64) -> Result<f64, TrainError> {
    check_eps(eps)?;
    if output.len() != mesh.vertex_count() {
        return Err(TrainError::Dimension(format!(
            "{} output positions for {} vertices",
            output.len(),
            mesh.vertex_count()
        )));
    }
    let neighbors = vertex_neighbors(mesh);
    let (value, _) = laplacian_terms(&positions_matrix(output), &neighbors, eps, false);
    Ok(value)
}

pub fn total_loss(recon: f64, lap: f64, lambda: f64) -> f64 {
    recon + lambda * lap
}

fn laplacian_terms(
    positions: &Array2<f64>,
    neighbors: &[Vec<usize>],
    eps: f64,
    with_grad: bool,
) -> (f64, Option<Array2<f64>>) {
    let mut grad = with_grad.then(|| Array2::zeros(positions.dim()));
    let mut total = 0.0;
    for (x, ring) in neighbors.iter().enumerate() {
        let deg = ring.len() as f64;
        let mut r = [0.0; 3];
        for k in 0..3 {
            r[k] = deg * positions[[x, k]] - ring.iter().map(|&y| positions[[y, k]]).sum::<f64>();
        }
        let norm = regularized_norm(r, eps);
        total += norm;
        if let Some(g) = grad.as_mut() {
            for k in 0..3 {
                let u = r[k] / norm;
                g[[x, k]] += deg * u;
                for &y in ring {
                    g[[y, k]] -= u;
                }
            }
        }
    }
    (total, grad)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossTerms {
    pub recon: f64,
    pub lap: f64,
    pub total: f64,
}

impl LossTerms {
    pub fn is_finite(&self) -> bool {
        self.recon.is_finite() && self.lap.is_finite() && self.total.is_finite()
    }
}

/// The full objective as a function of the network output, with the fixed
/// base shape and regression target folded in.
#[derive(Debug, Clone)]
pub struct Objective {
    /// Added to the network output to obtain vertex positions.
    pub base: Array2<f64>,
    /// What the network output should match: `φ − Sφ`, or `φ` for positions.
    pub target: Array2<f64>,
    pub mask: VertexMask,
    pub neighbors: Vec<Vec<usize>>,
    pub lambda: f64,
    pub eps: f64,
}

impl Objective {
    /// `base` is the smoothed mesh, or `None` to regress positions directly.
    pub fn new(
        mesh: &Mesh,
        base: Option<&Mesh>,
        mask: VertexMask,
        lambda: f64,
        eps: f64,
    ) -> Result<Self, TrainError> {
        check_eps(eps)?;
        let n = mesh.vertex_count();
        if mask.len() != n {
            return Err(TrainError::MaskMismatch {
                mask: mask.len(),
                vertices: n,
            });
        }
        let original = positions_matrix(&mesh.vertices);
        let base = match base {
            Some(b) if b.vertex_count() != n => {
                return Err(TrainError::Dimension(format!(
                    "base shape has {} vertices, mesh has {n}",
                    b.vertex_count()
                )))
            }
            Some(b) => positions_matrix(&b.vertices),
            None => Array2::zeros((n, 3)),
        };
        if mask.count_true() == 0 {
            log::warn!("mask excludes every vertex; reconstruction term is 0");
        }
        Ok(Self {
            target: &original - &base,
            base,
            mask,
            neighbors: vertex_neighbors(mesh),
            lambda,
            eps,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.base.nrows()
    }

    pub fn output_positions(&self, prediction: &Array2<f64>) -> Array2<f64> {
        &self.base + prediction
    }

    pub fn evaluate(&self, prediction: &Array2<f64>) -> LossTerms {
        self.terms(prediction, false).0
    }

    /// Loss terms and `∂total/∂prediction`.
    pub fn evaluate_with_grad(&self, prediction: &Array2<f64>) -> (LossTerms, Array2<f64>) {
        let (terms, grad) = self.terms(prediction, true);
        (terms, grad.expect("requested"))
    }

    /// Gradient of the reconstruction term alone.
    pub fn reconstruction_grad(&self, prediction: &Array2<f64>) -> Array2<f64> {
        self.reconstruction(prediction, true).1.expect("requested")
    }

    fn reconstruction(
        &self,
        prediction: &Array2<f64>,
        with_grad: bool,
    ) -> (f64, Option<Array2<f64>>) {
        let mut grad = with_grad.then(|| Array2::zeros(prediction.dim()));
        let mut total = 0.0;
        for i in (0..self.vertex_count()).filter(|&i| self.mask.get(i)) {
            let mut r = [0.0; 3];
            for k in 0..3 {
                r[k] = self.target[[i, k]] - prediction[[i, k]];
            }
            let norm = regularized_norm(r, self.eps);
            total += norm;
            if let Some(g) = grad.as_mut() {
                for k in 0..3 {
                    g[[i, k]] = -r[k] / norm;
                }
            }
        }
        (total, grad)
    }

    fn terms(&self, prediction: &Array2<f64>, with_grad: bool) -> (LossTerms, Option<Array2<f64>>) {
        let (recon, recon_grad) = self.reconstruction(prediction, with_grad);
        let output = self.output_positions(prediction);
        let (lap, lap_grad) = laplacian_terms(&output, &self.neighbors, self.eps, with_grad);
        let terms = LossTerms {
            recon,
            lap,
            total: total_loss(recon, lap, self.lambda),
        };
        let grad = match (recon_grad, lap_grad) {
            (Some(r), Some(l)) => Some(r + l * self.lambda),
            _ => None,
        };
        (terms, grad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::fixtures::{grid, tetrahedron, triangle};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_points(n: usize, rng: &mut ChaCha8Rng) -> Vec<Vec3> {
        (0..n)
            .map(|_| {
                Vec3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                )
            })
            .collect()
    }

    #[test]
    fn exact_prediction_gives_n_sqrt_eps() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_points(10, &mut rng);
        let b = random_points(10, &mut rng);
        let pred: Vec<Vec3> = a.iter().zip(&b).map(|(x, y)| x - y).collect();
        let eps = 1e-12;
        let loss = reconstruction_loss(
            &a,
            &b,
            &positions_matrix(&pred),
            &VertexMask::all_true(10),
            eps,
        )
        .unwrap();
        assert!((loss - 10.0 * eps.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_prediction_sums_displacement_norms() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_points(7, &mut rng);
        let b = random_points(7, &mut rng);
        let eps = 1e-12;
        let want: f64 = a
            .iter()
            .zip(&b)
            .map(|(x, y)| ((x - y).norm_squared() + eps).sqrt())
            .sum();
        let got = reconstruction_loss(
            &a,
            &b,
            &Array2::zeros((7, 3)),
            &VertexMask::all_true(7),
            eps,
        )
        .unwrap();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn fifty_vertex_reconstruction_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_points(50, &mut rng);
        let b = random_points(50, &mut rng);
        let f = random_points(50, &mut rng);
        let flags: Vec<bool> = (0..50).map(|_| rng.random_bool(0.7)).collect();
        let eps = 1e-6;
        let mut want = 0.0;
        for i in 0..50 {
            if flags[i] {
                let r = (a[i] - b[i]) - f[i];
                want += (r.x * r.x + r.y * r.y + r.z * r.z + eps).sqrt();
            }
        }
        let got = reconstruction_loss(
            &a,
            &b,
            &positions_matrix(&f),
            &VertexMask::from_flags(flags),
            eps,
        )
        .unwrap();
        assert!((got - want).abs() < 1e-12);
    }

    #[test]
    fn empty_mask_is_zero_and_mismatch_errors() {
        let p = vec![Vec3::new(1.0, 2.0, 3.0); 3];
        let m = VertexMask::from_flags(vec![false; 3]);
        assert_eq!(
            reconstruction_loss(&p, &p, &Array2::ones((3, 3)), &m, 1e-12).unwrap(),
            0.0
        );
        assert!(reconstruction_loss(&p, &p, &Array2::ones((2, 3)), &m, 1e-12).is_err());
        assert!(reconstruction_loss(&p, &p, &Array2::ones((3, 3)), &m, 0.0).is_err());
    }

    #[test]
    fn equilateral_triangle_laplacian() {
        let r = 1.7;
        let verts: Vec<Vec3> = (0..3)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
                Vec3::new(r * t.cos(), r * t.sin(), 0.0)
            })
            .collect();
        let mesh = Mesh::new(verts.clone(), vec![[0, 1, 2]]).unwrap();
        let loss = laplacian_loss(&verts, &mesh, 1e-30).unwrap();
        assert!((loss - 9.0 * r).abs() < 1e-12);
    }

    #[test]
    fn centroid_vertex_contributes_nothing() {
        let mut pts = vec![Vec3::new(0.1, -0.2, 0.3)];
        for k in 0..6 {
            let t = std::f64::consts::PI * k as f64 / 3.0;
            pts.push(pts[0] + Vec3::new(t.cos(), t.sin(), 0.0));
        }
        let mut neighbors = vec![Vec::new(); 7];
        neighbors[0] = (1..7).collect();
        let (loss, _) = laplacian_terms(&positions_matrix(&pts), &neighbors, 1e-30, false);
        assert!(loss < 1e-12);
        pts[0].z += 0.5;
        let (moved, _) = laplacian_terms(&positions_matrix(&pts), &neighbors, 1e-30, false);
        assert!((moved - 3.0).abs() < 1e-12);
    }

    #[test]
    fn laplacian_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mesh = grid(4, 5);
        let pts = random_points(mesh.vertex_count(), &mut rng);
        let eps = 1e-9;
        // oracle builds rings from the face list directly
        let mut want = 0.0;
        for x in 0..pts.len() {
            let mut ring: Vec<usize> = Vec::new();
            for f in &mesh.faces {
                if f.contains(&x) {
                    ring.extend(f.iter().filter(|&&y| y != x));
                }
            }
            ring.sort_unstable();
            ring.dedup();
            let mut s = pts[x] * ring.len() as f64;
            for y in ring {
                s -= pts[y];
            }
            want += (s.norm_squared() + eps).sqrt();
        }
        let got = laplacian_loss(&pts, &mesh, eps).unwrap();
        assert!((got - want).abs() < 1e-10);
        assert!(laplacian_loss(&pts[1..], &mesh, eps).is_err());
    }

    #[test]
    fn total_loss_arithmetic() {
        assert_eq!(total_loss(2.0, 5.0, 0.0), 2.0);
        assert!((total_loss(2.0, 5.0, 0.2) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn objective_matches_free_functions() {
        let mesh = tetrahedron();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let base = Mesh::new(random_points(4, &mut rng), mesh.faces.clone()).unwrap();
        let pred = positions_matrix(&random_points(4, &mut rng));
        let mask = VertexMask::from_flags(vec![true, false, true, true]);
        let obj = Objective::new(&mesh, Some(&base), mask.clone(), 0.2, 1e-12).unwrap();
        let terms = obj.evaluate(&pred);
        let recon =
            reconstruction_loss(&mesh.vertices, &base.vertices, &pred, &mask, 1e-12).unwrap();
        let out = matrix_positions(&obj.output_positions(&pred));
        let lap = laplacian_loss(&out, &mesh, 1e-12).unwrap();
        assert!((terms.recon - recon).abs() < 1e-14);
        assert!((terms.lap - lap).abs() < 1e-12);
        assert!((terms.total - (recon + 0.2 * lap)).abs() < 1e-12);
    }

    #[test]
    fn output_gradient_matches_finite_differences() {
        let mesh = grid(3, 4);
        let n = mesh.vertex_count();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let noisy: Vec<Vec3> = mesh
            .vertices
            .iter()
            .map(|v| v + Vec3::new(0.0, 0.0, rng.random_range(-0.2..0.2)))
            .collect();
        let noisy = mesh.with_vertices(noisy);
        let flags: Vec<bool> = (0..n).map(|i| i % 3 != 0).collect();
        for base in [Some(&mesh), None] {
            let obj = Objective::new(
                &noisy,
                base,
                VertexMask::from_flags(flags.clone()),
                0.2,
                1e-12,
            )
            .unwrap();
            let pred = positions_matrix(&random_points(n, &mut rng)) * 0.1;
            let (_, grad) = obj.evaluate_with_grad(&pred);
            let h = 1e-6;
            for i in 0..n {
                for k in 0..3 {
                    let mut p = pred.clone();
                    p[[i, k]] += h;
                    let plus = obj.evaluate(&p).total;
                    p[[i, k]] -= 2.0 * h;
                    let minus = obj.evaluate(&p).total;
                    let fd = (plus - minus) / (2.0 * h);
                    assert!((fd - grad[[i, k]]).abs() < 1e-6, "{fd} vs {}", grad[[i, k]]);
                }
            }
        }
    }

    #[test]
    fn masked_vertices_have_zero_reconstruction_gradient() {
        let mesh = triangle();
        let obj = Objective::new(
            &mesh,
            None,
            VertexMask::from_flags(vec![true, false, true]),
            0.5,
            1e-12,
        )
        .unwrap();
        let pred = Array2::from_shape_fn((3, 3), |(i, k)| 0.1 * (i * 3 + k) as f64);
        let g = obj.reconstruction_grad(&pred);
        assert!(g.row(1).iter().all(|&v| v == 0.0));
        assert!(g.row(0).iter().any(|&v| v != 0.0));
        let (_, full) = obj.evaluate_with_grad(&pred);
        assert!(full.row(1).iter().any(|&v| v != 0.0));
    }
}
