//! Procedural benchmark shapes: unit icospheres carrying repeated cap bumps.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::mesh::{Mesh, Vec3};

/// Icosphere with `20 * 4^subdivisions` faces, all vertices on the unit sphere.
pub fn icosphere(subdivisions: u32) -> Mesh {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<Vec3> = [
        (-1.0, t, 0.0),
        (1.0, t, 0.0),
        (-1.0, -t, 0.0),
        (1.0, -t, 0.0),
        (0.0, -1.0, t),
        (0.0, 1.0, t),
        (0.0, -1.0, -t),
        (0.0, 1.0, -t),
        (t, 0.0, -1.0),
        (t, 0.0, 1.0),
        (-t, 0.0, -1.0),
        (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
    .collect();
    let mut faces: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Vec3>| -> usize {
            *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                vertices.push(((vertices[a] + vertices[b]) * 0.5).normalize());
                vertices.len() - 1
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for &[a, b, c] in &faces {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.extend_from_slice(&[[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    Mesh { vertices, faces }
}

/// Parameters of the bumpy-sphere benchmark shape.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpySphere {
    pub subdivisions: u32,
    pub bump_count: usize,
    /// Radial height of each bump above the unit sphere.
    pub bump_height: f64,
    /// Angular radius (radians) of each bump's footprint.
    pub cap_radius: f64,
    pub seed: u64,
}

/// A generated bumpy sphere together with its bump directions.
#[derive(Debug, Clone)]
pub struct BumpyShape {
    pub mesh: Mesh,
    pub centers: Vec<Vec3>,
    pub bump_height: f64,
    pub cap_radius: f64,
}

impl BumpySphere {
    pub const DEFAULT_CAP_RADIUS: f64 = 0.25;

    pub fn new(subdivisions: u32, bump_count: usize, bump_height: f64, seed: u64) -> Self {
        Self {
            subdivisions,
            bump_count,
            bump_height,
            cap_radius: Self::DEFAULT_CAP_RADIUS,
            seed,
        }
    }

    /// Bump centers are snapped to icosphere vertices, preferring directions at
    /// least two cap radii apart, so a bump apex always sits on a vertex.
    pub fn build(&self) -> BumpyShape {
        let sphere = icosphere(self.subdivisions);
        let mut order: Vec<usize> = (0..sphere.vertex_count()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(self.seed));

        let count = self.bump_count.min(order.len());
        let mut chosen: Vec<usize> = Vec::with_capacity(count);
        let min_cos = (2.0 * self.cap_radius).min(std::f64::consts::PI).cos();
        for &v in &order {
            if chosen.len() == count {
                break;
            }
            let far = chosen
                .iter()
                .all(|&c| sphere.vertices[c].dot(&sphere.vertices[v]) <= min_cos);
            if far {
                chosen.push(v);
            }
        }
        for &v in &order {
            if chosen.len() == count {
                break;
            }
            if !chosen.contains(&v) {
                chosen.push(v);
            }
        }

        let centers: Vec<Vec3> = chosen.iter().map(|&v| sphere.vertices[v]).collect();
        let mut shape = BumpyShape {
            mesh: sphere,
            centers,
            bump_height: self.bump_height,
            cap_radius: self.cap_radius,
        };
        let moved = shape
            .mesh
            .vertices
            .iter()
            .map(|&v| {
                if shape.radial_offset(v) > 0.0 {
                    shape.surface_point(v)
                } else {
                    v
                }
            })
            .collect();
        shape.mesh.vertices = moved;
        shape
    }
}

impl BumpyShape {
    /// Radial offset above the unit sphere in direction `dir` (unit vector).
    /// Each bump is a spherical cap of height `bump_height` spanning
    /// `cap_radius` of arc; overlapping bumps take the maximum.
    pub fn radial_offset(&self, dir: Vec3) -> f64 {
        let h = self.bump_height;
        if h <= 0.0 {
            return 0.0;
        }
        let a = self.cap_radius;
        let cap_sphere = (a * a + h * h) / (2.0 * h);
        self.centers
            .iter()
            .map(|c| {
                let d = c.dot(&dir).clamp(-1.0, 1.0).acos();
                if d >= a {
                    0.0
                } else {
                    ((cap_sphere * cap_sphere - d * d).sqrt() - (cap_sphere - h)).max(0.0)
                }
            })
            .fold(0.0, f64::max)
    }

    /// Radial projection of `p` onto the analytic bumpy surface.
    pub fn surface_point(&self, p: Vec3) -> Vec3 {
        let dir = p.normalize();
        dir * (1.0 + self.radial_offset(dir))
    }

    /// Reference positions for an arbitrary mesh approximating this shape.
    pub fn reference_for(&self, mesh: &Mesh) -> Mesh {
        mesh.with_vertices(
            mesh.vertices
                .iter()
                .map(|&p| self.surface_point(p))
                .collect(),
        )
    }
}

pub fn generate_bumpy_sphere(
    subdivisions: u32,
    bump_count: usize,
    bump_height: f64,
    seed: u64,
) -> Mesh {
    BumpySphere::new(subdivisions, bump_count, bump_height, seed)
        .build()
        .mesh
}

/// Face lies inside the cap when its centroid direction is within
/// `angular_radius` of `center`.
pub fn face_in_cap(mesh: &Mesh, face: usize, center: Vec3, angular_radius: f64) -> bool {
    let [a, b, c] = mesh.face_positions(face);
    let centroid = (a + b + c) / 3.0;
    let cos = centroid
        .normalize()
        .dot(&center.normalize())
        .clamp(-1.0, 1.0);
    cos.acos() < angular_radius
}

/// Result of cutting a cap-shaped hole.
#[derive(Debug, Clone)]
pub struct CapCut {
    pub mesh: Mesh,
    pub removed_faces: usize,
    /// For each kept vertex, its index in the uncut mesh.
    pub kept_vertices: Vec<usize>,
}

/// Removes every face inside the cap and drops vertices left unreferenced.
pub fn remove_cap(mesh: &Mesh, center: Vec3, angular_radius: f64) -> CapCut {
    let kept_faces: Vec<[usize; 3]> = (0..mesh.face_count())
        .filter(|&f| !face_in_cap(mesh, f, center, angular_radius))
        .map(|f| mesh.faces[f])
        .collect();
    let removed_faces = mesh.face_count() - kept_faces.len();

    let mut used = vec![false; mesh.vertex_count()];
    for f in &kept_faces {
        for &v in f {
            used[v] = true;
        }
    }
    let mut remap = vec![usize::MAX; mesh.vertex_count()];
    let mut kept_vertices = Vec::new();
    for (v, &u) in used.iter().enumerate() {
        if u {
            remap[v] = kept_vertices.len();
            kept_vertices.push(v);
        }
    }
    let faces = kept_faces
        .iter()
        .map(|f| [remap[f[0]], remap[f[1]], remap[f[2]]])
        .collect();
    let vertices = kept_vertices.iter().map(|&v| mesh.vertices[v]).collect();
    CapCut {
        mesh: Mesh { vertices, faces },
        removed_faces,
        kept_vertices,
    }
}
