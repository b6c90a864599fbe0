use super::{Mesh, Vec3};

/// Relative area threshold below which a face counts as degenerate.
const DEGENERATE_REL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FaceNormal {
    /// Unit normal, or the zero vector when `degenerate`.
    pub normal: Vec3,
    pub area: f64,
    pub degenerate: bool,
}

/// Normal of face (i,j,k) is the normalized (vj - vi) x (vk - vi).
pub fn compute_face_normals(mesh: &Mesh) -> Vec<FaceNormal> {
    (0..mesh.face_count())
        .map(|f| {
            let [a, b, c] = mesh.face_positions(f);
            face_normal(a, b, c)
        })
        .collect()
}

pub(crate) fn face_normal(a: Vec3, b: Vec3, c: Vec3) -> FaceNormal {
    let e1 = b - a;
    let e2 = c - a;
    let cross = e1.cross(&e2);
    let len = cross.norm();
    let scale = e1
        .norm_squared()
        .max(e2.norm_squared())
        .max((c - b).norm_squared());
    if !(len > DEGENERATE_REL * scale) {
        return FaceNormal {
            normal: Vec3::zeros(),
            area: 0.5 * len,
            degenerate: true,
        };
    }
    FaceNormal {
        normal: cross / len,
        area: 0.5 * len,
        degenerate: false,
    }
}

/// Area-weighted vertex normals. Vertices without a non-degenerate incident
/// face get `None`.
pub fn vertex_normals(mesh: &Mesh) -> Vec<Option<Vec3>> {
    let mut acc = vec![Vec3::zeros(); mesh.vertex_count()];
    for (f, fnorm) in compute_face_normals(mesh).iter().enumerate() {
        if fnorm.degenerate {
            continue;
        }
        for &v in &mesh.faces[f] {
            acc[v] += fnorm.normal * fnorm.area;
        }
    }
    acc.into_iter()
        .map(|n| {
            let len = n.norm();
            (len > 0.0).then(|| n / len)
        })
        .collect()
}
