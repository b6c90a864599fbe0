#![allow(dead_code)]

use dmp_core::mesh::{Mesh, Vec3};
use dmp_core::preprocess::icosphere;
use nalgebra::{Quaternion, Rotation3, UnitQuaternion};
use proptest::prelude::*;

pub fn grid(nx: usize, ny: usize, heights: &[f64]) -> Mesh {
    let mut vertices = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            let h = heights[(j * nx + i) % heights.len()];
            vertices.push(Vec3::new(i as f64, j as f64, h));
        }
    }
    let mut faces = Vec::new();
    for j in 0..ny - 1 {
        for i in 0..nx - 1 {
            let a = j * nx + i;
            faces.push([a, a + 1, a + nx + 1]);
            faces.push([a, a + nx + 1, a + nx]);
        }
    }
    Mesh::new(vertices, faces).unwrap()
}

/// Grids with at most `max_vertices` vertices and jittered heights.
pub fn arb_grid(max_vertices: usize) -> impl Strategy<Value = Mesh> {
    (2usize..=7, 2usize..=7)
        .prop_filter("too many vertices", move |(nx, ny)| nx * ny <= max_vertices)
        .prop_flat_map(|(nx, ny)| {
            prop::collection::vec(-0.5f64..0.5, nx * ny).prop_map(move |h| grid(nx, ny, &h))
        })
}

/// Icosphere with each vertex scaled radially by a factor in [0.8, 1.2].
pub fn arb_sphere(subdivisions: u32) -> impl Strategy<Value = Mesh> {
    let base = icosphere(subdivisions);
    let n = base.vertex_count();
    prop::collection::vec(0.8f64..1.2, n).prop_map(move |scales| {
        base.with_vertices(
            base.vertices
                .iter()
                .zip(&scales)
                .map(|(p, s)| p * *s)
                .collect(),
        )
    })
}

pub fn arb_rotation() -> impl Strategy<Value = Rotation3<f64>> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter("near-zero quaternion", |(w, x, y, z)| {
            w * w + x * x + y * y + z * z > 1e-3
        })
        .prop_map(|(w, x, y, z)| {
            UnitQuaternion::from_quaternion(Quaternion::new(w, x, y, z)).to_rotation_matrix()
        })
}

pub fn rotate(mesh: &Mesh, rotation: &Rotation3<f64>) -> Mesh {
    mesh.with_vertices(mesh.vertices.iter().map(|p| rotation * p).collect())
}

pub fn unit_direction() -> impl Strategy<Value = Vec3> {
    (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0)
        .prop_filter("near-zero direction", |(x, y, z)| {
            x * x + y * y + z * z > 0.05
        })
        .prop_map(|(x, y, z)| Vec3::new(x, y, z).normalize())
}
