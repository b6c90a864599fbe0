mod common;

use dmp_core::mesh::{build_normalized_adjacency, Mesh, VertexGraph};
use dmp_core::neural::{forward, init_network, ConvKind, NetworkSpec, NoiseInput};
use ndarray::Array2;
use proptest::prelude::*;

use common::arb_grid;

fn small_spec(kind: ConvKind) -> NetworkSpec {
    NetworkSpec {
        conv_kind: kind,
        conv_layers: 3,
        fc_layers: 2,
        hidden_width: 6,
        input_dim: 4,
        ..NetworkSpec::default()
    }
}

fn arb_conv() -> impl Strategy<Value = ConvKind> {
    prop_oneof![
        Just(ConvKind::Spectral),
        (1usize..5).prop_map(|order| ConvKind::Chebyshev { order }),
    ]
}

fn permuted(mesh: &Mesh, perm: &[usize]) -> Mesh {
    let mut vertices = mesh.vertices.clone();
    for (old, &new) in perm.iter().enumerate() {
        vertices[new] = mesh.vertices[old];
    }
    let faces = mesh.faces.iter().map(|f| f.map(|v| perm[v])).collect();
    Mesh::new(vertices, faces).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn forward_is_bit_reproducible(mesh in arb_grid(30), kind in arb_conv(), seed in any::<u64>()) {
        let spec = small_spec(kind);
        let graph = build_normalized_adjacency(&mesh);
        let params = init_network(&spec, seed).unwrap();
        let input = NoiseInput::standard(mesh.vertex_count(), spec.input_dim, seed ^ 1).values;
        let a = forward(&params, &spec, &input, &graph).unwrap().output;
        let b = forward(&params.clone(), &spec, &input.clone(), &graph.clone()).unwrap().output;
        prop_assert!(a.iter().zip(b.iter()).all(|(x, y)| x.to_bits() == y.to_bits()));
    }

    #[test]
    fn forward_is_permutation_equivariant(
        (mesh, perm) in arb_grid(30).prop_flat_map(|m| {
            let n = m.vertex_count();
            (Just(m), Just((0..n).collect::<Vec<usize>>()).prop_shuffle())
        }),
        kind in arb_conv(),
        seed in any::<u64>(),
    ) {
        let spec = small_spec(kind);
        let n = mesh.vertex_count();
        let params = init_network(&spec, seed).unwrap();
        let input = NoiseInput::standard(n, spec.input_dim, seed ^ 2).values;
        let mut moved_input = input.clone();
        for (old, &new) in perm.iter().enumerate() {
            moved_input.row_mut(new).assign(&input.row(old));
        }
        let out = forward(&params, &spec, &input, &build_normalized_adjacency(&mesh))
            .unwrap()
            .output;
        let moved = permuted(&mesh, &perm);
        let moved_out = forward(&params, &spec, &moved_input, &build_normalized_adjacency(&moved))
            .unwrap()
            .output;
        for (old, &new) in perm.iter().enumerate() {
            for k in 0..3 {
                prop_assert!((out[[old, k]] - moved_out[[new, k]]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn edgeless_spectral_layer_is_per_vertex_affine(n in 1usize..20, seed in any::<u64>()) {
        let spec = NetworkSpec {
            conv_layers: 1,
            fc_layers: 1,
            hidden_width: 5,
            input_dim: 3,
            ..NetworkSpec::default()
        };
        let mut params = init_network(&spec, seed).unwrap();
        for (l, layer) in params.layers.iter_mut().enumerate() {
            layer.bias.iter_mut().enumerate().for_each(|(i, b)| *b = 0.01 * (i + l) as f64);
        }
        let graph = VertexGraph::from_edges(n, &[]);
        let input = NoiseInput::standard(n, spec.input_dim, seed ^ 3).values;
        let out = forward(&params, &spec, &input, &graph).unwrap().output;
        let hidden: Array2<f64> = (input.dot(&params.layers[0].weights[0]) + &params.layers[0].bias)
            .mapv(|z| if z > 0.0 { z } else { spec.leaky_slope * z });
        let expected = hidden.dot(&params.layers[1].weights[0]) + &params.layers[1].bias;
        for (a, b) in out.iter().zip(expected.iter()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }
}
