use ndarray::Array2;

use super::Mesh;

/// Unique undirected edges as sorted `(min, max)` pairs, in ascending order.
pub fn unique_edges(mesh: &Mesh) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = mesh
        .faces
        .iter()
        .flat_map(|f| [(f[0], f[1]), (f[1], f[2]), (f[2], f[0])].map(|(a, b)| (a.min(b), a.max(b))))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    edges
}

/// 1-ring neighbor lists, each sorted ascending.
pub fn vertex_neighbors(mesh: &Mesh) -> Vec<Vec<usize>> {
    let mut neighbors = vec![Vec::new(); mesh.vertex_count()];
    for (a, b) in unique_edges(mesh) {
        neighbors[a].push(b);
        neighbors[b].push(a);
    }
    for list in &mut neighbors {
        list.sort_unstable();
    }
    neighbors
}

/// Compressed sparse row matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    values: Vec<f64>,
}

impl SparseMatrix {
    /// Builds from per-row `(col, value)` lists; columns must be ascending.
    pub fn from_rows(rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows.len();
        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in rows {
            debug_assert!(row.windows(2).all(|w| w[0].0 < w[1].0));
            for (c, v) in row {
                cols.push(c);
                values.push(v);
            }
            row_ptr.push(cols.len());
        }
        Self {
            n,
            row_ptr,
            cols,
            values,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        self.cols[span.clone()]
            .iter()
            .copied()
            .zip(self.values[span].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let span = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.cols[span.clone()].binary_search(&j) {
            Ok(k) => self.values[span.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut dense = vec![vec![0.0; self.n]; self.n];
        for (i, row) in dense.iter_mut().enumerate() {
            for (j, v) in self.row(i) {
                row[j] = v;
            }
        }
        dense
    }

    /// Sparse-dense product `self * x`. Row sums are accumulated in column order.
    pub fn apply(&self, x: &Array2<f64>) -> Array2<f64> {
        assert_eq!(x.nrows(), self.n, "sparse apply: row mismatch");
        let width = x.ncols();
        let src = x.as_standard_layout();
        let src = src.as_slice().expect("standard layout");
        let mut out = vec![0.0; self.n * width];
        for i in 0..self.n {
            let dst = &mut out[i * width..(i + 1) * width];
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let a = self.values[k];
                let s = &src[self.cols[k] * width..(self.cols[k] + 1) * width];
                for (d, &v) in dst.iter_mut().zip(s) {
                    *d += a * v;
                }
            }
        }
        Array2::from_shape_vec((self.n, width), out).expect("shape")
    }
}

/// Propagation operators for graph convolutions over mesh vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexGraph {
    /// `D̃^{-1/2} (A + I) D̃^{-1/2}` with `D̃` the degree matrix of `A + I`.
    pub propagation: SparseMatrix,
    /// Scaled normalized Laplacian `2L/λ_max - I` with `λ_max = 2`, i.e.
    /// `-D^{-1/2} A D^{-1/2}` (no self-loops; zero rows for isolated vertices).
    pub scaled_laplacian: SparseMatrix,
}

impl VertexGraph {
    pub fn vertex_count(&self) -> usize {
        self.propagation.dim()
    }
}

pub fn build_normalized_adjacency(mesh: &Mesh) -> VertexGraph {
    VertexGraph::from_edges(mesh.vertex_count(), &unique_edges(mesh))
}

impl VertexGraph {
    /// Builds both operators from undirected `(min, max)` edges over `n` vertices.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut neighbors = vec![Vec::new(); n];
        for &(a, b) in edges {
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for list in &mut neighbors {
            list.sort_unstable();
            list.dedup();
        }
        let degree: Vec<f64> = neighbors.iter().map(|n| n.len() as f64).collect();

        let propagation = neighbors
            .iter()
            .enumerate()
            .map(|(i, nbrs)| {
                let mut row: Vec<(usize, f64)> = nbrs
                    .iter()
                    .map(|&j| (j, 1.0 / ((degree[i] + 1.0) * (degree[j] + 1.0)).sqrt()))
                    .collect();
                let pos = row.partition_point(|&(j, _)| j < i);
                row.insert(pos, (i, 1.0 / (degree[i] + 1.0)));
                row
            })
            .collect();

        let scaled_laplacian = neighbors
            .iter()
            .enumerate()
            .map(|(i, nbrs)| {
                nbrs.iter()
                    .map(|&j| (j, -1.0 / (degree[i] * degree[j]).sqrt()))
                    .collect()
            })
            .collect();

        Self {
            propagation: SparseMatrix::from_rows(propagation),
            scaled_laplacian: SparseMatrix::from_rows(scaled_laplacian),
        }
    }
}
