//! Hole filling: minimum-area triangulation of each boundary loop followed by
//! longest-edge refinement of the patch.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};

use crate::mesh::{find_boundary_loops, validate_mesh, BoundaryLoop, Mesh, Vec3};

use super::PreprocessError;

/// Per-vertex flag: `true` where the vertex existed before hole filling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexMask {
    flags: Vec<bool>,
}

impl VertexMask {
    pub fn all_true(n: usize) -> Self {
        Self {
            flags: vec![true; n],
        }
    }

    pub fn from_flags(flags: Vec<bool>) -> Self {
        Self { flags }
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.flags[i]
    }

    pub fn flags(&self) -> &[bool] {
        &self.flags
    }

    pub fn count_true(&self) -> usize {
        self.flags.iter().filter(|&&f| f).count()
    }

    /// Indices of vertices inserted by filling.
    pub fn filled_indices(&self) -> Vec<usize> {
        (0..self.flags.len()).filter(|&i| !self.flags[i]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FillOptions {
    /// Patch edges longer than this multiple of the loop's mean boundary edge
    /// length are split at their midpoint.
    pub refine_factor: f64,
}

impl Default for FillOptions {
    fn default() -> Self {
        Self { refine_factor: 1.5 }
    }
}

/// Relative tolerance under which two weights count as tied.
const TIE_REL: f64 = 1e-12;

fn tied(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_REL * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// A hole boundary prepared for triangulation.
#[derive(Debug, Clone)]
pub struct HolePolygon {
    pub points: Vec<Vec3>,
    /// Labels used for the final lexicographic tie-break (mesh vertex indices).
    pub labels: Vec<usize>,
    /// Unit normal of the surface face across polygon edge `(i, i+1 mod n)`.
    pub outer_normals: Vec<Option<Vec3>>,
}

#[derive(Debug, Clone, Copy)]
struct Weight {
    area: f64,
    dihedral: f64,
}

fn compare_weights(a: Weight, b: Weight) -> Ordering {
    if !tied(a.area, b.area) {
        return a.area.total_cmp(&b.area);
    }
    if !tied(a.dihedral, b.dihedral) {
        return a.dihedral.total_cmp(&b.dihedral);
    }
    Ordering::Equal
}

/// Area and unit normal; `None` normal for a degenerate triangle.
fn triangle_geometry(a: Vec3, b: Vec3, c: Vec3) -> (f64, Option<Vec3>) {
    let cross = (b - a).cross(&(c - a));
    let len = cross.norm();
    let scale = (b - a)
        .norm_squared()
        .max((c - a).norm_squared())
        .max((c - b).norm_squared());
    if len > 1e-14 * scale {
        (0.5 * len, Some(cross / len))
    } else {
        (0.5 * len, None)
    }
}

/// Angle between two face normals; degenerate faces count as a full fold.
fn dihedral(n1: Option<Vec3>, n2: Option<Vec3>) -> f64 {
    match (n1, n2) {
        (Some(a), Some(b)) => a.dot(&b).clamp(-1.0, 1.0).acos(),
        _ => std::f64::consts::PI,
    }
}

impl HolePolygon {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Minimum-weight triangulation over polygon chords.
    ///
    /// Weight is total area; ties go to the smaller maximum dihedral angle
    /// between adjacent patch triangles and between patch and surface
    /// triangles, then to the lexicographically smaller sorted list of label
    /// triples. Returned triples are local indices `(i, m, k)` with `i < m < k`.
    pub fn triangulate(&self) -> Result<Vec<[usize; 3]>, PreprocessError> {
        let n = self.points.len();
        if n < 3 {
            return Err(PreprocessError::LoopTooShort(n));
        }
        // cell (i, k) for k - i >= 2 holds the best apex and resulting weight
        let mut apex = vec![vec![usize::MAX; n]; n];
        let mut weight = vec![
            vec![
                Weight {
                    area: 0.0,
                    dihedral: 0.0
                };
                n
            ];
            n
        ];
        let mut normal: Vec<Vec<Option<Vec3>>> = vec![vec![None; n]; n];

        for span in 2..n {
            for i in 0..n - span {
                let k = i + span;
                let mut best: Option<(usize, Weight, Option<Vec3>)> = None;
                for m in i + 1..k {
                    let (area, tri_normal) =
                        triangle_geometry(self.points[i], self.points[m], self.points[k]);
                    let left = if m == i + 1 {
                        self.outer_normals[i]
                    } else {
                        normal[i][m]
                    };
                    let right = if k == m + 1 {
                        self.outer_normals[m]
                    } else {
                        normal[m][k]
                    };
                    let mut dih = dihedral(tri_normal, left)
                        .max(dihedral(tri_normal, right))
                        .max(weight[i][m].dihedral)
                        .max(weight[m][k].dihedral);
                    if i == 0 && k == n - 1 {
                        dih = dih.max(dihedral(tri_normal, self.outer_normals[n - 1]));
                    }
                    let cand = Weight {
                        area: weight[i][m].area + weight[m][k].area + area,
                        dihedral: dih,
                    };
                    let better = match &best {
                        None => true,
                        Some((bm, bw, _)) => match compare_weights(cand, *bw) {
                            Ordering::Less => true,
                            Ordering::Greater => false,
                            Ordering::Equal => {
                                self.label_key(&apex, i, m, k) < self.label_key(&apex, i, *bm, k)
                            }
                        },
                    };
                    if better {
                        best = Some((m, cand, tri_normal));
                    }
                }
                let (m, w, nrm) = best.expect("span >= 2 has an apex");
                apex[i][k] = m;
                weight[i][k] = w;
                normal[i][k] = nrm;
            }
        }

        let mut out = Vec::with_capacity(n - 2);
        collect(&apex, 0, n - 1, &mut out);
        Ok(out)
    }

    /// Sorted label triples of the sub-triangulation `(i, k)` with apex `m`.
    fn label_key(&self, apex: &[Vec<usize>], i: usize, m: usize, k: usize) -> Vec<[usize; 3]> {
        let mut tris = vec![[i, m, k]];
        collect(apex, i, m, &mut tris);
        collect(apex, m, k, &mut tris);
        self.sorted_label_triples(&tris)
    }

    pub fn sorted_label_triples(&self, tris: &[[usize; 3]]) -> Vec<[usize; 3]> {
        let mut keyed: Vec<[usize; 3]> = tris
            .iter()
            .map(|t| {
                let mut l = t.map(|v| self.labels[v]);
                l.sort_unstable();
                l
            })
            .collect();
        keyed.sort_unstable();
        keyed
    }
}

fn collect(apex: &[Vec<usize>], i: usize, k: usize, out: &mut Vec<[usize; 3]>) {
    if k <= i + 1 {
        return;
    }
    let m = apex[i][k];
    out.push([i, m, k]);
    collect(apex, i, m, out);
    collect(apex, m, k, out);
}

/// Builds the triangulation input for one boundary loop of `mesh`.
pub fn hole_polygon(mesh: &Mesh, boundary: &BoundaryLoop) -> HolePolygon {
    let mut face_of_edge: HashMap<(usize, usize), usize> = HashMap::new();
    for (f, face) in mesh.faces.iter().enumerate() {
        for k in 0..3 {
            face_of_edge.insert((face[k], face[(k + 1) % 3]), f);
        }
    }
    let outer_normals = boundary
        .edges()
        .map(|(a, b)| {
            // surface half-edge runs b -> a
            face_of_edge.get(&(b, a)).and_then(|&f| {
                let [p, q, r] = mesh.face_positions(f);
                triangle_geometry(p, q, r).1
            })
        })
        .collect();
    HolePolygon {
        points: boundary
            .vertex_indices
            .iter()
            .map(|&v| mesh.vertices[v])
            .collect(),
        labels: boundary.vertex_indices.clone(),
        outer_normals,
    }
}

pub fn fill_holes(mesh: &Mesh) -> Result<(Mesh, VertexMask), PreprocessError> {
    fill_holes_with(mesh, &FillOptions::default())
}

/// Triangulates every boundary loop, then splits patch edges longer than
/// `refine_factor` times the loop's mean boundary edge length at their
/// midpoints (longest first) until none remain.
pub fn fill_holes_with(
    mesh: &Mesh,
    options: &FillOptions,
) -> Result<(Mesh, VertexMask), PreprocessError> {
    if !(options.refine_factor > 0.0) {
        return Err(PreprocessError::InvalidParameter(format!(
            "refine factor {} must be positive",
            options.refine_factor
        )));
    }
    if !validate_mesh(mesh).is_manifold {
        return Err(PreprocessError::NonManifold);
    }
    let loops = find_boundary_loops(mesh)?;
    let original = mesh.vertex_count();
    let mut vertices = mesh.vertices.clone();
    let mut faces = mesh.faces.clone();

    for boundary in &loops {
        if boundary.len() < 3 {
            return Err(PreprocessError::LoopTooShort(boundary.len()));
        }
        let polygon = hole_polygon(mesh, boundary);
        let mut patch: Vec<[usize; 3]> = polygon
            .triangulate()?
            .into_iter()
            .map(|t| t.map(|v| boundary.vertex_indices[v]))
            .collect();

        let fixed: BTreeSet<(usize, usize)> = boundary
            .edges()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        let mean_boundary = boundary
            .edges()
            .map(|(a, b)| (vertices[a] - vertices[b]).norm())
            .sum::<f64>()
            / boundary.len() as f64;
        let threshold = options.refine_factor * mean_boundary;
        refine_patch(&mut vertices, &mut patch, &fixed, threshold);
        faces.extend(patch);
    }

    let mut flags = vec![true; original];
    flags.resize(vertices.len(), false);
    Ok((Mesh { vertices, faces }, VertexMask::from_flags(flags)))
}

fn refine_patch(
    vertices: &mut Vec<Vec3>,
    patch: &mut Vec<[usize; 3]>,
    fixed: &BTreeSet<(usize, usize)>,
    threshold: f64,
) {
    loop {
        let mut longest: Option<((usize, usize), f64)> = None;
        for face in patch.iter() {
            for k in 0..3 {
                let (a, b) = (face[k], face[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                if fixed.contains(&key) {
                    continue;
                }
                let len = (vertices[a] - vertices[b]).norm();
                if len <= threshold {
                    continue;
                }
                let take = match longest {
                    None => true,
                    Some((bk, bl)) => len > bl || (len == bl && key < bk),
                };
                if take {
                    longest = Some((key, len));
                }
            }
        }
        let Some(((a, b), _)) = longest else {
            return;
        };
        let mid = vertices.len();
        vertices.push((vertices[a] + vertices[b]) * 0.5);
        let mut split = Vec::with_capacity(patch.len() + 2);
        for &face in patch.iter() {
            let edge = (0..3).find(|&k| {
                let (p, q) = (face[k], face[(k + 1) % 3]);
                (p, q) == (a, b) || (p, q) == (b, a)
            });
            match edge {
                Some(k) => {
                    let (p, q, r) = (face[k], face[(k + 1) % 3], face[(k + 2) % 3]);
                    split.push([p, mid, r]);
                    split.push([mid, q, r]);
                }
                None => split.push(face),
            }
        }
        *patch = split;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{fixtures, validate_mesh};
    use crate::preprocess::{generate_bumpy_sphere, icosphere, remove_cap, BumpySphere};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Every triangulation of polygon span (i, k), by recursive apex choice.
    fn all_triangulations(i: usize, k: usize) -> Vec<Vec<[usize; 3]>> {
        if k <= i + 1 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for m in i + 1..k {
            for left in all_triangulations(i, m) {
                for right in all_triangulations(m, k) {
                    let mut t = vec![[i, m, k]];
                    t.extend(left.iter().copied());
                    t.extend(right.iter().copied());
                    out.push(t);
                }
            }
        }
        out
    }

    fn oracle_normal(p: &[Vec3], t: [usize; 3]) -> Option<Vec3> {
        let c = (p[t[1]] - p[t[0]]).cross(&(p[t[2]] - p[t[0]]));
        let s = [(t[0], t[1]), (t[0], t[2]), (t[1], t[2])]
            .iter()
            .map(|&(a, b)| (p[a] - p[b]).norm_squared())
            .fold(0.0, f64::max);
        (c.norm() > 1e-14 * s).then(|| c.normalize())
    }

    fn oracle_angle(a: Option<Vec3>, b: Option<Vec3>) -> f64 {
        match (a, b) {
            (Some(a), Some(b)) => a.dot(&b).clamp(-1.0, 1.0).acos(),
            _ => std::f64::consts::PI,
        }
    }

    /// Whole-triangulation weight evaluated from shared edges, independent of
    /// the recursion that produced it.
    fn oracle_best(poly: &HolePolygon) -> Vec<[usize; 3]> {
        let n = poly.len();
        let p = &poly.points;
        let mut best: Option<(f64, f64, Vec<[usize; 3]>, Vec<[usize; 3]>)> = None;
        for tris in all_triangulations(0, n - 1) {
            let area: f64 = tris
                .iter()
                .map(|t| 0.5 * (p[t[1]] - p[t[0]]).cross(&(p[t[2]] - p[t[0]])).norm())
                .sum();
            let normals: Vec<Option<Vec3>> = tris.iter().map(|&t| oracle_normal(p, t)).collect();
            let mut dih: f64 = 0.0;
            for (x, tx) in tris.iter().enumerate() {
                let edges = [(tx[0], tx[1]), (tx[1], tx[2]), (tx[0], tx[2])];
                for &(a, b) in &edges {
                    let (lo, hi) = (a.min(b), a.max(b));
                    if hi == lo + 1 {
                        dih = dih.max(oracle_angle(normals[x], poly.outer_normals[lo]));
                    } else if lo == 0 && hi == n - 1 {
                        dih = dih.max(oracle_angle(normals[x], poly.outer_normals[n - 1]));
                    }
                    for (y, ty) in tris.iter().enumerate() {
                        if y != x && ty.contains(&a) && ty.contains(&b) {
                            dih = dih.max(oracle_angle(normals[x], normals[y]));
                        }
                    }
                }
            }
            let key = poly.sorted_label_triples(&tris);
            let better = match &best {
                None => true,
                Some((ba, bd, bk, _)) => {
                    if !tied(area, *ba) {
                        area < *ba
                    } else if !tied(dih, *bd) {
                        dih < *bd
                    } else {
                        key < *bk
                    }
                }
            };
            if better {
                best = Some((area, dih, key, tris));
            }
        }
        best.unwrap().3
    }

    fn same_set(a: &HolePolygon, x: &[[usize; 3]], y: &[[usize; 3]]) -> bool {
        a.sorted_label_triples(x) == a.sorted_label_triples(y)
    }

    #[test]
    fn closed_mesh_unchanged() {
        let m = icosphere(2);
        let (out, mask) = fill_holes(&m).unwrap();
        assert_eq!(out, m);
        assert_eq!(mask, VertexMask::all_true(m.vertex_count()));
    }

    #[test]
    fn three_vertex_hole_gets_one_triangle() {
        let m = fixtures::tetrahedron();
        let open = Mesh::new(m.vertices.clone(), m.faces[..3].to_vec()).unwrap();
        let (out, mask) = fill_holes(&open).unwrap();
        assert_eq!(out.vertex_count(), 4);
        assert_eq!(out.face_count(), 4);
        assert_eq!(mask.count_true(), 4);
        let r = validate_mesh(&out);
        assert!(r.is_watertight() && r.is_consistently_oriented);
    }

    #[test]
    fn planar_square_hole_matches_enumeration() {
        let grid = fixtures::grid(3, 3);
        // drop the two triangles of the centre cell
        let faces: Vec<[usize; 3]> = grid
            .faces
            .iter()
            .enumerate()
            .filter(|(f, _)| *f != 8 && *f != 9)
            .map(|(_, &f)| f)
            .collect();
        let holed = Mesh::new(grid.vertices.clone(), faces).unwrap();
        let loops = find_boundary_loops(&holed).unwrap();
        let inner = loops.iter().find(|l| l.len() == 4).unwrap();
        let poly = hole_polygon(&holed, inner);
        let dp = poly.triangulate().unwrap();
        let brute = oracle_best(&poly);
        assert!(same_set(&poly, &dp, &brute));
        assert_eq!(all_triangulations(0, 3).len(), 2);
    }

    #[test]
    fn random_polygons_match_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for case in 0..60 {
            let n = 4 + case % 5;
            let points: Vec<Vec3> = (0..n)
                .map(|i| {
                    let t = i as f64 / n as f64 * std::f64::consts::TAU;
                    let r = rng.random_range(0.7..1.3);
                    Vec3::new(r * t.cos(), r * t.sin(), rng.random_range(-0.4..0.4))
                })
                .collect();
            let outer_normals = (0..n)
                .map(|_| {
                    let v = Vec3::new(
                        rng.random_range(-0.3..0.3),
                        rng.random_range(-0.3..0.3),
                        1.0,
                    );
                    Some(v.normalize())
                })
                .collect();
            let mut labels: Vec<usize> = (100..100 + n).collect();
            labels.rotate_left(case % n);
            let poly = HolePolygon {
                points,
                labels,
                outer_normals,
            };
            let dp = poly.triangulate().unwrap();
            let brute = oracle_best(&poly);
            assert!(same_set(&poly, &dp, &brute), "case {case}");
        }
    }

    #[test]
    fn tied_planar_polygons_match_enumeration() {
        // convex planar polygons: every triangulation has the same area and
        // zero dihedrals, so only the label order decides
        for n in 4..8 {
            let points: Vec<Vec3> = (0..n)
                .map(|i| {
                    let t = i as f64 / n as f64 * std::f64::consts::TAU;
                    Vec3::new(t.cos(), t.sin(), 0.0)
                })
                .collect();
            let poly = HolePolygon {
                points,
                labels: (0..n).rev().collect(),
                outer_normals: vec![Some(Vec3::z()); n],
            };
            let dp = poly.triangulate().unwrap();
            assert!(same_set(&poly, &dp, &oracle_best(&poly)), "n = {n}");
        }
    }

    #[test]
    fn cap_hole_fill_is_watertight_and_refined() {
        let shape = BumpySphere::new(4, 30, 0.1, 1).build();
        let cut = remove_cap(&shape.mesh, shape.centers[0], 0.3);
        let before = validate_mesh(&cut.mesh);
        let (filled, mask) = fill_holes(&cut.mesh).unwrap();
        let after = validate_mesh(&filled);
        assert!(after.is_watertight());
        assert!(after.is_manifold && after.is_consistently_oriented);
        assert_eq!(after.euler_characteristic, before.euler_characteristic + 1);
        assert_eq!(mask.count_true(), cut.mesh.vertex_count());
        assert!(!mask.filled_indices().is_empty());
        for i in 0..cut.mesh.vertex_count() {
            assert_eq!(filled.vertices[i], cut.mesh.vertices[i]);
        }
        // no patch edge above the threshold survives
        let boundary = &find_boundary_loops(&cut.mesh).unwrap()[0];
        let mean = boundary
            .edges()
            .map(|(a, b)| (cut.mesh.vertices[a] - cut.mesh.vertices[b]).norm())
            .sum::<f64>()
            / boundary.len() as f64;
        for f in &filled.faces[cut.mesh.face_count()..] {
            for k in 0..3 {
                let (a, b) = (f[k], f[(k + 1) % 3]);
                assert!((filled.vertices[a] - filled.vertices[b]).norm() <= 1.5 * mean + 1e-12);
            }
        }
    }

    #[test]
    fn two_holes_each_add_one_to_euler() {
        let sphere = generate_bumpy_sphere(3, 0, 0.0, 0);
        let a = remove_cap(&sphere, Vec3::z(), 0.4).mesh;
        let b = remove_cap(&a, -Vec3::z(), 0.4).mesh;
        let chi = validate_mesh(&b).euler_characteristic;
        let (filled, _) = fill_holes(&b).unwrap();
        let r = validate_mesh(&filled);
        assert!(r.is_watertight());
        assert_eq!(r.euler_characteristic, chi + 2);
    }

    #[test]
    fn rejects_non_manifold() {
        let m = Mesh::new(
            vec![
                Vec3::new(0.0, 0.0, 0.0),
                Vec3::new(1.0, 0.0, 0.0),
                Vec3::new(0.0, 1.0, 0.0),
                Vec3::new(0.0, -1.0, 0.0),
                Vec3::new(0.0, 0.0, 1.0),
            ],
            vec![[0, 1, 2], [1, 0, 3], [0, 1, 4]],
        )
        .unwrap();
        assert!(matches!(fill_holes(&m), Err(PreprocessError::NonManifold)));
    }
}
