use crate::mesh::Mesh;

use super::MetricsError;

/// Root mean square of per-vertex distances over `subset`.
pub fn region_rmse(a: &Mesh, b: &Mesh, subset: &[usize]) -> Result<f64, MetricsError> {
    if a.vertex_count() != b.vertex_count() {
        return Err(MetricsError::ConnectivityMismatch(format!(
            "{} vs {} vertices",
            a.vertex_count(),
            b.vertex_count()
        )));
    }
    if subset.is_empty() {
        return Err(MetricsError::EmptySubset);
    }
    let mut sum = 0.0;
    for &i in subset {
        if i >= a.vertex_count() {
            return Err(MetricsError::IndexOutOfRange {
                index: i,
                count: a.vertex_count(),
            });
        }
        sum += (a.vertices[i] - b.vertices[i]).norm_squared();
    }
    Ok((sum / subset.len() as f64).sqrt())
}
