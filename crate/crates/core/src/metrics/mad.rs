use crate::mesh::{face_normal, Mesh};

use super::MetricsError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MadReport {
    pub degrees: f64,
    pub compared: usize,
    /// Face pairs skipped because either face is degenerate.
    pub excluded: usize,
}

/// Mean angle in degrees between corresponding face normals.
pub fn mean_angular_difference(a: &Mesh, b: &Mesh) -> Result<f64, MetricsError> {
    mad_report(a, b).map(|r| r.degrees)
}

pub fn mad_report(a: &Mesh, b: &Mesh) -> Result<MadReport, MetricsError> {
    if a.faces != b.faces {
        return Err(MetricsError::ConnectivityMismatch(format!(
            "{} vs {} faces or differing indices",
            a.face_count(),
            b.face_count()
        )));
    }
    if a.vertex_count() != b.vertex_count() {
        return Err(MetricsError::ConnectivityMismatch(format!(
            "{} vs {} vertices",
            a.vertex_count(),
            b.vertex_count()
        )));
    }
    let mut sum = 0.0;
    let mut compared = 0;
    for f in 0..a.face_count() {
        let [p0, p1, p2] = a.face_positions(f);
        let [q0, q1, q2] = b.face_positions(f);
        let na = face_normal(p0, p1, p2);
        let nb = face_normal(q0, q1, q2);
        if na.degenerate || nb.degenerate {
            continue;
        }
        sum += na.normal.dot(&nb.normal).clamp(-1.0, 1.0).acos();
        compared += 1;
    }
    let excluded = a.face_count() - compared;
    if compared == 0 {
        return Err(MetricsError::AllDegenerate);
    }
    if excluded > 0 {
        log::warn!("{excluded} degenerate face pairs excluded from MAD");
    }
    Ok(MadReport {
        degrees: (sum / compared as f64).to_degrees(),
        compared,
        excluded,
    })
}
