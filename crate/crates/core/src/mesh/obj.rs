//! Wavefront OBJ text, restricted to `v` and `f` records.

use std::fmt::Write;

use super::{Mesh, MeshError, Vec3};

/// Parses OBJ text. Polygons are fan-triangulated from their first corner;
/// texture and normal references on face corners are ignored.
pub fn load_obj(source: &str) -> Result<Mesh, MeshError> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    // face corners are checked after all vertices are known
    let mut pending: Vec<(usize, Vec<usize>)> = Vec::new();

    for (lineno, raw) in source.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        let mut tokens = content.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let mut coords = [0.0; 3];
                for c in coords.iter_mut() {
                    let tok = tokens.next().ok_or_else(|| MeshError::Parse {
                        line,
                        message: "vertex needs three coordinates".into(),
                    })?;
                    *c = tok.parse::<f64>().map_err(|_| MeshError::Parse {
                        line,
                        message: format!("non-numeric coordinate `{tok}`"),
                    })?;
                    if !c.is_finite() {
                        return Err(MeshError::Parse {
                            line,
                            message: format!("non-finite coordinate `{tok}`"),
                        });
                    }
                }
                vertices.push(Vec3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let corners = tokens
                    .map(|tok| parse_corner(tok, line))
                    .collect::<Result<Vec<_>, _>>()?;
                if corners.len() < 3 {
                    return Err(MeshError::Parse {
                        line,
                        message: format!("face has {} vertices, need at least 3", corners.len()),
                    });
                }
                pending.push((line, corners));
            }
            _ => {}
        }
    }

    for (line, corners) in pending {
        if let Some(&bad) = corners.iter().find(|&&c| c >= vertices.len()) {
            return Err(MeshError::Parse {
                line,
                message: format!(
                    "index {} out of range ({} vertices)",
                    bad + 1,
                    vertices.len()
                ),
            });
        }
        for k in 1..corners.len() - 1 {
            faces.push([corners[0], corners[k], corners[k + 1]]);
        }
    }

    Mesh::new(vertices, faces)
}

fn parse_corner(token: &str, line: usize) -> Result<usize, MeshError> {
    let head = token.split('/').next().unwrap_or("");
    let value: i64 = head.parse().map_err(|_| MeshError::Parse {
        line,
        message: format!("bad face index `{token}`"),
    })?;
    if value < 0 {
        return Err(MeshError::Parse {
            line,
            message: format!("relative index `{token}` is not supported"),
        });
    }
    if value == 0 {
        return Err(MeshError::Parse {
            line,
            message: "face indices are 1-based".into(),
        });
    }
    Ok(value as usize - 1)
}

/// Serializes with shortest round-trip float formatting and 1-based indices.
pub fn save_obj(mesh: &Mesh) -> String {
    let mut out = String::with_capacity(mesh.vertices.len() * 48 + mesh.faces.len() * 24);
    for v in &mesh.vertices {
        writeln!(out, "v {:?} {:?} {:?}", v.x, v.y, v.z).unwrap();
    }
    for f in &mesh.faces {
        writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1).unwrap();
    }
    out
}
