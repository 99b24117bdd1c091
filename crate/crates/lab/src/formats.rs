//! On-disk formats: the point-cloud CSV and the plain-text edge list.

use std::fmt::Write as _;

use ripslab_core::domains::PointCloud;
use ripslab_core::geometry::Point;
use ripslab_core::proximity::Graph;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Cloud CSV: first line `dim,<d>`, then one point per line as d
/// comma-separated decimals. Floats are printed in shortest round-trip form,
/// so write + read reproduces the cloud exactly.
pub fn cloud_to_csv(cloud: &PointCloud) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "dim,{}", cloud.dim);
    for p in &cloud.points {
        let mut first = true;
        for c in &p.coords {
            if !first {
                out.push(',');
            }
            let _ = write!(out, "{c}");
            first = false;
        }
        out.push('\n');
    }
    out
}

pub fn cloud_from_csv(text: &str) -> Result<PointCloud, FormatError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(FormatError::Parse {
        line: 1,
        msg: "empty file".into(),
    })?;
    let dim: usize = header
        .strip_prefix("dim,")
        .and_then(|d| d.trim().parse().ok())
        .ok_or(FormatError::Parse {
            line: 1,
            msg: format!("expected `dim,<d>` header, got `{header}`"),
        })?;
    if dim == 0 {
        return Err(FormatError::Parse {
            line: 1,
            msg: "dimension must be >= 1".into(),
        });
    }
    let mut points = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let coords: Result<Vec<f64>, _> = line.split(',').map(|t| t.trim().parse()).collect();
        let coords = coords.map_err(|e| FormatError::Parse {
            line: idx + 1,
            msg: format!("bad coordinate: {e}"),
        })?;
        if coords.len() != dim {
            return Err(FormatError::Parse {
                line: idx + 1,
                msg: format!("expected {dim} coordinates, got {}", coords.len()),
            });
        }
        points.push(Point::new(coords));
    }
    Ok(PointCloud {
        dim,
        points,
        seed: 0,
        domain_tag: "file".into(),
    })
}

pub fn write_cloud(path: &std::path::Path, cloud: &PointCloud) -> Result<(), FormatError> {
    Ok(std::fs::write(path, cloud_to_csv(cloud))?)
}

pub fn read_cloud(path: &std::path::Path) -> Result<PointCloud, FormatError> {
    cloud_from_csv(&std::fs::read_to_string(path)?)
}

/// Edge list: `n m` header, then one `i j` line per edge with i < j, in
/// ascending order.
pub fn graph_to_edge_list(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", g.n(), g.edge_count());
    for v in 0..g.n() as u32 {
        for &w in g.neighbors(v) {
            if w > v {
                let _ = writeln!(out, "{v} {w}");
            }
        }
    }
    out
}
