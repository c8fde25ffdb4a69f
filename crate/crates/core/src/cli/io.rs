use std::fmt::Write as _;
use std::path::Path;

use crate::elasticity::ElasticField;
use crate::error::{Error, Result};
use crate::smoothing::{BoundaryGeometry, DataAnchors, RobinCoefficients, DEFAULT_STEEPNESS};

pub const CURVE_HEADER: &str = "t,x,y,nx,ny";
pub const SOLUTION_HEADER: &str = "x,y,u1,u2,von_mises";

const DIAPHRAGM_VERTICES: &str = include_str!("../../data/diaphragm/vertices.csv");
const DIAPHRAGM_G1: &str = include_str!("../../data/diaphragm/g1.csv");
const DIAPHRAGM_G2: &str = include_str!("../../data/diaphragm/g2.csv");
const DIAPHRAGM_H1: &str = include_str!("../../data/diaphragm/h1.csv");
const DIAPHRAGM_H2: &str = include_str!("../../data/diaphragm/h2.csv");

/// Parameter window of the built-in data set where traction is imposed.
pub const DIAPHRAGM_TRACTION_WINDOW: [f64; 2] = [2.75, 3.55];
/// Millimetres to scaled units for the built-in vertices.
pub const DIAPHRAGM_SCALE: f64 = 1.0 / 156.92;

/// Parses two-column numeric CSV text with a header row.
pub fn parse_pairs_csv(text: &str, path: &Path) -> Result<Vec<[f64; 2]>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let bad = |reason: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            reason,
        };
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        if rec.len() != 2 {
            return Err(bad(format!("expected 2 fields, found {}", rec.len())));
        }
        let num = |k: usize| rec[k].parse::<f64>().map_err(|e| bad(format!("field {}: {e}", k + 1)));
        let v = [num(0)?, num(1)?];
        if !(v[0].is_finite() && v[1].is_finite()) {
            return Err(bad("non-finite value".into()));
        }
        out.push(v);
    }
    Ok(out)
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Reads an `x,y` vertex file.
pub fn read_vertices(path: &Path) -> Result<Vec<[f64; 2]>> {
    parse_pairs_csv(&read_text(path)?, path)
}

/// Reads a `t,value` anchor file.
pub fn read_anchors(path: &Path) -> Result<DataAnchors> {
    anchors_from_text(&read_text(path)?, path)
}

fn anchors_from_text(text: &str, path: &Path) -> Result<DataAnchors> {
    let pts = parse_pairs_csv(text, path)?;
    DataAnchors::new(pts.into_iter().map(|[t, v]| (t, v)).collect())
}

/// Largest-coordinate-to-0.95 scale for raw vertices.
pub fn auto_scale(vertices: &[[f64; 2]]) -> Result<f64> {
    let m = vertices.iter().flatten().fold(0.0f64, |m, c| m.max(c.abs()));
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::param("scale", "vertices are all at the origin"));
    }
    Ok(0.95 / m)
}

/// The shipped dome-shaped test geometry with its anchors and traction
/// window.
#[derive(Debug, Clone)]
pub struct BuiltinDataset {
    pub vertices: Vec<[f64; 2]>,
    pub scale: f64,
    pub g1: DataAnchors,
    pub g2: DataAnchors,
    pub h1: DataAnchors,
    pub h2: DataAnchors,
    pub robin: RobinCoefficients,
}

pub fn builtin_dataset() -> BuiltinDataset {
    let p = Path::new("<builtin>");
    let anchors = |t| anchors_from_text(t, p).expect("built-in anchors parse");
    BuiltinDataset {
        vertices: parse_pairs_csv(DIAPHRAGM_VERTICES, p).expect("built-in vertices parse"),
        scale: DIAPHRAGM_SCALE,
        g1: anchors(DIAPHRAGM_G1),
        g2: anchors(DIAPHRAGM_G2),
        h1: anchors(DIAPHRAGM_H1),
        h2: anchors(DIAPHRAGM_H2),
        robin: RobinCoefficients::new(DIAPHRAGM_TRACTION_WINDOW.to_vec(), DEFAULT_STEEPNESS, vec![0])
            .expect("valid built-in blending"),
    }
}

/// Curve samples uniform in arclength with outward normals.
pub fn curve_csv(geom: &BoundaryGeometry, count: usize) -> Result<String> {
    let ts = geom.uniform_arclength_params(count);
    let pts = geom.points(&ts)?;
    let nrm = geom.normals(&ts)?;
    let mut s = String::from(CURVE_HEADER);
    s.push('\n');
    for i in 0..ts.len() {
        let _ = writeln!(
            s,
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            ts[i], pts[i][0], pts[i][1], nrm[i][0], nrm[i][1]
        );
    }
    Ok(s)
}

/// Field values at its points; scalar fields write zeros for `u2` and von
/// Mises.
pub fn solution_csv(field: &ElasticField) -> String {
    let scalar = field.u2.is_empty();
    let mut s = String::from(SOLUTION_HEADER);
    s.push('\n');
    for i in 0..field.points.len() {
        let (u2, vm) = if scalar { (0.0, 0.0) } else { (field.u2[i], field.von_mises[i]) };
        let _ = writeln!(
            s,
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            field.points[i][0], field.points[i][1], field.u1[i], u2, vm
        );
    }
    s
}

pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairs_parse_and_report_lines() {
        let p = Path::new("v.csv");
        let v = parse_pairs_csv("x,y\n1, 2\n# skipped\n3.5,-4\n", p).unwrap();
        assert_eq!(v, vec![[1.0, 2.0], [3.5, -4.0]]);
        match parse_pairs_csv("x,y\n1,2\n3,abc\n", p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn builtin_data_fits_unit_box() {
        let d = builtin_dataset();
        let m = d.vertices.iter().flatten().fold(0.0f64, |m, c| m.max(c.abs()));
        assert!(m * d.scale < 1.0);
        assert!(d.vertices.len() > 100);
        assert_eq!(d.robin.traction_windows(), &[0]);
    }
}
