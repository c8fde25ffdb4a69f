use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

pub const CONVERGENCE_HEADER: &str = "h,N,p,err_u1,err_u2,err_vm,order_u1,order_u2,order_vm,wall_ms";
pub const SPATIAL_HEADER: &str = "x,y,u1,u2,von_mises,err_u1,err_u2,err_vm";

/// One `(h, p)` run of a convergence study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub h: f64,
    pub n_nodes: usize,
    pub p: u32,
    pub err: [f64; 3],
    /// Tail order estimates up to this run; NaN with fewer than three runs.
    pub order: [f64; 3],
    /// Whether the errors strictly decrease over the same tail.
    pub converging: [bool; 3],
    pub wall_ms: u64,
}

fn fmt_order(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.4}")
    } else {
        "nan".into()
    }
}

pub fn convergence_csv(records: &[ConvergenceRecord]) -> String {
    let mut s = String::from(CONVERGENCE_HEADER);
    s.push('\n');
    for r in records {
        let _ = writeln!(
            s,
            "{},{},{},{:.6e},{:.6e},{:.6e},{},{},{},{}",
            r.h,
            r.n_nodes,
            r.p,
            r.err[0],
            r.err[1],
            r.err[2],
            fmt_order(r.order[0]),
            fmt_order(r.order[1]),
            fmt_order(r.order[2]),
            r.wall_ms
        );
    }
    s
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_convergence_csv(path: &Path, records: &[ConvergenceRecord]) -> Result<()> {
    write_file(path, &convergence_csv(records))
}

/// Reads a convergence table back. The `converging` flags are not stored and
/// come back as `order.is_finite()`.
pub fn parse_convergence_csv(text: &str, path: &Path) -> Result<Vec<ConvergenceRecord>> {
    let bad = |line: usize, reason: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CONVERGENCE_HEADER => {}
        _ => return Err(bad(1, "missing convergence header".into())),
    }
    let mut out = Vec::new();
    for (i, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').map(str::trim).collect();
        if f.len() != 10 {
            return Err(bad(i + 1, format!("expected 10 fields, found {}", f.len())));
        }
        let num = |k: usize| f[k].parse::<f64>().map_err(|e| bad(i + 1, format!("field {}: {e}", k + 1)));
        let int = |k: usize| f[k].parse::<u64>().map_err(|e| bad(i + 1, format!("field {}: {e}", k + 1)));
        let order = [num(6)?, num(7)?, num(8)?];
        out.push(ConvergenceRecord {
            h: num(0)?,
            n_nodes: int(1)? as usize,
            p: int(2)? as u32,
            err: [num(3)?, num(4)?, num(5)?],
            order,
            converging: order.map(f64::is_finite),
            wall_ms: int(9)?,
        });
    }
    Ok(out)
}

/// Reference point with reference values and candidate errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialRow {
    pub point: [f64; 2],
    pub u1: f64,
    pub u2: f64,
    pub von_mises: f64,
    pub err: [f64; 3],
}

pub fn spatial_csv(rows: &[SpatialRow]) -> String {
    let mut s = String::from(SPATIAL_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.6e},{:.6e},{:.6e}",
            r.point[0], r.point[1], r.u1, r.u2, r.von_mises, r.err[0], r.err[1], r.err[2]
        );
    }
    s
}

pub fn write_spatial_csv(path: &Path, rows: &[SpatialRow]) -> Result<()> {
    write_file(path, &spatial_csv(rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn convergence_round_trip() {
        let recs = vec![
            ConvergenceRecord {
                h: 0.04,
                n_nodes: 1234,
                p: 3,
                err: [1.5e-3, 2.25e-3, 0.1],
                order: [f64::NAN; 3],
                converging: [false; 3],
                wall_ms: 0,
            },
            ConvergenceRecord {
                h: 0.02,
                n_nodes: 4800,
                p: 3,
                err: [2e-4, 3e-4, 0.03],
                order: [2.9, 2.91, 1.75],
                converging: [true; 3],
                wall_ms: 17,
            },
        ];
        let text = convergence_csv(&recs);
        assert!(text.starts_with(CONVERGENCE_HEADER));
        let back = parse_convergence_csv(&text, Path::new("t.csv")).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back[1].n_nodes, 4800);
        assert_eq!(back[1].err, recs[1].err);
        assert!(back[0].order[0].is_nan());
        assert_eq!(back[1].order, [2.9, 2.91, 1.75]);
        assert!(parse_convergence_csv("h,N\n", Path::new("t.csv")).is_err());
    }
}
