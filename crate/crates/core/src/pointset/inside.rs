use crate::error::Result;
use crate::smoothing::BoundaryGeometry;

/// Points this close to the polygon count as inside.
pub const BOUNDARY_TOLERANCE: f64 = 1e-9;

/// Winding-number inside test against a closed polygon, with edges bucketed
/// into horizontal strips.
#[derive(Debug, Clone)]
pub struct InsideTester {
    vertices: Vec<[f64; 2]>,
    y0: f64,
    strip: f64,
    buckets: Vec<Vec<u32>>,
}

impl InsideTester {
    pub fn from_polygon(vertices: Vec<[f64; 2]>) -> Self {
        let m = vertices.len();
        let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
        for v in &vertices {
            ymin = ymin.min(v[1]);
            ymax = ymax.max(v[1]);
        }
        let strips = (m / 4).clamp(1, 1 << 16);
        let y0 = ymin - 2.0 * BOUNDARY_TOLERANCE;
        let strip = ((ymax - ymin) + 4.0 * BOUNDARY_TOLERANCE) / strips as f64;
        let mut buckets = vec![Vec::new(); strips];
        for e in 0..m {
            let (a, b) = (vertices[e], vertices[(e + 1) % m]);
            let lo = a[1].min(b[1]) - BOUNDARY_TOLERANCE;
            let hi = a[1].max(b[1]) + BOUNDARY_TOLERANCE;
            let (s0, s1) = (Self::strip_of(y0, strip, strips, lo), Self::strip_of(y0, strip, strips, hi));
            for bucket in &mut buckets[s0..=s1] {
                bucket.push(e as u32);
            }
        }
        Self {
            vertices,
            y0,
            strip,
            buckets,
        }
    }

    /// Polygon through the fitted curve with arclength step at most `step`.
    pub fn from_geometry(geom: &BoundaryGeometry, step: f64) -> Result<Self> {
        Ok(Self::from_polygon(geom.dense_polygon(step)?))
    }

    fn strip_of(y0: f64, strip: f64, count: usize, y: f64) -> usize {
        (((y - y0) / strip).floor().max(0.0) as usize).min(count - 1)
    }

    pub fn polygon(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        let count = self.buckets.len();
        let y_end = self.y0 + self.strip * count as f64;
        if p[1] < self.y0 || p[1] > y_end {
            return false;
        }
        let bucket = &self.buckets[Self::strip_of(self.y0, self.strip, count, p[1])];
        let m = self.vertices.len();
        let mut winding = 0i32;
        for &e in bucket {
            let e = e as usize;
            let (a, b) = (self.vertices[e], self.vertices[(e + 1) % m]);
            if segment_distance2(p, a, b) <= BOUNDARY_TOLERANCE * BOUNDARY_TOLERANCE {
                return true;
            }
            let side = (b[0] - a[0]) * (p[1] - a[1]) - (p[0] - a[0]) * (b[1] - a[1]);
            if a[1] <= p[1] {
                if b[1] > p[1] && side > 0.0 {
                    winding += 1;
                }
            } else if b[1] <= p[1] && side < 0.0 {
                winding -= 1;
            }
        }
        winding != 0
    }
}

fn segment_distance2(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let s = if len2 > 0.0 {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let (ex, ey) = (a[0] + s * dx - p[0], a[1] + s * dy - p[1]);
    ex * ex + ey * ey
}

/// Inside test of a single point against the fitted curve, polygonized with
/// arclength step `step`.
pub fn inside(geom: &BoundaryGeometry, point: [f64; 2], step: f64) -> Result<bool> {
    Ok(InsideTester::from_geometry(geom, step)?.contains(point))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle(r: f64, m: usize) -> Vec<[f64; 2]> {
        (0..m)
            .map(|i| {
                let a = 2.0 * PI * i as f64 / m as f64;
                [r * a.cos(), r * a.sin()]
            })
            .collect()
    }

    #[test]
    fn circle_points() {
        let t = InsideTester::from_polygon(circle(0.5, 400));
        assert!(t.contains([0.0, 0.0]));
        assert!(!t.contains([2.0, 0.0]));
        assert!(!t.contains([0.0, -0.6]));
        assert!(t.contains([0.3, 0.3]));
        assert!(!t.contains([0.36, 0.36]));
    }

    #[test]
    fn tolerance_band() {
        let square = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let t = InsideTester::from_polygon(square.clone());
        assert!(t.contains([1.0 + 1e-12, 0.5]));
        assert!(t.contains([0.5, -1e-12]));
        assert!(!t.contains([1.0 + 1e-6, 0.5]));
        // orientation does not matter
        let rev: Vec<_> = square.into_iter().rev().collect();
        let t = InsideTester::from_polygon(rev);
        assert!(t.contains([0.5, 0.5]) && !t.contains([1.5, 0.5]));
    }

    #[test]
    fn nonconvex_polygon() {
        // U shape
        let u = vec![
            [0.0, 0.0],
            [3.0, 0.0],
            [3.0, 3.0],
            [2.0, 3.0],
            [2.0, 1.0],
            [1.0, 1.0],
            [1.0, 3.0],
            [0.0, 3.0],
        ];
        let t = InsideTester::from_polygon(u);
        assert!(t.contains([0.5, 2.0]));
        assert!(t.contains([2.5, 2.0]));
        assert!(!t.contains([1.5, 2.0]));
        assert!(t.contains([1.5, 0.5]));
    }
}
