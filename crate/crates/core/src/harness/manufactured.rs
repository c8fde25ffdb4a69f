use crate::elasticity::{von_mises, BoundaryValues, Material};
use crate::error::{Error, Result};
use crate::pointset::Discretization;
use crate::smoothing::{robin_eval, RobinCoefficients};

/// Analytic displacement fields with closed-form derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ManufacturedField {
    /// `u = (c1, c2)`.
    Translation([f64; 2]),
    /// `u = (-y, x)`.
    Rotation,
    /// `u = (a x + b y, c x + d y)`.
    Linear([f64; 4]),
    /// `u = (x^2 - y^2, 2 x y)`, both components harmonic.
    Harmonic,
    /// `u = (sin x cos y, cos x sin y)`.
    Trig,
}

impl ManufacturedField {
    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "translation" => Self::Translation([0.3, -0.7]),
            "rotation" => Self::Rotation,
            "linear" => Self::Linear([0.4, -1.1, 0.7, 0.25]),
            "harmonic" => Self::Harmonic,
            "trig" => Self::Trig,
            _ => {
                return Err(Error::Config {
                    field: "solution".into(),
                    reason: format!("unknown manufactured solution `{name}`"),
                })
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Translation(_) => "translation",
            Self::Rotation => "rotation",
            Self::Linear(_) => "linear",
            Self::Harmonic => "harmonic",
            Self::Trig => "trig",
        }
    }

    pub fn displacement(&self, [x, y]: [f64; 2]) -> [f64; 2] {
        match *self {
            Self::Translation(c) => c,
            Self::Rotation => [-y, x],
            Self::Linear([a, b, c, d]) => [a * x + b * y, c * x + d * y],
            Self::Harmonic => [x * x - y * y, 2.0 * x * y],
            Self::Trig => [x.sin() * y.cos(), x.cos() * y.sin()],
        }
    }

    /// `[du1/dx, du1/dy, du2/dx, du2/dy]`
    pub fn gradient(&self, [x, y]: [f64; 2]) -> [f64; 4] {
        match *self {
            Self::Translation(_) => [0.0; 4],
            Self::Rotation => [0.0, -1.0, 1.0, 0.0],
            Self::Linear(m) => m,
            Self::Harmonic => [2.0 * x, -2.0 * y, 2.0 * y, 2.0 * x],
            Self::Trig => {
                let (sx, cx, sy, cy) = (x.sin(), x.cos(), y.sin(), y.cos());
                [cx * cy, -sx * sy, -sx * sy, cx * cy]
            }
        }
    }

    /// Second derivatives `[xx, yy, xy]` of each component.
    pub fn hessian(&self, [x, y]: [f64; 2]) -> [[f64; 3]; 2] {
        match *self {
            Self::Translation(_) | Self::Rotation | Self::Linear(_) => [[0.0; 3]; 2],
            Self::Harmonic => [[2.0, -2.0, 0.0], [0.0, 0.0, 2.0]],
            Self::Trig => {
                let (a, b) = (x.sin() * y.cos(), x.cos() * y.sin());
                [[-a, -a, -b], [-b, -b, -a]]
            }
        }
    }

    /// `f = -mu Laplacian u - (lambda + mu) grad div u`.
    pub fn body_force(&self, y: [f64; 2], m: &Material) -> [f64; 2] {
        let [h1, h2] = self.hessian(y);
        let (lam, mu) = (m.lambda, m.mu);
        [
            -mu * (h1[0] + h1[1]) - (lam + mu) * (h1[0] + h2[2]),
            -mu * (h2[0] + h2[1]) - (lam + mu) * (h1[2] + h2[1]),
        ]
    }

    /// `(s11, s22, s12)`
    pub fn stress(&self, y: [f64; 2], m: &Material) -> [f64; 3] {
        let g = self.gradient(y);
        let tr = g[0] + g[3];
        [
            m.lambda * tr + 2.0 * m.mu * g[0],
            m.lambda * tr + 2.0 * m.mu * g[3],
            m.mu * (g[1] + g[2]),
        ]
    }

    pub fn traction(&self, y: [f64; 2], normal: [f64; 2], m: &Material) -> [f64; 2] {
        let s = self.stress(y, m);
        [s[0] * normal[0] + s[2] * normal[1], s[2] * normal[0] + s[1] * normal[1]]
    }

    pub fn von_mises(&self, y: [f64; 2], m: &Material) -> f64 {
        von_mises(self.stress(y, m))
    }

    /// Exact boundary data at the discretization's boundary points, blended
    /// with `robin`.
    pub fn boundary_values(
        &self,
        disc: &Discretization,
        m: &Material,
        robin: Option<&RobinCoefficients>,
    ) -> BoundaryValues {
        let mb = disc.y_boundary.len();
        let pts: Vec<[f64; 2]> = (0..mb).map(|l| disc.y_boundary.point2(l)).collect();
        let displacement = pts.iter().map(|&p| self.displacement(p)).collect();
        let Some(rc) = robin else {
            return BoundaryValues::dirichlet(displacement);
        };
        let traction = pts
            .iter()
            .zip(&disc.normals)
            .map(|(&p, &n)| self.traction(p, n, m))
            .collect();
        let (kappa0, kappa1) = disc.boundary_params.iter().map(|&t| robin_eval(rc, t)).unzip();
        BoundaryValues {
            displacement,
            traction,
            kappa0,
            kappa1,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(f: ManufacturedField) {
        let y = [0.31, -0.47];
        let e = 1e-5;
        let g = f.gradient(y);
        for (k, d) in [[e, 0.0], [0.0, e]].iter().enumerate() {
            let up = f.displacement([y[0] + d[0], y[1] + d[1]]);
            let dn = f.displacement([y[0] - d[0], y[1] - d[1]]);
            for c in 0..2 {
                let fd = (up[c] - dn[c]) / (2.0 * e);
                assert!((fd - g[2 * c + k]).abs() < 1e-8, "{f:?} component {c} dir {k}");
            }
        }
        let h = f.hessian(y);
        for c in 0..2 {
            let gx = |p: [f64; 2]| f.gradient(p)[2 * c];
            let gy = |p: [f64; 2]| f.gradient(p)[2 * c + 1];
            let xx = (gx([y[0] + e, y[1]]) - gx([y[0] - e, y[1]])) / (2.0 * e);
            let yy = (gy([y[0], y[1] + e]) - gy([y[0], y[1] - e])) / (2.0 * e);
            let xy = (gx([y[0], y[1] + e]) - gx([y[0], y[1] - e])) / (2.0 * e);
            assert!((xx - h[c][0]).abs() < 1e-8 && (yy - h[c][1]).abs() < 1e-8 && (xy - h[c][2]).abs() < 1e-8);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for f in ["translation", "rotation", "linear", "harmonic", "trig"] {
            fd_check(ManufacturedField::parse(f).unwrap());
        }
    }

    #[test]
    fn trig_body_force_closed_form() {
        let m = Material::default();
        let y = [0.7, 0.2];
        let f = ManufacturedField::Trig.body_force(y, &m);
        let c = 2.0 * (m.lambda + 2.0 * m.mu);
        assert!((f[0] - c * y[0].sin() * y[1].cos()).abs() < 1e-9 * c);
        assert!((f[1] - c * y[0].cos() * y[1].sin()).abs() < 1e-9 * c);
        assert_eq!(ManufacturedField::Rotation.body_force(y, &m), [0.0, 0.0]);
    }

    #[test]
    fn rotation_is_stress_free() {
        let m = Material::default();
        assert_eq!(ManufacturedField::Rotation.stress([0.3, 0.1], &m), [0.0; 3]);
    }
}
