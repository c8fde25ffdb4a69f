use crate::error::{Error, Result};
use crate::rbffd::{DiffSpec, NodeSet, OperatorBuilder};

use super::Material;

/// Displacement, strain and stress at a set of points.
#[derive(Debug, Clone, PartialEq)]
pub struct ElasticField {
    pub points: Vec<[f64; 2]>,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    /// `(e11, e22, e12)`
    pub strain: Vec<[f64; 3]>,
    /// `(s11, s22, s12)`
    pub stress: Vec<[f64; 3]>,
    pub von_mises: Vec<f64>,
}

impl ElasticField {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Builds the field from displacements and their gradients
    /// `[du1/dx, du1/dy, du2/dx, du2/dy]`.
    pub fn from_gradients(
        points: Vec<[f64; 2]>,
        u1: Vec<f64>,
        u2: Vec<f64>,
        grads: &[[f64; 4]],
        material: &Material,
    ) -> Self {
        let (lam, mu) = (material.lambda, material.mu);
        let mut strain = Vec::with_capacity(grads.len());
        let mut stress = Vec::with_capacity(grads.len());
        let mut vm = Vec::with_capacity(grads.len());
        for g in grads {
            let e = [g[0], g[3], 0.5 * (g[1] + g[2])];
            let tr = e[0] + e[1];
            let s = [lam * tr + 2.0 * mu * e[0], lam * tr + 2.0 * mu * e[1], 2.0 * mu * e[2]];
            strain.push(e);
            stress.push(s);
            vm.push(von_mises(s));
        }
        Self {
            points,
            u1,
            u2,
            strain,
            stress,
            von_mises: vm,
        }
    }
}

/// Von Mises stress of a plane stress state `(s11, s22, s12)`.
pub fn von_mises(s: [f64; 3]) -> f64 {
    (s[0] * s[0] - s[0] * s[1] + s[1] * s[1] + 3.0 * s[2] * s[2]).max(0.0).sqrt()
}

fn check_len(builder: &OperatorBuilder, u: &[f64]) -> Result<()> {
    if u.len() != builder.nodes().len() {
        return Err(Error::Size(format!(
            "{} nodal values for {} nodes",
            u.len(),
            builder.nodes().len()
        )));
    }
    Ok(())
}

/// Evaluates displacement, strain and stress at `points` from nodal values.
pub fn evaluate_field(
    builder: &OperatorBuilder,
    points: &NodeSet,
    u1: &[f64],
    u2: &[f64],
    material: &Material,
) -> Result<ElasticField> {
    check_len(builder, u1)?;
    check_len(builder, u2)?;
    let n = builder.config().stencil_size;
    let m = points.len();
    let mut v1 = vec![0.0; m];
    let mut v2 = vec![0.0; m];
    let mut grads = vec![[0.0; 4]; m];
    let ops = [DiffSpec::Identity, DiffSpec::Partial(0), DiffSpec::Partial(1)];
    builder.for_each_weights(points, &ops, |l, nb, w| {
        let mut acc = [0.0; 6];
        for k in 0..n {
            let (a, b) = (u1[nb[k]], u2[nb[k]]);
            let (wi, wx, wy) = (w[k], w[n + k], w[2 * n + k]);
            acc[0] += wi * a;
            acc[1] += wi * b;
            acc[2] += wx * a;
            acc[3] += wy * a;
            acc[4] += wx * b;
            acc[5] += wy * b;
        }
        v1[l] = acc[0];
        v2[l] = acc[1];
        grads[l] = [acc[2], acc[3], acc[4], acc[5]];
    })?;
    let pts = (0..m).map(|l| points.point2(l)).collect();
    Ok(ElasticField::from_gradients(pts, v1, v2, &grads, material))
}

/// Evaluates a scalar nodal field at `points`.
pub fn evaluate_scalar(builder: &OperatorBuilder, points: &NodeSet, u: &[f64]) -> Result<Vec<f64>> {
    check_len(builder, u)?;
    let mut out = vec![0.0; points.len()];
    builder.for_each_weights(points, &[DiffSpec::Identity], |l, nb, w| {
        out[l] = nb.iter().zip(w).map(|(&j, &wk)| wk * u[j]).sum();
    })?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_shear_von_mises() {
        let m = Material::new(2.6, 0.3).unwrap();
        // u = (y, 0): e12 = 1/2, s12 = mu
        let f = ElasticField::from_gradients(vec![[0.0; 2]], vec![0.0], vec![0.0], &[[0.0, 1.0, 0.0, 0.0]], &m);
        assert_eq!(f.stress[0], [0.0, 0.0, 1.0]);
        assert!((f.von_mises[0] - 3f64.sqrt()).abs() < 1e-14);
        // 2 mu sqrt(3) for u = (y, x)
        let f = ElasticField::from_gradients(vec![[0.0; 2]], vec![0.0], vec![0.0], &[[0.0, 1.0, 1.0, 0.0]], &m);
        assert!((f.von_mises[0] - 2.0 * 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn uniaxial_von_mises() {
        assert_eq!(von_mises([5.0, 0.0, 0.0]), 5.0);
        assert_eq!(von_mises([3.0, 3.0, 0.0]), 3.0);
    }
}
