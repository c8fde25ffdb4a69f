use std::f64::consts::PI;

use crate::error::{Error, Result};

const TWO_PI: f64 = 2.0 * PI;

pub const DEFAULT_STEEPNESS: f64 = 20.0;

/// Smooth blending between displacement (`kappa0 = 1`) and traction
/// (`kappa1 = 1`) conditions along the boundary parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct RobinCoefficients {
    transitions: Vec<f64>,
    steepness: f64,
    /// Window `i` runs from `transitions[i]` to the next transition (wrapping).
    traction_windows: Vec<usize>,
}

impl RobinCoefficients {
    pub fn new(transitions: Vec<f64>, steepness: f64, traction_windows: Vec<usize>) -> Result<Self> {
        if transitions.iter().any(|t| !(0.0..TWO_PI).contains(t)) {
            return Err(Error::param("transitions", "must lie in [0, 2pi)"));
        }
        if transitions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::param("transitions", "must be strictly increasing"));
        }
        if !(steepness.is_finite() && steepness > 0.0) {
            return Err(Error::param("steepness", "must be positive"));
        }
        let k = transitions.len();
        if traction_windows.iter().any(|&w| w >= k) {
            return Err(Error::param("traction_windows", "window index out of range"));
        }
        if k == 1 && !traction_windows.is_empty() {
            return Err(Error::param("traction_windows", "a window needs two transitions"));
        }
        Ok(Self {
            transitions,
            steepness,
            traction_windows,
        })
    }

    /// Pure displacement boundary.
    pub fn dirichlet() -> Self {
        Self {
            transitions: Vec::new(),
            steepness: DEFAULT_STEEPNESS,
            traction_windows: Vec::new(),
        }
    }

    pub fn transitions(&self) -> &[f64] {
        &self.transitions
    }

    pub fn steepness(&self) -> f64 {
        self.steepness
    }

    pub fn traction_windows(&self) -> &[usize] {
        &self.traction_windows
    }

    /// `(start, end)` of window `i` with `end > start`.
    fn window(&self, i: usize) -> (f64, f64) {
        let a = self.transitions[i];
        let b = self.transitions[(i + 1) % self.transitions.len()];
        (a, if b > a { b } else { b + TWO_PI })
    }

    pub fn traction_weight(&self, t: f64) -> f64 {
        let t = t.rem_euclid(TWO_PI);
        let e = self.steepness;
        let rise = |x: f64| 1.0 / (1.0 + (-e * x).exp());
        let fall = |x: f64| 1.0 / (1.0 + (e * x).exp());
        let mut sum = 0.0;
        for &w in &self.traction_windows {
            let (a, b) = self.window(w);
            for shift in [-TWO_PI, 0.0, TWO_PI] {
                sum += rise(t - a - shift) * fall(t - b - shift);
            }
        }
        sum.clamp(0.0, 1.0)
    }
}

/// `(kappa0, kappa1)` at parameter `t`.
pub fn robin_eval(rc: &RobinCoefficients, t: f64) -> (f64, f64) {
    let k1 = rc.traction_weight(t);
    (1.0 - k1, k1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partition_and_plateau() {
        let rc = RobinCoefficients::new(vec![1.0, 4.0], 20.0, vec![0]).unwrap();
        let (k0, k1) = robin_eval(&rc, 2.5);
        assert!(k1 >= 1.0 - 1e-8 && k0 <= 1e-8);
        let (_, k1) = robin_eval(&rc, 1.0);
        assert!((k1 - 0.5).abs() < 1e-10);
        let (_, k1) = robin_eval(&rc, 5.5);
        assert!(k1 < 1e-8);
        for i in 0..1000 {
            let t = TWO_PI * i as f64 / 1000.0;
            let (k0, k1) = robin_eval(&rc, t);
            assert_eq!(k0 + k1, 1.0);
            assert!((0.0..=1.0).contains(&k0) && (0.0..=1.0).contains(&k1));
        }
    }

    #[test]
    fn wrapping_window() {
        let rc = RobinCoefficients::new(vec![1.0, 5.0], 20.0, vec![1]).unwrap();
        assert!(robin_eval(&rc, 6.1).1 > 1.0 - 1e-8);
        assert!(robin_eval(&rc, 3.0).1 < 1e-8);
        assert!((robin_eval(&rc, 5.0).1 - 0.5).abs() < 1e-8);
    }

    #[test]
    fn validation() {
        assert!(RobinCoefficients::new(vec![2.0, 1.0], 20.0, vec![]).is_err());
        assert!(RobinCoefficients::new(vec![1.0, 2.0], 20.0, vec![2]).is_err());
        assert!(RobinCoefficients::new(vec![7.0], 20.0, vec![]).is_err());
        assert_eq!(robin_eval(&RobinCoefficients::dirichlet(), 1.0), (1.0, 0.0));
    }
}
