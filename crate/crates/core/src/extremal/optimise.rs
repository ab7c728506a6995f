//! `sup_x (sum a_j x_j)^2 / sum b_j x_j^2` over the nonnegative orthant.

use crate::error::{Error, Result};
use crate::scalar::ExtReal;

#[derive(Clone, Debug, PartialEq)]
pub struct RatioProgram {
    a: Vec<f64>,
    b: Vec<f64>,
}

impl RatioProgram {
    pub fn new(a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::input("a and b must have the same length"));
        }
        if a.is_empty() {
            return Err(Error::input("empty program"));
        }
        for (j, (&x, &y)) in a.iter().zip(&b).enumerate() {
            if !(x.is_finite() && y.is_finite()) || x < 0.0 || y < 0.0 {
                return Err(Error::input(format!("entry {j} must be finite and nonnegative")));
            }
            if x == 0.0 && y == 0.0 {
                return Err(Error::input(format!("a_{j} and b_{j} are both zero")));
            }
        }
        Ok(RatioProgram { a, b })
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    /// The objective at a feasible point; `None` where it is 0/0.
    pub fn ratio_at(&self, x: &[f64]) -> Option<ExtReal> {
        let num: f64 = self.a.iter().zip(x).map(|(a, x)| a * x).sum();
        let den: f64 = self.b.iter().zip(x).map(|(b, x)| b * x * x).sum();
        if den > 0.0 {
            Some(ExtReal::Finite(num * num / den))
        } else if num > 0.0 {
            Some(ExtReal::Infinite)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Optimum {
    pub value: ExtReal,
    /// A maximiser, scaled so its largest entry is 1.
    pub argmax: Vec<f64>,
    /// Set when the supremum is infinite: an index with `b_j = 0 < a_j`.
    pub unbounded_at: Option<usize>,
}

/// Closed form: the supremum is `sum a_j^2 / b_j`, attained at
/// `x_j = a_j / b_j`.
pub fn optimise(p: &RatioProgram) -> Optimum {
    if let Some(j) = p.b.iter().zip(&p.a).position(|(&b, &a)| b == 0.0 && a > 0.0) {
        let mut argmax = vec![0.0; p.a.len()];
        argmax[j] = 1.0;
        return Optimum {
            value: ExtReal::Infinite,
            argmax,
            unbounded_at: Some(j),
        };
    }
    let value = p.a.iter().zip(&p.b).map(|(a, b)| a * a / b).sum();
    let mut argmax: Vec<f64> = p.a.iter().zip(&p.b).map(|(a, b)| a / b).collect();
    let m = argmax.iter().cloned().fold(0.0, f64::max);
    if m > 0.0 {
        argmax.iter_mut().for_each(|x| *x /= m);
    }
    Optimum {
        value: ExtReal::Finite(value),
        argmax,
        unbounded_at: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent oracle: exhaustive search over a simplex lattice.
    fn grid_max(p: &RatioProgram, steps: usize) -> f64 {
        fn rec(p: &RatioProgram, x: &mut Vec<f64>, left: usize, steps: usize, best: &mut f64) {
            if x.len() + 1 == p.a().len() {
                x.push(left as f64 / steps as f64);
                if let Some(ExtReal::Finite(v)) = p.ratio_at(x) {
                    *best = best.max(v);
                }
                x.pop();
                return;
            }
            for k in 0..=left {
                x.push(k as f64 / steps as f64);
                rec(p, x, left - k, steps, best);
                x.pop();
            }
        }
        let mut best = 0.0;
        rec(p, &mut Vec::new(), steps, steps, &mut best);
        best
    }

    #[test]
    fn worked_examples() {
        let p = RatioProgram::new(vec![1.0, 2.0], vec![1.0, 1.0]).unwrap();
        let o = optimise(&p);
        assert_eq!(o.value, ExtReal::Finite(5.0));
        assert_eq!(o.argmax, vec![0.5, 1.0]);
        assert!((grid_max(&p, 20000) - 5.0).abs() < 1e-6);

        let p = RatioProgram::new(vec![3.0], vec![2.0]).unwrap();
        assert_eq!(optimise(&p).value, ExtReal::Finite(4.5));

        let p = RatioProgram::new(vec![0.0, 1.0], vec![1.0, 1.0]).unwrap();
        let o = optimise(&p);
        assert_eq!(o.value, ExtReal::Finite(1.0));
        assert_eq!(o.argmax, vec![0.0, 1.0]);
        assert!((grid_max(&p, 20000) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn unbounded_component() {
        let p = RatioProgram::new(vec![1.0, 1.0], vec![1.0, 0.0]).unwrap();
        let o = optimise(&p);
        assert_eq!(o.value, ExtReal::Infinite);
        assert_eq!(o.unbounded_at, Some(1));
    }

    #[test]
    fn invalid_programs() {
        assert!(RatioProgram::new(vec![0.0], vec![0.0]).is_err());
        assert!(RatioProgram::new(vec![-1.0], vec![1.0]).is_err());
        assert!(RatioProgram::new(vec![1.0], vec![1.0, 2.0]).is_err());
    }
}
