//! Weighted rectangulations: a conformal metric constant on the components
//! of a direction, plus heavy thin collars around the critical leaves.

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::iet::{first_return, FlowDirection, Transversal};
use crate::scalar::Scalar;
use crate::square_tiled::cylinders::{cylinder_decomposition, Cylinder};
use crate::square_tiled::origami::Origami;
use crate::square_tiled::rectangulation::{Gluing, Rect, Rectangulation, Side};

/// How the components of the chosen direction are presented.
#[derive(Clone, Debug, PartialEq)]
pub enum ComponentData {
    /// A rational direction: the components are its maximal cylinders.
    Cylinders(i64, i64),
    /// A minimal direction with one ergodic class.
    Minimal(FlowDirection),
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightedRectangulation {
    #[serde(skip)]
    pub rectangulation: Rectangulation,
    #[serde(skip)]
    pub cylinders: Vec<Cylinder>,
    pub theta: Vec<f64>,
    pub epsilon: f64,
    pub delta: f64,
    /// Total length `L` of the critical leaves carrying collars.
    pub collar_length: f64,
    /// Flat width of each collar.
    pub collar_width: f64,
    /// `Σ θ_j² a_j`.
    pub principal_area: f64,
    /// Area of `ρ = ρ_θ + ρ_ε`, collars included.
    pub area: f64,
    /// `C` with `area ≤ principal_area + C ε`.
    pub epsilon_constant: f64,
    /// Constant of the `δ` term; zero when the components are cylinders or
    /// the single class is given exactly.
    pub delta_constant: f64,
    /// Number of first-return rectangles in the minimal case.
    pub return_rectangles: usize,
}

/// Rectangles of the cylinders in direction `(p, q)`: leaves run up the
/// rectangles, strips are stacked left to right, and each right edge is
/// glued piecewise to the left edges of the neighbouring cylinders.
fn cylinder_rectangles(o: &Origami, p: i64, q: i64, cyls: &[Cylinder]) -> Result<Rectangulation> {
    // work on the surface and direction the cylinders were computed on
    let (surface, dp, dq) = if cyls[0].is_transposed() { (o.transposed(), 0, 1) } else { (o.clone(), p, q) };
    let (dp, dq) = if dq < 0 { (-dp, -dq) } else { (dp, dq) };
    let qu = dq as usize;
    let norm2 = dp * dp + dq * dq;
    let norm = (norm2 as f64).sqrt();
    let right = |(s, k): (usize, usize)| if k + 1 < qu { (s, k + 1) } else { (surface.h()[s], 0) };
    // where each piece sits among the first strips
    let mut first_index = std::collections::HashMap::new();
    for (ci, c) in cyls.iter().enumerate() {
        for (i, &x) in c.strips[0].iter().enumerate() {
            first_index.insert(x, (ci, i));
        }
    }
    let rects = cyls
        .iter()
        .map(|c| Rect { w: Scalar::Float(c.height), h: Scalar::Float(c.circumference), weight: None })
        .collect();
    // one unit along the leaf is |d|/q per piece; offsets are measured in
    // units of 1/(q |d|)
    let unit = 1.0 / (dq as f64 * norm);
    let mut gluings = Vec::new();
    for (ci, c) in cyls.iter().enumerate() {
        gluings.push(Gluing { side: Side::Top, a: ci, a_start: 0.0, b: ci, b_start: 0.0, len: c.height });
        let m = c.core_length_steps() as i64;
        let count = c.strips.len();
        let period = m * norm2;
        for (i, &x0) in c.strips[0].iter().enumerate() {
            let mut y = x0;
            for _ in 1..count {
                y = right(y);
            }
            let (cj, j) = *first_index
                .get(&right(y))
                .ok_or_else(|| Error::Construction("cylinder boundary does not meet a first strip".into()))?;
            let start = (i as i64 * norm2 + count as i64 * dp).rem_euclid(period);
            let b_start = j as f64 * norm2 as f64 * unit;
            let len = norm2;
            if start + len <= period {
                gluings.push(Gluing {
                    side: Side::Right,
                    a: ci,
                    a_start: start as f64 * unit,
                    b: cj,
                    b_start,
                    len: len as f64 * unit,
                });
            } else {
                let first = period - start;
                gluings.push(Gluing {
                    side: Side::Right,
                    a: ci,
                    a_start: start as f64 * unit,
                    b: cj,
                    b_start,
                    len: first as f64 * unit,
                });
                gluings.push(Gluing {
                    side: Side::Right,
                    a: ci,
                    a_start: 0.0,
                    b: cj,
                    b_start: b_start + first as f64 * unit,
                    len: (len - first) as f64 * unit,
                });
            }
        }
    }
    Rectangulation::new(rects, gluings)
}

/// Builds `ρ = ρ_θ + ρ_ε`. Collars of width `ε³` and weight `1/ε` run along
/// the critical leaves, adding area `ε L + 2 ε² Σ θ len`.
pub fn weighted_rectangulation(
    o: &Origami,
    data: &ComponentData,
    theta: &[f64],
    epsilon: f64,
    delta: f64,
) -> Result<WeightedRectangulation> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::input("epsilon must lie in (0, 1)"));
    }
    if !(delta >= 0.0) {
        return Err(Error::input("delta must be nonnegative"));
    }
    if theta.iter().any(|t| !(*t >= 0.0 && t.is_finite())) {
        return Err(Error::input("weights must be finite and nonnegative"));
    }
    let collar_width = epsilon.powi(3);
    let collar_weight = 1.0 / epsilon;
    match data {
        ComponentData::Cylinders(p, q) => {
            let cyls = cylinder_decomposition(o, *p, *q)?;
            if theta.len() != cyls.len() {
                return Err(Error::input(format!(
                    "{} weights given for {} cylinders",
                    theta.len(),
                    cyls.len()
                )));
            }
            let rect = cylinder_rectangles(o, *p, *q, &cyls)?.with_weights(theta)?;
            let areas: Vec<f64> = cyls.iter().map(|c| c.area.to_f64().unwrap_or(f64::NAN)).collect();
            let principal: f64 = theta.iter().zip(&areas).map(|(t, a)| t * t * a).sum();
            // every cylinder boundary is made of saddle connections once the
            // genus exceeds one; each connection borders two sides
            let collar_length = if o.census().genus > 1 {
                cyls.iter().map(|c| c.circumference).sum()
            } else {
                0.0
            };
            // each collar lies half in each neighbouring cylinder; bound the
            // overlap term by the largest weight
            let tmax = theta.iter().copied().fold(0.0, f64::max);
            let overlap: f64 = if collar_length > 0.0 {
                cyls.iter()
                    .zip(theta)
                    .map(|(c, t)| {
                        // both boundaries of the cylinder, half a collar each
                        let extra = (t + collar_weight).powi(2) - t * t;
                        extra * c.circumference * collar_width
                    })
                    .sum()
            } else {
                0.0
            };
            Ok(WeightedRectangulation {
                rectangulation: rect,
                cylinders: cyls,
                theta: theta.to_vec(),
                epsilon,
                delta,
                collar_length,
                collar_width,
                principal_area: principal,
                area: principal + overlap,
                epsilon_constant: collar_length * (1.0 + 2.0 * epsilon * tmax),
                delta_constant: 0.0,
                return_rectangles: 0,
            })
        }
        ComponentData::Minimal(dir) => {
            if theta.len() != 1 {
                return Err(Error::Unsupported(
                    "minimal directions with several ergodic classes need declared measures".into(),
                ));
            }
            let arc = Transversal::Arc {
                square: 0,
                offset: num_rational::BigRational::from_integer(0.into()),
                length: num_rational::BigRational::from_integer(1.into()),
            };
            let (_, dec) = first_return(o, dir, &arc)?;
            let rect = Rectangulation::from_origami(o).with_weights(&vec![theta[0]; o.n()])?;
            let principal = theta[0] * theta[0] * o.n() as f64;
            Ok(WeightedRectangulation {
                rectangulation: rect,
                cylinders: Vec::new(),
                theta: theta.to_vec(),
                epsilon,
                delta,
                collar_length: 0.0,
                collar_width,
                principal_area: principal,
                area: principal,
                epsilon_constant: 0.0,
                delta_constant: 0.0,
                return_rectangles: dec.rects.len(),
            })
        }
    }
}
