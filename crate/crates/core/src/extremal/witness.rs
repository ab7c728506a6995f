//! The finite-time lower bound: a metric constant on the cylinders of the
//! vertical direction, and the exact record data it is compared with.

use std::sync::Arc;

use num_traits::ToPrimitive;

use crate::boundary::QDRecord;
use crate::error::{Error, Result};
use crate::extremal::discrete::{flowed_core_length, CurveClass};
use crate::extremal::optimise::{optimise, RatioProgram};
use crate::foliation::{ComponentBasis, ComponentDescriptor, ComponentKind, MeasuredFoliation};
use crate::scalar::Scalar;
use crate::square_tiled::cylinders::{core_intersection, cylinder_decomposition, Cylinder};
use crate::square_tiled::origami::Origami;

/// Cylinder data of the direction `(p, q)` and the crossings of each core
/// with the class.
fn cylinder_data(o: &Origami, p: i64, q: i64, f: &CurveClass) -> Result<(Vec<Cylinder>, Vec<f64>)> {
    let cyls = cylinder_decomposition(o, p, q)?;
    let own = cylinder_decomposition(o, f.p, f.q)?;
    let inter = cyls
        .iter()
        .map(|c| f.weight * own.iter().map(|g| core_intersection(o, c, g)).sum::<usize>() as f64)
        .collect();
    Ok((cyls, inter))
}

/// `L² / A` for `ρ = θ_j` on the `j`-th cylinder of direction `(p, q)`,
/// after flowing for time `t`, divided by `e^{2t}`. Here
/// `L = Σ θ_j w_j(t) i(G_j, F)` bounds the length of every representative
/// of `F` and `A = Σ θ_j² area_j`.
pub fn lower_bound_witness(o: &Origami, direction: (i64, i64), t: f64, theta: &[f64], f: &CurveClass) -> Result<f64> {
    let (cyls, inter) = cylinder_data(o, direction.0, direction.1, f)?;
    if theta.len() != cyls.len() {
        return Err(Error::input(format!("{} weights for {} cylinders", theta.len(), cyls.len())));
    }
    if theta.iter().any(|x| !(*x >= 0.0 && x.is_finite())) {
        return Err(Error::input("weights must be finite and nonnegative"));
    }
    let mut len = 0.0;
    let mut area = 0.0;
    for ((c, th), i) in cyls.iter().zip(theta).zip(&inter) {
        let a = c.area.to_f64().unwrap_or(f64::NAN);
        len += th * a / flowed_core_length(c, t) * i;
        area += th * th * a;
    }
    if area == 0.0 {
        return Ok(0.0);
    }
    Ok(len * len / area * (-2.0 * t).exp())
}

/// The weights maximising the witness, `θ_j ∝ i(G_j, F) / |hol_t(G_j)|`,
/// with the maximum from the closed-form ratio optimiser.
pub fn optimal_witness(o: &Origami, direction: (i64, i64), t: f64, f: &CurveClass) -> Result<(Vec<f64>, f64)> {
    let (cyls, inter) = cylinder_data(o, direction.0, direction.1, f)?;
    let a: Vec<f64> = cyls
        .iter()
        .zip(&inter)
        .map(|(c, i)| c.area.to_f64().unwrap_or(f64::NAN) / flowed_core_length(c, t) * i * (-t).exp())
        .collect();
    let b: Vec<f64> = cyls.iter().map(|c| c.area.to_f64().unwrap_or(f64::NAN)).collect();
    let theta: Vec<f64> = cyls.iter().zip(&inter).map(|(c, i)| i / flowed_core_length(c, t)).collect();
    let program = RatioProgram::new(a, b)?;
    let value = optimise(&program)
        .value
        .finite()
        .ok_or_else(|| Error::Construction("witness program is unbounded".into()))?;
    Ok((theta, value))
}

/// The quadratic-differential record of the cylinders in direction `v`
/// (heights as coefficients, circumferences as `ι`) together with the class
/// `f` written over a basis that holds both families and their crossings.
pub fn origami_record(o: &Origami, v: (i64, i64), f: &CurveClass) -> Result<(QDRecord, MeasuredFoliation)> {
    let vc = cylinder_decomposition(o, v.0, v.1)?;
    let fc = cylinder_decomposition(o, f.p, f.q)?;
    let axis = |d: (i64, i64)| d.0 == 0 || d.1 == 0;
    let exact_or = |x: f64, exact: bool| {
        if exact && x.fract() == 0.0 { Scalar::int(x as i64) } else { Scalar::Float(x) }
    };
    let comps: Vec<ComponentDescriptor> = (0..vc.len())
        .map(|j| ComponentDescriptor::new(format!("V{j}"), ComponentKind::Annular))
        .collect();
    let n = vc.len();
    let basis = Arc::new(ComponentBasis::new(comps.clone(), vec![vec![Scalar::zero(); n]; n])?);
    let coeffs = vc.iter().map(|c| exact_or(c.height, axis(v))).collect();
    let areas = vc.iter().map(|c| exact_or(c.circumference, axis(v))).collect();
    let record = QDRecord::new(basis.clone(), coeffs, areas)?;

    let parallel = v.0 * f.q - v.1 * f.p == 0;
    let class = if parallel {
        MeasuredFoliation::component_sum(basis, vec![Scalar::Float(f.weight); n])?
    } else {
        let m = fc.len();
        let mut all = comps;
        all.extend((0..m).map(|k| ComponentDescriptor::new(format!("F{k}"), ComponentKind::Annular)));
        let mut gram = vec![vec![Scalar::zero(); n + m]; n + m];
        for (j, c) in vc.iter().enumerate() {
            for (k, g) in fc.iter().enumerate() {
                let x = Scalar::int(core_intersection(o, c, g) as i64);
                gram[j][n + k] = x.clone();
                gram[n + k][j] = x;
            }
        }
        let big = Arc::new(ComponentBasis::new(all, gram)?);
        let w = if f.weight.fract() == 0.0 { Scalar::int(f.weight as i64) } else { Scalar::Float(f.weight) };
        let mut coeffs = vec![Scalar::zero(); n];
        coeffs.extend(std::iter::repeat(w).take(m));
        MeasuredFoliation::component_sum(big, coeffs)?
    };
    Ok((record, class))
}
