//! Boundary functionals attached to quadratic differentials.
//!
//! A [`QDRecord`] stores only what the boundary calculus needs: the
//! vertical foliation `V(q) = sum lambda_j G_j` over a basis of mutually
//! disjoint indecomposable components, and the areas
//! `iota_j = i(G_j, H(q))`. From these come the functional
//! `E_q(F)^2 = sum lambda_j i(G_j, F)^2 / iota_j`, its dual `E*_q`,
//! horofunctions, modular equivalence and the detour metric.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extremal::distance::ExtBracket;
use crate::extremal::optimise::{optimise, RatioProgram};
use crate::foliation::{
    component_intersections, dominated_by, same_basis, ComponentBasis, ComponentDescriptor,
    ComponentGeometry, ComponentKind, Direction, Domination, MeasuredFoliation, ProbeFamily,
};
use crate::scalar::{ExtReal, Scalar};
use crate::torus::{ext_length, hm_oracle, TorusPoint, TorusQD};

const AREA_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct QDRecord {
    basis: Arc<ComponentBasis>,
    coeffs: Vec<Scalar>,
    areas: Vec<Scalar>,
}

impl QDRecord {
    pub fn new(basis: Arc<ComponentBasis>, coeffs: Vec<Scalar>, areas: Vec<Scalar>) -> Result<Self> {
        if !basis.is_mutually_disjoint() {
            return Err(Error::input("record basis must be mutually non-intersecting"));
        }
        if coeffs.len() != basis.len() || areas.len() != basis.len() {
            return Err(Error::input("coeffs and areas must match the basis size"));
        }
        if coeffs.iter().any(Scalar::is_negative) || areas.iter().any(Scalar::is_negative) {
            return Err(Error::input("coefficients and areas must be nonnegative"));
        }
        if coeffs.iter().all(Scalar::is_zero) {
            return Err(Error::input("vertical foliation must be nonzero"));
        }
        for (j, (c, a)) in coeffs.iter().zip(&areas).enumerate() {
            if c.is_positive() && !a.is_positive() {
                return Err(Error::input(format!(
                    "component {:?} is in the support but has zero area",
                    basis.components()[j].id
                )));
            }
        }
        Ok(QDRecord { basis, coeffs, areas })
    }

    /// Single-component record of a torus quadratic differential. The
    /// component is the unit-weight line in the vertical direction.
    pub fn from_torus(q: &TorusQD) -> Self {
        let mut comp = ComponentDescriptor::new("V", ComponentKind::MinimalErgodic);
        comp.geometry = Some(ComponentGeometry::Torus(q.vertical.direction));
        let basis = Arc::new(
            ComponentBasis::new(vec![comp], vec![vec![Scalar::zero()]]).expect("valid basis"),
        );
        let iota = &q.vertical.direction.abs_det(&q.horizontal.direction) * &q.horizontal.weight;
        QDRecord {
            basis,
            coeffs: vec![q.vertical.weight.clone()],
            areas: vec![iota],
        }
    }

    pub fn basis(&self) -> &Arc<ComponentBasis> {
        &self.basis
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn areas(&self) -> &[Scalar] {
        &self.areas
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn total_area(&self) -> Scalar {
        self.coeffs
            .iter()
            .zip(&self.areas)
            .fold(Scalar::zero(), |acc, (c, a)| &acc + &(c * a))
    }

    pub fn is_unit_area(&self) -> bool {
        (self.total_area().to_f64() - 1.0).abs() <= AREA_TOL
    }

    fn require_unit_area(&self) -> Result<()> {
        if self.is_unit_area() {
            Ok(())
        } else {
            Err(Error::Normalization(format!(
                "record must have unit area, has {}",
                self.total_area()
            )))
        }
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&j| self.coeffs[j].is_positive()).collect()
    }

    /// `V(q)` as a component sum.
    pub fn vertical(&self) -> MeasuredFoliation {
        MeasuredFoliation::ComponentSum {
            basis: self.basis.clone(),
            coeffs: self.coeffs.clone(),
        }
    }

    /// The record with coefficients scaled by `c`; areas are unchanged.
    pub fn scaled(&self, c: &Scalar) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::input("scale must be positive"));
        }
        Ok(QDRecord {
            basis: self.basis.clone(),
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
            areas: self.areas.clone(),
        })
    }

    /// Ratios `lambda_j / iota_j` on the support, zero elsewhere.
    pub fn ratios(&self) -> Vec<Scalar> {
        self.coeffs
            .iter()
            .zip(&self.areas)
            .map(|(c, a)| if c.is_positive() { c.div(a) } else { Scalar::zero() })
            .collect()
    }

    /// Canonical boundary representative.
    pub fn boundary_point(&self) -> BoundaryPoint {
        let ratios = self.ratios();
        let mut max = Scalar::zero();
        for r in &ratios {
            if *r > max {
                max = r.clone();
            }
        }
        BoundaryPoint {
            basis: self.basis.clone(),
            ratios: ratios.iter().map(|r| r.div(&max)).collect(),
        }
    }
}

/// A record up to modular equivalence: the ratio vector scaled so its
/// largest entry is 1.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryPoint {
    pub basis: Arc<ComponentBasis>,
    pub ratios: Vec<Scalar>,
}

/// `i(G_j, F)` for every component of the record.
pub fn record_intersections(q: &QDRecord, f: &MeasuredFoliation) -> Result<Vec<Scalar>> {
    component_intersections(&q.basis, f)
}

/// `E_q(F)^2`.
pub fn eq_eval_sq(q: &QDRecord, f: &MeasuredFoliation) -> Result<Scalar> {
    let i = record_intersections(q, f)?;
    Ok(eq_sq_from_intersections(q, &i))
}

fn eq_sq_from_intersections(q: &QDRecord, i: &[Scalar]) -> Scalar {
    let mut total = Scalar::zero();
    for j in q.support() {
        if i[j].is_zero() {
            continue;
        }
        total = &total + &(&(&q.coeffs[j] * &(&i[j] * &i[j])).div(&q.areas[j]));
    }
    total
}

/// `E_q(F) = (sum lambda_j i(G_j, F)^2 / iota_j)^(1/2)`.
pub fn eq_eval(q: &QDRecord, f: &MeasuredFoliation) -> Result<f64> {
    Ok(eq_eval_sq(q, f)?.to_f64().sqrt())
}

/// Coefficients of `f` over the record's basis, when it can be written
/// there at all.
fn coefficients_over(q: &QDRecord, f: &MeasuredFoliation) -> Option<Vec<Scalar>> {
    match f {
        MeasuredFoliation::ComponentSum { basis, coeffs } => {
            if same_basis(basis, &q.basis) {
                Some(coeffs.clone())
            } else {
                None
            }
        }
        MeasuredFoliation::TorusLine(l) => {
            // Over a torus basis a line is a multiple of the component
            // with the same direction.
            let mut out = vec![Scalar::zero(); q.len()];
            for (j, c) in q.basis.components().iter().enumerate() {
                if let Some(ComponentGeometry::Torus(d)) = &c.geometry {
                    if d.is_parallel(&l.direction) {
                        let (x, y) = d.as_f64();
                        let (u, v) = l.direction.as_f64();
                        out[j] = if d == &l.direction {
                            l.weight.clone()
                        } else {
                            Scalar::Float(l.weight.to_f64() * u.hypot(v) / x.hypot(y))
                        };
                        return Some(out);
                    }
                }
            }
            None
        }
    }
}

/// `E*_q(F)`: finite exactly when `F = sum f_j lambda_j G_j` with support in
/// that of `V(q)`, where it equals `sum f_j^2 lambda_j iota_j`.
pub fn dual_eval(q: &QDRecord, f: &MeasuredFoliation) -> Result<ExtReal> {
    let Some(coeffs) = coefficients_over(q, f) else {
        return Ok(ExtReal::Infinite);
    };
    let fol = MeasuredFoliation::ComponentSum {
        basis: q.basis.clone(),
        coeffs,
    };
    match dominated_by(&fol, &q.vertical())? {
        Domination::No(_) => Ok(ExtReal::Infinite),
        Domination::Yes(rel) => {
            let mut total = Scalar::zero();
            for j in q.support() {
                let a = &q.coeffs[j] * &q.areas[j];
                total = &total + &(&(&rel[j] * &rel[j]) * &a);
            }
            Ok(ExtReal::Finite(total.to_f64()))
        }
    }
}

/// `sup_F' i(F, F')^2 / E*_q(F')`, computed exactly with the closed-form
/// maximiser over the components of `V(q)`.
pub fn flip_sup(q: &QDRecord, f: &MeasuredFoliation) -> Result<f64> {
    let i = record_intersections(q, f)?;
    let support = q.support();
    let a: Vec<f64> = support
        .iter()
        .map(|&j| (&q.coeffs[j] * &i[j]).to_f64())
        .collect();
    let b: Vec<f64> = support
        .iter()
        .map(|&j| (&q.coeffs[j] * &q.areas[j]).to_f64())
        .collect();
    if a.iter().all(|&x| x == 0.0) {
        return Ok(0.0);
    }
    let p = RatioProgram::new(a, b)?;
    Ok(optimise(&p).value.to_f64_lossy())
}

/// The same supremum restricted to a probe family; a lower bound for
/// [`flip_sup`]. Probes off the support of `V(q)` contribute nothing.
pub fn flip_sup_over(q: &QDRecord, f: &MeasuredFoliation, probes: &ProbeFamily) -> Result<f64> {
    let i_f = record_intersections(q, f)?;
    let mut best: f64 = 0.0;
    for g in probes.members() {
        let ExtReal::Finite(d) = dual_eval(q, g)? else {
            continue;
        };
        let Some(c) = coefficients_over(q, g) else {
            continue;
        };
        // i(F, G') for G' = sum c_j G_j
        let num: f64 = c.iter().zip(&i_f).map(|(c, i)| (c * i).to_f64()).sum();
        if d > 0.0 {
            best = best.max(num * num / d);
        }
    }
    Ok(best)
}

/// `sup_F E_q(F)^2 / Ext_x(F)` over the probes, using upper brackets of
/// `Ext_x` so the result is a lower bound for the full supremum.
fn sup_over_probes<X: ExtBracket>(q: &QDRecord, x: &X, probes: &ProbeFamily) -> Result<f64> {
    let mut best: f64 = 0.0;
    for f in probes.members() {
        let e = eq_eval_sq(q, f)?.to_f64();
        if e == 0.0 {
            continue;
        }
        if let (_, ExtReal::Finite(u)) = x.ext_bracket(f)? {
            best = best.max(e / u);
        }
    }
    Ok(best)
}

/// `psi_q(x) = (1/2) log sup_F E_q^2/Ext_x - (1/2) log sup_F E_q^2/Ext_b`,
/// both suprema over `probes`.
pub fn horofunction_eval<X: ExtBracket, B: ExtBracket>(
    q: &QDRecord,
    x: &X,
    probes: &ProbeFamily,
    basepoint: &B,
) -> Result<f64> {
    Horofunction::new(q, probes, basepoint)?.eval(x)
}

/// `psi_q` with `E_q^2` on the probes and the basepoint term computed once,
/// for evaluating at many points.
#[derive(Clone, Debug)]
pub struct Horofunction {
    probes: Vec<(MeasuredFoliation, f64)>,
    base_term: f64,
}

impl Horofunction {
    pub fn new<B: ExtBracket>(q: &QDRecord, probes: &ProbeFamily, basepoint: &B) -> Result<Self> {
        if probes.is_empty() {
            return Err(Error::input("empty probe family"));
        }
        let mut seen = Vec::new();
        for f in probes.members() {
            let e = eq_eval_sq(q, f)?.to_f64();
            if e > 0.0 {
                seen.push((f.clone(), e));
            }
        }
        let mut h = Horofunction { probes: seen, base_term: 0.0 };
        let sb = h.sup(basepoint)?;
        if sb == 0.0 {
            return Err(Error::input("probe family does not see the record"));
        }
        h.base_term = 0.5 * sb.ln();
        Ok(h)
    }

    fn sup<X: ExtBracket>(&self, x: &X) -> Result<f64> {
        let mut best: f64 = 0.0;
        for (f, e) in &self.probes {
            if let (_, ExtReal::Finite(u)) = x.ext_bracket(f)? {
                best = best.max(e / u);
            }
        }
        Ok(best)
    }

    pub fn eval<X: ExtBracket>(&self, x: &X) -> Result<f64> {
        let sx = self.sup(x)?;
        if sx == 0.0 {
            return Err(Error::input("probe family does not see the record"));
        }
        Ok(0.5 * sx.ln() - self.base_term)
    }
}

/// Primitive torus probes with `|p|, |q| <= cap`, plus the directions of the
/// horizontal foliations at `x` of every torus component in the record, at
/// which the torus supremum is attained.
pub fn torus_adaptive_probes(q: &QDRecord, points: &[TorusPoint], cap: i64) -> ProbeFamily {
    let mut extra = Vec::new();
    for c in q.basis.components() {
        if let Some(ComponentGeometry::Torus(d)) = &c.geometry {
            let line = crate::foliation::TorusLine {
                direction: *d,
                weight: Scalar::one(),
            };
            for x in points {
                extra.push(MeasuredFoliation::TorusLine(hm_oracle(x, &line)));
            }
        }
    }
    ProbeFamily::torus_primitive(cap).extended(extra)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModularCheck {
    pub equivalent: bool,
    /// `C` with `lambda_j / iota_j = C lambda'_j / iota'_j` on the support.
    pub constant: Option<Scalar>,
    pub reason: Option<String>,
}

pub fn modular_equivalent(q1: &QDRecord, q2: &QDRecord) -> ModularCheck {
    let no = |reason: &str| ModularCheck {
        equivalent: false,
        constant: None,
        reason: Some(reason.to_string()),
    };
    if !same_basis(&q1.basis, &q2.basis) {
        return no("records are over different bases");
    }
    if q1.support() != q2.support() {
        return no("supports differ");
    }
    let (r1, r2) = (q1.ratios(), q2.ratios());
    let support = q1.support();
    let c = r1[support[0]].div(&r2[support[0]]);
    for &j in &support[1..] {
        let cj = r1[j].div(&r2[j]);
        let same = if c.is_exact() && cj.is_exact() {
            cj == c
        } else {
            (cj.to_f64() - c.to_f64()).abs() <= 1e-12 * c.to_f64().abs()
        };
        if !same {
            return no("ratio vectors are not proportional");
        }
    }
    ModularCheck {
        equivalent: true,
        constant: Some(c),
        reason: None,
    }
}

/// `sup_F E_q(F)^2 / E_q'(F)^2` and the index attaining it (lowest on
/// ties). Infinite when `V(q)` is not dominated by `V(q')`.
pub fn sup_ratio(q: &QDRecord, qp: &QDRecord) -> (ExtReal, Option<usize>) {
    if !same_basis(&q.basis, &qp.basis) {
        return (ExtReal::Infinite, None);
    }
    let (r, rp) = (q.ratios(), qp.ratios());
    let mut best: Option<(Scalar, usize)> = None;
    for j in q.support() {
        if !qp.coeffs[j].is_positive() {
            return (ExtReal::Infinite, Some(j));
        }
        let v = r[j].div(&rp[j]);
        if best.as_ref().map_or(true, |(b, _)| v > *b) {
            best = Some((v, j));
        }
    }
    let (v, j) = best.expect("nonempty support");
    (ExtReal::Finite(v.to_f64()), Some(j))
}

/// Exact `max_j` of the ratio quotient, kept rational when possible so that
/// equivalent records give exactly zero.
fn sup_ratio_scalar(q: &QDRecord, qp: &QDRecord) -> Option<Scalar> {
    if !same_basis(&q.basis, &qp.basis) {
        return None;
    }
    let (r, rp) = (q.ratios(), qp.ratios());
    let mut best: Option<Scalar> = None;
    for j in q.support() {
        if !qp.coeffs[j].is_positive() {
            return None;
        }
        let v = r[j].div(&rp[j]);
        if best.as_ref().map_or(true, |b| v > *b) {
            best = Some(v);
        }
    }
    best
}

fn half_log(s: &Scalar) -> f64 {
    if let Scalar::Exact(r) = s {
        if r == &num_rational::BigRational::from_integer(1.into()) {
            return 0.0;
        }
    }
    0.5 * s.to_f64().ln()
}

/// `delta(q, q') = (1/2) log max_j (g_j iota'_j / g'_j iota_j)
///              + (1/2) log max_j (g'_j iota_j / g_j iota'_j)`,
/// infinite unless both vertical foliations have the same support.
pub fn detour_metric(q: &QDRecord, qp: &QDRecord) -> ExtReal {
    match (sup_ratio_scalar(q, qp), sup_ratio_scalar(qp, q)) {
        (Some(a), Some(b)) => {
            // exact product first so that equivalent records give 0
            let prod = &a * &b;
            ExtReal::Finite(half_log(&prod).max(0.0))
        }
        _ => ExtReal::Infinite,
    }
}

pub fn same_part(q: &QDRecord, qp: &QDRecord) -> bool {
    detour_metric(q, qp).is_finite()
}

#[derive(Clone, Debug, PartialEq)]
pub struct DetourCost {
    pub value: ExtReal,
    /// True when both suprema over probes are exact (torus basepoint with
    /// the attaining directions among the probes).
    pub exact: bool,
}

/// `H(E_q', E_q)` for unit-area records at the basepoint `b`: the two
/// probe suprema plus the exact middle term.
pub fn detour_cost<B: ExtBracket>(
    qp: &QDRecord,
    q: &QDRecord,
    probes: &ProbeFamily,
    basepoint: &B,
    exact_probes: bool,
) -> Result<DetourCost> {
    qp.require_unit_area()?;
    q.require_unit_area()?;
    let (mid, _) = sup_ratio(q, qp);
    let ExtReal::Finite(mid) = mid else {
        return Ok(DetourCost {
            value: ExtReal::Infinite,
            exact: true,
        });
    };
    let s_qp = sup_over_probes(qp, basepoint, probes)?;
    let s_q = sup_over_probes(q, basepoint, probes)?;
    if s_qp == 0.0 || s_q == 0.0 {
        return Err(Error::input("probe family does not see the records"));
    }
    let v = 0.5 * s_qp.ln() + 0.5 * mid.ln() - 0.5 * s_q.ln();
    Ok(DetourCost {
        value: ExtReal::Finite(v),
        exact: exact_probes,
    })
}

/// Hubbard–Masur areas: for `V = sum lambda_j G_j` at `x`, returns
/// `i(G_j, tau_x(V))` per component.
pub trait HmOracle {
    type Point;
    fn areas(&self, x: &Self::Point, lambda: &[f64]) -> Result<Vec<f64>>;
    fn is_exact(&self) -> bool;
}

/// Test double with `areas = A lambda` for a positive matrix `A`. It
/// satisfies the oracle contract (homogeneous, positive, continuous) and
/// validates the solver, not the Hubbard–Masur map itself.
#[derive(Clone, Debug)]
pub struct SyntheticOracle {
    a: Vec<Vec<f64>>,
}

impl SyntheticOracle {
    pub fn new(a: Vec<Vec<f64>>) -> Result<Self> {
        let n = a.len();
        if n == 0 || a.iter().any(|r| r.len() != n) {
            return Err(Error::input("oracle matrix must be square and nonempty"));
        }
        if a.iter().flatten().any(|&x| !(x > 0.0) || !x.is_finite()) {
            return Err(Error::input("oracle matrix entries must be positive"));
        }
        Ok(SyntheticOracle { a })
    }
}

impl HmOracle for SyntheticOracle {
    type Point = ();
    fn areas(&self, _x: &(), lambda: &[f64]) -> Result<Vec<f64>> {
        if lambda.len() != self.a.len() {
            return Err(Error::input("lambda has the wrong length"));
        }
        Ok(self
            .a
            .iter()
            .map(|row| row.iter().zip(lambda).map(|(a, l)| a * l).sum())
            .collect())
    }
    fn is_exact(&self) -> bool {
        true
    }
}

/// The torus Hubbard–Masur map for a single component in `direction`.
#[derive(Clone, Debug)]
pub struct TorusOracle {
    pub direction: Direction,
}

impl HmOracle for TorusOracle {
    type Point = TorusPoint;
    fn areas(&self, x: &TorusPoint, lambda: &[f64]) -> Result<Vec<f64>> {
        if lambda.len() != 1 {
            return Err(Error::input("torus oracle has one component"));
        }
        let unit = crate::foliation::TorusLine {
            direction: self.direction,
            weight: Scalar::one(),
        };
        // i(G, tau_x(lambda G)) = lambda Ext_x(G)
        Ok(vec![lambda[0] * ext_length(x, &unit)])
    }
    fn is_exact(&self) -> bool {
        true
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModularSolution {
    /// Scaled so that the first support entry is 1.
    pub lambda_star: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub damped: bool,
}

#[derive(Clone, Debug)]
pub struct SolveOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
    pub start: Option<Vec<f64>>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iterations: 100_000,
            tolerance: 1e-13,
            start: None,
        }
    }
}

fn sup_normalize(v: &mut [f64]) {
    let m = v.iter().cloned().fold(0.0, f64::max);
    v.iter_mut().for_each(|x| *x /= m);
}

/// Relative spread of `lambda_j / (r_j A_j(lambda))`; zero exactly at a
/// fixed point of the map.
fn residual(lambda: &[f64], r: &[f64], areas: &[f64]) -> f64 {
    let q: Vec<f64> = lambda
        .iter()
        .zip(r)
        .zip(areas)
        .map(|((l, r), a)| l / (r * a))
        .collect();
    let max = q.iter().cloned().fold(f64::MIN, f64::max);
    let min = q.iter().cloned().fold(f64::MAX, f64::min);
    (max - min) / max
}

/// Finds coefficients `lambda*` on the target's support whose
/// oracle-computed ratios `lambda_j / iota_j(lambda)` are proportional to the
/// target's ratio vector, by iterating
/// `lambda <- normalize(r * A(lambda))` and damping by one half once the
/// residual stops decreasing.
pub fn modular_solve<O: HmOracle>(
    target: &QDRecord,
    x: &O::Point,
    oracle: &O,
    opts: &SolveOptions,
) -> Result<ModularSolution> {
    let support = target.support();
    let r: Vec<f64> = support.iter().map(|&j| target.ratios()[j].to_f64()).collect();
    let embed = |lam: &[f64]| {
        let mut full = vec![0.0; target.len()];
        for (k, &j) in support.iter().enumerate() {
            full[j] = lam[k];
        }
        full
    };
    let restrict = |full: &[f64]| support.iter().map(|&j| full[j]).collect::<Vec<f64>>();

    let mut lam: Vec<f64> = match &opts.start {
        Some(s) => {
            if s.len() != support.len() || s.iter().any(|&v| !(v > 0.0)) {
                return Err(Error::input("start must be positive on the support"));
            }
            s.clone()
        }
        None => vec![1.0; support.len()],
    };
    sup_normalize(&mut lam);
    let mut areas = restrict(&oracle.areas(x, &embed(&lam))?);
    let mut res = residual(&lam, &r, &areas);
    let mut history = vec![res];
    let mut damped = false;
    let mut it = 0;
    while res > opts.tolerance {
        if it >= opts.max_iterations {
            let keep = history.len().saturating_sub(64);
            return Err(Error::NonConvergence {
                iterations: it,
                last: res,
                residuals: history.split_off(keep),
            });
        }
        it += 1;
        let mut next: Vec<f64> = r.iter().zip(&areas).map(|(r, a)| r * a).collect();
        sup_normalize(&mut next);
        if damped {
            for (n, l) in next.iter_mut().zip(&lam) {
                *n = 0.5 * *n + 0.5 * l;
            }
            sup_normalize(&mut next);
        }
        let next_areas = restrict(&oracle.areas(x, &embed(&next))?);
        if next_areas.iter().any(|&a| !(a > 0.0)) {
            return Err(Error::input("oracle returned a nonpositive area"));
        }
        let next_res = residual(&next, &r, &next_areas);
        if next_res >= res && !damped {
            damped = true;
        }
        lam = next;
        areas = next_areas;
        res = next_res;
        history.push(res);
    }
    let first = lam[0];
    let lambda_star = embed(&lam.iter().map(|l| l / first).collect::<Vec<_>>());
    Ok(ModularSolution {
        lambda_star,
        residual: res,
        iterations: it,
        damped,
    })
}

/// Limit declared for one component track `G^n_j` of a sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum TrackLimit {
    /// Converges to `weight` times component `component` of the limit basis.
    Indecomposable { component: usize, weight: f64 },
    /// Converges to a combination of at least two limit components.
    Decomposable { coeffs: Vec<f64> },
}

#[derive(Clone, Debug)]
pub struct SequenceDeclaration {
    pub records: Vec<QDRecord>,
    /// The declared limit of `q_n` as records.
    pub record_limit: QDRecord,
    /// One entry per component of the `q_n`.
    pub tracks: Vec<TrackLimit>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum BusemannVerdict {
    Converges,
    /// `q_n` does not converge to the proposed limit.
    FailsI { reason: String },
    /// A component track has a decomposable limit point.
    FailsII { track: usize },
}

fn records_close(a: &QDRecord, b: &QDRecord, tol: f64) -> bool {
    same_basis(&a.basis, &b.basis)
        && a.coeffs
            .iter()
            .zip(&b.coeffs)
            .chain(a.areas.iter().zip(&b.areas))
            .all(|(x, y)| (x.to_f64() - y.to_f64()).abs() <= tol * (1.0 + x.to_f64().abs()))
}

/// Checks the two conditions for convergence of `E_{q_n}` to `E_q` on
/// declared data only.
pub fn busemann_limit_check(seq: &SequenceDeclaration, limit: &QDRecord) -> Result<BusemannVerdict> {
    let tol = 1e-9;
    if seq.records.is_empty() {
        return Err(Error::input("empty sequence"));
    }
    let m = seq.record_limit.len();
    for rec in &seq.records {
        if rec.len() != seq.tracks.len() {
            return Err(Error::input("one track per component of every q_n is required"));
        }
    }
    let mut summed = vec![0.0; m];
    for (k, t) in seq.tracks.iter().enumerate() {
        match t {
            TrackLimit::Indecomposable { component, weight } => {
                if *component >= m || !(*weight >= 0.0) {
                    return Err(Error::input(format!("track {k} has an invalid limit")));
                }
                summed[*component] += weight;
            }
            TrackLimit::Decomposable { coeffs } => {
                if coeffs.len() != m || coeffs.iter().any(|c| !(*c >= 0.0)) {
                    return Err(Error::input(format!("track {k} has an invalid limit")));
                }
                if coeffs.iter().filter(|c| **c > 0.0).count() < 2 {
                    return Err(Error::input(format!(
                        "track {k} is declared decomposable but splits into fewer than two components"
                    )));
                }
                for (s, c) in summed.iter_mut().zip(coeffs) {
                    *s += c;
                }
            }
        }
    }
    for (j, (s, c)) in summed.iter().zip(seq.record_limit.coeffs()).enumerate() {
        if (s - c.to_f64()).abs() > tol * (1.0 + s.abs()) {
            return Err(Error::input(format!(
                "track limits sum to {s} on component {j}, declared vertical coefficient is {c}"
            )));
        }
    }
    if !records_close(&seq.record_limit, limit, tol) {
        return Ok(BusemannVerdict::FailsI {
            reason: "declared limit of q_n differs from the proposed limit".into(),
        });
    }
    if let Some(k) = seq
        .tracks
        .iter()
        .position(|t| matches!(t, TrackLimit::Decomposable { .. }))
    {
        return Ok(BusemannVerdict::FailsII { track: k });
    }
    Ok(BusemannVerdict::Converges)
}
