//! Extremal length brackets on deformed square-tiled surfaces.
//!
//! Lower bounds come from conformal metrics that are constant on flat
//! cylinders of finitely many rational directions. A curve homotopic to a
//! core `γ` crosses each cylinder `C` at least `i(γ, C)` times, each time
//! over at least the width of `C`, so for `ρ = Σ θ_t 1_{C_t}`
//!
//! `L_ρ(γ) ≥ Σ θ_t w_t i(γ, C_t)` and `A(ρ) = θᵀ M θ`,
//!
//! where `M` holds the pairwise overlap areas of the cylinders. Every
//! nonnegative `θ` therefore certifies `Ext(γ) ≥ (aᵀθ)² / θᵀMθ`; the
//! weights are improved by multiplicative updates. Upper bounds come from
//! the class's own maximal flat cylinders. The resolution `k` controls the
//! direction set: all primitive `(p, q)` with `max(|p|, |q|) ≤ ⌈k/8⌉`.

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::extremal::distance::ExtBracket;
use crate::foliation::{Direction, MeasuredFoliation};
use crate::scalar::ExtReal;
use crate::square_tiled::cylinders::{core_intersection, cylinder_decomposition, Cylinder};
use crate::square_tiled::origami::Origami;
use crate::square_tiled::rectangulation::{geodesic_flow_origami, Rectangulation};

/// Relative shrink applied to reported lower bounds to absorb rounding in
/// the overlap areas.
const SAFETY: f64 = 1e-9;
const BUDGET: usize = 10_000;
const WINDOW: usize = 100;
const STALL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtLenEstimate {
    pub lower: f64,
    pub upper: ExtReal,
    pub methods: Vec<String>,
    pub resolution: usize,
    pub converged: bool,
    pub iterations: usize,
}

/// A square-tiled surface deformed by the diagonal flow for time `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct SquareTiledPoint {
    pub origami: Origami,
    pub t: f64,
    /// Resolution used when bracketing extremal lengths.
    pub resolution: usize,
}

impl SquareTiledPoint {
    pub fn new(origami: Origami, t: f64) -> Self {
        SquareTiledPoint { origami, t, resolution: 16 }
    }

    pub fn rectangulation(&self) -> Rectangulation {
        geodesic_flow_origami(&self.origami, self.t)
    }
}

/// A multicurve on a square-tiled surface: `weight` times the sum of the
/// cores of all maximal cylinders in direction `(p, q)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurveClass {
    pub p: i64,
    pub q: i64,
    pub weight: f64,
}

impl CurveClass {
    pub fn new(p: i64, q: i64, weight: f64) -> Result<Self> {
        if p == 0 && q == 0 {
            return Err(Error::input("direction must be nonzero"));
        }
        if num_integer::Integer::gcd(&p, &q) != 1 {
            return Err(Error::input("direction must be primitive"));
        }
        if !(weight > 0.0 && weight.is_finite()) {
            return Err(Error::input("weight must be positive"));
        }
        Ok(CurveClass { p, q, weight })
    }

    /// Integer-direction line foliations read as curve classes.
    pub fn from_foliation(f: &MeasuredFoliation) -> Result<Self> {
        match f {
            MeasuredFoliation::TorusLine(line) => match line.direction {
                Direction::Int(p, q) => CurveClass::new(p, q, line.weight.to_f64()),
                Direction::Real(..) => Err(Error::Unsupported(
                    "classes on square-tiled surfaces need an integer direction".into(),
                )),
            },
            MeasuredFoliation::ComponentSum { .. } => Err(Error::mismatch(
                "square-tiled brackets take integer-direction classes",
            )),
        }
    }
}

/// `|hol|` of the core after flowing for time `t`.
pub(crate) fn flowed_core_length(c: &Cylinder, t: f64) -> f64 {
    let (p, q) = (c.direction.0 as f64, c.direction.1 as f64);
    let norm = p.hypot(q);
    c.circumference / norm * (t.exp() * p).hypot((-t).exp() * q)
}

fn area_of(c: &Cylinder) -> f64 {
    c.area.to_f64().unwrap_or(f64::NAN)
}

/// Upper bound from disjoint flat cylinders: `Σ w² / Mod`.
fn cylinder_upper(cyls: &[Cylinder], weight: f64, t: f64) -> f64 {
    cyls.iter()
        .map(|c| weight * weight * flowed_core_length(c, t).powi(2) / area_of(c))
        .sum()
}

fn directions(k: usize) -> Vec<(i64, i64)> {
    let cap = k.div_ceil(8).max(1) as i64;
    let mut out = vec![(1, 0), (0, 1), (1, 1), (1, -1)];
    for q in 1..=cap {
        for p in -cap..=cap {
            if num_integer::Integer::gcd(&p, &q) == 1 && !out.contains(&(p, q)) {
                out.push((p, q));
            }
        }
    }
    out
}

type Poly = Vec<(f64, f64)>;

fn clip(poly: &Poly, a: f64, b: f64, c: f64, keep_ge: bool) -> Poly {
    // keeps points with a x + b y (>= or <=) c
    let side = |p: &(f64, f64)| {
        let v = a * p.0 + b * p.1 - c;
        if keep_ge { v } else { -v }
    };
    let mut out = Vec::with_capacity(poly.len() + 2);
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        let (sp, sq) = (side(&p), side(&q));
        if sp >= 0.0 {
            out.push(p);
        }
        if (sp >= 0.0) != (sq >= 0.0) {
            let s = sp / (sp - sq);
            out.push((p.0 + s * (q.0 - p.0), p.1 + s * (q.1 - p.1)));
        }
    }
    out
}

fn poly_area(p: &Poly) -> f64 {
    let n = p.len();
    if n < 3 {
        return 0.0;
    }
    (0..n)
        .map(|i| {
            let (a, b) = (p[i], p[(i + 1) % n]);
            a.0 * b.1 - a.1 * b.0
        })
        .sum::<f64>()
        .abs()
        / 2.0
}

/// A band `j ≤ α x + β y < j + 1` inside one square.
#[derive(Clone, Copy)]
struct Band {
    alpha: f64,
    beta: f64,
    j: f64,
}

/// Bands of every cylinder in one direction, per square: `(cylinder, band)`.
fn bands(o: &Origami, cyls: &[Cylinder]) -> Vec<Vec<(usize, Band)>> {
    let n = o.n();
    let mut out = vec![Vec::new(); n];
    let transposed = cyls[0].is_transposed();
    let surface = if transposed { o.transposed() } else { o.clone() };
    let (p, q) = if transposed { (0, 1) } else { cyls[0].direction };
    let (p, q) = if q < 0 { (-p, -q) } else { (p, q) };
    let mut owner = std::collections::HashMap::new();
    for (ci, c) in cyls.iter().enumerate() {
        for strip in &c.strips {
            for &piece in strip {
                owner.insert(piece, ci);
            }
        }
    }
    // u = q x - p y in surface coordinates
    let lo = 0i64.min(q).min(-p).min(q - p);
    let hi = 0i64.max(q).max(-p).max(q - p);
    for s in 0..n {
        for j in lo..hi {
            let m = j.div_euclid(q);
            let k = j.rem_euclid(q) as usize;
            let piece = (surface.h_pow(s, m), k);
            let ci = owner[&piece];
            let (alpha, beta) = if transposed { (-(p as f64), q as f64) } else { (q as f64, -(p as f64)) };
            out[s].push((ci, Band { alpha, beta, j: j as f64 }));
        }
    }
    out
}

fn band_poly(b: &Band) -> Poly {
    let sq: Poly = vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
    let p = clip(&sq, b.alpha, b.beta, b.j, true);
    clip(&p, b.alpha, b.beta, b.j + 1.0, false)
}

/// Pairwise overlap areas of all cylinders in the listed families.
fn overlaps(o: &Origami, fams: &[Vec<Cylinder>]) -> Vec<Vec<f64>> {
    let offsets: Vec<usize> = fams
        .iter()
        .scan(0, |acc, f| {
            let s = *acc;
            *acc += f.len();
            Some(s)
        })
        .collect();
    let total: usize = fams.iter().map(Vec::len).sum();
    let mut m = vec![vec![0.0; total]; total];
    let all_bands: Vec<_> = fams.iter().map(|f| bands(o, f)).collect();
    for (a, fa) in fams.iter().enumerate() {
        for (i, c) in fa.iter().enumerate() {
            m[offsets[a] + i][offsets[a] + i] = area_of(c);
        }
        for b in (a + 1)..fams.len() {
            for s in 0..o.n() {
                for &(ca, ba) in &all_bands[a][s] {
                    let pa = band_poly(&ba);
                    if pa.len() < 3 {
                        continue;
                    }
                    for &(cb, bb) in &all_bands[b][s] {
                        let pc = clip(&pa, bb.alpha, bb.beta, bb.j, true);
                        let pc = clip(&pc, bb.alpha, bb.beta, bb.j + 1.0, false);
                        let ar = poly_area(&pc);
                        m[offsets[a] + ca][offsets[b] + cb] += ar;
                        m[offsets[b] + cb][offsets[a] + ca] += ar;
                    }
                }
            }
        }
    }
    m
}

/// Solves `M_SS θ_S = a_S` on the support of `theta`; `None` when singular
/// or when the solution leaves the nonnegative orthant.
fn polish(m: &[Vec<f64>], a: &[f64], theta: &[f64]) -> Option<Vec<f64>> {
    let top = theta.iter().copied().fold(0.0, f64::max);
    let support: Vec<usize> = (0..theta.len()).filter(|&i| theta[i] > 1e-6 * top).collect();
    let k = support.len();
    if k == 0 {
        return None;
    }
    let mut aug: Vec<Vec<f64>> = support
        .iter()
        .map(|&i| {
            let mut row: Vec<f64> = support.iter().map(|&j| m[i][j]).collect();
            row.push(a[i]);
            row
        })
        .collect();
    for col in 0..k {
        let piv = (col..k).max_by(|&x, &y| aug[x][col].abs().total_cmp(&aug[y][col].abs()))?;
        if aug[piv][col].abs() < 1e-300 {
            return None;
        }
        aug.swap(col, piv);
        for r in 0..k {
            if r != col {
                let f = aug[r][col] / aug[col][col];
                if f != 0.0 {
                    for c in col..=k {
                        aug[r][c] -= f * aug[col][c];
                    }
                }
            }
        }
    }
    let mut out = vec![0.0; theta.len()];
    for (r, &i) in support.iter().enumerate() {
        let v = aug[r][k] / aug[r][r];
        if !(v >= 0.0) {
            return None;
        }
        out[i] = v;
    }
    Some(out)
}

/// Brackets `Ext(c)` on the origami flowed for time `t`.
pub fn discrete_ext_length(point: &SquareTiledPoint, class: &CurveClass, k: usize) -> Result<ExtLenEstimate> {
    if k == 0 {
        return Err(Error::input("resolution must be at least 1"));
    }
    let o = &point.origami;
    let t = point.t;
    let own = cylinder_decomposition(o, class.p, class.q)?;
    let upper = cylinder_upper(&own, class.weight, t);

    let norm = |d: (i64, i64)| if d.1 < 0 || (d.1 == 0 && d.0 < 0) { (-d.0, -d.1) } else { d };
    let own_dir = norm((class.p, class.q));
    let fams: Vec<Vec<Cylinder>> = directions(k)
        .into_iter()
        .filter(|&d| norm(d) != own_dir)
        .map(|(p, q)| cylinder_decomposition(o, p, q))
        .collect::<Result<_>>()?;
    let cyls: Vec<&Cylinder> = fams.iter().flatten().collect();
    let a: Vec<f64> = cyls
        .iter()
        .map(|c| {
            let width = area_of(c) / flowed_core_length(c, t);
            let crossings: usize = own.iter().map(|g| core_intersection(o, g, c)).sum();
            width * class.weight * crossings as f64
        })
        .collect();
    let m = overlaps(o, &fams);

    let mut theta: Vec<f64> = a.clone();
    let objective = |th: &[f64]| -> f64 {
        let num: f64 = th.iter().zip(&a).map(|(x, y)| x * y).sum();
        let den: f64 = (0..th.len())
            .map(|i| th[i] * (0..th.len()).map(|j| m[i][j] * th[j]).sum::<f64>())
            .sum();
        if den > 0.0 { num * num / den } else { 0.0 }
    };
    let mut history = vec![objective(&theta)];
    let mut best = history[0];
    let mut converged = a.iter().all(|&x| x == 0.0);
    let mut iterations = 0;
    while !converged && iterations < BUDGET {
        iterations += 1;
        let mt: Vec<f64> = (0..theta.len()).map(|i| (0..theta.len()).map(|j| m[i][j] * theta[j]).sum()).collect();
        for i in 0..theta.len() {
            if mt[i] > 0.0 {
                theta[i] *= a[i] / mt[i];
            }
        }
        let scale = theta.iter().copied().fold(0.0, f64::max);
        if scale > 0.0 {
            theta.iter_mut().for_each(|x| *x /= scale);
        }
        let v = objective(&theta);
        best = best.max(v);
        history.push(v);
        if history.len() > WINDOW {
            let old = history[history.len() - 1 - WINDOW];
            if (v - old).abs() <= STALL * v.max(1e-300) {
                converged = true;
            }
        }
    }
    // polish: solve the stationarity equations on the detected support
    if let Some(th) = polish(&m, &a, &theta) {
        best = best.max(objective(&th));
    }
    let lower = best * (1.0 - SAFETY);
    Ok(ExtLenEstimate {
        lower: lower.min(upper),
        upper: if upper.is_finite() { ExtReal::Finite(upper) } else { ExtReal::Infinite },
        methods: vec![
            format!("cylinder-band metrics over {} directions", fams.len()),
            "flat cylinders of the class".into(),
        ],
        resolution: k,
        converged,
        iterations,
    })
}

impl ExtBracket for SquareTiledPoint {
    fn ext_bracket(&self, f: &MeasuredFoliation) -> Result<(f64, ExtReal)> {
        let c = CurveClass::from_foliation(f)?;
        let e = discrete_ext_length(self, &c, self.resolution)?;
        Ok((e.lower, e.upper))
    }
}
