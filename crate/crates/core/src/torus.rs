//! The torus as the upper half-plane.
//!
//! A point is the lattice `Z + tau Z`. A line foliation with integer
//! direction `(p, q)` has leaves parallel to the lattice vector `p + q tau`.
//! Extremal length, distance, rays and the Hubbard–Masur map are all
//! available in closed form here, which makes the torus the reference model
//! for every numerical check elsewhere in the crate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::foliation::{intersection, Direction, MeasuredFoliation, ProbeFamily, TorusLine};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TauJson", into = "TauJson")]
pub struct TorusPoint {
    re: f64,
    im: f64,
}

#[derive(Serialize, Deserialize)]
struct TauJson {
    tau: [f64; 2],
}

impl TryFrom<TauJson> for TorusPoint {
    type Error = Error;
    fn try_from(t: TauJson) -> Result<Self> {
        TorusPoint::new(t.tau[0], t.tau[1])
    }
}

impl From<TorusPoint> for TauJson {
    fn from(p: TorusPoint) -> Self {
        TauJson { tau: [p.re, p.im] }
    }
}

impl TorusPoint {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !(re.is_finite() && im.is_finite()) || im <= 0.0 {
            return Err(Error::input(format!("tau must lie in the upper half-plane, got {re}+{im}i")));
        }
        Ok(TorusPoint { re, im })
    }

    /// `tau = i`, the square torus.
    pub fn square() -> Self {
        TorusPoint { re: 0.0, im: 1.0 }
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }

    /// Flat holonomy `p + q tau` of a direction, as `(x, y)`.
    pub fn holonomy(&self, d: &Direction) -> (f64, f64) {
        let (p, q) = d.as_f64();
        (p + q * self.re, q * self.im)
    }
}

/// `w^2 |p + q tau|^2 / Im tau`.
pub fn ext_length(x: &TorusPoint, f: &TorusLine) -> f64 {
    let (hx, hy) = x.holonomy(&f.direction);
    let w = f.weight.to_f64();
    w * w * (hx * hx + hy * hy) / x.im
}

/// Extremal length of a measured foliation that must be a torus line.
pub fn ext_length_of(x: &TorusPoint, f: &MeasuredFoliation) -> Result<f64> {
    match f {
        MeasuredFoliation::TorusLine(l) => Ok(ext_length(x, l)),
        _ => Err(Error::mismatch("torus extremal length needs a torus line foliation")),
    }
}

/// Teichmüller distance: half the hyperbolic distance in the upper
/// half-plane, which is `(1/2) log sup_F Ext_y(F) / Ext_x(F)`.
pub fn distance(x: &TorusPoint, y: &TorusPoint) -> f64 {
    let dx = x.re - y.re;
    let dy = x.im - y.im;
    let chord = (dx * dx + dy * dy).sqrt();
    // asinh form stays accurate for nearby points and far apart ones
    (chord / (2.0 * (x.im * y.im).sqrt())).asinh()
}

/// Turns a real flat vector into a line direction, snapping to an integer
/// pair when it is a multiple of `(1,0)`, `(0,1)` or `(1,±1)`. Returns the
/// direction and the factor by which the input vector was divided.
fn snap_direction(r: f64, s: f64) -> (Direction, f64) {
    let m = r.abs().max(s.abs());
    let (u, v) = (r / m, s / m);
    let near = |a: f64, b: f64| (a - b).abs() < 1e-12;
    let snapped = [-1.0, 0.0, 1.0]
        .iter()
        .flat_map(|&a| [-1.0, 0.0, 1.0].iter().map(move |&b| (a, b)))
        .find(|&(a, b)| near(u, a) && near(v, b) && (a != 0.0 || b != 0.0));
    match snapped {
        Some((a, b)) => (
            Direction::int(a as i64, b as i64).expect("nonzero"),
            m,
        ),
        None => (Direction::real(u, v).expect("nonzero"), m),
    }
}

/// Horizontal foliation of the quadratic differential at `x` whose vertical
/// foliation is `f`. Satisfies `i(f, result) = Ext_x(f)`.
pub fn hm_oracle(x: &TorusPoint, f: &TorusLine) -> TorusLine {
    let (zx, zy) = x.holonomy(&f.direction);
    // i*z = -zy + i zx written as r + s tau
    let s = zx / x.im;
    let r = -zy - s * x.re;
    let (dir, _) = snap_direction(r, s);
    let det = f.direction.abs_det(&dir).to_f64();
    let w = f.weight.to_f64();
    let weight = ext_length(x, f) / (w * det);
    let weight = snap_weight(weight);
    TorusLine { direction: dir, weight }
}

/// Keeps integral weights exact so that exact intersection arithmetic
/// survives a round trip through the oracle.
fn snap_weight(w: f64) -> Scalar {
    let r = w.round();
    if (w - r).abs() <= 1e-12 * w.abs().max(1.0) && r.abs() < 1e15 {
        Scalar::int(r as i64)
    } else {
        Scalar::Float(w)
    }
}

/// A quadratic differential on the torus: base point plus its vertical and
/// horizontal line foliations.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusQD {
    pub base: TorusPoint,
    pub vertical: TorusLine,
    pub horizontal: TorusLine,
    pub area: f64,
}

impl TorusQD {
    /// The quadratic differential at `base` with the given vertical
    /// foliation; its area is `Ext_base(vertical)`.
    pub fn from_vertical(base: TorusPoint, vertical: TorusLine) -> Self {
        let horizontal = hm_oracle(&base, &vertical);
        let area = ext_length(&base, &vertical);
        TorusQD { base, vertical, horizontal, area }
    }

    /// As [`from_vertical`](Self::from_vertical), rescaled to unit area.
    pub fn unit(base: TorusPoint, direction: Direction) -> Self {
        let line = TorusLine { direction, weight: Scalar::one() };
        let ext = ext_length(&base, &line);
        let weight = if (ext - 1.0).abs() < 1e-15 {
            Scalar::one()
        } else {
            Scalar::Float(1.0 / ext.sqrt())
        };
        TorusQD::from_vertical(base, TorusLine { direction, weight })
    }

    pub fn is_unit_area(&self) -> bool {
        (self.area - 1.0).abs() <= 1e-12
    }

    pub fn vertical_foliation(&self) -> MeasuredFoliation {
        MeasuredFoliation::TorusLine(self.vertical.clone())
    }

    pub fn horizontal_foliation(&self) -> MeasuredFoliation {
        MeasuredFoliation::TorusLine(self.horizontal.clone())
    }

    /// `i(V(q), F)^2 / i(V(q), H(q))`, the limit in the asymptotic formula.
    pub fn limit_value(&self, f: &TorusLine) -> f64 {
        let a = intersection(
            &self.vertical_foliation(),
            &MeasuredFoliation::TorusLine(f.clone()),
        )
        .expect("torus lines")
        .to_f64();
        a * a / self.area
    }
}

/// `R(q; t)`: the vertical transverse measure is multiplied by `e^t`, the
/// horizontal one by `e^-t`.
pub fn ray(q: &TorusQD, t: f64) -> Result<TorusPoint> {
    if !q.is_unit_area() {
        return Err(Error::Normalization(format!(
            "ray needs a unit-area quadratic differential, area is {}",
            q.area
        )));
    }
    if t == 0.0 {
        return Ok(q.base);
    }
    let (zx, zy) = q.base.holonomy(&q.vertical.direction);
    let n = (zx * zx + zy * zy).sqrt();
    // rotation u = i |z| / z puts the vertical leaves on the imaginary axis
    let (ux, uy) = (zy / n, zx / n);
    let rot = |x: f64, y: f64| (ux * x - uy * y, ux * y + uy * x);
    let (k, kinv) = (t.exp(), (-t).exp());
    let (a1, b1) = rot(1.0, 0.0);
    let (a2, b2) = rot(q.base.re, q.base.im);
    let (w1x, w1y) = (k * a1, kinv * b1);
    let (w2x, w2y) = (k * a2, kinv * b2);
    let d = w1x * w1x + w1y * w1y;
    let re = (w2x * w1x + w2y * w1y) / d;
    let im = (w2y * w1x - w2x * w1y) / d;
    TorusPoint::new(re, im)
}

/// `(1/2) log sup_F Ext_y(F) / Ext_x(F)` over a probe family of torus lines.
pub fn probe_distance(x: &TorusPoint, y: &TorusPoint, probes: &ProbeFamily) -> Result<f64> {
    let mut best = f64::NEG_INFINITY;
    for f in probes.members() {
        let r = ext_length_of(y, f)? / ext_length_of(x, f)?;
        best = best.max(r);
    }
    Ok(0.5 * best.ln())
}
