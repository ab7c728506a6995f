//! Rectangulations: finitely many flat rectangles glued along boundary
//! sub-segments by translations, with an optional weight per rectangle.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::square_tiled::origami::Origami;

const EPS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    /// Width before deformation.
    pub w: Scalar,
    /// Height before deformation.
    pub h: Scalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Right edge of `a` to left edge of `b`.
    Right,
    /// Top edge of `a` to bottom edge of `b`.
    Top,
}

/// Identifies the segment `[a_start, a_start + len]` of one edge of `a`
/// with `[b_start, b_start + len]` of the opposite edge of `b`. Offsets are
/// measured along the edge in undeformed units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gluing {
    pub side: Side,
    pub a: usize,
    pub a_start: f64,
    pub b: usize,
    pub b_start: f64,
    pub len: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Rectangulation {
    pub rects: Vec<Rect>,
    pub gluings: Vec<Gluing>,
    /// Deformation parameter: widths scale by `e^t`, heights by `e^-t`.
    #[serde(default)]
    pub t: f64,
}

/// Corners in the order bottom-left, bottom-right, top-left, top-right.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Corner {
    BL,
    BR,
    TL,
    TR,
}

impl Corner {
    pub const ALL: [Corner; 4] = [Corner::BL, Corner::BR, Corner::TL, Corner::TR];

    fn index(self) -> usize {
        self as usize
    }
}

/// Neighbour tables of an edge-to-edge rectangulation.
#[derive(Clone, Debug, PartialEq)]
pub struct Adjacency {
    pub right: Vec<usize>,
    pub left: Vec<usize>,
    pub top: Vec<usize>,
    pub bottom: Vec<usize>,
}

fn covered(mut pieces: Vec<(f64, f64)>, total: f64) -> bool {
    pieces.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut reach = 0.0;
    for (s, l) in pieces {
        if (s - reach).abs() > EPS {
            return false;
        }
        reach = s + l;
    }
    (reach - total).abs() <= EPS
}

impl Rectangulation {
    /// Validates dimensions and that every boundary point is glued exactly
    /// once.
    pub fn new(rects: Vec<Rect>, gluings: Vec<Gluing>) -> Result<Self> {
        if rects.is_empty() {
            return Err(Error::input("rectangulation needs at least one rectangle"));
        }
        for (i, r) in rects.iter().enumerate() {
            if !r.w.is_positive() || !r.h.is_positive() {
                return Err(Error::input(format!("rectangle {i} has nonpositive size")));
            }
            if let Some(wt) = r.weight {
                if !(wt >= 0.0 && wt.is_finite()) {
                    return Err(Error::input(format!("rectangle {i} has invalid weight")));
                }
            }
        }
        let n = rects.len();
        let mut right = vec![Vec::new(); n];
        let mut left = vec![Vec::new(); n];
        let mut top = vec![Vec::new(); n];
        let mut bottom = vec![Vec::new(); n];
        for g in &gluings {
            if g.a >= n || g.b >= n || !(g.len > 0.0) || g.a_start < -EPS || g.b_start < -EPS {
                return Err(Error::input("gluing refers to a missing rectangle or bad segment"));
            }
            let (ea, eb) = match g.side {
                Side::Right => (rects[g.a].h.to_f64(), rects[g.b].h.to_f64()),
                Side::Top => (rects[g.a].w.to_f64(), rects[g.b].w.to_f64()),
            };
            if g.a_start + g.len > ea + EPS || g.b_start + g.len > eb + EPS {
                return Err(Error::input("gluing segment leaves its edge"));
            }
            match g.side {
                Side::Right => {
                    right[g.a].push((g.a_start, g.len));
                    left[g.b].push((g.b_start, g.len));
                }
                Side::Top => {
                    top[g.a].push((g.a_start, g.len));
                    bottom[g.b].push((g.b_start, g.len));
                }
            }
        }
        for i in 0..n {
            let (w, h) = (rects[i].w.to_f64(), rects[i].h.to_f64());
            let ok = covered(right[i].clone(), h)
                && covered(left[i].clone(), h)
                && covered(top[i].clone(), w)
                && covered(bottom[i].clone(), w);
            if !ok {
                return Err(Error::input(format!(
                    "boundary of rectangle {i} is not glued exactly once"
                )));
            }
        }
        Ok(Rectangulation { rects, gluings, t: 0.0 })
    }

    /// One unit square per square of the origami.
    pub fn from_origami(o: &Origami) -> Self {
        let rects = (0..o.n())
            .map(|_| Rect { w: Scalar::one(), h: Scalar::one(), weight: None })
            .collect();
        let mut gluings = Vec::with_capacity(2 * o.n());
        for s in 0..o.n() {
            gluings.push(Gluing { side: Side::Right, a: s, a_start: 0.0, b: o.h()[s], b_start: 0.0, len: 1.0 });
            gluings.push(Gluing { side: Side::Top, a: s, a_start: 0.0, b: o.v()[s], b_start: 0.0, len: 1.0 });
        }
        Rectangulation::new(rects, gluings).expect("origami gluings are complete")
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }

    /// Current width of rectangle `k`.
    pub fn width(&self, k: usize) -> f64 {
        self.rects[k].w.to_f64() * self.t.exp()
    }

    /// Current height of rectangle `k`.
    pub fn height(&self, k: usize) -> f64 {
        self.rects[k].h.to_f64() * (-self.t).exp()
    }

    /// Weight of rectangle `k`, 1 when unweighted.
    pub fn weight(&self, k: usize) -> f64 {
        self.rects[k].weight.unwrap_or(1.0)
    }

    /// Total flat area. The deformation cancels, so exact data stay exact.
    pub fn area(&self) -> Scalar {
        self.rects
            .iter()
            .fold(Scalar::zero(), |acc, r| &acc + &(&r.w * &r.h))
    }

    /// `∫ ρ² dA` for the weights.
    pub fn weighted_area(&self) -> f64 {
        self.rects
            .iter()
            .map(|r| r.weight.unwrap_or(1.0).powi(2) * (&r.w * &r.h).to_f64())
            .sum()
    }

    pub fn with_weights(mut self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.rects.len() || weights.iter().any(|w| !(*w >= 0.0)) {
            return Err(Error::input("one nonnegative weight per rectangle required"));
        }
        for (r, &w) in self.rects.iter_mut().zip(weights) {
            r.weight = Some(w);
        }
        Ok(self)
    }

    /// Neighbour tables when every edge is glued whole to a single edge of
    /// equal length; `None` otherwise.
    pub fn adjacency(&self) -> Option<Adjacency> {
        let n = self.len();
        let mut adj = Adjacency {
            right: vec![usize::MAX; n],
            left: vec![usize::MAX; n],
            top: vec![usize::MAX; n],
            bottom: vec![usize::MAX; n],
        };
        for g in &self.gluings {
            let (ea, eb) = match g.side {
                Side::Right => (self.rects[g.a].h.to_f64(), self.rects[g.b].h.to_f64()),
                Side::Top => (self.rects[g.a].w.to_f64(), self.rects[g.b].w.to_f64()),
            };
            let whole = g.a_start.abs() < EPS
                && g.b_start.abs() < EPS
                && (g.len - ea).abs() < EPS
                && (g.len - eb).abs() < EPS;
            if !whole {
                return None;
            }
            match g.side {
                Side::Right => {
                    adj.right[g.a] = g.b;
                    adj.left[g.b] = g.a;
                }
                Side::Top => {
                    adj.top[g.a] = g.b;
                    adj.bottom[g.b] = g.a;
                }
            }
        }
        Some(adj)
    }

    /// Classes of rectangle corners that are the same point of the surface,
    /// as a class id per `(rect, corner)`. Needs an edge-to-edge gluing.
    pub fn corner_classes(&self) -> Option<Vec<[usize; 4]>> {
        let adj = self.adjacency()?;
        let n = self.len();
        let mut parent: Vec<usize> = (0..4 * n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        let mut union = |a: usize, b: usize| {
            let (x, y) = (find(&mut parent, a), find(&mut parent, b));
            parent[x] = y;
        };
        let id = |k: usize, c: Corner| 4 * k + c.index();
        for k in 0..n {
            union(id(k, Corner::BR), id(adj.right[k], Corner::BL));
            union(id(k, Corner::TR), id(adj.right[k], Corner::TL));
            union(id(k, Corner::TL), id(adj.top[k], Corner::BL));
            union(id(k, Corner::TR), id(adj.top[k], Corner::BR));
        }
        let mut out = vec![[0; 4]; n];
        for k in 0..n {
            for c in Corner::ALL {
                out[k][c.index()] = find(&mut parent, id(k, c));
            }
        }
        Some(out)
    }

    /// Whether a corner class has cone angle other than `2 pi`.
    pub fn singular_corner_classes(&self) -> Option<Vec<usize>> {
        let classes = self.corner_classes()?;
        let mut count = std::collections::HashMap::new();
        for k in &classes {
            for &c in k {
                *count.entry(c).or_insert(0usize) += 1;
            }
        }
        let mut sing: Vec<usize> = count.into_iter().filter(|&(_, m)| m != 4).map(|(c, _)| c).collect();
        sing.sort_unstable();
        Some(sing)
    }

    /// Shortest distance between two distinct corners of one rectangle,
    /// that is the smallest side length.
    pub fn corner_separation(&self) -> f64 {
        (0..self.len())
            .map(|k| self.width(k).min(self.height(k)))
            .fold(f64::INFINITY, f64::min)
    }

    /// Export in the `{rects:[{w,h,weight}], gluings:[...]}` layout with
    /// deformed sizes.
    pub fn export_json(&self) -> serde_json::Value {
        let rects: Vec<_> = (0..self.len())
            .map(|k| serde_json::json!({"w": self.width(k), "h": self.height(k), "weight": self.rects[k].weight}))
            .collect();
        let (et, emt) = (self.t.exp(), (-self.t).exp());
        let gluings: Vec<_> = self
            .gluings
            .iter()
            .map(|g| {
                let s = if g.side == Side::Top { et } else { emt };
                serde_json::json!({
                    "side": g.side, "a": g.a, "a_start": g.a_start * s,
                    "b": g.b, "b_start": g.b_start * s, "len": g.len * s,
                })
            })
            .collect();
        serde_json::json!({"rects": rects, "gluings": gluings})
    }
}

/// Applies the diagonal deformation: widths times `e^t`, heights times
/// `e^-t`. Gluing combinatorics and area are unchanged.
pub fn geodesic_flow(r: &Rectangulation, t: f64) -> Rectangulation {
    let mut out = r.clone();
    out.t += t;
    out
}

/// [`geodesic_flow`] starting from the square tiling of an origami.
pub fn geodesic_flow_origami(o: &Origami, t: f64) -> Rectangulation {
    geodesic_flow(&Rectangulation::from_origami(o), t)
}
