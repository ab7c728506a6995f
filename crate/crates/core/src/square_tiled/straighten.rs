//! Closed curves made of straight chords across rectangles, and the
//! straightening procedure that brings them into a normal form without
//! increasing `∫ρ dH`, `∫dV` or the number of chords.
//!
//! A curve is straightened when
//! (i) consecutive chords are glued end to start,
//! (ii) consecutive non-horizontal chords move in the same vertical sense,
//! (iii) a chord lying in a horizontal edge joins two corners,
//! (iv) a chord shorter than the corner separation `l` has a horizontal
//! neighbour.
//!
//! Straightening is supported for edge-to-edge rectangulations, which
//! include the square tilings of origamis and their deformations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::square_tiled::rectangulation::{Adjacency, Corner, Rectangulation};

const EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Chord {
    pub rect: usize,
    pub p: (f64, f64),
    pub q: (f64, f64),
}

impl Chord {
    pub fn new(rect: usize, p: (f64, f64), q: (f64, f64)) -> Self {
        Chord { rect, p, q }
    }

    pub fn dx(&self) -> f64 {
        self.q.0 - self.p.0
    }

    pub fn dy(&self) -> f64 {
        self.q.1 - self.p.1
    }

    pub fn length(&self) -> f64 {
        self.dx().hypot(self.dy())
    }

    pub fn is_horizontal(&self) -> bool {
        self.dy().abs() <= EPS
    }

    fn is_degenerate(&self) -> bool {
        self.dx().abs() <= EPS && self.dy().abs() <= EPS
    }
}

/// A closed curve as a cyclic sequence of chords. The empty curve is the
/// trivial class.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ChordCurve {
    pub chords: Vec<Chord>,
}

impl ChordCurve {
    pub fn new(chords: Vec<Chord>) -> Self {
        ChordCurve { chords }
    }

    pub fn len(&self) -> usize {
        self.chords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chords.is_empty()
    }

    /// Sum of chord displacements. On a translation surface this is the
    /// holonomy of the closed curve; on a square-tiled torus it is the
    /// homology class.
    pub fn holonomy(&self) -> (f64, f64) {
        self.chords
            .iter()
            .fold((0.0, 0.0), |(x, y), c| (x + c.dx(), y + c.dy()))
    }

    /// `∫dV`: total horizontal extent.
    pub fn dv(&self) -> f64 {
        self.chords.iter().map(|c| c.dx().abs()).sum()
    }

    /// `∫ρ dH`: vertical extent weighted by the rectangle weights.
    pub fn rho_dh(&self, r: &Rectangulation) -> f64 {
        self.chords.iter().map(|c| r.weight(c.rect) * c.dy().abs()).sum()
    }
}

/// Where a point sits on the boundary of its rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Place {
    Corner(Corner),
    Left,
    Right,
    Bottom,
    Top,
    Interior,
}

struct Geom<'a> {
    r: &'a Rectangulation,
    adj: Adjacency,
    classes: Vec<[usize; 4]>,
    singular: Vec<usize>,
    l: f64,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= EPS
}

fn same(a: (f64, f64), b: (f64, f64)) -> bool {
    close(a.0, b.0) && close(a.1, b.1)
}

impl<'a> Geom<'a> {
    fn new(r: &'a Rectangulation) -> Result<Self> {
        let unsupported =
            || Error::Unsupported("straightening needs every edge glued whole to one edge".into());
        let adj = r.adjacency().ok_or_else(unsupported)?;
        let classes = r.corner_classes().ok_or_else(unsupported)?;
        let singular = r.singular_corner_classes().ok_or_else(unsupported)?;
        Ok(Geom { r, adj, classes, singular, l: r.corner_separation() })
    }

    fn size(&self, k: usize) -> (f64, f64) {
        (self.r.width(k), self.r.height(k))
    }

    fn place(&self, k: usize, pt: (f64, f64)) -> Place {
        let (w, h) = self.size(k);
        let (l, rt, b, t) = (close(pt.0, 0.0), close(pt.0, w), close(pt.1, 0.0), close(pt.1, h));
        match (l, rt, b, t) {
            (true, _, true, _) => Place::Corner(Corner::BL),
            (_, true, true, _) => Place::Corner(Corner::BR),
            (true, _, _, true) => Place::Corner(Corner::TL),
            (_, true, _, true) => Place::Corner(Corner::TR),
            (true, ..) => Place::Left,
            (_, true, ..) => Place::Right,
            (_, _, true, _) => Place::Bottom,
            (.., true) => Place::Top,
            _ => Place::Interior,
        }
    }

    fn corner_class(&self, k: usize, c: Corner) -> usize {
        self.classes[k][c as usize]
    }

    fn is_corner(&self, k: usize, pt: (f64, f64)) -> bool {
        matches!(self.place(k, pt), Place::Corner(_))
    }

    /// Whether `(a, pa)` and `(b, pb)` are the same point of the surface.
    fn same_point(&self, a: usize, pa: (f64, f64), b: usize, pb: (f64, f64)) -> bool {
        match (self.place(a, pa), self.place(b, pb)) {
            (Place::Corner(ca), Place::Corner(cb)) => {
                self.corner_class(a, ca) == self.corner_class(b, cb)
            }
            (Place::Corner(_), _) | (_, Place::Corner(_)) => false,
            (pl, _) => {
                if a == b && same(pa, pb) {
                    return true;
                }
                match pl {
                    Place::Right => b == self.adj.right[a] && close(pb.0, 0.0) && close(pb.1, pa.1),
                    Place::Left => {
                        b == self.adj.left[a] && close(pb.0, self.size(b).0) && close(pb.1, pa.1)
                    }
                    Place::Top => b == self.adj.top[a] && close(pb.1, 0.0) && close(pb.0, pa.0),
                    Place::Bottom => {
                        b == self.adj.bottom[a] && close(pb.1, self.size(b).1) && close(pb.0, pa.0)
                    }
                    Place::Interior | Place::Corner(_) => false,
                }
            }
        }
    }

    fn junction_is_singular(&self, k: usize, pt: (f64, f64)) -> bool {
        match self.place(k, pt) {
            Place::Corner(c) => self.singular.binary_search(&self.corner_class(k, c)).is_ok(),
            _ => false,
        }
    }

    fn on_same_horizontal_edge(&self, c: &Chord) -> bool {
        let h = self.size(c.rect).1;
        (close(c.p.1, 0.0) && close(c.q.1, 0.0)) || (close(c.p.1, h) && close(c.q.1, h))
    }
}

/// Which of the conditions (i)–(iv) a curve violates.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub glued: bool,
    pub monotone: bool,
    pub edge_chords_at_corners: bool,
    pub short_chords_supported: bool,
}

impl ConditionReport {
    pub fn all(&self) -> bool {
        self.glued && self.monotone && self.edge_chords_at_corners && self.short_chords_supported
    }
}

fn validate_chords(g: &Geom, c: &ChordCurve) -> Result<()> {
    for (i, ch) in c.chords.iter().enumerate() {
        if ch.rect >= g.r.len() {
            return Err(Error::input(format!("chord {i} names a missing rectangle")));
        }
        let (w, h) = g.size(ch.rect);
        for pt in [ch.p, ch.q] {
            let inside = pt.0 >= -EPS && pt.0 <= w + EPS && pt.1 >= -EPS && pt.1 <= h + EPS;
            if !inside || g.place(ch.rect, pt) == Place::Interior {
                return Err(Error::input(format!(
                    "chord {i} endpoint ({}, {}) is not on the boundary of its rectangle",
                    pt.0, pt.1
                )));
            }
        }
    }
    Ok(())
}

fn check_i(g: &Geom, c: &ChordCurve) -> Option<usize> {
    let n = c.len();
    (0..n).find(|&i| {
        let (a, b) = (&c.chords[i], &c.chords[(i + 1) % n]);
        !g.same_point(a.rect, a.q, b.rect, b.p)
    })
}

fn check_ii(g: &Geom, c: &ChordCurve) -> Option<usize> {
    let n = c.len();
    (0..n).find(|&i| {
        let (a, b) = (&c.chords[i], &c.chords[(i + 1) % n]);
        !a.is_horizontal()
            && !b.is_horizontal()
            && (a.dy() > 0.0) != (b.dy() > 0.0)
            && !g.junction_is_singular(a.rect, a.q)
    })
}

fn check_iii(g: &Geom, c: &ChordCurve) -> Option<usize> {
    (0..c.len()).find(|&i| {
        let ch = &c.chords[i];
        g.on_same_horizontal_edge(ch)
            && !ch.is_degenerate()
            && !(g.is_corner(ch.rect, ch.p) && g.is_corner(ch.rect, ch.q))
    })
}

fn check_iv(g: &Geom, c: &ChordCurve) -> Option<usize> {
    let n = c.len();
    (0..n).find(|&i| {
        let ch = &c.chords[i];
        ch.length() < g.l - EPS
            && !c.chords[(i + n - 1) % n].is_horizontal()
            && !c.chords[(i + 1) % n].is_horizontal()
    })
}

/// Checks conditions (i)–(iv) on `c`.
pub fn check_conditions(c: &ChordCurve, r: &Rectangulation) -> Result<ConditionReport> {
    let g = Geom::new(r)?;
    validate_chords(&g, c)?;
    Ok(ConditionReport {
        glued: check_i(&g, c).is_none(),
        monotone: check_ii(&g, c).is_none(),
        edge_chords_at_corners: check_iii(&g, c).is_none(),
        short_chords_supported: check_iv(&g, c).is_none(),
    })
}

/// Moves the junction between chord `j` and chord `j+1` along the edge it
/// lies on, to coordinate `to` along that edge.
fn slide(g: &Geom, c: &mut ChordCurve, j: usize, to: f64) -> Result<()> {
    let n = c.len();
    let k = (j + 1) % n;
    let a = c.chords[j];
    match g.place(a.rect, a.q) {
        Place::Top | Place::Bottom => {
            c.chords[j].q.0 = to;
            c.chords[k].p.0 = to;
        }
        Place::Left | Place::Right => {
            c.chords[j].q.1 = to;
            c.chords[k].p.1 = to;
        }
        _ => return Err(Error::Construction("cannot slide a junction at a corner".into())),
    }
    Ok(())
}

fn remove_degenerate(c: &mut ChordCurve) -> bool {
    let before = c.len();
    c.chords.retain(|ch| !ch.is_degenerate());
    c.len() != before
}

fn repair_ii(g: &Geom, c: &mut ChordCurve, j: usize) -> Result<()> {
    let n = c.len();
    let k = (j + 1) % n;
    let (a, b) = (c.chords[j], c.chords[k]);
    if a.rect == b.rect && same(a.q, b.p) {
        // two chords of one rectangle turning back: replace by one
        let merged = Chord::new(a.rect, a.p, b.q);
        if k == 0 {
            c.chords[j] = merged;
            c.chords.remove(0);
        } else {
            c.chords[j] = merged;
            c.chords.remove(k);
        }
        return Ok(());
    }
    let on_vertical = |pt: (f64, f64), rect: usize| {
        close(pt.0, 0.0) || close(pt.0, g.size(rect).0)
    };
    if on_vertical(a.q, a.rect) && on_vertical(b.p, b.rect) {
        // turn across a vertical edge: cut at the nearer extreme height
        let cut = if a.dy() > 0.0 { a.p.1.max(b.q.1) } else { a.p.1.min(b.q.1) };
        c.chords[j].q.1 = cut;
        c.chords[k].p.1 = cut;
        return Ok(());
    }
    Err(Error::Unsupported("turn at a junction not on a vertical edge".into()))
}

fn repair_iii(g: &Geom, c: &mut ChordCurve, i: usize) -> Result<()> {
    let n = c.len();
    let ch = c.chords[i];
    if !g.is_corner(ch.rect, ch.p) {
        slide(g, c, (i + n - 1) % n, ch.q.0)
    } else {
        slide(g, c, i, ch.p.0)
    }
}

fn repair_iv(g: &Geom, c: &mut ChordCurve, i: usize) -> Result<()> {
    let n = c.len();
    let ch = c.chords[i];
    let is_hinterior = |pt| matches!(g.place(ch.rect, pt), Place::Top | Place::Bottom);
    if ch.dx().abs() > EPS {
        if is_hinterior(ch.p) {
            return slide(g, c, (i + n - 1) % n, ch.q.0);
        }
        if is_hinterior(ch.q) {
            return slide(g, c, i, ch.p.0);
        }
        return Err(Error::Construction("short chord without a horizontal-edge endpoint".into()));
    }
    // the chord runs along a vertical edge
    let rho = g.r.weight(ch.rect);
    if !g.is_corner(ch.rect, ch.q) {
        let next = c.chords[(i + 1) % n];
        let target = if g.r.weight(next.rect) <= rho { ch.p.1 } else { next.q.1 };
        slide(g, c, i, target)
    } else if !g.is_corner(ch.rect, ch.p) {
        let prev = c.chords[(i + n - 1) % n];
        let target = if g.r.weight(prev.rect) <= rho { ch.q.1 } else { prev.p.1 };
        slide(g, c, (i + n - 1) % n, target)
    } else {
        Err(Error::Construction("short chord between two corners".into()))
    }
}

/// Result of straightening, with the bookkeeping needed to audit it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Straightened {
    pub curve: ChordCurve,
    /// Corner separation of the rectangulation.
    pub l: f64,
    pub moves: usize,
    pub rho_dh_before: f64,
    pub rho_dh_after: f64,
    pub dv_before: f64,
    pub dv_after: f64,
}

/// Straightens `c` on `r`. Fails with an input error if `c` does not
/// satisfy condition (i) and with `Unsupported` on gluings that are not
/// edge to edge.
pub fn straighten(c: &ChordCurve, r: &Rectangulation) -> Result<Straightened> {
    let g = Geom::new(r)?;
    validate_chords(&g, c)?;
    if let Some(i) = check_i(&g, c) {
        return Err(Error::input(format!("chords {i} and {} are not glued end to start", (i + 1) % c.len())));
    }
    let mut cur = c.clone();
    let cap = 10_000 + 100 * c.len();
    let mut moves = 0;
    loop {
        if moves > cap {
            return Err(Error::NonConvergence { iterations: moves, last: cur.len() as f64, residuals: vec![] });
        }
        if remove_degenerate(&mut cur) {
            moves += 1;
            continue;
        }
        if cur.is_empty() {
            break;
        }
        if let Some(j) = check_ii(&g, &cur) {
            repair_ii(&g, &mut cur, j)?;
        } else if let Some(i) = check_iii(&g, &cur) {
            repair_iii(&g, &mut cur, i)?;
        } else if let Some(i) = check_iv(&g, &cur) {
            repair_iv(&g, &mut cur, i)?;
        } else {
            break;
        }
        moves += 1;
    }
    Ok(Straightened {
        rho_dh_before: c.rho_dh(r),
        rho_dh_after: cur.rho_dh(r),
        dv_before: c.dv(),
        dv_after: cur.dv(),
        curve: cur,
        l: g.l,
        moves,
    })
}

/// A straight arc inside one rectangle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShortArc {
    pub rect: usize,
    pub a: (f64, f64),
    pub b: (f64, f64),
}

fn orient(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn on_segment(p: (f64, f64), a: (f64, f64), b: (f64, f64)) -> bool {
    orient(a, b, p).abs() <= EPS
        && p.0 >= a.0.min(b.0) - EPS
        && p.0 <= a.0.max(b.0) + EPS
        && p.1 >= a.1.min(b.1) - EPS
        && p.1 <= a.1.max(b.1) + EPS
}

/// Closed segment intersection test.
pub(crate) fn segments_meet(a: (f64, f64), b: (f64, f64), c: (f64, f64), d: (f64, f64)) -> bool {
    let (d1, d2) = (orient(a, b, c), orient(a, b, d));
    let (d3, d4) = (orient(c, d, a), orient(c, d, b));
    if ((d1 > EPS && d2 < -EPS) || (d1 < -EPS && d2 > EPS))
        && ((d3 > EPS && d4 < -EPS) || (d3 < -EPS && d4 > EPS))
    {
        return true;
    }
    on_segment(c, a, b) || on_segment(d, a, b) || on_segment(a, c, d) || on_segment(b, c, d)
}

/// All representatives `(rect, point)` of a boundary point.
fn copies(g: &Geom, k: usize, pt: (f64, f64)) -> Vec<(usize, (f64, f64))> {
    match g.place(k, pt) {
        Place::Corner(c) => {
            let cls = g.corner_class(k, c);
            let mut out = Vec::new();
            for (m, cs) in g.classes.iter().enumerate() {
                for cc in Corner::ALL {
                    if cs[cc as usize] == cls {
                        let (w, h) = g.size(m);
                        let p = match cc {
                            Corner::BL => (0.0, 0.0),
                            Corner::BR => (w, 0.0),
                            Corner::TL => (0.0, h),
                            Corner::TR => (w, h),
                        };
                        out.push((m, p));
                    }
                }
            }
            out
        }
        Place::Right => vec![(k, pt), (g.adj.right[k], (0.0, pt.1))],
        Place::Left => {
            let m = g.adj.left[k];
            vec![(k, pt), (m, (g.size(m).0, pt.1))]
        }
        Place::Top => vec![(k, pt), (g.adj.top[k], (pt.0, 0.0))],
        Place::Bottom => {
            let m = g.adj.bottom[k];
            vec![(k, pt), (m, (pt.0, g.size(m).1))]
        }
        Place::Interior => vec![(k, pt)],
    }
}

/// Preimage of an arc in the disjoint union of rectangles.
fn arc_preimage(g: &Geom, arc: &ShortArc) -> Vec<(usize, (f64, f64), (f64, f64))> {
    let mut out = vec![(arc.rect, arc.a, arc.b)];
    for pt in [arc.a, arc.b] {
        for (m, p) in copies(g, arc.rect, pt) {
            out.push((m, p, p));
        }
    }
    // an arc lying in an edge also lies in the glued edge
    let (w, h) = g.size(arc.rect);
    let shift = if close(arc.a.0, w) && close(arc.b.0, w) {
        Some((g.adj.right[arc.rect], (-w, 0.0)))
    } else if close(arc.a.0, 0.0) && close(arc.b.0, 0.0) {
        let m = g.adj.left[arc.rect];
        Some((m, (g.size(m).0, 0.0)))
    } else if close(arc.a.1, h) && close(arc.b.1, h) {
        Some((g.adj.top[arc.rect], (0.0, -h)))
    } else if close(arc.a.1, 0.0) && close(arc.b.1, 0.0) {
        let m = g.adj.bottom[arc.rect];
        Some((m, (0.0, g.size(m).1)))
    } else {
        None
    };
    if let Some((m, (sx, sy))) = shift {
        out.push((m, (arc.a.0 + sx, arc.a.1 + sy), (arc.b.0 + sx, arc.b.1 + sy)));
    }
    out
}

/// Upper bound for the intersection number of the curve with the union of
/// the arcs: the number of chords meeting the preimage of each arc, summed
/// over arcs.
pub fn chord_intersection_bound(c: &ChordCurve, r: &Rectangulation, arcs: &[ShortArc]) -> Result<usize> {
    let g = Geom::new(r)?;
    validate_chords(&g, c)?;
    let mut total = 0;
    for (j, arc) in arcs.iter().enumerate() {
        if arc.rect >= r.len() {
            return Err(Error::input(format!("arc {j} names a missing rectangle")));
        }
        let (w, h) = g.size(arc.rect);
        for pt in [arc.a, arc.b] {
            if pt.0 < -EPS || pt.0 > w + EPS || pt.1 < -EPS || pt.1 > h + EPS {
                return Err(Error::input(format!("arc {j} leaves its rectangle")));
            }
        }
        let pre = arc_preimage(&g, arc);
        total += c
            .chords
            .iter()
            .filter(|ch| {
                pre.iter()
                    .any(|&(m, a, b)| m == ch.rect && segments_meet(ch.p, ch.q, a, b))
            })
            .count();
    }
    Ok(total)
}

/// Boundary points of the unit square used by [`for_each_torus_curve`]:
/// the corners and the edge midpoints.
pub const TORUS_GRID_POINTS: [(f64, f64); 8] = [
    (0.0, 0.0),
    (1.0, 0.0),
    (0.0, 1.0),
    (1.0, 1.0),
    (0.5, 0.0),
    (0.5, 1.0),
    (0.0, 0.5),
    (1.0, 0.5),
];

fn torus_point_class(p: (f64, f64)) -> usize {
    let on = |x: f64| x == 0.0 || x == 1.0;
    match (on(p.0), on(p.1)) {
        (true, true) => 0,
        (false, _) => 1,
        _ => 2,
    }
}

/// Visits every closed chord curve on the one-square torus with endpoints
/// in [`TORUS_GRID_POINTS`], once per cyclic rotation class. Curves with up
/// to `all_chords_up_to` chords use every chord between distinct points;
/// longer ones, up to `max_chords`, only chords not contained in an edge.
pub fn for_each_torus_curve(all_chords_up_to: usize, max_chords: usize, mut f: impl FnMut(&ChordCurve)) {
    let pts = TORUS_GRID_POINTS;
    let in_edge = |a: (f64, f64), b: (f64, f64)| {
        (a.0 == b.0 && (a.0 == 0.0 || a.0 == 1.0)) || (a.1 == b.1 && (a.1 == 0.0 || a.1 == 1.0))
    };
    let mut all = Vec::new();
    for &a in &pts {
        for &b in &pts {
            if a != b {
                all.push((a, b, in_edge(a, b)));
            }
        }
    }
    fn canonical(seq: &[usize]) -> bool {
        let n = seq.len();
        (1..n).all(|r| {
            let rot = seq[r..].iter().chain(&seq[..r]);
            seq.iter().le(rot)
        })
    }
    fn walk(
        all: &[((f64, f64), (f64, f64), bool)],
        seq: &mut Vec<usize>,
        len: usize,
        allow_edge: bool,
        f: &mut dyn FnMut(&ChordCurve),
    ) {
        let last = all[*seq.last().unwrap()].1;
        if seq.len() == len {
            let first = all[seq[0]].0;
            if torus_point_class(last) == torus_point_class(first) && canonical(seq) {
                let chords = seq.iter().map(|&i| Chord::new(0, all[i].0, all[i].1)).collect();
                f(&ChordCurve::new(chords));
            }
            return;
        }
        for i in seq[0]..all.len() {
            let (a, _, e) = all[i];
            if (allow_edge || !e) && torus_point_class(a) == torus_point_class(last) {
                seq.push(i);
                walk(all, seq, len, allow_edge, f);
                seq.pop();
            }
        }
    }
    for len in 1..=max_chords {
        let allow_edge = len <= all_chords_up_to;
        for start in 0..all.len() {
            if !allow_edge && all[start].2 {
                continue;
            }
            let mut seq = vec![start];
            walk(&all, &mut seq, len, allow_edge, &mut f);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::square_tiled::origami::Origami;

    fn torus() -> Rectangulation {
        Rectangulation::from_origami(&Origami::torus())
    }

    #[test]
    fn horizontal_core_unchanged() {
        let r = torus();
        let c = ChordCurve::new(vec![Chord::new(0, (0.0, 0.5), (1.0, 0.5))]);
        let s = straighten(&c, &r).unwrap();
        assert_eq!(s.curve, c);
        assert!(check_conditions(&s.curve, &r).unwrap().all());
    }

    #[test]
    fn backtrack_in_one_rectangle_merges() {
        let r = torus();
        // up to the top midpoint and straight back down, then across
        let c = ChordCurve::new(vec![
            Chord::new(0, (0.0, 0.25), (0.5, 1.0)),
            Chord::new(0, (0.5, 1.0), (1.0, 0.25)),
        ]);
        assert!(!check_conditions(&c, &r).unwrap().monotone);
        let s = straighten(&c, &r).unwrap();
        assert!(s.curve.len() < c.len());
        assert_eq!(s.curve.holonomy(), (1.0, 0.0));
        assert!(check_conditions(&s.curve, &r).unwrap().all());
    }

    #[test]
    fn diagonal_straightens_to_one_chord() {
        let r = torus();
        let c = ChordCurve::new(vec![
            Chord::new(0, (0.0, 0.5), (0.5, 1.0)),
            Chord::new(0, (0.5, 0.0), (1.0, 0.5)),
        ]);
        let s = straighten(&c, &r).unwrap();
        assert_eq!(s.curve.len(), 1);
        assert_eq!(s.curve.holonomy(), (1.0, 1.0));
        assert!(s.dv_after <= s.dv_before + 1e-12);
        assert!(s.rho_dh_after <= s.rho_dh_before + 1e-12);
        let again = straighten(&s.curve, &r).unwrap();
        assert_eq!(again.curve, s.curve);
    }

    #[test]
    fn rejects_unglued_input() {
        let r = torus();
        let c = ChordCurve::new(vec![Chord::new(0, (0.0, 0.5), (1.0, 0.25))]);
        assert!(matches!(straighten(&c, &r), Err(Error::Input(_))));
    }

    #[test]
    fn intersection_bound_examples() {
        let r = torus();
        let c = ChordCurve::new(vec![Chord::new(0, (0.0, 0.5), (1.0, 0.5))]);
        let cross = ShortArc { rect: 0, a: (0.5, 0.2), b: (0.5, 0.8) };
        let apart = ShortArc { rect: 0, a: (0.2, 0.6), b: (0.8, 0.9) };
        assert_eq!(chord_intersection_bound(&c, &r, &[cross]).unwrap(), 1);
        assert_eq!(chord_intersection_bound(&c, &r, &[apart]).unwrap(), 0);
        let bad = ShortArc { rect: 0, a: (0.5, 0.2), b: (1.5, 0.8) };
        assert!(chord_intersection_bound(&c, &r, &[bad]).is_err());
    }

    #[test]
    fn family_counts_match_transfer_matrix() {
        let mut by_len = [0usize; 4];
        for_each_torus_curve(3, 3, |c| by_len[c.len()] += 1);
        // rotation classes of closed walks (16, 440, 8848 walks), by Burnside
        assert_eq!(by_len[1], 16);
        assert_eq!(by_len[2], (440 + 16) / 2);
        assert_eq!(by_len[3], (8848 + 2 * 16) / 3);
    }
}
