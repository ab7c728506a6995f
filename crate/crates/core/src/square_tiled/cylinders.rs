//! Cylinder decompositions in rational directions.
//!
//! For a direction `(p, q)` with `q > 0`, every leaf crossing the bottom
//! edge of a square rises one unit and moves `p/q` to the right before it
//! meets the next bottom edge. Cutting each bottom edge into `q` pieces of
//! length `1/q` turns this first return into a permutation of pieces; its
//! cycles are strips of parallel closed leaves. Two neighbouring strips lie
//! in the same maximal cylinder when the leaf separating them carries no
//! cone point, which is exactly when "step right" commutes with the return
//! map along the strip. Horizontal directions are handled on the transposed
//! surface.

use num_integer::Integer;
use num_rational::BigRational;
use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::square_tiled::origami::Origami;

/// A piece `(square, k)`: the subinterval `[k/q, (k+1)/q)` of the bottom
/// edge of `square`.
pub type Piece = (usize, usize);

#[derive(Clone, Debug, PartialEq)]
pub struct Cylinder {
    /// Primitive direction of the closed leaves.
    pub direction: (i64, i64),
    /// Flat length of the core curve.
    pub circumference: f64,
    /// Flat width across the leaves.
    pub height: f64,
    /// `circumference * height`, exact.
    pub area: BigRational,
    /// Strips in transverse order, each a cycle of pieces in return order.
    pub strips: Vec<Vec<Piece>>,
    /// Weight of the core in the foliation of this direction.
    pub weight: f64,
    transposed: bool,
}

impl Cylinder {
    /// Number of bottom-edge crossings of the core.
    pub fn core_length_steps(&self) -> usize {
        self.strips[0].len()
    }

    /// `1/modulus = circumference / height`.
    pub fn inverse_modulus(&self) -> f64 {
        self.circumference / self.height
    }

    /// Whether pieces and leaf segments are expressed on the transposed
    /// surface (horizontal directions).
    pub fn is_transposed(&self) -> bool {
        self.transposed
    }
}

/// Direction normalised so that `q > 0`, or `(1, 0)` handled by transposing.
fn normalize(p: i64, q: i64) -> Result<(i64, i64, bool)> {
    if p == 0 && q == 0 {
        return Err(Error::input("direction must be nonzero"));
    }
    if p.gcd(&q) != 1 {
        return Err(Error::input(format!("direction ({p},{q}) is not primitive")));
    }
    if q == 0 {
        // transpose swaps the coordinates: (1,0) becomes (0,1)
        return Ok((0, 1, true));
    }
    if q < 0 {
        Ok((-p, -q, false))
    } else {
        Ok((p, q, false))
    }
}

/// The first-return permutation on pieces for a direction with `q > 0`.
pub(crate) fn return_map(o: &Origami, p: i64, q: i64) -> Vec<usize> {
    let qu = q as usize;
    let n = o.n();
    let mut pi = vec![0; n * qu];
    for s in 0..n {
        for k in 0..qu {
            // left end k/q moves to (k + p)/q
            let shifted = k as i64 + p;
            let whole = shifted.div_euclid(q);
            let rem = shifted.rem_euclid(q) as usize;
            let top = o.h_pow(s, whole);
            pi[s * qu + k] = o.v()[top] * qu + rem;
        }
    }
    pi
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Maximal cylinders in the primitive direction `(p, q)`.
pub fn cylinder_decomposition(o: &Origami, p: i64, q: i64) -> Result<Vec<Cylinder>> {
    let (dp, dq, transposed) = normalize(p, q)?;
    let surface = if transposed { o.transposed() } else { o.clone() };
    let n = surface.n();
    let qu = dq as usize;
    let pi = return_map(&surface, dp, dq);
    let right = |x: usize| {
        let (s, k) = (x / qu, x % qu);
        if k + 1 < qu {
            s * qu + k + 1
        } else {
            surface.h()[s] * qu
        }
    };

    // strips
    let m = n * qu;
    let mut strip_of = vec![usize::MAX; m];
    let mut strips: Vec<Vec<usize>> = Vec::new();
    for start in 0..m {
        if strip_of[start] != usize::MAX {
            continue;
        }
        let mut c = Vec::new();
        let mut x = start;
        while strip_of[x] == usize::MAX {
            strip_of[x] = strips.len();
            c.push(x);
            x = pi[x];
        }
        strips.push(c);
    }

    // merge strips across regular boundary leaves
    let mut parent: Vec<usize> = (0..strips.len()).collect();
    let mut above = vec![None; strips.len()];
    for (i, c) in strips.iter().enumerate() {
        let target = strip_of[right(c[0])];
        let regular = c
            .iter()
            .all(|&x| strip_of[right(x)] == target && right(pi[x]) == pi[right(x)]);
        if regular {
            above[i] = Some(target);
            let (a, b) = (find(&mut parent, i), find(&mut parent, target));
            parent[a] = b;
        }
    }

    let norm = ((dp * dp + dq * dq) as f64).sqrt();
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..strips.len() {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut out = Vec::new();
    for members in groups.values() {
        // order strips transversally: start at one with no regular strip
        // below it, or anywhere when the cylinder closes up (torus)
        let below: std::collections::HashSet<usize> =
            members.iter().filter_map(|&i| above[i]).collect();
        let first = members
            .iter()
            .copied()
            .find(|i| !below.contains(i))
            .unwrap_or(members[0]);
        let mut order = vec![first];
        while order.len() < members.len() {
            match above[*order.last().unwrap()] {
                Some(nx) if !order.contains(&nx) => order.push(nx),
                _ => break,
            }
        }
        debug_assert_eq!(order.len(), members.len());
        let steps = strips[first].len();
        let count = members.len();
        let circumference = steps as f64 * norm / dq as f64;
        let height = count as f64 / norm;
        let area = BigRational::new(BigInt::from(count * steps), BigInt::from(dq));
        let (rp, rq) = if transposed { (1, 0) } else { (dp, dq) };
        out.push(Cylinder {
            direction: (rp, rq),
            circumference,
            height,
            area,
            strips: order
                .iter()
                .map(|&i| strips[i].iter().map(|&x| (x / qu, x % qu)).collect())
                .collect(),
            weight: 1.0,
            transposed,
        });
    }
    Ok(out)
}

/// A straight segment inside one square, in unit-square coordinates.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeafSegment {
    pub square: usize,
    pub from: (f64, f64),
    pub to: (f64, f64),
}

/// The closed leaf through the bottom edge of `piece` at offset
/// `(k + frac)/q`, as segments in the coordinates of the original surface.
pub fn leaf_segments(o: &Origami, cyl: &Cylinder, frac: f64) -> Vec<LeafSegment> {
    let (p, q) = if cyl.transposed { (0i64, 1i64) } else { cyl.direction };
    let surface = if cyl.transposed { o.transposed() } else { o.clone() };
    let slope = p as f64 / q as f64;
    let (s0, k0) = cyl.strips[cyl.strips.len() / 2][0];
    let mut s = s0;
    let mut x = (k0 as f64 + frac) / q as f64;
    let mut segs = Vec::new();
    for _ in 0..cyl.core_length_steps() {
        let mut y = 0.0;
        let mut cur = s;
        let mut cx = x;
        loop {
            let end_x = cx + slope * (1.0 - y);
            if end_x > 1.0 {
                let ny = y + (1.0 - cx) / slope;
                segs.push(LeafSegment { square: cur, from: (cx, y), to: (1.0, ny) });
                cur = surface.h()[cur];
                cx = 0.0;
                y = ny;
            } else if end_x < 0.0 {
                let ny = y + (0.0 - cx) / slope;
                segs.push(LeafSegment { square: cur, from: (cx, y), to: (0.0, ny) });
                cur = surface.h_inv()[cur];
                cx = 1.0;
                y = ny;
            } else {
                segs.push(LeafSegment { square: cur, from: (cx, y), to: (end_x, 1.0) });
                s = surface.v()[cur];
                x = end_x;
                break;
            }
        }
    }
    if cyl.transposed {
        for seg in &mut segs {
            seg.from = (seg.from.1, seg.from.0);
            seg.to = (seg.to.1, seg.to.0);
        }
    }
    segs
}

/// Parameters `(s, t)` of the crossing of two nonparallel segments.
fn crossing_params(a: &LeafSegment, b: &LeafSegment) -> Option<(f64, f64)> {
    let r = (a.to.0 - a.from.0, a.to.1 - a.from.1);
    let d = (b.to.0 - b.from.0, b.to.1 - b.from.1);
    let den = r.0 * d.1 - r.1 * d.0;
    if den.abs() < 1e-15 {
        return None;
    }
    let w = (b.from.0 - a.from.0, b.from.1 - a.from.1);
    let s = (w.0 * d.1 - w.1 * d.0) / den;
    let t = (w.0 * r.1 - w.1 * r.0) / den;
    Some((s, t))
}

/// Number of crossings between the cores of two cylinders in different
/// directions. Flat closed geodesics are in minimal position, so this is
/// their geometric intersection number.
pub fn core_intersection(o: &Origami, a: &Cylinder, b: &Cylinder) -> usize {
    if a.direction == b.direction {
        return 0;
    }
    // generic offsets keep crossings off the square edges
    let sa = leaf_segments(o, a, 0.5);
    let sb = leaf_segments(o, b, 0.381_966_011_250_105);
    let mut count = 0;
    for x in &sa {
        for y in sb.iter().filter(|y| y.square == x.square) {
            if let Some((s, t)) = crossing_params(x, y) {
                if (0.0..1.0).contains(&s) && (0.0..1.0).contains(&t) {
                    count += 1;
                }
            }
        }
    }
    count
}
