//! Interval exchange transformations, Rauzy induction, and first-return
//! decompositions of straight-line flows on square-tiled surfaces.
//!
//! Lengths are exact rationals. Float input is converted exactly, so the
//! quantization step is that of `f64` itself (relative `2^-53`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::rational_from_f64;
use crate::square_tiled::cylinders::{cylinder_decomposition, Cylinder};
use crate::square_tiled::origami::Origami;

/// An interval exchange on `[0, Σ lengths)`. Intervals carry labels
/// `0..m`; `top` lists them in domain order and `bottom` in image order.
/// Exchanges coming from translation surfaces are orientation preserving;
/// a non-oriented exchange would be stored through its orientation double
/// cover, which is what `oriented = false` records.
#[derive(Clone, Debug, PartialEq)]
pub struct Iet {
    lengths: Vec<BigRational>,
    top: Vec<usize>,
    bottom: Vec<usize>,
    pub oriented: bool,
}

fn is_perm(p: &[usize], m: usize) -> bool {
    let mut seen = vec![false; m];
    p.len() == m && p.iter().all(|&x| x < m && !std::mem::replace(&mut seen[x], true))
}

impl Iet {
    pub fn new(lengths: Vec<BigRational>, top: Vec<usize>, bottom: Vec<usize>) -> Result<Self> {
        let m = lengths.len();
        if m == 0 {
            return Err(Error::input("an interval exchange needs at least one interval"));
        }
        if lengths.iter().any(|l| !l.is_positive()) {
            return Err(Error::input("interval lengths must be positive"));
        }
        if !is_perm(&top, m) || !is_perm(&bottom, m) {
            return Err(Error::input("top and bottom must both order all labels"));
        }
        Ok(Iet { lengths, top, bottom, oriented: true })
    }

    /// Labels are the top positions; `perm[i]` is the 0-based bottom
    /// position of the `i`-th top interval.
    pub fn from_f64(lengths: &[f64], perm: &[usize]) -> Result<Self> {
        let m = lengths.len();
        if !is_perm(perm, m) {
            return Err(Error::input("perm must be a permutation of the interval positions"));
        }
        let ls = lengths
            .iter()
            .map(|&x| rational_from_f64(x).ok_or_else(|| Error::input("length must be finite")))
            .collect::<Result<Vec<_>>>()?;
        let mut bottom = vec![0; m];
        for (label, &pos) in perm.iter().enumerate() {
            bottom[pos] = label;
        }
        Iet::new(ls, (0..m).collect(), bottom)
    }

    /// Rotation of the circle of length `1` by `alpha`, as the exchange of
    /// `[0, 1 - alpha)` and `[1 - alpha, 1)`.
    pub fn rotation(alpha: BigRational) -> Result<Self> {
        let one = BigRational::one();
        if !alpha.is_positive() || alpha >= one {
            return Err(Error::input("rotation number must lie in (0, 1)"));
        }
        Iet::new(vec![&one - &alpha, alpha], vec![0, 1], vec![1, 0])
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn lengths(&self) -> &[BigRational] {
        &self.lengths
    }

    pub fn top(&self) -> &[usize] {
        &self.top
    }

    pub fn bottom(&self) -> &[usize] {
        &self.bottom
    }

    pub fn total_length(&self) -> BigRational {
        self.lengths.iter().sum()
    }

    fn offsets(&self, order: &[usize]) -> Vec<BigRational> {
        let mut start = vec![BigRational::zero(); self.len()];
        let mut acc = BigRational::zero();
        for &l in order {
            start[l] = acc.clone();
            acc += &self.lengths[l];
        }
        start
    }

    /// Image of a point of the domain.
    pub fn apply(&self, x: &BigRational) -> Result<BigRational> {
        let (ts, bs) = (self.offsets(&self.top), self.offsets(&self.bottom));
        for &l in &self.top {
            if *x >= ts[l] && *x < &ts[l] + &self.lengths[l] {
                return Ok(x - &ts[l] + &bs[l]);
            }
        }
        Err(Error::input("point outside the domain"))
    }

    /// Irreducible: no proper prefix of the top row is a prefix of the
    /// bottom row as a set.
    pub fn is_irreducible(&self) -> bool {
        let m = self.len();
        let mut in_top = vec![false; m];
        let mut in_bottom = vec![false; m];
        let mut unmatched = 0i64;
        for k in 0..m.saturating_sub(1) {
            let (a, b) = (self.top[k], self.bottom[k]);
            in_top[a] = true;
            unmatched += if in_bottom[a] { -1 } else { 1 };
            in_bottom[b] = true;
            unmatched += if in_top[b] { -1 } else { 1 };
            if unmatched == 0 {
                return false;
            }
        }
        true
    }

    pub fn to_json(&self) -> IetJson {
        let mut pos = vec![0; self.len()];
        for (p, &l) in self.bottom.iter().enumerate() {
            pos[l] = p;
        }
        IetJson {
            lengths: self.top.iter().map(|&l| self.lengths[l].to_f64().unwrap_or(f64::NAN)).collect(),
            perm: self.top.iter().map(|&l| pos[l]).collect(),
        }
    }
}

/// `{lengths:[...], perm:[...]}` with lengths in domain order and `perm[i]`
/// the 0-based image position of the `i`-th interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IetJson {
    pub lengths: Vec<f64>,
    pub perm: Vec<usize>,
}

impl IetJson {
    pub fn to_iet(&self) -> Result<Iet> {
        Iet::from_f64(&self.lengths, &self.perm)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum RauzyOutcome {
    /// Induced exchange on the interval shortened by the loser's length.
    Induced { iet: Iet, winner: usize, loser: usize, top_wins: bool },
    /// The last top and bottom intervals have equal length: a leaf
    /// connects two discontinuities.
    Connection { top: usize, bottom: usize },
}

/// One step of Rauzy induction.
pub fn rauzy_step(t: &Iet) -> Result<RauzyOutcome> {
    if t.len() < 2 {
        return Err(Error::input("Rauzy induction needs at least two intervals"));
    }
    let alpha = *t.top.last().unwrap();
    let beta = *t.bottom.last().unwrap();
    let (la, lb) = (&t.lengths[alpha], &t.lengths[beta]);
    if la == lb {
        return Ok(RauzyOutcome::Connection { top: alpha, bottom: beta });
    }
    let mut next = t.clone();
    let top_wins = la > lb;
    let (winner, loser) = if top_wins { (alpha, beta) } else { (beta, alpha) };
    next.lengths[winner] = &t.lengths[winner] - &t.lengths[loser];
    // the loser moves right after the winner in the winner's row
    let row = if top_wins { &mut next.bottom } else { &mut next.top };
    row.pop();
    let at = row.iter().position(|&l| l == winner).unwrap();
    row.insert(at + 1, loser);
    Ok(RauzyOutcome::Induced { iet: next, winner, loser, top_wins })
}

/// Heights of the suspension after a Rauzy step: the loser's rectangle is
/// stacked on the winner's.
pub fn induced_heights(heights: &[BigRational], winner: usize, loser: usize) -> Vec<BigRational> {
    let mut h = heights.to_vec();
    h[loser] = &h[loser] + &h[winner];
    h
}

/// Direction of a straight-line flow.
#[derive(Clone, Debug, PartialEq)]
pub enum FlowDirection {
    /// Primitive integer vector `(p, q)`.
    Rational(i64, i64),
    /// Real vector, converted exactly from floats.
    Real(f64, f64),
    /// Horizontal displacement per unit of vertical rise.
    Shift(BigRational),
}

fn fib(n: usize) -> BigInt {
    let (mut a, mut b) = (BigInt::zero(), BigInt::one());
    for _ in 0..n {
        let c = &a + &b;
        a = std::mem::replace(&mut b, c);
    }
    a
}

impl FlowDirection {
    /// Slope approximating the golden ratio by `F(n+1)/F(n)`. For large `n`
    /// this agrees with the golden rotation for far more Rauzy steps than a
    /// float seed does.
    pub fn golden(n: usize) -> Self {
        FlowDirection::Shift(BigRational::new(fib(n + 1), fib(n)))
    }

    /// `(shift, transposed)`: horizontal directions are flowed on the
    /// transposed surface.
    fn resolve(&self) -> Result<(BigRational, bool)> {
        match self {
            FlowDirection::Rational(p, q) => {
                if *p == 0 && *q == 0 {
                    return Err(Error::input("direction must be nonzero"));
                }
                if *q == 0 {
                    Ok((BigRational::zero(), true))
                } else {
                    Ok((BigRational::new(BigInt::from(*p), BigInt::from(*q)), false))
                }
            }
            FlowDirection::Real(x, y) => {
                let (rx, ry) = (
                    rational_from_f64(*x).ok_or_else(|| Error::input("direction must be finite"))?,
                    rational_from_f64(*y).ok_or_else(|| Error::input("direction must be finite"))?,
                );
                if ry.is_zero() {
                    if rx.is_zero() {
                        return Err(Error::input("direction must be nonzero"));
                    }
                    Ok((BigRational::zero(), true))
                } else {
                    Ok((rx / ry, false))
                }
            }
            FlowDirection::Shift(a) => Ok((a.clone(), false)),
        }
    }
}

/// Where leaves are stopped.
#[derive(Clone, Debug, PartialEq)]
pub enum Transversal {
    /// The union of all bottom edges, parametrised by `square + x`.
    BottomEdges,
    /// A horizontal arc starting at `offset` on the bottom edge of `square`
    /// and running right for `length`, possibly across several squares.
    Arc { square: usize, offset: BigRational, length: BigRational },
}

/// One rectangle of a first-return decomposition: leaves starting on
/// `[start, start + base)` of the transversal return after `steps` unit
/// rises, sweeping area `base * steps`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReturnRect {
    pub start: BigRational,
    pub base: BigRational,
    pub steps: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReturnDecomposition {
    pub transversal: Transversal,
    pub rects: Vec<ReturnRect>,
    /// Whether the flow was computed on the transposed surface.
    pub transposed: bool,
    shift: BigRational,
    segments: Vec<(usize, BigRational, BigRational, BigRational)>,
}

fn floor(x: &BigRational) -> BigInt {
    x.floor().to_integer()
}

fn to_i64(b: &BigInt) -> i64 {
    b.to_i64().expect("displacement fits in i64")
}

/// The transversal as pieces `(square, lo, hi, param at lo)`.
fn segments(o: &Origami, tr: &Transversal) -> Result<Vec<(usize, BigRational, BigRational, BigRational)>> {
    match tr {
        Transversal::BottomEdges => Ok((0..o.n())
            .map(|s| {
                let base = BigRational::from_integer(BigInt::from(s));
                (s, BigRational::zero(), BigRational::one(), base)
            })
            .collect()),
        Transversal::Arc { square, offset, length } => {
            if *square >= o.n() {
                return Err(Error::input("transversal starts on a missing square"));
            }
            if offset.is_negative() || *offset >= BigRational::one() || !length.is_positive() {
                return Err(Error::input("transversal needs offset in [0,1) and positive length"));
            }
            if *length > BigRational::from_integer(BigInt::from(o.n())) {
                return Err(Error::input("transversal longer than the surface is wide"));
            }
            let mut out = Vec::new();
            let (mut s, mut lo, mut param) = (*square, offset.clone(), BigRational::zero());
            let end = offset + length;
            let mut consumed = offset.clone();
            loop {
                let hi = if &end - &consumed + &lo > BigRational::one() {
                    BigRational::one()
                } else {
                    &end - &consumed + &lo
                };
                out.push((s, lo.clone(), hi.clone(), param.clone()));
                param += &hi - &lo;
                consumed += &hi - &lo;
                if consumed >= end {
                    break;
                }
                s = o.h()[s];
                if o.is_singular_corner(s) {
                    return Err(Error::input("transversal passes through a singularity"));
                }
                lo = BigRational::zero();
            }
            Ok(out)
        }
    }
}

impl ReturnDecomposition {
    /// `Σ base * steps`.
    pub fn area(&self) -> BigRational {
        self.rects
            .iter()
            .map(|r| &r.base * BigRational::from_integer(BigInt::from(r.steps)))
            .sum()
    }

    fn param_of(&self, s: usize, x: &BigRational) -> Option<BigRational> {
        self.segments
            .iter()
            .find(|(sq, lo, hi, _)| *sq == s && x >= lo && x < hi)
            .map(|(_, lo, _, p)| p + x - lo)
    }

    /// The rectangles and levels whose flowed image contains the point at
    /// height `y` above `(square, x)`; exactly one for points off the
    /// critical leaves. Coordinates are those of the flowed surface
    /// (transposed for horizontal directions).
    pub fn locate(&self, o: &Origami, square: usize, x: f64, y: f64) -> Result<Vec<(usize, usize)>> {
        let surface = if self.transposed { o.transposed() } else { o.clone() };
        let (rx, ry) = (
            rational_from_f64(x).ok_or_else(|| Error::input("point must be finite"))?,
            rational_from_f64(y).ok_or_else(|| Error::input("point must be finite"))?,
        );
        // drop to the bottom edge along the leaf
        let below = rx - &self.shift * ry;
        let k = floor(&below);
        let mut s = surface.h_pow(square, to_i64(&k));
        let mut pos = &below - BigRational::from_integer(k);
        let cap = self.rects.iter().map(|r| r.steps).max().unwrap_or(0) + 1;
        let mut hits = Vec::new();
        for level in 0..cap {
            if let Some(u) = self.param_of(s, &pos) {
                for (i, r) in self.rects.iter().enumerate() {
                    if u >= r.start && u < &r.start + &r.base && level < r.steps {
                        hits.push((i, level));
                    }
                }
                break;
            }
            // one step backwards
            let back = &pos - &self.shift;
            let k = floor(&back);
            s = surface.h_pow(surface.v_inv()[s], to_i64(&k));
            pos = back - BigRational::from_integer(k);
        }
        Ok(hits)
    }
}

/// First return of the flow in direction `dir` to the transversal.
pub fn first_return(o: &Origami, dir: &FlowDirection, tr: &Transversal) -> Result<(Iet, ReturnDecomposition)> {
    let (shift, transposed) = dir.resolve()?;
    let surface = if transposed { o.transposed() } else { o.clone() };
    let segs = segments(&surface, tr)?;
    let one = BigRational::one();
    let cut = &one - (&shift - BigRational::from_integer(floor(&shift)));
    // pieces: (param at start, length, square, x, steps)
    let mut live: Vec<(BigRational, BigRational, usize, BigRational, usize)> = segs
        .iter()
        .map(|(s, lo, hi, p)| (p.clone(), hi - lo, *s, lo.clone(), 0))
        .collect();
    let mut done: Vec<(BigRational, BigRational, BigRational, usize)> = Vec::new();
    let budget = 10_000 * surface.n().max(1);
    let mut rounds = 0;
    while !live.is_empty() {
        rounds += 1;
        if rounds > budget {
            return Err(Error::NonConvergence { iterations: rounds, last: live.len() as f64, residuals: vec![] });
        }
        let mut next = Vec::new();
        for (u, len, s, x, k) in live {
            // split where the leaf would hit a corner at the top
            let mut parts = vec![(u.clone(), len.clone(), x.clone())];
            if x < cut && cut < &x + &len {
                let l1 = &cut - &x;
                parts = vec![(u.clone(), l1.clone(), x.clone()), (&u + &l1, &len - &l1, cut.clone())];
            }
            for (u, len, x) in parts {
                let moved = &x + &shift;
                let whole = floor(&moved);
                let nx = &moved - BigRational::from_integer(whole.clone());
                let ns = surface.v()[surface.h_pow(s, to_i64(&whole))];
                // split against the transversal in square ns
                let mut rest = vec![(u, len, nx)];
                for (_, lo, hi, p) in segs.iter().filter(|seg| seg.0 == ns) {
                    let mut keep = Vec::new();
                    for (u, len, x) in rest {
                        let end = &x + &len;
                        let a = if x > *lo { x.clone() } else { lo.clone() };
                        let b = if end < *hi { end.clone() } else { hi.clone() };
                        if a < b {
                            done.push((&u + (&a - &x), &b - &a, p + (&a - lo), k + 1));
                            if x < a {
                                keep.push((u.clone(), &a - &x, x.clone()));
                            }
                            if b < end {
                                keep.push((&u + (&b - &x), &end - &b, b.clone()));
                            }
                        } else {
                            keep.push((u, len, x));
                        }
                    }
                    rest = keep;
                }
                for (u, len, x) in rest {
                    next.push((u, len, ns, x, k + 1));
                }
            }
        }
        live = next;
    }
    done.sort_by(|a, b| a.0.cmp(&b.0));
    // merge pieces the return map keeps contiguous, with equal return times,
    // so that intervals and rectangles correspond one to one
    let mut merged: Vec<(BigRational, BigRational, BigRational, usize)> = Vec::new();
    for (u, l, w, k) in done {
        if let Some(last) = merged.last_mut() {
            if &last.0 + &last.1 == u && &last.2 + &last.1 == w && last.3 == k {
                last.1 += &l;
                continue;
            }
        }
        merged.push((u, l, w, k));
    }
    let rects = merged
        .iter()
        .map(|(u, l, _, k)| ReturnRect { start: u.clone(), base: l.clone(), steps: *k })
        .collect();
    let lengths: Vec<BigRational> = merged.iter().map(|m| m.1.clone()).collect();
    let mut bottom: Vec<usize> = (0..merged.len()).collect();
    bottom.sort_by(|&a, &b| merged[a].2.cmp(&merged[b].2));
    let iet = Iet::new(lengths, (0..merged.len()).collect(), bottom)?;
    let dec = ReturnDecomposition { transversal: tr.clone(), rects, transposed, shift, segments: segs };
    Ok((iet, dec))
}

#[derive(Clone, Debug, PartialEq)]
pub enum Classification {
    Periodic(Vec<Cylinder>),
    /// Rauzy induction ran this many steps without meeting a connection.
    MinimalCertified { steps: usize },
    /// A connection appeared after this many steps.
    Connection { step: usize },
    /// Induction could not run (a single interval).
    Inconclusive { steps: usize },
}

/// Periodic for integer directions; otherwise Rauzy induction on the
/// first return to the bottom edge of square 0.
pub fn classify_direction(o: &Origami, dir: &FlowDirection, max_steps: usize) -> Result<Classification> {
    if max_steps == 0 {
        return Err(Error::input("max_steps must be at least 1"));
    }
    if let FlowDirection::Rational(p, q) = dir {
        return Ok(Classification::Periodic(cylinder_decomposition(o, *p, *q)?));
    }
    let arc = Transversal::Arc { square: 0, offset: BigRational::zero(), length: BigRational::one() };
    let (mut t, _) = first_return(o, dir, &arc)?;
    for step in 0..max_steps {
        if t.len() < 2 {
            return Ok(Classification::Inconclusive { steps: step });
        }
        match rauzy_step(&t)? {
            RauzyOutcome::Connection { .. } => return Ok(Classification::Connection { step }),
            RauzyOutcome::Induced { iet, .. } => t = iet,
        }
    }
    Ok(Classification::MinimalCertified { steps: max_steps })
}
