//! Square-tiled surfaces given by a pair of permutations.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `n` unit squares; `h[s]` is the square to the right of `s`, `v[s]` the
/// square above it. Indices are 0-based internally and 1-based in JSON.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Origami {
    h: Vec<usize>,
    v: Vec<usize>,
    h_inv: Vec<usize>,
    v_inv: Vec<usize>,
    census: SingularityCensus,
}

/// Vertices of the square tiling, each given by the squares having it as
/// their bottom-left corner, with cone angle `2 pi * angle_multiple`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingularityCensus {
    pub vertices: Vec<Vec<usize>>,
    pub angle_multiples: Vec<usize>,
    pub genus: usize,
}

impl SingularityCensus {
    /// Angles `2 pi k` with `k > 1`.
    pub fn singular_angles(&self) -> Vec<usize> {
        self.angle_multiples.iter().copied().filter(|&k| k > 1).collect()
    }
}

fn check_perm(p: &[usize], n: usize, name: &str) -> Result<()> {
    let mut seen = vec![false; n];
    for &x in p {
        if x >= n || seen[x] {
            return Err(Error::input(format!("{name} is not a permutation of 1..{n}")));
        }
        seen[x] = true;
    }
    Ok(())
}

fn inverse(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &x) in p.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

fn cycles(p: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for s in 0..p.len() {
        if seen[s] {
            continue;
        }
        let mut c = Vec::new();
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            c.push(x);
            x = p[x];
        }
        out.push(c);
    }
    out
}

impl Origami {
    /// Builds and validates an origami from 0-based permutations.
    pub fn new(h: Vec<usize>, v: Vec<usize>) -> Result<Self> {
        let n = h.len();
        if n == 0 || v.len() != n {
            return Err(Error::input("h and v must be nonempty permutations of equal length"));
        }
        check_perm(&h, n, "h")?;
        check_perm(&v, n, "v")?;
        // connectivity under <h, v>
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(s) = stack.pop() {
            for t in [h[s], v[s]] {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        if seen.iter().any(|&b| !b) {
            return Err(Error::Construction("squares do not form a connected surface".into()));
        }
        let h_inv = inverse(&h);
        let v_inv = inverse(&v);
        // going once around the bottom-left corner of s
        let comm: Vec<usize> = (0..n).map(|s| v[h[v_inv[h_inv[s]]]]).collect();
        let vertices = cycles(&comm);
        let angle_multiples: Vec<usize> = vertices.iter().map(Vec::len).collect();
        let excess: usize = angle_multiples.iter().map(|k| k - 1).sum();
        if excess % 2 != 0 {
            return Err(Error::Construction("inconsistent cone angle data".into()));
        }
        let census = SingularityCensus {
            vertices,
            angle_multiples,
            genus: excess / 2 + 1,
        };
        Ok(Origami { h, v, h_inv, v_inv, census })
    }

    /// Builds from 1-based one-line notation.
    pub fn from_one_based(h: &[usize], v: &[usize]) -> Result<Self> {
        let dec = |p: &[usize]| -> Result<Vec<usize>> {
            p.iter()
                .map(|&x| {
                    x.checked_sub(1)
                        .ok_or_else(|| Error::input("one-based permutation entries start at 1"))
                })
                .collect()
        };
        Origami::new(dec(h)?, dec(v)?)
    }

    /// The one-square torus.
    pub fn torus() -> Self {
        Origami::new(vec![0], vec![0]).expect("valid")
    }

    /// A uniformly random pair of permutations, redrawn until connected.
    pub fn random<R: Rng>(n: usize, rng: &mut R) -> Self {
        loop {
            let mut h: Vec<usize> = (0..n).collect();
            let mut v: Vec<usize> = (0..n).collect();
            h.shuffle(rng);
            v.shuffle(rng);
            if let Ok(o) = Origami::new(h, v) {
                return o;
            }
        }
    }

    pub fn n(&self) -> usize {
        self.h.len()
    }

    pub fn h(&self) -> &[usize] {
        &self.h
    }

    pub fn v(&self) -> &[usize] {
        &self.v
    }

    pub fn h_inv(&self) -> &[usize] {
        &self.h_inv
    }

    pub fn v_inv(&self) -> &[usize] {
        &self.v_inv
    }

    pub fn census(&self) -> &SingularityCensus {
        &self.census
    }

    /// `h^k(s)` for any integer `k`.
    pub fn h_pow(&self, s: usize, k: i64) -> usize {
        let mut x = s;
        if k >= 0 {
            for _ in 0..k {
                x = self.h[x];
            }
        } else {
            for _ in 0..(-k) {
                x = self.h_inv[x];
            }
        }
        x
    }

    /// The mirror image across the diagonal: rows become columns.
    pub fn transposed(&self) -> Self {
        Origami::new(self.v.clone(), self.h.clone()).expect("transpose of a valid origami")
    }

    /// Whether the bottom-left corner of `s` is a cone point.
    pub fn is_singular_corner(&self, s: usize) -> bool {
        self.census
            .vertices
            .iter()
            .find(|c| c.contains(&s))
            .map_or(false, |c| c.len() > 1)
    }
}

#[derive(Serialize, Deserialize)]
pub struct OrigamiJson {
    pub n: usize,
    pub h: Vec<usize>,
    pub v: Vec<usize>,
}

impl Serialize for Origami {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OrigamiJson {
            n: self.n(),
            h: self.h.iter().map(|x| x + 1).collect(),
            v: self.v.iter().map(|x| x + 1).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Origami {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = OrigamiJson::deserialize(d)?;
        if j.h.len() != j.n {
            return Err(serde::de::Error::custom("n does not match permutation length"));
        }
        Origami::from_one_based(&j.h, &j.v).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_has_no_singularities() {
        let t = Origami::torus();
        assert_eq!(t.census().genus, 1);
        assert!(t.census().singular_angles().is_empty());
    }

    #[test]
    fn three_square_census() {
        // h = (1 2 3), v = (1)(2 3)
        let o = Origami::from_one_based(&[2, 3, 1], &[1, 3, 2]).unwrap();
        // independent count: one vertex, Euler characteristic 3 - 6 + 1 = -2
        assert_eq!(o.census().vertices.len(), 1);
        assert_eq!(o.census().singular_angles(), vec![3]);
        assert_eq!(o.census().genus, 2);
    }

    #[test]
    fn euler_characteristic_matches_census() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in 1..=10 {
            let o = Origami::random(n, &mut rng);
            let vcount = o.census().vertices.len() as i64;
            // squares n, edges 2n, vertices vcount
            let chi = vcount - n as i64;
            assert_eq!(chi, 2 - 2 * o.census().genus as i64);
        }
    }

    #[test]
    fn disconnected_and_bad_input() {
        // h = (1 2), v = id on 3 squares
        assert!(matches!(
            Origami::from_one_based(&[2, 1, 3], &[1, 2, 3]),
            Err(Error::Construction(_))
        ));
        assert!(matches!(Origami::new(vec![0, 1], vec![0]), Err(Error::Input(_))));
        assert!(matches!(Origami::new(vec![0, 0], vec![0, 1]), Err(Error::Input(_))));
    }

    #[test]
    fn json_round_trip() {
        let o = Origami::from_one_based(&[2, 3, 1], &[1, 3, 2]).unwrap();
        let s = serde_json::to_string(&o).unwrap();
        assert_eq!(s, r#"{"n":3,"h":[2,3,1],"v":[1,3,2]}"#);
        assert_eq!(serde_json::from_str::<Origami>(&s).unwrap(), o);
    }
}
