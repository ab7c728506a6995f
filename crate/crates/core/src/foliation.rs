//! Measured foliations over a declared basis of components.
//!
//! Components and their pairwise intersection numbers are input data. The
//! producer of a basis (the square-tiled module, a JSON file, a test) is
//! responsible for its indecomposability and disjointness claims.

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComponentKind {
    Annular,
    MinimalErgodic,
}

/// Optional geometric realisation of a component, used to intersect it with
/// foliations that are not expressed over the basis.
#[derive(Clone, Debug, PartialEq)]
pub enum ComponentGeometry {
    Torus(Direction),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentDescriptor {
    pub id: String,
    pub kind: ComponentKind,
    pub geometry: Option<ComponentGeometry>,
}

impl ComponentDescriptor {
    pub fn new(id: impl Into<String>, kind: ComponentKind) -> Self {
        ComponentDescriptor {
            id: id.into(),
            kind,
            geometry: None,
        }
    }
}

/// Components with their symmetric intersection matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComponentBasis {
    components: Vec<ComponentDescriptor>,
    gram: Vec<Vec<Scalar>>,
}

impl ComponentBasis {
    pub fn new(components: Vec<ComponentDescriptor>, gram: Vec<Vec<Scalar>>) -> Result<Self> {
        let n = components.len();
        if gram.len() != n || gram.iter().any(|row| row.len() != n) {
            return Err(Error::input(format!("gram matrix must be {n}x{n}")));
        }
        let mut seen = HashSet::new();
        for c in &components {
            if !seen.insert(c.id.as_str()) {
                return Err(Error::input(format!("duplicate component id {:?}", c.id)));
            }
        }
        for j in 0..n {
            if !gram[j][j].is_zero() {
                return Err(Error::input(format!(
                    "component {:?} has nonzero self-intersection",
                    components[j].id
                )));
            }
            for k in 0..n {
                if gram[j][k].is_negative() {
                    return Err(Error::input("gram entries must be nonnegative"));
                }
                if gram[j][k] != gram[k][j] {
                    return Err(Error::input("gram matrix must be symmetric"));
                }
            }
        }
        Ok(ComponentBasis { components, gram })
    }

    /// A basis of `n` mutually disjoint components with ids `G1..Gn`.
    pub fn disjoint(n: usize, kind: ComponentKind) -> Self {
        let components = (1..=n)
            .map(|j| ComponentDescriptor::new(format!("G{j}"), kind))
            .collect();
        let gram = vec![vec![Scalar::zero(); n]; n];
        ComponentBasis { components, gram }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[ComponentDescriptor] {
        &self.components
    }

    pub fn gram(&self) -> &[Vec<Scalar>] {
        &self.gram
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.components.iter().position(|c| c.id == id)
    }

    pub fn is_mutually_disjoint(&self) -> bool {
        self.gram.iter().flatten().all(Scalar::is_zero)
    }
}

/// Direction of a torus line foliation, up to sign. The first nonzero entry
/// is kept positive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Direction {
    Int(i64, i64),
    Real(f64, f64),
}

impl Direction {
    pub fn int(p: i64, q: i64) -> Result<Self> {
        if p == 0 && q == 0 {
            return Err(Error::input("direction must be nonzero"));
        }
        let (p, q) = if p < 0 || (p == 0 && q < 0) { (-p, -q) } else { (p, q) };
        Ok(Direction::Int(p, q))
    }

    pub fn real(x: f64, y: f64) -> Result<Self> {
        if !(x.is_finite() && y.is_finite()) || (x == 0.0 && y == 0.0) {
            return Err(Error::input("direction must be finite and nonzero"));
        }
        let (x, y) = if x < 0.0 || (x == 0.0 && y < 0.0) { (-x, -y) } else { (x, y) };
        Ok(Direction::Real(x, y))
    }

    pub fn as_f64(&self) -> (f64, f64) {
        match *self {
            Direction::Int(p, q) => (p as f64, q as f64),
            Direction::Real(x, y) => (x, y),
        }
    }

    /// `|det(self, other)|`, exact for integer pairs.
    pub fn abs_det(&self, other: &Direction) -> Scalar {
        match (self, other) {
            (Direction::Int(a, b), Direction::Int(c, d)) => {
                Scalar::int((a * d - b * c).abs())
            }
            _ => {
                let (a, b) = self.as_f64();
                let (c, d) = other.as_f64();
                Scalar::Float((a * d - b * c).abs())
            }
        }
    }

    pub fn is_parallel(&self, other: &Direction) -> bool {
        self.abs_det(other).is_zero()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TorusLine {
    pub direction: Direction,
    pub weight: Scalar,
}

impl TorusLine {
    pub fn new(direction: Direction, weight: Scalar) -> Result<Self> {
        if !weight.is_positive() {
            return Err(Error::input("torus line weight must be positive"));
        }
        Ok(TorusLine { direction, weight })
    }

    /// Integer direction with integer weight; panics on a zero direction or
    /// nonpositive weight. Intended for literals.
    pub fn lattice(p: i64, q: i64, w: i64) -> Self {
        TorusLine::new(Direction::int(p, q).expect("nonzero"), Scalar::int(w)).expect("positive")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MeasuredFoliation {
    ComponentSum {
        basis: Arc<ComponentBasis>,
        coeffs: Vec<Scalar>,
    },
    TorusLine(TorusLine),
}

pub(crate) fn same_basis(a: &Arc<ComponentBasis>, b: &Arc<ComponentBasis>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl MeasuredFoliation {
    pub fn component_sum(basis: Arc<ComponentBasis>, coeffs: Vec<Scalar>) -> Result<Self> {
        if coeffs.len() != basis.len() {
            return Err(Error::input(format!(
                "expected {} coefficients, got {}",
                basis.len(),
                coeffs.len()
            )));
        }
        if coeffs.iter().any(Scalar::is_negative) {
            return Err(Error::input("coefficients must be nonnegative"));
        }
        if coeffs.iter().all(Scalar::is_zero) {
            return Err(Error::input(
                "zero foliation; use MeasuredFoliation::zero to construct it explicitly",
            ));
        }
        Ok(MeasuredFoliation::ComponentSum { basis, coeffs })
    }

    pub fn zero(basis: Arc<ComponentBasis>) -> Self {
        let coeffs = vec![Scalar::zero(); basis.len()];
        MeasuredFoliation::ComponentSum { basis, coeffs }
    }

    /// The single basis component `j` with unit coefficient.
    pub fn component(basis: Arc<ComponentBasis>, j: usize) -> Self {
        let mut coeffs = vec![Scalar::zero(); basis.len()];
        coeffs[j] = Scalar::one();
        MeasuredFoliation::ComponentSum { basis, coeffs }
    }

    pub fn torus(p: i64, q: i64, w: i64) -> Self {
        MeasuredFoliation::TorusLine(TorusLine::lattice(p, q, w))
    }

    pub fn is_zero(&self) -> bool {
        match self {
            MeasuredFoliation::ComponentSum { coeffs, .. } => coeffs.iter().all(Scalar::is_zero),
            MeasuredFoliation::TorusLine(_) => false,
        }
    }

    pub fn coeffs(&self) -> Option<&[Scalar]> {
        match self {
            MeasuredFoliation::ComponentSum { coeffs, .. } => Some(coeffs),
            MeasuredFoliation::TorusLine(_) => None,
        }
    }

    pub fn basis(&self) -> Option<&Arc<ComponentBasis>> {
        match self {
            MeasuredFoliation::ComponentSum { basis, .. } => Some(basis),
            MeasuredFoliation::TorusLine(_) => None,
        }
    }

    pub fn scale(&self, c: &Scalar) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::input("scale factor must be positive"));
        }
        Ok(match self {
            MeasuredFoliation::ComponentSum { basis, coeffs } => MeasuredFoliation::ComponentSum {
                basis: basis.clone(),
                coeffs: coeffs.iter().map(|x| x * c).collect(),
            },
            MeasuredFoliation::TorusLine(l) => MeasuredFoliation::TorusLine(TorusLine {
                direction: l.direction,
                weight: &l.weight * c,
            }),
        })
    }

    pub fn add(&self, other: &MeasuredFoliation) -> Result<Self> {
        match (self, other) {
            (
                MeasuredFoliation::ComponentSum { basis: b1, coeffs: c1 },
                MeasuredFoliation::ComponentSum { basis: b2, coeffs: c2 },
            ) => {
                if !same_basis(b1, b2) {
                    return Err(Error::mismatch("foliations are over different bases"));
                }
                Ok(MeasuredFoliation::ComponentSum {
                    basis: b1.clone(),
                    coeffs: c1.iter().zip(c2).map(|(a, b)| a + b).collect(),
                })
            }
            (MeasuredFoliation::TorusLine(a), MeasuredFoliation::TorusLine(b)) => {
                if !a.direction.is_parallel(&b.direction) {
                    return Err(Error::mismatch(
                        "sum of nonparallel torus lines is not a line foliation",
                    ));
                }
                // Parallel directions may differ by a positive factor when
                // one of them is given in real form; express b's weight in
                // a's direction units.
                let (ax, ay) = a.direction.as_f64();
                let (bx, by) = b.direction.as_f64();
                let weight = if a.direction == b.direction {
                    &a.weight + &b.weight
                } else {
                    let ratio = (bx * bx + by * by).sqrt() / (ax * ax + ay * ay).sqrt();
                    Scalar::Float(a.weight.to_f64() + b.weight.to_f64() * ratio)
                };
                Ok(MeasuredFoliation::TorusLine(TorusLine {
                    direction: a.direction,
                    weight,
                }))
            }
            _ => Err(Error::mismatch("cannot add a component sum and a torus line")),
        }
    }
}

/// Geometric intersection number `i(F, G)`.
pub fn intersection(f: &MeasuredFoliation, g: &MeasuredFoliation) -> Result<Scalar> {
    match (f, g) {
        (
            MeasuredFoliation::ComponentSum { basis: b1, coeffs: c1 },
            MeasuredFoliation::ComponentSum { basis: b2, coeffs: c2 },
        ) => {
            if !same_basis(b1, b2) {
                return Err(Error::mismatch("foliations are over different bases"));
            }
            let gram = b1.gram();
            let mut total = Scalar::zero();
            for (j, a) in c1.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (k, b) in c2.iter().enumerate() {
                    if b.is_zero() || gram[j][k].is_zero() {
                        continue;
                    }
                    total = &total + &(&(a * b) * &gram[j][k]);
                }
            }
            Ok(total)
        }
        (MeasuredFoliation::TorusLine(a), MeasuredFoliation::TorusLine(b)) => {
            Ok(&(&a.weight * &b.weight) * &a.direction.abs_det(&b.direction))
        }
        _ => Err(Error::mismatch(
            "cannot intersect a component sum with a torus line",
        )),
    }
}

/// Intersection numbers `i(G_j, F)` of every component of `basis` with `f`.
///
/// `f` may be a component sum over `basis` itself, over a larger basis that
/// contains the components of `basis` by id, or a torus line when the
/// components carry torus geometry.
pub fn component_intersections(
    basis: &Arc<ComponentBasis>,
    f: &MeasuredFoliation,
) -> Result<Vec<Scalar>> {
    match f {
        MeasuredFoliation::ComponentSum { basis: fb, coeffs } => {
            let mut out = Vec::with_capacity(basis.len());
            for comp in basis.components() {
                let k = fb.index_of(&comp.id).ok_or_else(|| {
                    Error::mismatch(format!("component {:?} missing from foliation basis", comp.id))
                })?;
                let mut total = Scalar::zero();
                for (m, c) in coeffs.iter().enumerate() {
                    if !c.is_zero() {
                        total = &total + &(c * &fb.gram()[k][m]);
                    }
                }
                out.push(total);
            }
            Ok(out)
        }
        MeasuredFoliation::TorusLine(line) => basis
            .components()
            .iter()
            .map(|comp| match &comp.geometry {
                Some(ComponentGeometry::Torus(d)) => Ok(&line.weight * &d.abs_det(&line.direction)),
                None => Err(Error::mismatch(format!(
                    "component {:?} has no torus geometry",
                    comp.id
                ))),
            })
            .collect(),
    }
}

/// Outcome of the domination test `F ≪ G`.
#[derive(Clone, Debug, PartialEq)]
pub enum Domination {
    /// `F = Σ λ_j G_j` where `G = Σ g_j G_j`; `λ_j` is zero off the support
    /// of `G`.
    Yes(Vec<Scalar>),
    No(String),
}

impl Domination {
    pub fn is_yes(&self) -> bool {
        matches!(self, Domination::Yes(_))
    }
}

/// Decides whether `f` can be written as a nonnegative combination of the
/// components of `g`. Coefficients are relative to `g`'s own coefficients,
/// so `dominated_by(G, G)` yields all ones on the support of `G`.
pub fn dominated_by(f: &MeasuredFoliation, g: &MeasuredFoliation) -> Result<Domination> {
    let (gb, gc) = match g {
        MeasuredFoliation::ComponentSum { basis, coeffs } => (basis, coeffs),
        MeasuredFoliation::TorusLine(_) => {
            return Err(Error::input("the dominating foliation must be a component sum"))
        }
    };
    if !gb.is_mutually_disjoint() {
        return Err(Error::input("the dominating basis must be mutually non-intersecting"));
    }
    let (fb, fc) = match f {
        MeasuredFoliation::ComponentSum { basis, coeffs } => (basis, coeffs),
        MeasuredFoliation::TorusLine(_) => {
            return Ok(Domination::No("torus line is not over the component basis".into()))
        }
    };
    if !same_basis(fb, gb) {
        return Ok(Domination::No("foliations are over different bases".into()));
    }
    let mut lambda = Vec::with_capacity(gc.len());
    for (j, (a, b)) in fc.iter().zip(gc).enumerate() {
        if b.is_zero() {
            if !a.is_zero() {
                return Ok(Domination::No(format!(
                    "component {:?} is not in the support",
                    gb.components()[j].id
                )));
            }
            lambda.push(Scalar::zero());
        } else {
            lambda.push(a.div(b));
        }
    }
    Ok(Domination::Yes(lambda))
}

/// A finite family of foliations standing in for the set of curves when a
/// supremum over curves is needed.
#[derive(Clone, Debug)]
pub struct ProbeFamily {
    label: String,
    members: Vec<MeasuredFoliation>,
}

impl ProbeFamily {
    pub fn new(label: impl Into<String>, members: Vec<MeasuredFoliation>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::input("probe family must be nonempty"));
        }
        if members.iter().any(MeasuredFoliation::is_zero) {
            return Err(Error::input("probe family members must be nonzero"));
        }
        Ok(ProbeFamily {
            label: label.into(),
            members,
        })
    }

    /// Primitive integer torus directions `(p, q)` with `|p|, |q| <= cap`,
    /// one representative per sign class, unit weight.
    pub fn torus_primitive(cap: i64) -> Self {
        let mut members = Vec::new();
        for p in 0..=cap {
            for q in -cap..=cap {
                if (p == 0 && q <= 0) || num_integer::gcd(p, q) != 1 {
                    continue;
                }
                members.push(MeasuredFoliation::torus(p, q, 1));
            }
        }
        ProbeFamily {
            label: format!("torus-primitive-{cap}"),
            members,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn members(&self) -> &[MeasuredFoliation] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn extended(&self, extra: impl IntoIterator<Item = MeasuredFoliation>) -> Self {
        let mut members = self.members.clone();
        members.extend(extra);
        ProbeFamily {
            label: format!("{}+", self.label),
            members,
        }
    }
}
