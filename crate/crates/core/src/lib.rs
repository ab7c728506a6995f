//! Computational tools for the asymptotic geometry of the Teichmüller metric.
//!
//! The crate is organised around the objects that appear when one follows a
//! Teichmüller geodesic ray out to the boundary:
//!
//! * [`foliation`]: measured foliations over a declared basis of mutually
//!   disjoint components, with intersection numbers and the domination order.
//! * [`torus`]: the upper half-plane model of the torus, where extremal
//!   length, distance, rays and the Hubbard–Masur map are all closed form.
//! * [`square_tiled`]: origamis, cylinder decompositions, rectangulations,
//!   chord curves and their straightening, and the Teichmüller geodesic flow.
//! * [`iet`]: first-return interval exchanges and Rauzy induction.
//! * [`extremal`]: the fractional-quadratic maximiser, discrete extremal
//!   length brackets, the finite-time lower-bound witness and distance
//!   estimates from probe families.
//! * [`boundary`]: the boundary functionals `E_q` and `E*_q`, horofunctions,
//!   modular equivalence, the modular fixed-point solver, detour cost and the
//!   detour metric.
//! * [`cli`]: JSON/CSV schemas and the command implementations behind the
//!   `teichcalc` binary.

pub mod boundary;
pub mod cli;
pub mod error;
pub mod extremal;
pub mod foliation;
pub mod iet;
pub mod scalar;
pub mod square_tiled;
pub mod torus;

pub use error::{Error, Result};
pub use scalar::{ExtReal, Scalar};
