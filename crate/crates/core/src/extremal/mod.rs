//! Optimisation engines: the closed-form ratio maximiser, discrete extremal
//! length brackets, the finite-time lower-bound witness and distance
//! estimates over probe families.

pub mod discrete;
pub mod distance;
pub mod optimise;
pub mod witness;

pub use discrete::{discrete_ext_length, CurveClass, ExtLenEstimate, SquareTiledPoint};
pub use distance::{distance_estimate, ExtBracket};
pub use optimise::{optimise, Optimum, RatioProgram};
pub use witness::{lower_bound_witness, optimal_witness, origami_record};
