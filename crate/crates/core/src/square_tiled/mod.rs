//! Square-tiled surfaces: origamis, cylinder decompositions,
//! rectangulations, chord curves and their straightening, and the
//! Teichmüller geodesic flow.

pub mod cylinders;
pub mod origami;
pub mod rectangulation;
pub mod straighten;
pub mod weighted;

pub use cylinders::{core_intersection, cylinder_decomposition, Cylinder};
pub use origami::{Origami, SingularityCensus};
pub use rectangulation::{geodesic_flow, geodesic_flow_origami, Corner, Gluing, Rect, Rectangulation, Side};
pub use straighten::{
    check_conditions, chord_intersection_bound, for_each_torus_curve, straighten, Chord, ChordCurve, ConditionReport, ShortArc,
    Straightened,
};
pub use weighted::{weighted_rectangulation, ComponentData, WeightedRectangulation};
