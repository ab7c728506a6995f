//! Kerckhoff-style distance estimates restricted to a probe family.

use crate::error::{Error, Result};
use crate::foliation::{MeasuredFoliation, ProbeFamily};
use crate::scalar::ExtReal;
use crate::torus::{ext_length_of, TorusPoint};

/// A point at which extremal lengths can be bracketed.
pub trait ExtBracket {
    /// `(lower, upper)` bounds for `Ext(f)`.
    fn ext_bracket(&self, f: &MeasuredFoliation) -> Result<(f64, ExtReal)>;
}

impl ExtBracket for TorusPoint {
    fn ext_bracket(&self, f: &MeasuredFoliation) -> Result<(f64, ExtReal)> {
        let e = ext_length_of(self, f)?;
        Ok((e, ExtReal::Finite(e)))
    }
}

/// Certified lower bound on `d(x, y)`: `(1/2) log max Ext_y / Ext_x` over the
/// probes, using lower brackets at `y` and upper brackets at `x`. Probes
/// whose ratio is undetermined (infinite upper bound at `x`) are skipped.
pub fn distance_estimate<X: ExtBracket, Y: ExtBracket>(
    x: &X,
    y: &Y,
    probes: &ProbeFamily,
) -> Result<f64> {
    if probes.is_empty() {
        return Err(Error::input("empty probe family"));
    }
    let mut best: f64 = 0.0;
    for f in probes.members() {
        let (ly, _) = y.ext_bracket(f)?;
        let (_, ux) = x.ext_bracket(f)?;
        if let ExtReal::Finite(ux) = ux {
            if ux > 0.0 {
                best = best.max(0.5 * (ly / ux).ln());
            }
        }
    }
    Ok(best)
}
