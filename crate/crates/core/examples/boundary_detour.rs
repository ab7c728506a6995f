// Boundary functionals of records: `E_q`, `E*_q`, modular equivalence and
// the detour metric between Busemann points.

use std::sync::Arc;

use teichcalc::boundary::{detour_metric, dual_eval, eq_eval, modular_equivalent, same_part, QDRecord};
use teichcalc::foliation::{ComponentBasis, ComponentKind, MeasuredFoliation};
use teichcalc::{ExtReal, Scalar};

fn record(b: &Arc<ComponentBasis>, coeffs: &[i64], areas: &[i64]) -> teichcalc::Result<QDRecord> {
    QDRecord::new(
        b.clone(),
        coeffs.iter().map(|&c| Scalar::int(c)).collect(),
        areas.iter().map(|&a| Scalar::int(a)).collect(),
    )
}

/// Returns the detour metric between `(1,1;1,1)` and `(1,2;1,1)`.
pub fn run_example() -> teichcalc::Result<ExtReal> {
    let b = Arc::new(ComponentBasis::disjoint(3, ComponentKind::Annular));
    let q = record(&b, &[1, 1, 0], &[1, 1, 1])?;
    let f = MeasuredFoliation::component_sum(b.clone(), vec![Scalar::int(2), Scalar::int(1), Scalar::zero()])?;
    println!("E_q(F) = {:.6}, E*_q(F) = {}", eq_eval(&q, &f)?, dual_eval(&q, &f)?);
    println!("E*_q(G3) = {}", dual_eval(&q, &MeasuredFoliation::component(b.clone(), 2))?);

    let scaled = record(&b, &[3, 3, 0], &[1, 1, 1])?;
    let other = record(&b, &[1, 2, 0], &[1, 1, 1])?;
    let elsewhere = record(&b, &[0, 0, 1], &[1, 1, 1])?;
    let check = modular_equivalent(&q, &scaled);
    println!("q ~ 3q: {} with constant {:?}", check.equivalent, check.constant.map(|c| c.to_string()));
    println!("delta(q, 3q) = {}", detour_metric(&q, &scaled));
    let d = detour_metric(&q, &other);
    println!("delta(q, q') = {d}   ((1/2) log 2 = {})", 0.5 * 2f64.ln());
    println!("delta(q, G3) = {}, same part: {}", detour_metric(&q, &elsewhere), same_part(&q, &elsewhere));
    Ok(d)
}

fn main() -> teichcalc::Result<()> {
    run_example().map(|_| ())
}
