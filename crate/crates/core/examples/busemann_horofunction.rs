// The horofunction of a torus ray decreases at unit speed along the ray,
// and a declared sequence of records fails the convergence criterion when
// one of its component tracks splits.

use std::sync::Arc;

use teichcalc::boundary::{busemann_limit_check, Horofunction, QDRecord, SequenceDeclaration, TrackLimit};
use teichcalc::foliation::{ComponentBasis, ComponentKind, Direction, ProbeFamily};
use teichcalc::torus::{ray, TorusPoint, TorusQD};
use teichcalc::Scalar;

/// Returns `psi_q(R(q; t)) + t` for `t = 0, ..., 4`.
pub fn run_example() -> teichcalc::Result<Vec<f64>> {
    let b = TorusPoint::square();
    let q = TorusQD::unit(b, Direction::int(1, 2)?);
    let psi = Horofunction::new(&QDRecord::from_torus(&q), &ProbeFamily::torus_primitive(50), &b)?;
    let mut defects = Vec::new();
    for t in 0..=4 {
        let t = t as f64;
        let v = psi.eval(&ray(&q, t)?)?;
        println!("t = {t}: psi = {v:+.12}");
        defects.push(v + t);
    }

    let two = Arc::new(ComponentBasis::disjoint(2, ComponentKind::Annular));
    let one = Arc::new(ComponentBasis::disjoint(1, ComponentKind::Annular));
    let limit = QDRecord::new(two, vec![Scalar::one(), Scalar::one()], vec![Scalar::one(), Scalar::one()])?;
    let single = QDRecord::new(one, vec![Scalar::one()], vec![Scalar::one()])?;
    let seq = SequenceDeclaration {
        records: vec![single; 5],
        record_limit: limit.clone(),
        tracks: vec![TrackLimit::Decomposable { coeffs: vec![1.0, 1.0] }],
    };
    println!("splitting track: {:?}", busemann_limit_check(&seq, &limit)?);
    Ok(defects)
}

fn main() -> teichcalc::Result<()> {
    run_example().map(|_| ())
}
