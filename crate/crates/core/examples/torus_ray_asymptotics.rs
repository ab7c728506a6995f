// Extremal length along a Teichmüller ray on the square torus, compared
// with its limit `E_q(F)^2`. The gap decays like `e^{-4t}`.

use teichcalc::boundary::{eq_eval_sq, QDRecord};
use teichcalc::foliation::{Direction, MeasuredFoliation, TorusLine};
use teichcalc::torus::{ext_length, ray, TorusPoint, TorusQD};

/// Returns the gaps at `t = 0, 1, ..., 5`.
pub fn run_example() -> teichcalc::Result<Vec<f64>> {
    let q = TorusQD::unit(TorusPoint::square(), Direction::int(0, 1)?);
    let f = TorusLine::lattice(1, 1, 1);
    let limit = eq_eval_sq(&QDRecord::from_torus(&q), &MeasuredFoliation::TorusLine(f.clone()))?.to_f64();
    println!("E_q(F)^2 = {limit}");
    println!("{:>3} {:>22} {:>12}", "t", "e^-2t Ext", "gap");
    let mut gaps = Vec::new();
    for t in 0..=5 {
        let t = t as f64;
        let x = ray(&q, t)?;
        let scaled = (-2.0 * t).exp() * ext_length(&x, &f);
        gaps.push(scaled - limit);
        println!("{t:>3} {scaled:>22.16} {:>12.3e}", scaled - limit);
    }
    Ok(gaps)
}

fn main() -> teichcalc::Result<()> {
    run_example().map(|_| ())
}
