// First-return maps of straight-line flows on a square-tiled surface and
// Rauzy induction on the resulting interval exchange.

use num_traits::ToPrimitive;
use teichcalc::iet::{classify_direction, Classification, first_return, rauzy_step, FlowDirection, RauzyOutcome, Transversal};
use teichcalc::square_tiled::Origami;

/// Returns the number of Rauzy steps taken on the golden torus rotation.
pub fn run_example() -> teichcalc::Result<usize> {
    let o = Origami::from_one_based(&[2, 3, 1], &[1, 3, 2])?;
    for dir in [FlowDirection::Rational(1, 2), FlowDirection::golden(40), FlowDirection::Real(0.318, 1.0)] {
        let (iet, dec) = first_return(&o, &dir, &Transversal::BottomEdges)?;
        let class = match classify_direction(&o, &dir, 30)? {
            Classification::Periodic(c) => format!("periodic, {} cylinders", c.len()),
            Classification::MinimalCertified { steps } => format!("no connection in {steps} Rauzy steps"),
            Classification::Connection { step } => format!("connection at step {step}"),
            other => format!("{other:?}"),
        };
        println!("{dir:?}: {} intervals, return area {}, {class}", iet.len(), dec.area());
    }

    let (mut t, _) = first_return(&Origami::torus(), &FlowDirection::golden(60), &Transversal::BottomEdges)?;
    let mut steps = 0;
    for _ in 0..12 {
        match rauzy_step(&t)? {
            RauzyOutcome::Induced { iet, winner, loser, top_wins } => {
                let l: Vec<f64> = iet.lengths().iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
                println!("{} wins ({winner} over {loser}), lengths {l:.6?}", if top_wins { "top" } else { "bottom" });
                t = iet;
                steps += 1;
            }
            RauzyOutcome::Connection { .. } => break,
        }
    }
    Ok(steps)
}

fn main() -> teichcalc::Result<()> {
    run_example().map(|_| ())
}
