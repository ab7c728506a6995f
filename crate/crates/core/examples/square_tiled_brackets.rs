// A three-square surface: its singularity, cylinders in two directions,
// and discrete extremal-length brackets along the diagonal flow next to
// the finite-time witness and the limit.

use teichcalc::boundary::eq_eval_sq;
use teichcalc::extremal::{discrete_ext_length, optimal_witness, origami_record, CurveClass, SquareTiledPoint};
use teichcalc::square_tiled::{cylinder_decomposition, Origami};

/// Returns `(lower, upper)` of `e^{-2t} Ext` at the last time.
pub fn run_example() -> teichcalc::Result<(f64, f64)> {
    let o = Origami::from_one_based(&[2, 3, 1], &[1, 3, 2])?;
    let c = o.census();
    println!("genus {}, cone angles 2pi x {:?}", c.genus, c.angle_multiples);
    for (p, q) in [(1, 0), (0, 1), (1, 1)] {
        let cyl = cylinder_decomposition(&o, p, q)?;
        let moduli: Vec<String> = cyl.iter().map(|c| format!("{:.3}", 1.0 / c.inverse_modulus())).collect();
        println!("direction ({p},{q}): {} cylinders, moduli {}", cyl.len(), moduli.join(" "));
    }

    let f = CurveClass::new(1, 0, 1.0)?;
    let (rec, fol) = origami_record(&o, (0, 1), &f)?;
    let limit = eq_eval_sq(&rec, &fol)?;
    println!("limit E_q(F)^2 = {limit}");
    let mut last = (0.0, 0.0);
    for t in [0.0, 1.0, 2.0, 3.0] {
        let est = discrete_ext_length(&SquareTiledPoint::new(o.clone(), t), &f, 16)?;
        let s = (-2.0 * t).exp();
        let (_, witness) = optimal_witness(&o, (0, 1), t, &f)?;
        let upper = est.upper.to_f64_lossy() * s;
        println!("t = {t}: witness {witness:.9} <= [{:.9}, {upper:.9}]", est.lower * s);
        last = (est.lower * s, upper);
    }
    Ok(last)
}

fn main() -> teichcalc::Result<()> {
    run_example().map(|_| ())
}
