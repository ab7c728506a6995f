// Straightening a zigzag chord curve on an L-shaped surface, then a count
// over every short curve on the square torus.

use teichcalc::square_tiled::{
    check_conditions, for_each_torus_curve, geodesic_flow_origami, straighten, Chord, ChordCurve, Origami,
    Rectangulation,
};

/// Returns the chord counts before and after straightening the zigzag.
pub fn run_example() -> teichcalc::Result<(usize, usize)> {
    // squares 0 and 1 side by side, square 2 on top of square 0
    let o = Origami::from_one_based(&[2, 1, 3], &[3, 2, 1])?;
    let r = geodesic_flow_origami(&o, 0.0);
    let zigzag = ChordCurve::new(vec![
        Chord::new(0, (0.0, 0.3), (0.5, 1.0)),
        Chord::new(2, (0.5, 0.0), (1.0, 0.6)),
        Chord::new(2, (0.0, 0.6), (0.5, 1.0)),
        Chord::new(0, (0.5, 0.0), (1.0, 0.7)),
        Chord::new(1, (0.0, 0.7), (1.0, 0.3)),
    ]);
    println!("before: {:?}", check_conditions(&zigzag, &r)?);
    let s = straighten(&zigzag, &r)?;
    println!("after {} moves: {:?}", s.moves, check_conditions(&s.curve, &r)?);
    println!("holonomy {:?} -> {:?}", zigzag.holonomy(), s.curve.holonomy());
    println!("rho(dh) {:.3} -> {:.3}, dv {:.3} -> {:.3}", s.rho_dh_before, s.rho_dh_after, s.dv_before, s.dv_after);
    for c in &s.curve.chords {
        println!("  rect {}: {:?} -> {:?}", c.rect, c.p, c.q);
    }

    let torus = Rectangulation::from_origami(&Origami::torus());
    let mut count = 0;
    let mut shortened = 0;
    for_each_torus_curve(3, 3, |c| {
        count += 1;
        if straighten(c, &torus).map(|s| s.curve.len() < c.len()).unwrap_or(false) {
            shortened += 1;
        }
    });
    println!("torus curves with at most 3 chords: {count}, shortened by straightening: {shortened}");
    Ok((zigzag.len(), s.curve.len()))
}

fn main() -> teichcalc::Result<()> {
    run_example().map(|_| ())
}
