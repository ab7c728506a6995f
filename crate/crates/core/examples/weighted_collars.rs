// The conformal metric built from cylinder weights plus thin collars along
// the critical leaves, and how its area approaches the principal term.

use teichcalc::square_tiled::{weighted_rectangulation, ComponentData, Origami};

/// Returns `area - principal_area` for each `epsilon`.
pub fn run_example() -> teichcalc::Result<Vec<f64>> {
    let o = Origami::from_one_based(&[2, 3, 1], &[1, 3, 2])?;
    let mut excess = Vec::new();
    for eps in [0.2, 0.1, 0.05, 0.025] {
        let w = weighted_rectangulation(&o, &ComponentData::Cylinders(0, 1), &[1.0, 0.5], eps, 0.0)?;
        println!(
            "eps {eps:<6} principal {:.4} area {:.6} bound {:.6}",
            w.principal_area,
            w.area,
            w.principal_area + w.epsilon_constant * eps
        );
        excess.push(w.area - w.principal_area);
    }
    Ok(excess)
}

fn main() -> teichcalc::Result<()> {
    run_example().map(|_| ())
}
