// Solving for the representative of a modular class with the synthetic
// oracle `areas = A lambda`, from several seeded starts.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use teichcalc::boundary::{modular_solve, QDRecord, SolveOptions, SyntheticOracle};
use teichcalc::foliation::{ComponentBasis, ComponentKind};
use teichcalc::Scalar;

/// Returns `lambda_2 / lambda_1` from every start.
pub fn run_example() -> teichcalc::Result<Vec<f64>> {
    let b = Arc::new(ComponentBasis::disjoint(2, ComponentKind::Annular));
    let target = QDRecord::new(b, vec![Scalar::one(), Scalar::one()], vec![Scalar::one(), Scalar::one()])?;
    let oracle = SyntheticOracle::new(vec![vec![1.0, 1.0], vec![1.0, 2.0]])?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut ratios = Vec::new();
    for _ in 0..4 {
        let start = vec![rng.gen_range(0.1..5.0), rng.gen_range(0.1..5.0)];
        let opts = SolveOptions { start: Some(start.clone()), ..SolveOptions::default() };
        let sol = modular_solve(&target, &(), &oracle, &opts)?;
        let r = sol.lambda_star[1] / sol.lambda_star[0];
        println!("start {start:.3?} -> ratio {r:.15} in {} iterations", sol.iterations);
        ratios.push(r);
    }
    println!("golden ratio      {:.15}", (1.0 + 5f64.sqrt()) / 2.0);
    Ok(ratios)
}

fn main() -> teichcalc::Result<()> {
    run_example().map(|_| ())
}
