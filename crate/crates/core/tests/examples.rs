//! Every example runs and produces its headline numbers.

macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!("../examples/", stringify!($name), ".rs"));
        }
    };
}

example!(torus_ray_asymptotics);
example!(square_tiled_brackets);
example!(boundary_detour);
example!(modular_solver);
example!(first_return_rauzy);
example!(straighten_curves);
example!(busemann_horofunction);
example!(weighted_collars);

#[test]
fn torus_ray_gap_decays() {
    let gaps = torus_ray_asymptotics::run_example().unwrap();
    for (t, g) in gaps.iter().enumerate() {
        assert!((g - (-4.0 * t as f64).exp()).abs() < 1e-12);
    }
}

#[test]
fn square_tiled_bracket_holds_limit() {
    let (lo, hi) = square_tiled_brackets::run_example().unwrap();
    assert!(lo <= 3.0 && 3.0 <= hi);
}

#[test]
fn detour_worked_value() {
    let d = boundary_detour::run_example().unwrap().finite().unwrap();
    assert!((d - 0.5 * 2f64.ln()).abs() < 1e-12);
}

#[test]
fn solver_finds_golden_ratio() {
    for r in modular_solver::run_example().unwrap() {
        assert!((r - 1.618_033_988_749_895).abs() < 1e-10);
    }
}

#[test]
fn rauzy_runs() {
    assert_eq!(first_return_rauzy::run_example().unwrap(), 12);
}

#[test]
fn straightening_does_not_add_chords() {
    let (before, after) = straighten_curves::run_example().unwrap();
    assert!(after <= before);
}

#[test]
fn horofunction_along_ray() {
    for d in busemann_horofunction::run_example().unwrap() {
        assert!(d.abs() < 1e-9);
    }
}

#[test]
fn collar_excess_shrinks() {
    let e = weighted_collars::run_example().unwrap();
    assert!(e.windows(2).all(|w| w[1] < w[0]));
}
