//! Property-based checks of the structural invariants.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use teichcalc::boundary::{detour_metric, eq_eval_sq, flip_sup, modular_equivalent, QDRecord};
use teichcalc::cli::RecordJson;
use teichcalc::extremal::{distance_estimate, optimise, RatioProgram};
use teichcalc::foliation::{ComponentBasis, ComponentDescriptor, ComponentKind, Direction, MeasuredFoliation, ProbeFamily, TorusLine};
use teichcalc::iet::{first_return, induced_heights, rauzy_step, FlowDirection, Iet, IetJson, RauzyOutcome, Transversal};
use teichcalc::square_tiled::{
    cylinder_decomposition, geodesic_flow_origami, weighted_rectangulation, ComponentData, Origami, Rectangulation,
};
use teichcalc::torus::{distance, ext_length, ray, TorusPoint, TorusQD};
use teichcalc::{ExtReal, Scalar};

fn point() -> impl Strategy<Value = TorusPoint> {
    (-2.0f64..2.0, 0.2f64..5.0).prop_map(|(x, y)| TorusPoint::new(x, y).unwrap())
}

fn primitive() -> impl Strategy<Value = (i64, i64)> {
    (-6i64..=6, -6i64..=6).prop_filter("primitive", |(p, q)| num_integer::Integer::gcd(p, q) == 1)
}

fn origami() -> impl Strategy<Value = Origami> {
    (1usize..=7, any::<u64>()).prop_map(|(n, seed)| Origami::random(n, &mut ChaCha8Rng::seed_from_u64(seed)))
}

fn record(n: usize) -> impl Strategy<Value = (Vec<u32>, Vec<u32>)> {
    (
        prop::collection::vec(0u32..5, n).prop_filter("nonzero", |c| c.iter().any(|&x| x > 0)),
        prop::collection::vec(1u32..6, n),
    )
}

fn exact(basis: &Arc<ComponentBasis>, c: &[u32], a: &[u32]) -> QDRecord {
    QDRecord::new(
        basis.clone(),
        c.iter().map(|&x| Scalar::int(x as i64)).collect(),
        a.iter().map(|&x| Scalar::int(x as i64)).collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn torus_distance_is_a_metric(x in point(), y in point(), z in point()) {
        let (dxy, dyz, dxz) = (distance(&x, &y), distance(&y, &z), distance(&x, &z));
        prop_assert!(dxy >= 0.0);
        prop_assert!((dxy - distance(&y, &x)).abs() <= 1e-12 * (1.0 + dxy));
        prop_assert!(dxz <= dxy + dyz + 1e-12);
        prop_assert!(distance(&x, &x).abs() < 1e-7);
    }

    #[test]
    fn probe_distance_never_exceeds_the_exact_one(x in point(), y in point()) {
        let est = distance_estimate(&x, &y, &ProbeFamily::torus_primitive(6)).unwrap();
        prop_assert!(est <= distance(&x, &y) + 1e-9);
    }

    #[test]
    fn ext_length_is_quadratic_in_weight(x in point(), (p, q) in primitive(), w in 1i64..5) {
        let one = ext_length(&x, &TorusLine::lattice(p, q, 1));
        let many = ext_length(&x, &TorusLine::lattice(p, q, w));
        prop_assert!((many - (w * w) as f64 * one).abs() <= 1e-12 * many);
    }

    #[test]
    fn finite_time_bound_on_the_torus(x in point(), d in primitive(), f in primitive(), t in 0.0f64..6.0) {
        let q = TorusQD::unit(x, Direction::int(d.0, d.1).unwrap());
        let line = TorusLine::lattice(f.0, f.1, 1);
        let lhs = (-2.0 * t).exp() * ext_length(&ray(&q, t).unwrap(), &line);
        let rhs = eq_eval_sq(&QDRecord::from_torus(&q), &MeasuredFoliation::TorusLine(line)).unwrap().to_f64();
        prop_assert!(lhs >= rhs * (1.0 - 1e-12));
    }

    #[test]
    fn ray_moves_at_unit_speed(x in point(), d in primitive(), s in 0.0f64..3.0, t in 0.0f64..3.0) {
        let q = TorusQD::unit(x, Direction::int(d.0, d.1).unwrap());
        let d = distance(&ray(&q, s).unwrap(), &ray(&q, s + t).unwrap());
        prop_assert!((d - t).abs() < 1e-6, "{} vs {}", d, t);
    }

    #[test]
    fn optimiser_dominates_feasible_points(
        ab in prop::collection::vec((0.0f64..4.0, 0.05f64..4.0), 1..6),
        x in prop::collection::vec(0.0f64..5.0, 6),
    ) {
        let (a, b): (Vec<f64>, Vec<f64>) = ab.into_iter().unzip();
        let n = a.len();
        let p = RatioProgram::new(a, b).unwrap();
        let opt = optimise(&p);
        let v = opt.value.finite().unwrap();
        if let Some(ExtReal::Finite(r)) = p.ratio_at(&x[..n]) {
            prop_assert!(r <= v * (1.0 + 1e-12) + 1e-300);
        }
        if v > 0.0 {
            let at = p.ratio_at(&opt.argmax).unwrap().finite().unwrap();
            prop_assert!((at - v).abs() <= 1e-12 * v);
        }
    }

    #[test]
    fn flip_equals_eq_squared((c, a) in record(4), hits in prop::collection::vec(0i64..4, 4)) {
        let comps: Vec<ComponentDescriptor> =
            (1..=4).map(|j| ComponentDescriptor::new(format!("G{j}"), ComponentKind::Annular)).collect();
        let basis = Arc::new(ComponentBasis::new(comps.clone(), vec![vec![Scalar::zero(); 4]; 4]).unwrap());
        let q = exact(&basis, &c, &a);
        let mut all = comps;
        all.push(ComponentDescriptor::new("F", ComponentKind::Annular));
        let mut gram = vec![vec![Scalar::zero(); 5]; 5];
        for j in 0..4 {
            gram[j][4] = Scalar::int(hits[j]);
            gram[4][j] = Scalar::int(hits[j]);
        }
        let f = MeasuredFoliation::component(Arc::new(ComponentBasis::new(all, gram).unwrap()), 4);
        let e2 = eq_eval_sq(&q, &f).unwrap().to_f64();
        prop_assert!((e2 - flip_sup(&q, &f).unwrap()).abs() <= 1e-12 * (1.0 + e2));
    }

    #[test]
    fn detour_metric_axioms((c1, a1) in record(3), (c2, a2) in record(3), (c3, a3) in record(3), k in 1u32..4) {
        let b = Arc::new(ComponentBasis::disjoint(3, ComponentKind::Annular));
        let (x, y, z) = (exact(&b, &c1, &a1), exact(&b, &c2, &a2), exact(&b, &c3, &a3));
        prop_assert_eq!(detour_metric(&x, &y), detour_metric(&y, &x));
        prop_assert_eq!(detour_metric(&x, &x), ExtReal::Finite(0.0));
        // scaling coefficients keeps the modular class
        let scaled = x.scaled(&Scalar::int(k as i64)).unwrap();
        prop_assert!(modular_equivalent(&x, &scaled).equivalent);
        prop_assert_eq!(detour_metric(&x, &scaled), ExtReal::Finite(0.0));
        prop_assert_eq!(x.boundary_point(), scaled.boundary_point());
        if let (ExtReal::Finite(p), ExtReal::Finite(q)) = (detour_metric(&x, &y), detour_metric(&y, &z)) {
            let r = detour_metric(&x, &z).finite().unwrap();
            prop_assert!(r <= p + q + 1e-12);
        }
    }

    #[test]
    fn record_json_round_trips((c, a) in record(3)) {
        let q = exact(&Arc::new(ComponentBasis::disjoint(3, ComponentKind::Annular)), &c, &a);
        let text = serde_json::to_string(&RecordJson::from_record(&q)).unwrap();
        let back: RecordJson = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.to_record().unwrap(), q);
    }

    #[test]
    fn census_satisfies_gauss_bonnet(o in origami()) {
        let c = o.census();
        let excess: usize = c.angle_multiples.iter().map(|k| k - 1).sum();
        prop_assert_eq!(excess, 2 * c.genus - 2);
        let covered: usize = c.vertices.iter().map(|v| v.len()).sum();
        prop_assert_eq!(covered, o.n());
    }

    #[test]
    fn cylinders_fill_the_surface(o in origami(), (p, q) in primitive()) {
        let cyl = cylinder_decomposition(&o, p, q).unwrap();
        let total: BigRational = cyl.iter().map(|c| c.area.clone()).sum();
        prop_assert_eq!(total, BigRational::from_integer(BigInt::from(o.n())));
        for c in &cyl {
            let a = c.area.to_f64().unwrap();
            prop_assert!((c.circumference * c.height - a).abs() <= 1e-9 * a);
        }
    }

    #[test]
    fn flow_preserves_area(o in origami(), t in -3.0f64..3.0) {
        let r: Rectangulation = geodesic_flow_origami(&o, t);
        prop_assert_eq!(r.area(), Scalar::int(o.n() as i64));
    }

    #[test]
    fn first_return_area(o in origami(), x in -3.0f64..3.0) {
        let (t, dec) = first_return(&o, &FlowDirection::Real(x, 1.0), &Transversal::BottomEdges).unwrap();
        prop_assert_eq!(dec.area(), BigRational::from_integer(BigInt::from(o.n())));
        prop_assert_eq!(t.total_length(), BigRational::from_integer(BigInt::from(o.n())));
    }

    #[test]
    fn rauzy_preserves_heights_area(
        lengths in prop::collection::vec(1u32..50, 2..6),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        let n = lengths.len();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let lens: Vec<f64> = lengths.iter().map(|&l| l as f64).collect();
        let mut t = Iet::from_f64(&lens, &perm).unwrap();
        let back: IetJson = serde_json::from_str(&serde_json::to_string(&t.to_json()).unwrap()).unwrap();
        prop_assert_eq!(back.to_iet().unwrap(), t.clone());
        let total = t.total_length();
        let mut h: Vec<BigRational> = (0..n).map(|k| BigRational::from_integer(BigInt::from(k + 1))).collect();
        let area = |t: &Iet, h: &[BigRational]| -> BigRational { t.lengths().iter().zip(h).map(|(l, h)| l * h).sum() };
        let a0 = area(&t, &h);
        for _ in 0..30 {
            match rauzy_step(&t) {
                Ok(RauzyOutcome::Induced { iet, winner, loser, .. }) => {
                    h = induced_heights(&h, winner, loser);
                    prop_assert!(iet.total_length() < total);
                    t = iet;
                    prop_assert_eq!(area(&t, &h), a0.clone());
                }
                _ => break,
            }
        }
    }

    #[test]
    fn collar_area_formula(o in origami(), eps in 0.01f64..0.5) {
        let cyl = cylinder_decomposition(&o, 0, 1).unwrap();
        let theta: Vec<f64> = (0..cyl.len()).map(|j| 1.0 + j as f64 * 0.5).collect();
        let w = weighted_rectangulation(&o, &ComponentData::Cylinders(0, 1), &theta, eps, 0.0).unwrap();
        prop_assert!(w.area >= w.principal_area);
        prop_assert!(w.area <= w.principal_area + w.epsilon_constant * eps * (1.0 + 1e-12));
        let direct: f64 = cyl.iter().zip(&theta).map(|(c, t)| t * t * c.area.to_f64().unwrap()).sum();
        prop_assert!((w.principal_area - direct).abs() <= 1e-12 * direct);
    }
}
