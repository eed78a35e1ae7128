use proptest::prelude::*;

use polyent::coding::{word_counts, Family, LetterRegion};
use polyent::dynamics1d::{Homeo1D, MapDescription, Orientation, Space};
use polyent::entropy::{dyn_metric, DynSystem, LatticeSpec, OrbitCloud};
use polyent::experiment::{ExperimentConfig, Target};
use polyent::hyperspace::{hausdorff, sample_region, Coords, HyperPoint, Region, StateSpace};

fn unit() -> impl Strategy<Value = f64> {
    0.0..1.0f64
}

fn interval_point() -> impl Strategy<Value = HyperPoint> {
    (unit(), unit()).prop_map(|(a, b)| HyperPoint::Interval {
        lo: a.min(b),
        hi: a.max(b),
    })
}

fn arc_point() -> impl Strategy<Value = HyperPoint> {
    prop_oneof![
        1 => Just(HyperPoint::FullCircle),
        1 => unit().prop_map(|a| HyperPoint::Arc { from: a, to: a }),
        8 => (unit(), unit()).prop_map(|(from, to)| HyperPoint::Arc { from, to }),
    ]
}

fn finite_point() -> impl Strategy<Value = HyperPoint> {
    prop::collection::vec(unit(), 1..5).prop_map(|mut v| {
        v.sort_by(f64::total_cmp);
        v.dedup();
        HyperPoint::Finite(Coords::from_vec(v))
    })
}

/// Increasing PL homeomorphism of [0,1] from positive increments.
fn interval_map() -> impl Strategy<Value = Homeo1D> {
    (1usize..5)
        .prop_flat_map(|k| {
            (
                prop::collection::vec(0.05..1.0f64, k + 1),
                prop::collection::vec(0.05..1.0f64, k + 1),
            )
        })
        .prop_map(|(dx, dy)| {
            let (sx, sy): (f64, f64) = (dx.iter().sum(), dy.iter().sum());
            let mut bp = vec![(0.0, 0.0)];
            let (mut x, mut y) = (0.0, 0.0);
            for i in 0..dx.len() - 1 {
                x += dx[i] / sx;
                y += dy[i] / sy;
                bp.push((x, y));
            }
            bp.push((1.0, 1.0));
            Homeo1D::checked(Space::Interval, Orientation::Preserving, &bp).unwrap()
        })
}

fn metric_axioms(space: Space, a: &HyperPoint, b: &HyperPoint, c: &HyperPoint) -> Result<(), TestCaseError> {
    let d = |x: &HyperPoint, y: &HyperPoint| hausdorff(space, x, y).unwrap();
    prop_assert_eq!(d(a, a), 0.0);
    prop_assert!((d(a, b) - d(b, a)).abs() <= 1e-12);
    prop_assert!(d(a, c) <= d(a, b) + d(b, c) + 1e-12);
    prop_assert!(d(a, b) >= 0.0);
    Ok(())
}

proptest! {
    #[test]
    fn hausdorff_is_a_metric_on_intervals(a in interval_point(), b in interval_point(), c in interval_point()) {
        metric_axioms(Space::Interval, &a, &b, &c)?;
    }

    #[test]
    fn hausdorff_is_a_metric_on_arcs(a in arc_point(), b in arc_point(), c in arc_point()) {
        metric_axioms(Space::Circle, &a, &b, &c)?;
        // no arc is further than half a turn from anything
        prop_assert!(hausdorff(Space::Circle, &a, &b).unwrap() <= 0.5);
    }

    #[test]
    fn hausdorff_is_a_metric_on_finite_sets(a in finite_point(), b in finite_point(), c in finite_point()) {
        metric_axioms(Space::Interval, &a, &b, &c)?;
        metric_axioms(Space::Circle, &a, &b, &c)?;
    }

    #[test]
    fn hyperpoints_print_and_parse_back(p in prop_oneof![interval_point(), arc_point(), finite_point()]) {
        let back: HyperPoint = p.to_string().parse().unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn inverse_undoes_the_map(f in interval_map(), x in unit(), n in 0i64..20) {
        let g = f.invert();
        prop_assert!((g.apply(f.apply(x)) - x).abs() < 1e-9);
        prop_assert!((f.apply(g.apply(x)) - x).abs() < 1e-9);
        // long backward runs amplify rounding, so compare step by step
        let (mut y, mut z) = (x, x);
        for _ in 0..n {
            y = f.apply(y);
            z = g.apply(z);
        }
        prop_assert_eq!(f.iterate(x, n), y);
        prop_assert_eq!(f.iterate(x, -n), z);
    }

    #[test]
    fn fixed_points_are_fixed(f in interval_map()) {
        let fix = f.fixed_points();
        prop_assert!(fix.len() >= 2);
        for p in fix {
            prop_assert!((f.apply(p) - p).abs() < 1e-12);
        }
    }

    #[test]
    fn map_descriptions_round_trip(f in interval_map()) {
        let text = serde_json::to_string(&MapDescription::of(&f)).unwrap();
        let g = MapDescription::from_json(&text).unwrap().build().unwrap();
        prop_assert_eq!(g, f);
    }

    #[test]
    fn dynamic_metric_grows_with_the_window(a in interval_point(), b in interval_point(), n in 1usize..30) {
        let f = Homeo1D::checked(Space::Interval, Orientation::Preserving, &[(0.0, 0.0), (0.5, 0.25), (1.0, 1.0)]).unwrap();
        let sys = DynSystem::new(f, StateSpace::Continuum(Space::Interval)).unwrap();
        let short = dyn_metric(&sys, &a, &b, n).unwrap();
        let long = dyn_metric(&sys, &a, &b, n + 1).unwrap();
        prop_assert!(short <= long);
        prop_assert!(short >= hausdorff(Space::Interval, &a, &b).unwrap());
    }

    #[test]
    fn configs_round_trip(seed in any::<u64>(), k in 1usize..5, res in 1e-4..0.5f64) {
        let map = MapDescription::from_json(r#"{"space":"interval","breakpoints":[[0,0],[0.5,0.25],[1,1]]}"#).unwrap();
        let mut cfg = ExperimentConfig::new(map, Target::SymmetricK(k));
        cfg.seed = seed;
        cfg.resolution = Some(res);
        let text = serde_json::to_string(&cfg).unwrap();
        let back = ExperimentConfig::from_json(&text).unwrap();
        prop_assert_eq!(back.content_hash(), cfg.content_hash());
        prop_assert_eq!(back, cfg);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sample_clouds_round_trip_through_csv(res in 0.05..0.3f64, a in unit()) {
        for region in [Region::Triangle, Region::AkSimplex { k: 2 }, Region::CircleA { a }] {
            let cloud = sample_region(region, res).unwrap();
            let mut buf = Vec::new();
            cloud.write_csv(&mut buf).unwrap();
            let back = polyent::hyperspace::SampleCloud::read_csv(&buf[..]).unwrap();
            prop_assert_eq!(back, cloud);
        }
    }

    #[test]
    fn appending_letters_never_loses_words(cuts in prop::collection::vec(0.01..0.99f64, 4..7)) {
        let f = Homeo1D::checked(Space::Interval, Orientation::Preserving, &[(0.0, 0.0), (0.5, 0.25), (1.0, 1.0)]).unwrap();
        let sys = DynSystem::new(f, StateSpace::Base(Space::Interval)).unwrap();
        let cloud = OrbitCloud::lattice(&sys, &LatticeSpec::default(), 32).unwrap();
        let mut cuts = cuts;
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let letters: Vec<LetterRegion> = cuts.windows(2).map(|w| LetterRegion::Span { lo: w[0], hi: w[1] }).collect();
        let ns = [4, 8, 16, 32];
        let mut prev = vec![1usize; ns.len()];
        for size in 0..=letters.len() {
            let fam = Family::new(&sys, letters[..size].to_vec()).unwrap();
            let counts: Vec<usize> = word_counts(&sys, &fam, &cloud, &ns).unwrap().iter().map(|c| c.count).collect();
            prop_assert!(prev.iter().zip(&counts).all(|(a, b)| a <= b), "{:?} then {:?}", prev, counts);
            prev = counts;
        }
    }
}
