mod common;

use common::random_set;
use incrprox::{Point, SetSpec};
use incrprox_oracle::projection_reference;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_xoshiro::SplitMix64;

fn pt(v: Vec<f64>) -> Point {
    Point::new(v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn projection_matches_reference(seed in any::<u64>(), n in 1usize..4, x in prop::collection::vec(-5.0f64..5.0, 4)) {
        let mut r = SplitMix64::seed_from_u64(seed);
        let (set, spec) = random_set(&mut r, n);
        let x = pt(x[..n].to_vec());
        let got = set.project(&x);
        let want = projection_reference(&spec, x.as_slice());
        for (a, b) in got.iter().zip(&want) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()), "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn projection_is_idempotent_and_feasible(seed in any::<u64>(), n in 1usize..4, x in prop::collection::vec(-5.0f64..5.0, 4)) {
        let mut r = SplitMix64::seed_from_u64(seed);
        let (set, _) = random_set(&mut r, n);
        let p = set.project(&pt(x[..n].to_vec()));
        prop_assert!(set.contains(&p, 1e-10));
        prop_assert!(set.project(&p).distance(&p) <= 1e-12);
    }

    #[test]
    fn projection_is_nonexpansive(
        seed in any::<u64>(),
        n in 1usize..4,
        x in prop::collection::vec(-5.0f64..5.0, 4),
        y in prop::collection::vec(-5.0f64..5.0, 4),
    ) {
        let mut r = SplitMix64::seed_from_u64(seed);
        let (set, _) = random_set(&mut r, n);
        let (x, y) = (pt(x[..n].to_vec()), pt(y[..n].to_vec()));
        prop_assert!(set.project(&x).distance(&set.project(&y)) <= x.distance(&y) + 1e-12);
    }

    #[test]
    fn distance_is_projection_gap(seed in any::<u64>(), n in 1usize..4, x in prop::collection::vec(-5.0f64..5.0, 4)) {
        let mut r = SplitMix64::seed_from_u64(seed);
        let (set, _) = random_set(&mut r, n);
        let x = pt(x[..n].to_vec());
        prop_assert_eq!(set.distance(&x), x.distance(&set.project(&x)));
    }
}

#[test]
fn intersection_of_halfspaces_lands_in_every_part() {
    let spec: SetSpec = serde_json::from_str(
        r#"{"type":"intersection","sets":[
            {"type":"halfspace","a":[1.0,1.0],"b":1.0},
            {"type":"halfspace","a":[-1.0,0.0],"b":0.0},
            {"type":"ball","center":[0.0,0.0],"radius":2.0}]}"#,
    )
    .unwrap();
    let set = spec.build(1e-10).unwrap();
    for x in [[3.0, 3.0], [-4.0, 0.5], [0.2, 0.2], [10.0, -10.0]] {
        let p = set.project(&pt(x.to_vec()));
        assert!(set.contains(&p, 1e-8), "{x:?} -> {p:?}");
    }
}
