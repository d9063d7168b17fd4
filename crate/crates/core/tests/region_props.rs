use proptest::prelude::*;
use vmgame_core::geometry::{distance, distance_squared, equilateral_verifiers};
use vmgame_core::region::{is_plausible, payoff, rasterize_region, BoundingBox};
use vmgame_core::{Claim, Point, UtilityCriterion, VerifierConfig};

fn unit() -> VerifierConfig {
    equilateral_verifiers(Point::ORIGIN, 1.0, 0.0, 1.0).unwrap()
}

fn near() -> impl Strategy<Value = Point> {
    (-0.8..0.8f64, -0.8..0.8f64).prop_map(|(x, y)| Point::new(x, y).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn plausible_fakes_lie_outside_the_triangle(u in near(), p in near()) {
        let cfg = unit();
        if is_plausible(&cfg, &Claim::new(u, p)) {
            prop_assert!(!cfg.verification_triangle().unwrap().contains(p));
        }
    }
}

proptest! {
    #[test]
    fn deception_payoff_is_gated_distance(u in near(), p in near()) {
        let cfg = unit();
        let claim = Claim::new(u, p);
        let expected = if is_plausible(&cfg, &claim) { distance(u, p) } else { 0.0 };
        prop_assert_eq!(payoff(&cfg, &claim, UtilityCriterion::MaximumDeception, 0.01), expected);
    }

    #[test]
    fn payoff_invariant_under_rigid_motion(
        u in near(), p in near(), angle in -3.0..3.0f64, dx in -5.0..5.0f64, dy in -5.0..5.0f64,
    ) {
        let cfg = unit();
        let shift = Point::new(dx, dy).unwrap();
        let motion = |q: Point| q.rotate_about(Point::ORIGIN, angle) + shift;
        let claim = Claim::new(u, p);
        let before = payoff(&cfg, &claim, UtilityCriterion::MaximumDeception, 0.01);
        let after = payoff(&cfg.map_points(motion).unwrap(), &claim.map(motion), UtilityCriterion::MaximumDeception, 0.01);
        prop_assert!((before - after).abs() < 1e-9, "{} vs {}", before, after);
    }

    #[test]
    fn raster_agrees_with_predicate(u in near()) {
        let cfg = unit();
        let bbox = BoundingBox::range_intersection(&cfg).unwrap();
        let raster = rasterize_region(&cfg, u, bbox, 0.02).unwrap();
        for (centre, flag) in raster.iter().step_by(7) {
            prop_assert_eq!(flag, is_plausible(&cfg, &Claim::new(u, centre)));
        }
    }

    #[test]
    fn enlargement_disk_shrinks_toward_its_verifier(i in 0usize..3, t0 in 0.0..1.0f64, t1 in 0.0..1.0f64) {
        // Nested true positions on the ray from the centre to verifier i.
        let cfg = unit();
        let v = cfg.verifiers()[i];
        let (near_t, far_t) = if t0 > t1 { (t0, t1) } else { (t1, t0) };
        let closer = v * near_t;
        let farther = v * far_t;
        prop_assert!(distance(closer, v) <= distance(farther, v));
        let bbox = BoundingBox::range_intersection(&cfg).unwrap();
        let n = 30;
        for k in 0..n * n {
            let p = Point::new(
                bbox.min().x() + bbox.width() * (k % n) as f64 / n as f64,
                bbox.min().y() + bbox.height() * (k / n) as f64 / n as f64,
            ).unwrap();
            if distance_squared(p, v) > distance_squared(farther, v) {
                prop_assert!(distance_squared(p, v) > distance_squared(closer, v));
            }
        }
    }
}
