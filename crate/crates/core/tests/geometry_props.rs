use std::f64::consts::TAU;

use proptest::prelude::*;
use vmgame_core::geometry::{
    distance, equilateral_verifiers, from_polar, point_in_triangle, to_polar,
};
use vmgame_core::{Point, PolarPoint, Triangle};

fn coord() -> impl Strategy<Value = f64> {
    -10.0..10.0f64
}

fn point() -> impl Strategy<Value = Point> {
    (coord(), coord()).prop_map(|(x, y)| Point::new(x, y).unwrap())
}

fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x())
}

proptest! {
    #[test]
    fn distance_is_a_metric(a in point(), b in point(), c in point()) {
        prop_assert!(distance(a, b) >= 0.0);
        prop_assert_eq!(distance(a, b), distance(b, a));
        prop_assert_eq!(distance(a, a), 0.0);
        prop_assert!(distance(a, c) <= distance(a, b) + distance(b, c) + 1e-12);
    }

    #[test]
    fn polar_round_trip(exp in -6.0..6.0f64, theta in 0.0..TAU, axis in -4.0..4.0f64) {
        let rho = 10f64.powf(exp);
        let polar = PolarPoint::new(rho, theta).unwrap();
        let p = from_polar(polar, Point::ORIGIN, axis);
        let back = to_polar(p, Point::ORIGIN, axis);
        prop_assert!((back.rho() - rho).abs() < 1e-12 * rho);
        let again = from_polar(back, Point::ORIGIN, axis);
        prop_assert!(distance(p, again) < 1e-12 * rho);
    }

    #[test]
    fn equilateral_set_invariant_under_sector_turn(
        cx in coord(), cy in coord(), edge in 0.1..1.0f64, alpha in -4.0..4.0f64,
    ) {
        let c = Point::new(cx, cy).unwrap();
        let a = equilateral_verifiers(c, edge, alpha, 1.0).unwrap();
        let b = equilateral_verifiers(c, edge, alpha + TAU / 3.0, 1.0).unwrap();
        for v in a.verifiers() {
            let nearest = b.verifiers().iter().map(|&w| distance(*v, w)).fold(f64::INFINITY, f64::min);
            prop_assert!(nearest < 1e-12 * (1.0 + c.norm()));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn point_in_triangle_matches_cross_product_oracle(a in point(), b in point(), c in point(), p in point()) {
        let Ok(t) = Triangle::new(a, b, c) else { return Ok(()) };
        let s = [cross(a, b, p), cross(b, c, p), cross(c, a, p)];
        // Stay clear of the tolerance band around the boundary.
        let edges = [distance(a, b), distance(b, c), distance(c, a)];
        prop_assume!(s.iter().zip(edges).all(|(v, e)| v.abs() > 1e-6 * e));
        let inside = s.iter().all(|&v| v > 0.0) || s.iter().all(|&v| v < 0.0);
        prop_assert_eq!(point_in_triangle(p, &t), inside);
    }
}
