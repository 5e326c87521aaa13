use proptest::prelude::*;
use stationplot::geometry::{aspect_ratio, circularity, orient2d, quickhull2d, quickhull3d, Point2, Point3};

fn cloud2() -> impl Strategy<Value = Vec<Point2>> {
    prop::collection::vec((-1e3..1e3f64, -1e3..1e3f64), 3..120)
        .prop_map(|v| v.into_iter().map(|(x, y)| Point2::new(x, y)).collect())
}

fn cloud3() -> impl Strategy<Value = Vec<Point3>> {
    prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64), 4..60)
        .prop_map(|v| v.into_iter().map(|(x, y, z)| Point3::new(x, y, z)).collect())
}

proptest! {
    #[test]
    fn planar_hull_is_convex_and_covers(pts in cloud2()) {
        let Ok(hull) = quickhull2d(&pts) else { return Ok(()) };
        let v = hull.vertices();
        prop_assert!(v.len() >= 3);
        for i in 0..v.len() {
            let (a, b, c) = (v[i], v[(i + 1) % v.len()], v[(i + 2) % v.len()]);
            prop_assert!(orient2d(a, b, c) > 0.0);
        }
        for &p in &pts {
            prop_assert!(hull.contains(p));
        }
        for (&i, &p) in hull.indices().iter().zip(v) {
            prop_assert_eq!(pts[i], p);
        }
    }

    #[test]
    fn planar_hull_rigid_motion(pts in cloud2(), theta in 0.0..std::f64::consts::TAU, dx in -50.0..50.0f64) {
        let Ok(hull) = quickhull2d(&pts) else { return Ok(()) };
        let (s, c) = theta.sin_cos();
        let moved: Vec<Point2> = pts.iter().map(|p| Point2::new(c * p.x - s * p.y + dx, s * p.x + c * p.y - dx)).collect();
        let other = quickhull2d(&moved).unwrap();
        prop_assert!((hull.area() - other.area()).abs() <= 1e-9 * hull.area());
        prop_assert!((hull.perimeter() - other.perimeter()).abs() <= 1e-9 * hull.perimeter());
    }

    #[test]
    fn planar_hull_order_independent(pts in cloud2(), seed in any::<u64>()) {
        let Ok(hull) = quickhull2d(&pts) else { return Ok(()) };
        let mut shuffled = pts.clone();
        let n = shuffled.len();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (s >> 33) as usize % (i + 1));
        }
        let other = quickhull2d(&shuffled).unwrap();
        let mut a = hull.vertices().to_vec();
        let mut b = other.vertices().to_vec();
        a.sort_by(|p, q| p.lex_cmp(q));
        b.sort_by(|p, q| p.lex_cmp(q));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn isoperimetric_bound(pts in cloud2()) {
        let Ok(hull) = quickhull2d(&pts) else { return Ok(()) };
        let c = circularity(hull.area(), hull.perimeter()).unwrap();
        prop_assert!(c > 0.0 && c <= 1.0, "{}", c);
        let ar = aspect_ratio(&pts).unwrap();
        prop_assert!(ar.value >= 1.0);
    }

    #[test]
    fn spatial_hull_is_a_closed_polytope(pts in cloud3()) {
        let Ok(hull) = quickhull3d(&pts) else { return Ok(()) };
        prop_assert_eq!(hull.euler_characteristic(), 2);
        for &p in &pts {
            prop_assert!(hull.contains(p));
        }
        let shifted: Vec<Point3> = pts.iter().map(|p| Point3::new(p.x + 7.0, p.y - 3.0, p.z + 1.0)).collect();
        let other = quickhull3d(&shifted).unwrap();
        prop_assert!((hull.volume() - other.volume()).abs() <= 1e-9 * hull.volume());
        // bounding box
        prop_assert!(hull.volume() <= 8000.0);
        prop_assert!(hull.surface_area() > 0.0);
    }
}
