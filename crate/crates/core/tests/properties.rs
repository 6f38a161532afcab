//! Property-based checks of the norm/convexity layer: homogeneity, convexity,
//! duality, and inradius invariants over randomized inputs.

use proptest::prelude::*;

use aniso_torsion::anisotropy::{rotate_norm, verify_duality, wulff_shape, Norm};
use aniso_torsion::convex::{anisotropic_inradius, gauge, random_hull, ConvexBody};
use aniso_torsion::geom;

fn arb_norm() -> impl Strategy<Value = Norm> {
    prop_oneof![
        Just(Norm::euclidean()),
        (2.0..6.0f64, 0.5..2.0f64, 0.5..2.0f64)
            .prop_map(|(r, w0, w1)| Norm::weighted_lr(r, [w0, w1]).unwrap()),
        (0.5..2.0f64, -0.4..0.4f64, 0.5..2.0f64).prop_map(|(a, b, c)| {
            // diagonally dominant, hence SPD
            Norm::quadratic([[a + b.abs(), b], [b, c + b.abs()]]).unwrap()
        }),
        (2.0..6.0f64, 0.0..std::f64::consts::PI).prop_map(|(r, ang)| {
            rotate_norm(&Norm::weighted_lr(r, [1.0, 1.5]).unwrap(), geom::rotation(ang)).unwrap()
        }),
    ]
}

fn arb_vec() -> impl Strategy<Value = [f64; 2]> {
    (-3.0..3.0f64, -3.0..3.0f64)
        .prop_map(|(x, y)| [x, y])
        .prop_filter("away from origin", |v| geom::norm(*v) > 1e-2)
}

proptest! {
    #[test]
    fn norm_homogeneity_and_symmetry(norm in arb_norm(), v in arb_vec(), t in 0.1..5.0f64) {
        let f = norm.eval(v);
        prop_assert!(f > 0.0);
        prop_assert!((norm.eval(geom::scale(v, t)) - t * f).abs() <= 1e-12 * t * f.max(1.0));
        prop_assert!((norm.eval(geom::scale(v, -1.0)) - f).abs() <= 1e-12 * f.max(1.0));
    }

    #[test]
    fn norm_triangle_inequality(norm in arb_norm(), u in arb_vec(), v in arb_vec()) {
        let lhs = norm.eval(geom::add(u, v));
        prop_assert!(lhs <= norm.eval(u) + norm.eval(v) + 1e-10);
    }

    #[test]
    fn duality_residuals_vanish(norm in arb_norm(), u in arb_vec(), v in arb_vec()) {
        let res = verify_duality(&norm, u, v).unwrap();
        prop_assert!(res.euler.abs() <= 1e-8, "euler {}", res.euler);
        prop_assert!(res.polar_normalization.abs() <= 1e-8);
        prop_assert!(res.primal_normalization.abs() <= 1e-8);
        prop_assert!(res.inversion.abs() <= 1e-8);
        prop_assert!(res.pairing_gap >= -1e-12);
    }

    #[test]
    fn polar_involution(norm in arb_norm(), v in arb_vec()) {
        // the polar of the polar evaluates back to the norm
        let bipolar = norm.polar().polar();
        let f = norm.eval(v);
        prop_assert!((bipolar.eval(v) - f).abs() <= 1e-6 * f, "{} vs {}", bipolar.eval(v), f);
    }

    #[test]
    fn wulff_inradius_is_its_radius(norm in arb_norm(), r in 0.3..2.0f64) {
        let w = wulff_shape(&norm, r, [0.0, 0.0], 256).unwrap();
        let (r_f, center) = anisotropic_inradius(&w, &norm);
        prop_assert!((r_f - r).abs() <= 0.02 * r, "r_f {} vs {}", r_f, r);
        prop_assert!(geom::norm(center) <= 0.05 * r);
    }

    #[test]
    fn hull_gauge_and_scaling(seed in 0u64..500, s in 0.5..3.0f64) {
        let body = random_hull(12, seed).unwrap();
        let c = body.centroid();
        prop_assert!(body.contains(c, 1e-12));
        let centered = body.translate(geom::scale(c, -1.0));
        let g = gauge(&centered, centered.vertices()[0]).unwrap();
        prop_assert!((g - 1.0).abs() <= 1e-9, "gauge at vertex {}", g);
        let scaled = body.scale([s, s]);
        prop_assert!((scaled.area() - s * s * body.area()).abs() <= 1e-9 * scaled.area());
    }

    #[test]
    fn convex_hull_idempotent(seed in 0u64..500) {
        let body = random_hull(9, seed).unwrap();
        let again = ConvexBody::from_vertices(body.vertices()).unwrap();
        prop_assert_eq!(body.vertices().len(), again.vertices().len());
        prop_assert!((body.area() - again.area()).abs() <= 1e-12);
    }
}
