use polydsa::geom::Point2;
use polydsa::quadrature::{
    gauss_legendre, polygon_rule, segment_rule, triangle_rule, AngularQuadrature,
};
use proptest::prelude::*;

/// ∫_P x^a y^b by Green's theorem, integrated exactly edge by edge:
/// ∫_P x^a y^b = 1/(a+1) ∮ x^{a+1} y^b dy, with each edge a degree-(a+b+1)
/// polynomial in the edge parameter, summed with a high-order Gauss rule.
fn green_moment(poly: &[Point2], a: i32, b: i32) -> f64 {
    let (t, w) = gauss_legendre(((a + b) as usize + 4) / 2 + 1);
    let mut s = 0.0;
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        for (t, w) in t.iter().zip(&w) {
            let x = p.x + t * (q.x - p.x);
            let y = p.y + t * (q.y - p.y);
            s += w * x.powi(a + 1) * y.powi(b) * (q.y - p.y);
        }
    }
    s / (a + 1) as f64
}

fn regular_polygon(n: usize, r: f64, c: Point2, phase: f64) -> Vec<Point2> {
    (0..n)
        .map(|i| {
            let t = phase + 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            Point2::new(c.x + r * t.cos(), c.y + r * t.sin())
        })
        .collect()
}

proptest! {
    #[test]
    fn polygon_rule_integrates_monomials_exactly(
        n in 3usize..10,
        r in 0.1f64..3.0,
        cx in -2.0f64..2.0,
        cy in -2.0f64..2.0,
        phase in 0.0f64..6.3,
        e in 0usize..12,
    ) {
        let poly = regular_polygon(n, r, Point2::new(cx, cy), phase);
        let rule = polygon_rule(&poly, e).unwrap();
        for d in 0..=e as i32 {
            for a in 0..=d {
                let b = d - a;
                let exact = green_moment(&poly, a, b);
                let got = rule.integrate(|p| p.x.powi(a) * p.y.powi(b));
                let scale = (r + cx.abs() + cy.abs()).powi(d) * r * r;
                prop_assert!((got - exact).abs() <= 1e-11 * scale.max(1.0), "x^{} y^{}: {} vs {}", a, b, got, exact);
            }
        }
    }

    #[test]
    fn segment_rule_is_exact(ax in -3.0f64..3.0, ay in -3.0f64..3.0, dx in 0.1f64..2.0, e in 0usize..14) {
        let (a, b) = (Point2::new(ax, ay), Point2::new(ax + dx, ay));
        let rule = segment_rule(a, b, e).unwrap();
        let k = e as i32;
        let exact = ((ax + dx).powi(k + 1) - ax.powi(k + 1)) / (k + 1) as f64;
        let got = rule.integrate(|p| p.x.powi(k));
        prop_assert!((got - exact).abs() <= 1e-12 * exact.abs().max(1.0));
    }

    #[test]
    fn angular_moments(n in 3usize..200) {
        let q = AngularQuadrature::trapezoidal(n).unwrap();
        prop_assert!((q.integrate(|_| 1.0) - 1.0).abs() < 1e-14);
        prop_assert!(q.integrate(|w| w.x).abs() < 1e-14);
        prop_assert!(q.integrate(|w| w.y).abs() < 1e-14);
        if n >= 3 {
            prop_assert!((q.integrate(|w| w.x * w.x) - 0.5).abs() < 1e-13);
        }
    }

    #[test]
    fn half_range_coefficients_agree_for_symmetric_sets(n in 2usize..64, t in 0.0f64..6.3) {
        let q = AngularQuadrature::trapezoidal(2 * n).unwrap();
        let nrm = Point2::new(t.cos(), t.sin());
        let a = q.half_abs_projection(nrm);
        let b = q.outgoing_projection(nrm);
        prop_assert!((a - b).abs() < 1e-14);
        prop_assert!(a > 0.0 && a <= 0.5);
    }
}

fn factorial(n: i32) -> f64 {
    (1..=n).map(f64::from).product()
}

#[test]
fn triangle_rules_are_exact_and_inside() {
    for e in 0..=14 {
        let rule = triangle_rule(e);
        assert!(rule
            .iter()
            .all(|&(s, t, w)| s >= 0.0 && t >= 0.0 && s + t <= 1.0 + 1e-15 && w > 0.0));
        // weights are normalised to the unit area: ∫ s^a t^b / |T| = 2 a! b! / (a+b+2)!
        for d in 0..=e as i32 {
            for a in 0..=d {
                let b = d - a;
                let exact = 2.0 * factorial(a) * factorial(b) / factorial(a + b + 2);
                let got: f64 = rule
                    .iter()
                    .map(|&(s, t, w)| w * s.powi(a) * t.powi(b))
                    .sum();
                assert!((got - exact).abs() < 1e-14, "exactness {e}, s^{a} t^{b}");
            }
        }
    }
}

#[test]
fn gauss_legendre_matches_closed_form_nodes() {
    let (x, w) = gauss_legendre(2);
    let d = 0.5 / 3f64.sqrt();
    assert!((x[0] - (0.5 - d)).abs() < 1e-15 && (x[1] - (0.5 + d)).abs() < 1e-15);
    assert!((w[0] - 0.5).abs() < 1e-15);
}

#[test]
fn half_range_coefficient_tends_to_one_over_pi() {
    let nrm = Point2::new(1.0, 0.0);
    let c16 = AngularQuadrature::trapezoidal(16)
        .unwrap()
        .half_abs_projection(nrm);
    assert!((c16 - 0.3142087).abs() < 1e-7);
    let mut prev = f64::INFINITY;
    for n in [64, 256, 1024, 4096] {
        let gap = (AngularQuadrature::trapezoidal(n)
            .unwrap()
            .half_abs_projection(nrm)
            - 1.0 / std::f64::consts::PI)
            .abs();
        assert!(gap < prev);
        prev = gap;
    }
    assert!(prev < 1e-7);
}

#[test]
fn degenerate_inputs_are_rejected() {
    let p = Point2::new(1.0, 1.0);
    assert!(segment_rule(p, p, 2).is_err());
    assert!(polygon_rule(&[p, Point2::new(2.0, 2.0), Point2::new(3.0, 3.0)], 2).is_err());
    assert!(AngularQuadrature::trapezoidal(1).is_err());
}
