use crate::error::{invalid, Result};
use crate::geom::{centroid, signed_area, Point2};

/// Area quadrature on a polygon. Weights carry area units.
#[derive(Debug, Clone)]
pub struct PolygonRule {
    pub points: Vec<Point2>,
    pub weights: Vec<f64>,
    pub exactness: usize,
}

impl PolygonRule {
    pub fn integrate(&self, f: impl Fn(Point2) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(*p))
            .sum()
    }
}

/// Line quadrature on a segment. Weights carry length units.
#[derive(Debug, Clone)]
pub struct SegmentRule {
    pub points: Vec<Point2>,
    pub weights: Vec<f64>,
}

impl SegmentRule {
    pub fn integrate(&self, f: impl Fn(Point2) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(*p))
            .sum()
    }
}

/// `n`-point Gauss–Legendre nodes and weights on [0, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one point");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Newton on P_n starting from the Chebyshev-like guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map [-1, 1] -> [0, 1]
        nodes[i] = 0.5 * (1.0 - x);
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        weights[i] = 0.5 * w;
        weights[n - 1 - i] = 0.5 * w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.5;
    }
    (nodes, weights)
}

/// Rule on the reference triangle (0,0), (1,0), (0,1) as barycentric-free
/// coordinates `(s, t)` with weights summing to one.
pub fn triangle_rule(exactness: usize) -> Vec<(f64, f64, f64)> {
    match exactness {
        0 | 1 => vec![(1.0 / 3.0, 1.0 / 3.0, 1.0)],
        2 => {
            let (a, b) = (1.0 / 6.0, 2.0 / 3.0);
            vec![(a, a, 1.0 / 3.0), (b, a, 1.0 / 3.0), (a, b, 1.0 / 3.0)]
        }
        3..=5 => {
            let r15 = 15f64.sqrt();
            let mut rule = vec![(1.0 / 3.0, 1.0 / 3.0, 9.0 / 40.0)];
            for (a, w) in [
                ((6.0 - r15) / 21.0, (155.0 - r15) / 1200.0),
                ((6.0 + r15) / 21.0, (155.0 + r15) / 1200.0),
            ] {
                let b = 1.0 - 2.0 * a;
                rule.extend([(a, a, w), (b, a, w), (a, b, w)]);
            }
            rule
        }
        _ => {
            // collapsed square: s = u, t = v (1 - u), Jacobian (1 - u)
            let n = (exactness + 2).div_ceil(2);
            let (x, w) = gauss_legendre(n);
            let mut rule = Vec::with_capacity(n * n);
            for i in 0..n {
                for j in 0..n {
                    rule.push((x[i], x[j] * (1.0 - x[i]), 2.0 * w[i] * w[j] * (1.0 - x[i])));
                }
            }
            rule
        }
    }
}

/// Fan-triangulates a convex polygon from its centroid and places a triangle
/// rule of the requested exactness on each sub-triangle.
pub fn polygon_rule(poly: &[Point2], exactness: usize) -> Result<PolygonRule> {
    let area = if poly.len() >= 3 {
        signed_area(poly)
    } else {
        0.0
    };
    if !(area.is_finite() && area > 0.0) {
        return invalid(format!(
            "polygon with {} vertices has non-positive area {area}",
            poly.len()
        ));
    }
    let c = centroid(poly);
    let tri = triangle_rule(exactness);
    let n = poly.len();
    let mut points = Vec::with_capacity(n * tri.len());
    let mut weights = Vec::with_capacity(n * tri.len());
    for i in 0..n {
        let a = poly[i] - c;
        let b = poly[(i + 1) % n] - c;
        let sub = 0.5 * a.cross(b);
        if sub <= 0.0 {
            continue;
        }
        for &(s, t, w) in &tri {
            points.push(c + a * s + b * t);
            weights.push(w * sub);
        }
    }
    Ok(PolygonRule {
        points,
        weights,
        exactness,
    })
}

/// Gauss–Legendre rule on the segment `a`–`b` exact for polynomials of the given degree.
pub fn segment_rule(a: Point2, b: Point2, exactness: usize) -> Result<SegmentRule> {
    let len = a.distance(b);
    if !(len.is_finite() && len > 0.0) {
        return invalid("segment rule on a zero-length facet");
    }
    let (x, w) = gauss_legendre(exactness / 2 + 1);
    Ok(SegmentRule {
        points: x.iter().map(|&t| a + (b - a) * t).collect(),
        weights: w.iter().map(|&wi| wi * len).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> Vec<Point2> {
        vec![
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ]
    }

    #[test]
    fn gauss_legendre_moments() {
        for n in 1..20 {
            let (x, w) = gauss_legendre(n);
            for k in 0..2 * n {
                let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(k as i32)).sum();
                assert!((q - 1.0 / (k as f64 + 1.0)).abs() < 1e-14, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn triangle_rules_are_exact() {
        // ∫ s^a t^b over the reference triangle = a! b! / (a + b + 2)!, times 2 for unit area weights
        let fact = |n: usize| (1..=n).map(|v| v as f64).product::<f64>();
        for e in 0..14 {
            let rule = triangle_rule(e);
            assert!(rule.iter().all(|r| r.2 > 0.0));
            for a in 0..=e {
                for b in 0..=e - a {
                    let q: f64 = rule
                        .iter()
                        .map(|(s, t, w)| w * s.powi(a as i32) * t.powi(b as i32))
                        .sum();
                    let exact = 2.0 * fact(a) * fact(b) / fact(a + b + 2);
                    assert!((q - exact).abs() < 1e-14, "e={e} a={a} b={b}");
                }
            }
        }
    }

    #[test]
    fn square_examples() {
        let r0 = polygon_rule(&unit_square(), 0).unwrap();
        assert!((r0.weights.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        let r2 = polygon_rule(&unit_square(), 2).unwrap();
        assert!((r2.integrate(|p| p.x * p.x) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_polygon() {
        let line = [
            Point2::new(0.0, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(2.0, 0.0),
        ];
        assert!(polygon_rule(&line, 2).is_err());
    }

    #[test]
    fn segment_examples() {
        let r = segment_rule(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), 1).unwrap();
        assert_eq!(r.points, vec![Point2::new(0.5, 0.0)]);
        assert_eq!(r.weights, vec![1.0]);
        let r = segment_rule(Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), 3).unwrap();
        assert!((r.integrate(|p| p.x.powi(3)) - 0.25).abs() < 1e-14);
        for e in 0..9 {
            let r = segment_rule(Point2::new(1.0, 1.0), Point2::new(1.0, 3.0), e).unwrap();
            assert!((r.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        }
        assert!(segment_rule(Point2::new(1.0, 1.0), Point2::new(1.0, 1.0), 2).is_err());
    }
}
