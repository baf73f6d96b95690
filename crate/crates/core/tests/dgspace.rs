use std::sync::Arc;

use nalgebra::DVector;
use polydsa::dgspace::{local_dim, DgSpace};
use polydsa::geom::{Point2, Rect};
use polydsa::mesh::{generate_voronoi, PolyMesh, VoronoiOptions};
use proptest::prelude::*;

fn voronoi(n: usize, seed: u64) -> Arc<PolyMesh> {
    Arc::new(
        generate_voronoi(
            &Rect::square(1.0).unwrap(),
            n,
            seed,
            VoronoiOptions::default(),
        )
        .unwrap(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn gradients_match_finite_differences(seed in any::<u64>(), p in 0usize..5, s in 0.0f64..1.0, t in 0.0f64..1.0) {
        let space = DgSpace::new(voronoi(12, seed), p).unwrap();
        let cell = seed as usize % 12;
        let c = space.mesh().cells[cell].centroid;
        let r = 0.2 * space.mesh().cells[cell].inscribed_diameter;
        let x = Point2::new(c.x + r * (s - 0.5), c.y + r * (t - 0.5));
        let (_, grads) = space.eval_basis(cell, x).unwrap();
        let eps = 1e-6;
        let (vxp, _) = space.eval_basis(cell, Point2::new(x.x + eps, x.y)).unwrap();
        let (vxm, _) = space.eval_basis(cell, Point2::new(x.x - eps, x.y)).unwrap();
        let (vyp, _) = space.eval_basis(cell, Point2::new(x.x, x.y + eps)).unwrap();
        let (vym, _) = space.eval_basis(cell, Point2::new(x.x, x.y - eps)).unwrap();
        for i in 0..local_dim(p) {
            let fx = (vxp[i] - vxm[i]) / (2.0 * eps);
            let fy = (vyp[i] - vym[i]) / (2.0 * eps);
            let scale = grads[i].norm().max(1.0);
            prop_assert!((fx - grads[i].x).abs() < 1e-6 * scale);
            prop_assert!((fy - grads[i].y).abs() < 1e-6 * scale);
        }
    }

    #[test]
    fn projection_reproduces_polynomials(seed in any::<u64>(), p in 0usize..4, a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let space = DgSpace::new(voronoi(10, seed), p).unwrap();
        let f = |x: Point2| {
            let mut v = 1.0;
            for k in 1..=p as i32 {
                v += a * x.x.powi(k) + b * x.x.powi(k - 1) * x.y;
            }
            v
        };
        let u = space.project(f).unwrap();
        prop_assert!(space.l2_error(&u, f).unwrap() < 1e-10);
    }

    #[test]
    fn projection_is_idempotent_and_norm_consistent(seed in any::<u64>(), p in 0usize..4) {
        let space = DgSpace::new(voronoi(8, seed), p).unwrap();
        let f = |x: Point2| (3.0 * x.x).sin() * (2.0 * x.y).exp();
        let u = space.project(f).unwrap();
        let again = space.project(|x| {
            let cell = locate(space.mesh(), x);
            space.evaluate(&u, cell, x)
        }).unwrap();
        prop_assert!((&again - &u).norm() < 1e-9 * u.norm());
        // ‖u‖² from the mass matrix equals the quadrature of u²
        let mut direct = 0.0;
        for k in 0..space.num_cells() {
            let rule = space.cell_rule(k, 2 * p).unwrap();
            direct += rule.integrate(|x| space.evaluate(&u, k, x).powi(2));
        }
        prop_assert!((space.l2_norm(&u).powi(2) - direct).abs() < 1e-11 * direct);
    }
}

/// Cell containing `x`, for points strictly inside a cell.
fn locate(mesh: &PolyMesh, x: Point2) -> usize {
    (0..mesh.num_cells())
        .find(|&k| {
            let poly = mesh.cell_polygon(k);
            (0..poly.len())
                .all(|i| (poly[(i + 1) % poly.len()] - poly[i]).cross(x - poly[i]) >= -1e-14)
        })
        .expect("point inside the domain")
}

#[test]
fn projection_error_converges_at_order_p_plus_one() {
    let f = |x: Point2| (2.0 * x.x).sin() * (3.0 * x.y).cos();
    for p in 0..=2usize {
        let errs: Vec<f64> = [4usize, 8, 16]
            .iter()
            .map(|&n| {
                let m = PolyMesh::rectangular_grid(Rect::square(1.0).unwrap(), n, n).unwrap();
                let space = DgSpace::new(Arc::new(m), p).unwrap();
                space.l2_error(&space.project(f).unwrap(), f).unwrap()
            })
            .collect();
        let rate = (errs[1] / errs[2]).log2();
        assert!(
            (rate - (p + 1) as f64).abs() < 0.2,
            "p = {p}: errors {errs:?}, rate {rate}"
        );
    }
}

#[test]
fn mass_blocks_are_well_conditioned_on_voronoi_cells() {
    let space = DgSpace::new(voronoi(64, 3), 3).unwrap();
    for k in 0..space.num_cells() {
        let m = space.mass(k);
        assert!((m - m.transpose()).amax() < 1e-14 * m.amax());
        assert!(space.mass_condition(k) < 1e8);
    }
}

#[test]
fn variable_degrees_lay_out_dofs_contiguously() {
    let mesh = voronoi(4, 1);
    let space = DgSpace::with_degrees(mesh, vec![0, 1, 2, 3]).unwrap();
    assert_eq!(space.num_dofs(), 1 + 3 + 6 + 10);
    assert_eq!(space.dofs(2), 4..10);
    assert_eq!(space.max_degree(), 3);
    let ones = space.project(|_| 1.0).unwrap();
    assert!((space.l2_inner(&ones, &ones) - 1.0).abs() < 1e-12);
    assert!((space.l2_error(&DVector::zeros(20), |_| 1.0).unwrap() - 1.0).abs() < 1e-12);
}
