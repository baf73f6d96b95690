use polydsa::geom::{Point2, Rect};
use polydsa::mesh::{
    generate_voronoi, mesh_quality, random_sites, read_mesh, voronoi_polygons, write_mesh,
    PolyMesh, VoronoiOptions,
};
use proptest::prelude::*;

fn domain(w: f64, h: f64) -> Rect {
    Rect::new(Point2::new(-1.0, 2.0), Point2::new(-1.0 + w, 2.0 + h)).unwrap()
}

fn opts(lloyd: usize) -> VoronoiOptions {
    VoronoiOptions {
        lloyd_iterations: lloyd,
        ..VoronoiOptions::default()
    }
}

fn check_geometry(m: &PolyMesh) -> Result<(), TestCaseError> {
    m.validate()
        .map_err(|e| TestCaseError::fail(e.to_string()))?;
    // Euler characteristic of a planar subdivision of a disc
    prop_assert_eq!(
        m.vertices.len() as i64 - m.facets.len() as i64 + m.num_cells() as i64,
        1
    );
    for (ci, c) in m.cells.iter().enumerate() {
        // closed boundary: Σ n|F| = 0 and ∮ x n_x = |κ|
        let mut closure = Point2::new(0.0, 0.0);
        let mut flux = 0.0;
        for &f in &c.facets {
            let fac = &m.facets[f];
            let n = fac.normal_from(ci);
            let (a, b) = m.facet_points(f);
            closure = closure + n * fac.length;
            flux += 0.5 * (a.x + b.x) * n.x * fac.length;
            prop_assert!(((b - a).norm() - fac.length).abs() < 1e-12);
        }
        prop_assert!(closure.norm() < 1e-10 * c.perimeter);
        prop_assert!((flux - c.area).abs() < 1e-10 * c.area.max(1.0));
        prop_assert_eq!(c.facets.len(), c.vertices.len());
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_meshes_are_valid(
        n in 4usize..120,
        seed in any::<u64>(),
        lloyd in 0usize..5,
        w in 0.5f64..20.0,
        h in 0.5f64..20.0,
    ) {
        let d = domain(w, h);
        let m = generate_voronoi(&d, n, seed, opts(lloyd)).unwrap();
        prop_assert_eq!(m.num_cells(), n);
        check_geometry(&m)?;
        let q = mesh_quality(&m);
        prop_assert!(q.anisotropy_ratio >= 1.0);
        prop_assert!(q.isoperimetric.iter().all(|&v| v > 0.0 && v <= 1.0 + 1e-12));
        prop_assert!(q.facets_min >= 3 && q.facets_min as f64 <= q.facets_mean);
        prop_assert!(q.facets_mean <= q.facets_max as f64);
    }

    #[test]
    fn voronoi_cells_are_nearest_site_regions(n in 2usize..60, seed in any::<u64>()) {
        let d = domain(10.0, 10.0);
        let sites = random_sites(&d, n, seed);
        let polys = voronoi_polygons(&sites, &d).unwrap();
        prop_assert_eq!(polys.len(), n);
        for (i, poly) in polys.iter().enumerate() {
            // every vertex is at least as close to its own site as to any other
            for v in poly {
                let own = (*v - sites[i]).norm();
                let best = sites.iter().map(|s| (*v - *s).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(own <= best + 1e-9);
            }
        }
    }

    #[test]
    fn text_round_trip_is_exact(n in 2usize..50, seed in any::<u64>()) {
        let m = generate_voronoi(&domain(3.0, 7.0), n, seed, opts(2)).unwrap();
        let mut buf = Vec::new();
        write_mesh(&m, &mut buf).unwrap();
        let back = read_mesh(buf.as_slice()).unwrap();
        prop_assert_eq!(&back.vertices, &m.vertices);
        prop_assert_eq!(back.facets.len(), m.facets.len());
        for (a, b) in back.cells.iter().zip(&m.cells) {
            prop_assert_eq!(&a.vertices, &b.vertices);
            prop_assert_eq!(a.area, b.area);
        }
    }
}

#[test]
fn generation_is_deterministic_per_seed() {
    let d = domain(10.0, 10.0);
    let a = generate_voronoi(&d, 64, 7, opts(10)).unwrap();
    let b = generate_voronoi(&d, 64, 7, opts(10)).unwrap();
    let c = generate_voronoi(&d, 64, 8, opts(10)).unwrap();
    assert_eq!(a.vertices, b.vertices);
    assert_ne!(a.vertices, c.vertices);
}

#[test]
fn lloyd_relaxation_regularises_the_baseline_mesh() {
    let d = Rect::square(10.0).unwrap();
    let raw = mesh_quality(&generate_voronoi(&d, 256, 1, opts(0)).unwrap());
    let relaxed = mesh_quality(&generate_voronoi(&d, 256, 1, opts(10)).unwrap());
    assert!(relaxed.anisotropy_ratio < raw.anisotropy_ratio);
    assert!(relaxed.isoperimetric_mean() > raw.isoperimetric_mean());
}

#[test]
fn grid_mesh_quality_is_ideal() {
    let m = PolyMesh::rectangular_grid(Rect::square(2.0).unwrap(), 4, 4).unwrap();
    let q = mesh_quality(&m);
    assert!((q.anisotropy_ratio - 1.0).abs() < 1e-12);
    assert_eq!((q.facets_min, q.facets_max), (4, 4));
    assert!((q.isoperimetric_min() - std::f64::consts::PI / 4.0).abs() < 1e-12);
    assert_eq!(m.num_boundary_facets(), 16);
    assert_eq!(m.num_interior_facets(), 24);
}

#[test]
fn too_few_sites_is_an_error() {
    assert!(generate_voronoi(&Rect::square(1.0).unwrap(), 0, 1, opts(0)).is_err());
}
