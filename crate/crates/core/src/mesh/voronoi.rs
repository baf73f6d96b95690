//! Bounded Voronoi tessellations by half-plane clipping, and Lloyd relaxation.
//!
//! Each cell starts as the domain rectangle and is clipped by the bisector of
//! every nearby site. Nearby sites are visited ring by ring on a bucket grid; the
//! search stops once no unvisited site can be closer than twice the current cell
//! radius, since such a bisector cannot cut the cell.
//!
//! Vertices are identified combinatorially: a Voronoi vertex of cell `i` lies on
//! two constraint lines (bisectors or domain sides), so the sorted triple
//! `{i, g1, g2}` of generators names it identically in every incident cell. Only
//! degenerate (co-circular) configurations need the coordinate merge that
//! follows.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::PolyMesh;
use crate::error::{invalid, Error, Result};
use crate::geom::{self, Point2, Rect};

/// Relative snap tolerance for coincident vertices (times the domain diameter).
const SNAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct VoronoiOptions {
    pub lloyd_iterations: usize,
    /// Number of perturb-and-retry attempts when a tessellation is degenerate.
    pub max_retries: usize,
}

impl Default for VoronoiOptions {
    fn default() -> Self {
        Self {
            lloyd_iterations: 10,
            max_retries: 8,
        }
    }
}

/// Uniform random sites in `domain` drawn from a ChaCha8 stream seeded with `seed`.
pub fn random_sites(domain: &Rect, n: usize, seed: u64) -> Vec<Point2> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let u: f64 = rng.random();
            let v: f64 = rng.random();
            Point2::new(
                domain.min.x + u * domain.width(),
                domain.min.y + v * domain.height(),
            )
        })
        .collect()
}

/// Generator of a constraint line: a neighbouring site or a domain side.
type Generator = usize;

fn side_generator(n_sites: usize, side: usize) -> Generator {
    n_sites + side
}

struct BucketGrid {
    origin: Point2,
    size: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl BucketGrid {
    fn new(sites: &[Point2], domain: &Rect) -> Self {
        let size = (domain.area() / sites.len() as f64).sqrt();
        let nx = ((domain.width() / size).ceil() as usize).max(1);
        let ny = ((domain.height() / size).ceil() as usize).max(1);
        let mut buckets = vec![Vec::new(); nx * ny];
        let mut grid = Self {
            origin: domain.min,
            size,
            nx,
            ny,
            buckets: Vec::new(),
        };
        for (i, s) in sites.iter().enumerate() {
            let (bx, by) = grid.bucket_of(*s);
            buckets[by * nx + bx].push(i);
        }
        grid.buckets = buckets;
        grid
    }

    fn bucket_of(&self, p: Point2) -> (usize, usize) {
        let bx = ((p.x - self.origin.x) / self.size).floor().max(0.0) as usize;
        let by = ((p.y - self.origin.y) / self.size).floor().max(0.0) as usize;
        (bx.min(self.nx - 1), by.min(self.ny - 1))
    }

    /// Sites in the buckets at Chebyshev distance exactly `r` from `(bx, by)`.
    fn ring(&self, bx: usize, by: usize, r: usize, out: &mut Vec<usize>) {
        out.clear();
        let (bx, by, r) = (bx as isize, by as isize, r as isize);
        for j in by - r..=by + r {
            for i in bx - r..=bx + r {
                if (i - bx).abs().max((j - by).abs()) != r {
                    continue;
                }
                if i < 0 || j < 0 || i >= self.nx as isize || j >= self.ny as isize {
                    continue;
                }
                out.extend_from_slice(&self.buckets[j as usize * self.nx + i as usize]);
            }
        }
    }

    fn max_ring(&self) -> usize {
        self.nx.max(self.ny)
    }
}

/// Clipped cell of every site, with the generator of the edge starting at each vertex.
fn tagged_cells(sites: &[Point2], domain: &Rect) -> Result<Vec<Vec<(Point2, Generator)>>> {
    if sites.is_empty() {
        return invalid("empty site list");
    }
    let n = sites.len();
    let coincide = SNAP_TOL * domain.diameter();
    for (i, s) in sites.iter().enumerate() {
        if !domain.contains(*s, 0.0) {
            return invalid(format!(
                "site {i} at ({}, {}) lies outside the domain",
                s.x, s.y
            ));
        }
    }
    let grid = BucketGrid::new(sites, domain);
    let rect: Vec<(Point2, Generator)> = domain
        .corners()
        .iter()
        .enumerate()
        .map(|(s, &c)| (c, side_generator(n, s)))
        .collect();

    let mut cells = Vec::with_capacity(n);
    let mut ring = Vec::new();
    for (i, &si) in sites.iter().enumerate() {
        let (bx, by) = grid.bucket_of(si);
        let mut poly = rect.clone();
        for r in 0..=grid.max_ring() {
            grid.ring(bx, by, r, &mut ring);
            for &j in &ring {
                if j == i {
                    continue;
                }
                let d = sites[j] - si;
                if d.norm() <= coincide {
                    return Err(Error::MeshConstruction(format!(
                        "sites {i} and {j} coincide"
                    )));
                }
                poly = geom::clip_tagged(&poly, (si + sites[j]) * 0.5, d, j);
            }
            let radius = poly.iter().map(|(p, _)| p.distance(si)).fold(0.0, f64::max);
            if r as f64 * grid.size >= 2.0 * radius {
                break;
            }
        }
        if poly.len() < 3 {
            return Err(Error::MeshConstruction(format!(
                "cell of site {i} collapsed"
            )));
        }
        cells.push(poly);
    }
    Ok(cells)
}

/// Voronoi cells of `sites` clipped to `domain`, as counter-clockwise polygons.
pub fn voronoi_polygons(sites: &[Point2], domain: &Rect) -> Result<Vec<Vec<Point2>>> {
    Ok(tagged_cells(sites, domain)?
        .into_iter()
        .map(|c| c.into_iter().map(|(p, _)| p).collect())
        .collect())
}

/// One Lloyd step: every site moves to the centroid of its clipped Voronoi cell.
pub fn lloyd_step(sites: &[Point2], domain: &Rect) -> Result<Vec<Point2>> {
    Ok(voronoi_polygons(sites, domain)?
        .iter()
        .map(|poly| geom::centroid(poly))
        .collect())
}

/// Builds the mesh topology of the Voronoi diagram of `sites`.
pub fn mesh_from_sites(sites: &[Point2], domain: &Rect) -> Result<PolyMesh> {
    let n = sites.len();
    let cells = tagged_cells(sites, domain)?;

    let mut ids: HashMap<[usize; 3], usize> = HashMap::new();
    let mut coords: Vec<Point2> = Vec::new();
    let mut loops: Vec<Vec<usize>> = Vec::with_capacity(n);
    for (i, poly) in cells.iter().enumerate() {
        let m = poly.len();
        let mut lp = Vec::with_capacity(m);
        for k in 0..m {
            let prev = poly[(k + m - 1) % m].1;
            let mut key = [i, prev, poly[k].1];
            key.sort_unstable();
            let id = *ids.entry(key).or_insert_with(|| {
                coords.push(poly[k].0);
                coords.len() - 1
            });
            lp.push(id);
        }
        loops.push(lp);
    }

    // merge distinct keys that landed on the same point (degenerate vertices)
    let tol = SNAP_TOL * domain.diameter();
    let repr = snap_vertices(&coords, tol);
    let mut compact = vec![usize::MAX; coords.len()];
    let mut vertices = Vec::new();
    for v in 0..coords.len() {
        let r = repr[v];
        if compact[r] == usize::MAX {
            compact[r] = vertices.len();
            vertices.push(coords[r]);
        }
        compact[v] = compact[r];
    }
    let loops = loops
        .into_iter()
        .map(|lp| lp.into_iter().map(|v| compact[v]).collect())
        .collect();
    PolyMesh::from_polygons(*domain, vertices, loops)
}

/// Representative index for every point; points within `tol` share one.
fn snap_vertices(points: &[Point2], tol: f64) -> Vec<usize> {
    let mut repr: Vec<usize> = (0..points.len()).collect();
    if tol <= 0.0 {
        return repr;
    }
    let key = |p: Point2| ((p.x / tol).floor() as i64, (p.y / tol).floor() as i64);
    let mut table: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (v, p) in points.iter().enumerate() {
        let (kx, ky) = key(*p);
        let mut found = None;
        'search: for dy in -1..=1 {
            for dx in -1..=1 {
                if let Some(list) = table.get(&(kx + dx, ky + dy)) {
                    for &u in list {
                        if points[u].distance(*p) <= tol {
                            found = Some(repr[u]);
                            break 'search;
                        }
                    }
                }
            }
        }
        if let Some(r) = found {
            repr[v] = r;
        }
        table.entry((kx, ky)).or_default().push(v);
    }
    repr
}

/// Bounded Voronoi mesh of `n_sites` random sites, optionally Lloyd-relaxed.
///
/// Deterministic for fixed `(seed, n_sites, lloyd_iterations)`. A degenerate
/// tessellation is retried with slightly jittered sites, at most
/// `options.max_retries` times.
pub fn generate_voronoi(
    domain: &Rect,
    n_sites: usize,
    seed: u64,
    options: VoronoiOptions,
) -> Result<PolyMesh> {
    let domain = Rect::new(domain.min, domain.max)?;
    if n_sites == 0 {
        return invalid("at least one site is required");
    }
    let mut sites = random_sites(&domain, n_sites, seed);
    let mut jitter = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let spacing = (domain.area() / n_sites as f64).sqrt();
    let mut last_err = None;
    for _attempt in 0..=options.max_retries {
        match relax_and_build(&sites, &domain, options.lloyd_iterations) {
            Ok(mesh) => return Ok(mesh),
            Err(e) => {
                last_err = Some(e);
                for s in sites.iter_mut() {
                    let dx = (jitter.random::<f64>() - 0.5) * 1e-6 * spacing;
                    let dy = (jitter.random::<f64>() - 0.5) * 1e-6 * spacing;
                    s.x = (s.x + dx).clamp(domain.min.x, domain.max.x);
                    s.y = (s.y + dy).clamp(domain.min.y, domain.max.y);
                }
            }
        }
    }
    Err(Error::MeshConstruction(format!(
        "tessellation still degenerate after {} retries: {}",
        options.max_retries,
        last_err.map(|e| e.to_string()).unwrap_or_default()
    )))
}

fn relax_and_build(sites: &[Point2], domain: &Rect, iterations: usize) -> Result<PolyMesh> {
    let mut sites = sites.to_vec();
    for _ in 0..iterations {
        sites = lloyd_step(&sites, domain)?;
    }
    let mesh = mesh_from_sites(&sites, domain)?;
    mesh.validate()?;
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Rect {
        Rect::square(1.0).unwrap()
    }

    fn grid_sites() -> Vec<Point2> {
        vec![
            Point2::new(0.25, 0.25),
            Point2::new(0.75, 0.25),
            Point2::new(0.25, 0.75),
            Point2::new(0.75, 0.75),
        ]
    }

    #[test]
    fn single_site_is_the_domain() {
        let m = generate_voronoi(
            &unit(),
            1,
            7,
            VoronoiOptions {
                lloyd_iterations: 0,
                max_retries: 0,
            },
        )
        .unwrap();
        assert_eq!(m.num_cells(), 1);
        assert_eq!(m.num_boundary_facets(), 4);
        assert_eq!(m.num_interior_facets(), 0);
        assert!((m.cells[0].area - 1.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_sites_give_square_grid() {
        let m = mesh_from_sites(&grid_sites(), &unit()).unwrap();
        m.validate().unwrap();
        assert_eq!(m.num_cells(), 4);
        assert_eq!(m.num_interior_facets(), 4);
        for c in &m.cells {
            assert!((c.area - 0.25).abs() < 1e-15);
            assert!((c.box_max - 0.5).abs() < 1e-15 && (c.box_min - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn lloyd_fixed_points() {
        let moved = lloyd_step(&grid_sites(), &unit()).unwrap();
        for (a, b) in moved.iter().zip(grid_sites()) {
            assert!(a.distance(b) < 1e-15);
        }
        let one = lloyd_step(&[Point2::new(0.1, 0.8)], &unit()).unwrap();
        assert!(one[0].distance(Point2::new(0.5, 0.5)) < 1e-15);
    }

    #[test]
    fn lloyd_rejects_empty() {
        assert!(matches!(
            lloyd_step(&[], &unit()),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn coincident_sites_are_retried() {
        let d = unit();
        let sites = vec![
            Point2::new(0.3, 0.3),
            Point2::new(0.3, 0.3),
            Point2::new(0.8, 0.6),
        ];
        assert!(mesh_from_sites(&sites, &d).is_err());
    }

    #[test]
    fn cocircular_sites_build() {
        // four sites on a circle produce a degree-4 vertex at the centre
        let sites = vec![
            Point2::new(0.5, 0.2),
            Point2::new(0.8, 0.5),
            Point2::new(0.5, 0.8),
            Point2::new(0.2, 0.5),
        ];
        let m = mesh_from_sites(&sites, &unit()).unwrap();
        m.validate().unwrap();
        assert_eq!(m.num_interior_facets(), 4);
    }

    #[test]
    fn random_meshes_are_valid_and_deterministic() {
        let d = Rect::square(10.0).unwrap();
        let opts = VoronoiOptions {
            lloyd_iterations: 2,
            max_retries: 4,
        };
        let a = generate_voronoi(&d, 200, 11, opts).unwrap();
        let b = generate_voronoi(&d, 200, 11, opts).unwrap();
        a.validate().unwrap();
        assert_eq!(a.vertices.len(), b.vertices.len());
        for (p, q) in a.vertices.iter().zip(&b.vertices) {
            assert_eq!(p.x.to_bits(), q.x.to_bits());
            assert_eq!(p.y.to_bits(), q.y.to_bits());
        }
    }

    #[test]
    fn outside_site_rejected() {
        assert!(voronoi_polygons(&[Point2::new(2.0, 0.5)], &unit()).is_err());
    }
}
