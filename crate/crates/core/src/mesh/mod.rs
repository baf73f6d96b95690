//! Polygonal meshes of rectangular domains.
//!
//! A [`PolyMesh`] is built from counter-clockwise vertex loops. Facets are
//! discovered by matching half-edges: an interior facet is shared by exactly two
//! cells with opposite orientation, a boundary facet by one cell and must lie on
//! a side of the domain rectangle.

mod io;
mod quality;
mod voronoi;

use std::collections::HashMap;

pub use io::{read_mesh, write_mesh};
pub use quality::{mesh_quality, MeshQuality};
pub use voronoi::{generate_voronoi, lloyd_step, random_sites, voronoi_polygons, VoronoiOptions};

use crate::error::{Error, Result};
use crate::geom::{self, Point2, Rect};

/// A straight facet between two cells, or between a cell and the domain boundary.
#[derive(Debug, Clone)]
pub struct Facet {
    pub vertices: [usize; 2],
    /// Cell whose counter-clockwise loop traverses `vertices[0] -> vertices[1]`.
    pub minus: usize,
    /// Neighbouring cell, `None` on the domain boundary.
    pub plus: Option<usize>,
    /// Unit normal pointing out of `minus`.
    pub normal: Point2,
    pub length: f64,
}

impl Facet {
    pub fn is_boundary(&self) -> bool {
        self.plus.is_none()
    }

    /// Outward normal with respect to `cell`, which must be incident to the facet.
    pub fn normal_from(&self, cell: usize) -> Point2 {
        if cell == self.minus {
            self.normal
        } else {
            -self.normal
        }
    }

    /// The cell on the other side of the facet as seen from `cell`.
    pub fn neighbour_of(&self, cell: usize) -> Option<usize> {
        if cell == self.minus {
            self.plus
        } else {
            Some(self.minus)
        }
    }
}

/// Geometry cache for one convex cell.
#[derive(Debug, Clone)]
pub struct Cell {
    /// Counter-clockwise vertex loop.
    pub vertices: Vec<usize>,
    /// Facet index of the edge starting at each loop vertex.
    pub facets: Vec<usize>,
    pub area: f64,
    pub centroid: Point2,
    pub perimeter: f64,
    /// Diameter h_κ.
    pub diameter: f64,
    /// Long side of the minimum-width oriented bounding box.
    pub box_max: f64,
    /// Short side of the minimum-width oriented bounding box.
    pub box_min: f64,
    /// Diameter of the largest inscribed disc.
    pub inscribed_diameter: f64,
    /// Axis-aligned bounding box.
    pub aabb_min: Point2,
    pub aabb_max: Point2,
}

#[derive(Debug, Clone)]
pub struct PolyMesh {
    pub domain: Rect,
    pub vertices: Vec<Point2>,
    pub cells: Vec<Cell>,
    pub facets: Vec<Facet>,
}

impl PolyMesh {
    /// Builds a mesh from vertex coordinates and counter-clockwise cell loops.
    ///
    /// Repeated consecutive indices in a loop are dropped. Every resulting cell
    /// must keep at least three vertices and positive area.
    pub fn from_polygons(
        domain: Rect,
        vertices: Vec<Point2>,
        loops: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let tol = 1e-9 * domain.diameter();
        let mut cells = Vec::with_capacity(loops.len());
        let mut facets: Vec<Facet> = Vec::new();
        let mut by_key: HashMap<(usize, usize), usize> = HashMap::new();

        for (ci, raw) in loops.into_iter().enumerate() {
            let mut lp: Vec<usize> = Vec::with_capacity(raw.len());
            for &v in &raw {
                if v >= vertices.len() {
                    return Err(Error::MeshConstruction(format!(
                        "cell {ci} references missing vertex {v}"
                    )));
                }
                if lp.last() != Some(&v) {
                    lp.push(v);
                }
            }
            while lp.len() > 1 && lp.first() == lp.last() {
                lp.pop();
            }
            if lp.len() < 3 {
                return Err(Error::MeshConstruction(format!(
                    "cell {ci} has fewer than three distinct vertices"
                )));
            }
            let poly: Vec<Point2> = lp.iter().map(|&v| vertices[v]).collect();
            let area = geom::signed_area(&poly);
            if area <= 0.0 || !area.is_finite() {
                return Err(Error::MeshConstruction(format!(
                    "cell {ci} is not counter-clockwise (signed area {area:e})"
                )));
            }

            let mut cell_facets = Vec::with_capacity(lp.len());
            for i in 0..lp.len() {
                let (a, b) = (lp[i], lp[(i + 1) % lp.len()]);
                let key = (a.min(b), a.max(b));
                match by_key.get(&key) {
                    None => {
                        let e = vertices[b] - vertices[a];
                        let length = e.norm();
                        if length == 0.0 {
                            return Err(Error::MeshConstruction(format!(
                                "cell {ci} has a zero-length edge"
                            )));
                        }
                        by_key.insert(key, facets.len());
                        cell_facets.push(facets.len());
                        facets.push(Facet {
                            vertices: [a, b],
                            minus: ci,
                            plus: None,
                            normal: e.perp_cw() * (1.0 / length),
                            length,
                        });
                    }
                    Some(&fi) => {
                        let f = &mut facets[fi];
                        if f.plus.is_some() || f.vertices != [b, a] {
                            return Err(Error::MeshConstruction(format!(
                                "edge ({a}, {b}) of cell {ci} is not a consistent interior facet"
                            )));
                        }
                        f.plus = Some(ci);
                        cell_facets.push(fi);
                    }
                }
            }

            let (mut lo, mut hi) = (poly[0], poly[0]);
            for p in &poly {
                lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
                hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
            }
            let (box_max, box_min) = geom::min_width_box(&poly);
            cells.push(Cell {
                area,
                centroid: geom::centroid(&poly),
                perimeter: geom::perimeter(&poly),
                diameter: geom::diameter(&poly),
                box_max,
                box_min,
                inscribed_diameter: geom::inscribed_diameter(&poly),
                aabb_min: lo,
                aabb_max: hi,
                vertices: lp,
                facets: cell_facets,
            });
        }

        for (fi, f) in facets.iter().enumerate() {
            if f.plus.is_none() {
                let (a, b) = (vertices[f.vertices[0]], vertices[f.vertices[1]]);
                if domain.common_side(a, b, tol).is_none() {
                    return Err(Error::MeshConstruction(format!(
                        "facet {fi} has a single incident cell but is not on the domain boundary"
                    )));
                }
            }
        }

        Ok(Self {
            domain,
            vertices,
            cells,
            facets,
        })
    }

    /// Uniform `nx` by `ny` grid of axis-aligned rectangles, numbered row by row.
    pub fn rectangular_grid(domain: Rect, nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return crate::error::invalid("grid needs at least one cell per direction");
        }
        let (dx, dy) = (domain.width() / nx as f64, domain.height() / ny as f64);
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                let x = if i == nx {
                    domain.max.x
                } else {
                    domain.min.x + i as f64 * dx
                };
                let y = if j == ny {
                    domain.max.y
                } else {
                    domain.min.y + j as f64 * dy
                };
                vertices.push(Point2::new(x, y));
            }
        }
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let loops = (0..ny)
            .flat_map(|j| (0..nx).map(move |i| (i, j)))
            .map(|(i, j)| vec![id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)])
            .collect();
        Self::from_polygons(domain, vertices, loops)
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    /// Global mesh size h = max_κ h_κ.
    pub fn h(&self) -> f64 {
        self.cells.iter().map(|c| c.diameter).fold(0.0, f64::max)
    }

    pub fn cell_polygon(&self, cell: usize) -> Vec<Point2> {
        self.cells[cell]
            .vertices
            .iter()
            .map(|&v| self.vertices[v])
            .collect()
    }

    pub fn facet_points(&self, facet: usize) -> (Point2, Point2) {
        let f = &self.facets[facet];
        (self.vertices[f.vertices[0]], self.vertices[f.vertices[1]])
    }

    pub fn num_interior_facets(&self) -> usize {
        self.facets.iter().filter(|f| !f.is_boundary()).count()
    }

    pub fn num_boundary_facets(&self) -> usize {
        self.facets.iter().filter(|f| f.is_boundary()).count()
    }

    /// Checks the structural invariants of the mesh.
    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::MeshConstruction(m));
        let total: f64 = self.cells.iter().map(|c| c.area).sum();
        let rel = (total - self.domain.area()).abs() / self.domain.area();
        if rel > 1e-10 {
            return fail(format!(
                "cell areas miss the domain area by {rel:e} (relative)"
            ));
        }
        let mut refs = vec![0usize; self.facets.len()];
        for (ci, c) in self.cells.iter().enumerate() {
            let poly = self.cell_polygon(ci);
            if !geom::is_convex_ccw(&poly, 1e-9) {
                return fail(format!("cell {ci} is not convex"));
            }
            if c.area <= 0.0 {
                return fail(format!("cell {ci} has non-positive area"));
            }
            for &f in &c.facets {
                refs[f] += 1;
            }
        }
        let tol = 1e-9 * self.domain.diameter();
        for (fi, f) in self.facets.iter().enumerate() {
            let expected = if f.is_boundary() { 1 } else { 2 };
            if refs[fi] != expected {
                return fail(format!("facet {fi} referenced {} times", refs[fi]));
            }
            if (f.normal.norm() - 1.0).abs() > 1e-12 {
                return fail(format!("facet {fi} normal is not unit length"));
            }
            let (a, b) = self.facet_points(fi);
            // outward from minus: the minus centroid lies behind the facet
            if (self.cells[f.minus].centroid - a).dot(f.normal) >= 0.0 {
                return fail(format!(
                    "facet {fi} normal does not point out of its minus cell"
                ));
            }
            if f.is_boundary() && self.domain.common_side(a, b, tol).is_none() {
                return fail(format!("boundary facet {fi} is off the domain boundary"));
            }
        }
        let h = self.h();
        if !(h.is_finite() && h > 0.0) {
            return fail(format!("mesh size {h} is not positive and finite"));
        }
        Ok(())
    }
}
