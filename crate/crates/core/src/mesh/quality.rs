use std::f64::consts::PI;

use super::PolyMesh;

/// Shape statistics of a mesh.
#[derive(Debug, Clone)]
pub struct MeshQuality {
    /// η = max_κ h_{κ,max} / h_{κ,min} over minimum-width oriented bounding boxes.
    pub anisotropy_ratio: f64,
    /// 4π|κ| / perimeter² per cell.
    pub isoperimetric: Vec<f64>,
    pub facets_min: usize,
    pub facets_mean: f64,
    pub facets_max: usize,
    /// max_κ h_κ / η_κ (diameter over inscribed diameter).
    pub shape_regularity: f64,
}

impl MeshQuality {
    pub fn isoperimetric_min(&self) -> f64 {
        self.isoperimetric
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    pub fn isoperimetric_mean(&self) -> f64 {
        self.isoperimetric.iter().sum::<f64>() / self.isoperimetric.len() as f64
    }
}

pub fn mesh_quality(mesh: &PolyMesh) -> MeshQuality {
    let mut eta: f64 = 1.0;
    let mut regularity: f64 = 0.0;
    let mut iso = Vec::with_capacity(mesh.num_cells());
    let (mut fmin, mut fmax, mut fsum) = (usize::MAX, 0, 0);
    for c in &mesh.cells {
        eta = eta.max(c.box_max / c.box_min);
        regularity = regularity.max(c.diameter / c.inscribed_diameter);
        iso.push((4.0 * PI * c.area / (c.perimeter * c.perimeter)).min(1.0));
        let nf = c.facets.len();
        fmin = fmin.min(nf);
        fmax = fmax.max(nf);
        fsum += nf;
    }
    MeshQuality {
        anisotropy_ratio: eta,
        isoperimetric: iso,
        facets_min: fmin,
        facets_mean: fsum as f64 / mesh.num_cells() as f64,
        facets_max: fmax,
        shape_regularity: regularity,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Point2, Rect};

    #[test]
    fn squares_have_unit_ratio() {
        let m = PolyMesh::rectangular_grid(Rect::square(3.0).unwrap(), 3, 3).unwrap();
        let q = mesh_quality(&m);
        assert_eq!(q.anisotropy_ratio, 1.0);
        assert!((q.isoperimetric_min() - PI / 4.0).abs() < 1e-12);
        assert_eq!((q.facets_min, q.facets_max), (4, 4));
    }

    #[test]
    fn two_by_one_rectangle() {
        let d = Rect::new(Point2::new(0.0, 0.0), Point2::new(2.0, 1.0)).unwrap();
        let m = PolyMesh::rectangular_grid(d, 1, 1).unwrap();
        assert_eq!(mesh_quality(&m).anisotropy_ratio, 2.0);
    }

    #[test]
    fn ratio_is_scale_invariant() {
        use crate::mesh::{generate_voronoi, VoronoiOptions};
        let opts = VoronoiOptions {
            lloyd_iterations: 1,
            max_retries: 2,
        };
        let a = generate_voronoi(&Rect::square(1.0).unwrap(), 40, 3, opts).unwrap();
        let b = generate_voronoi(&Rect::square(8.0).unwrap(), 40, 3, opts).unwrap();
        let (ea, eb) = (
            mesh_quality(&a).anisotropy_ratio,
            mesh_quality(&b).anisotropy_ratio,
        );
        assert!((ea - eb).abs() < 1e-9 * ea);
    }
}
