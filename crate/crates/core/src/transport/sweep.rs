use std::collections::VecDeque;

use crate::geom::Point2;
use crate::mesh::PolyMesh;

/// Facets with |ω·n| at or below this value are treated as characteristic.
pub const CHARACTERISTIC_TOL: f64 = 1e-13;

/// Order in which cells can be solved one after another for a fixed direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SweepPlan {
    /// Every cell appears after all of its upwind neighbours.
    Ordered(Vec<usize>),
    /// The upwind dependency graph has a cycle.
    Cyclic,
}

impl SweepPlan {
    pub fn is_cyclic(&self) -> bool {
        matches!(self, SweepPlan::Cyclic)
    }
}

/// Topological order (Kahn's algorithm) of the graph with an edge κ → κ′
/// whenever ω·n on their shared facet, taken out of κ, exceeds the tolerance.
pub fn sweep_plan(mesh: &PolyMesh, omega: Point2) -> SweepPlan {
    let n = mesh.num_cells();
    let mut indegree = vec![0usize; n];
    let mut downwind: Vec<Vec<usize>> = vec![Vec::new(); n];
    for f in &mesh.facets {
        let Some(plus) = f.plus else { continue };
        let s = omega.dot(f.normal);
        if s > CHARACTERISTIC_TOL {
            downwind[f.minus].push(plus);
            indegree[plus] += 1;
        } else if s < -CHARACTERISTIC_TOL {
            downwind[plus].push(f.minus);
            indegree[f.minus] += 1;
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&k| indegree[k] == 0).collect();
    let mut order = Vec::with_capacity(n);
    while let Some(k) = queue.pop_front() {
        order.push(k);
        for &d in &downwind[k] {
            indegree[d] -= 1;
            if indegree[d] == 0 {
                queue.push_back(d);
            }
        }
    }
    if order.len() == n {
        SweepPlan::Ordered(order)
    } else {
        SweepPlan::Cyclic
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Rect;

    #[test]
    fn columns_in_order() {
        let m = PolyMesh::rectangular_grid(Rect::square(2.0).unwrap(), 2, 2).unwrap();
        let SweepPlan::Ordered(order) = sweep_plan(&m, Point2::new(1.0, 0.0)) else {
            panic!("grid must be acyclic");
        };
        let pos = |k: usize| order.iter().position(|&c| c == k).unwrap();
        for k in 0..4 {
            let left = m.cells[k].centroid.x < 1.0;
            for j in 0..4 {
                if left && m.cells[j].centroid.x > 1.0 {
                    assert!(pos(k) < pos(j));
                }
            }
        }
    }

    #[test]
    fn single_cell() {
        let m = PolyMesh::rectangular_grid(Rect::square(1.0).unwrap(), 1, 1).unwrap();
        assert_eq!(
            sweep_plan(&m, Point2::new(0.6, 0.8)),
            SweepPlan::Ordered(vec![0])
        );
    }
}
