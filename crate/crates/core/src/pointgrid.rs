//! Uniform-grid bucketing of points, shared by the radius-graph builder and
//! the coverage checker.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::geometry::Point;
use crate::math;

pub struct PointGrid {
    cell: f64,
    dim: usize,
    buckets: BTreeMap<Vec<i64>, Vec<u32>>,
}

impl PointGrid {
    pub fn build(points: &[Point], cell: f64) -> PointGrid {
        assert!(cell > 0.0);
        let dim = points.first().map(|p| p.dim()).unwrap_or(1);
        let mut buckets: BTreeMap<Vec<i64>, Vec<u32>> = BTreeMap::new();
        for (i, p) in points.iter().enumerate() {
            buckets.entry(Self::key(p, cell)).or_default().push(i as u32);
        }
        PointGrid { cell, dim, buckets }
    }

    fn key(p: &Point, cell: f64) -> Vec<i64> {
        p.coords
            .iter()
            .map(|&c| math::floor(c / cell) as i64)
            .collect()
    }

    /// Visits the indices stored in the 3^d cells around `q`. Candidates only:
    /// callers still need a distance test.
    pub fn for_each_candidate<F: FnMut(u32)>(&self, q: &Point, mut f: F) {
        let base = Self::key(q, self.cell);
        let mut offs = vec![-1i64; self.dim];
        loop {
            let key: Vec<i64> = base.iter().zip(&offs).map(|(b, o)| b + o).collect();
            if let Some(ids) = self.buckets.get(&key) {
                for &i in ids {
                    f(i);
                }
            }
            // odometer over {-1, 0, 1}^d
            let mut k = 0;
            loop {
                if k == self.dim {
                    return;
                }
                offs[k] += 1;
                if offs[k] <= 1 {
                    break;
                }
                offs[k] = -1;
                k += 1;
            }
        }
    }

    /// True when some stored point lies within `radius + tol` of `q`.
    /// Requires `radius <= cell` so the 3^d neighborhood suffices.
    pub fn has_point_within(&self, points: &[Point], q: &Point, radius: f64, tol: f64) -> bool {
        debug_assert!(radius <= self.cell + tol);
        let r2 = (radius + tol) * (radius + tol);
        let mut hit = false;
        self.for_each_candidate(q, |i| {
            if !hit && points[i as usize].dist_sq(q) <= r2 {
                hit = true;
            }
        });
        hit
    }
}
