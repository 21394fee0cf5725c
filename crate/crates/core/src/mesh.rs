//! Triangle meshes and a small deterministic parallel map.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::nil::Point;
use crate::numeric::{cross3, norm3};

/// Area below which triangles are dropped.
pub const MIN_TRIANGLE_AREA: f64 = 1e-14;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    /// Optional per-vertex parameter tags, e.g. (θ, α) or (λ1, λ2).
    pub tags: Option<Vec<[f64; 2]>>,
}

impl Mesh {
    pub fn triangle_area(&self, tri: [usize; 3]) -> f64 {
        let [a, b, c] = tri.map(|i| self.vertices[i].to_array());
        let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
        let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
        0.5 * norm3(cross3(u, v))
    }

    /// Adds the triangle unless it is degenerate; returns whether it was kept.
    pub fn push_triangle(&mut self, tri: [usize; 3]) -> bool {
        if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] || self.triangle_area(tri) < MIN_TRIANGLE_AREA {
            return false;
        }
        self.triangles.push(tri);
        true
    }

    pub fn edge_count(&self) -> usize {
        let mut edges = HashSet::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                edges.insert((a.min(b), a.max(b)));
            }
        }
        edges.len()
    }

    /// `V − E + F` over the vertices referenced by triangles.
    pub fn euler_characteristic(&self) -> i64 {
        let used: HashSet<usize> = self.triangles.iter().flatten().copied().collect();
        used.len() as i64 - self.edge_count() as i64 + self.triangles.len() as i64
    }

    /// Every edge shared by exactly two triangles.
    pub fn is_closed(&self) -> bool {
        let mut count = std::collections::HashMap::new();
        for t in &self.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_insert(0usize) += 1;
            }
        }
        count.values().all(|&c| c == 2)
    }

    pub fn indices_valid(&self) -> bool {
        self.triangles.iter().flatten().all(|&i| i < self.vertices.len())
    }
}

/// Order-preserving map over `items` using up to `jobs` scoped threads.
pub fn par_map<T: Sync, R: Send, F: Fn(&T) -> R + Sync>(items: &[T], jobs: usize, f: F) -> Vec<R> {
    let jobs = jobs.max(1).min(items.len().max(1));
    if jobs == 1 {
        return items.iter().map(&f).collect();
    }
    let chunk = items.len().div_ceil(jobs);
    std::thread::scope(|s| {
        let handles: Vec<_> = items.chunks(chunk).map(|c| s.spawn(|| c.iter().map(&f).collect::<Vec<R>>())).collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}
