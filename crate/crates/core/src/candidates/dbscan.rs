//! DBSCAN over 2-D points with a bucket grid for range queries.

use std::collections::{HashMap, VecDeque};

/// Cluster assignment for each input point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clustering {
    /// `Some(cluster)` for core and border points, `None` for noise.
    pub labels: Vec<Option<usize>>,
    pub core: Vec<bool>,
    pub n_clusters: usize,
}

impl Clustering {
    /// Point indices per cluster, in label order.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.n_clusters];
        for (i, l) in self.labels.iter().enumerate() {
            if let Some(l) = l {
                out[*l].push(i);
            }
        }
        out
    }
}

struct Buckets {
    size: f64,
    map: HashMap<(i64, i64), Vec<usize>>,
}

impl Buckets {
    fn new(points: &[[f64; 2]], size: f64) -> Self {
        let mut map: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            map.entry(Self::key(p, size)).or_default().push(i);
        }
        Buckets { size, map }
    }

    fn key(p: &[f64; 2], size: f64) -> (i64, i64) {
        ((p[0] / size).floor() as i64, (p[1] / size).floor() as i64)
    }

    /// Indices within `eps` of `points[i]` (itself included), ascending.
    fn neighbors(&self, points: &[[f64; 2]], i: usize, eps: f64) -> Vec<usize> {
        let p = points[i];
        let (bx, by) = Self::key(&p, self.size);
        let mut out = Vec::new();
        for dy in -1..=1 {
            for dx in -1..=1 {
                if let Some(bucket) = self.map.get(&(bx + dx, by + dy)) {
                    out.extend(bucket.iter().copied().filter(|&j| {
                        let q = points[j];
                        (p[0] - q[0]).hypot(p[1] - q[1]) <= eps
                    }));
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Density clustering: a point is core when at least `min_pts` points
/// (itself included) lie within distance `eps`. Clusters grow from cores in
/// input order; a border point joins the first cluster that reaches it.
pub fn dbscan(points: &[[f64; 2]], eps: f64, min_pts: usize) -> Clustering {
    let n = points.len();
    let buckets = Buckets::new(points, eps.max(f64::MIN_POSITIVE));
    let hood: Vec<Vec<usize>> = (0..n).map(|i| buckets.neighbors(points, i, eps)).collect();
    let core: Vec<bool> = hood.iter().map(|h| h.len() >= min_pts).collect();
    let mut labels = vec![None; n];
    let mut n_clusters = 0;
    for seed in 0..n {
        if !core[seed] || labels[seed].is_some() {
            continue;
        }
        let id = n_clusters;
        n_clusters += 1;
        labels[seed] = Some(id);
        let mut queue = VecDeque::from([seed]);
        while let Some(p) = queue.pop_front() {
            for &q in &hood[p] {
                if labels[q].is_none() {
                    labels[q] = Some(id);
                    if core[q] {
                        queue.push_back(q);
                    }
                }
            }
        }
    }
    Clustering {
        labels,
        core,
        n_clusters,
    }
}
