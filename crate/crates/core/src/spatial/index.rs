use std::cmp::Ordering;

use crate::domain::{dist2, lex_cmp, PointConfiguration};

/// Uniform grid over the bounding box of the configuration's window.
///
/// Buckets are stored in compressed form: the indices of cell `c` are
/// `items[starts[c]..starts[c + 1]]`.
#[derive(Debug, Clone)]
pub struct SpatialIndex<'a> {
    config: &'a PointConfiguration,
    lower: Vec<f64>,
    cell: f64,
    shape: Vec<usize>,
    starts: Vec<usize>,
    items: Vec<usize>,
}

const MAX_CELLS_PER_POINT: usize = 4;

impl<'a> SpatialIndex<'a> {
    /// Index with the default cell edge `(vol(window) / max(1, N))^{1/d}`.
    pub fn new(config: &'a PointConfiguration) -> Self {
        let d = config.dim() as f64;
        let h = (config.window().volume() / config.len().max(1) as f64).powf(1.0 / d);
        Self::with_cell_edge(config, h)
    }

    pub fn with_cell_edge(config: &'a PointConfiguration, cell_edge: f64) -> Self {
        assert!(cell_edge > 0.0 && cell_edge.is_finite(), "cell edge must be positive");
        let (lower, upper) = config.window().bounding_box();
        let dim = config.dim();
        let max_cells = MAX_CELLS_PER_POINT * config.len().max(1) + 16;
        let mut h = cell_edge;
        let shape = loop {
            let shape: Vec<usize> = lower
                .iter()
                .zip(&upper)
                .map(|(l, u)| (((u - l) / h).ceil() as usize).max(1))
                .collect();
            if shape.iter().try_fold(1usize, |acc, &s| acc.checked_mul(s)).is_some_and(|c| c <= max_cells) {
                break shape;
            }
            h *= 2.0;
        };
        let total: usize = shape.iter().product();
        let mut index = SpatialIndex {
            config,
            lower,
            cell: h,
            shape,
            starts: vec![0; total + 1],
            items: vec![0; config.len()],
        };
        let cells: Vec<usize> = config.points().map(|p| index.cell_of(p)).collect();
        for &c in &cells {
            index.starts[c + 1] += 1;
        }
        for c in 0..total {
            index.starts[c + 1] += index.starts[c];
        }
        let mut fill = index.starts.clone();
        for (i, &c) in cells.iter().enumerate() {
            index.items[fill[c]] = i;
            fill[c] += 1;
        }
        debug_assert_eq!(dim, index.shape.len());
        index
    }

    pub fn config(&self) -> &'a PointConfiguration {
        self.config
    }

    pub fn cell_edge(&self) -> f64 {
        self.cell
    }

    pub fn occupied_buckets(&self) -> usize {
        self.starts.windows(2).filter(|w| w[1] > w[0]).count()
    }

    pub fn bucket_sizes(&self) -> impl Iterator<Item = usize> + '_ {
        self.starts.windows(2).map(|w| w[1] - w[0])
    }

    fn axis_cell(&self, axis: usize, v: f64) -> i64 {
        let c = ((v - self.lower[axis]) / self.cell).floor();
        c.clamp(0.0, (self.shape[axis] - 1) as f64) as i64
    }

    fn cell_coords(&self, x: &[f64]) -> Vec<i64> {
        (0..x.len()).map(|a| self.axis_cell(a, x[a])).collect()
    }

    fn flat(&self, coords: &[i64]) -> usize {
        let mut c = 0usize;
        for (a, &v) in coords.iter().enumerate() {
            c = c * self.shape[a] + v as usize;
        }
        c
    }

    fn cell_of(&self, x: &[f64]) -> usize {
        self.flat(&self.cell_coords(x))
    }

    fn bucket(&self, flat: usize) -> &[usize] {
        &self.items[self.starts[flat]..self.starts[flat + 1]]
    }

    /// Visits every cell in the axis-aligned block `lo..=hi` (already clamped).
    fn for_block(&self, lo: &[i64], hi: &[i64], mut f: impl FnMut(&[i64])) {
        let dim = lo.len();
        if lo.iter().zip(hi).any(|(l, h)| l > h) {
            return;
        }
        let mut cur = lo.to_vec();
        loop {
            f(&cur);
            let mut a = dim;
            loop {
                if a == 0 {
                    return;
                }
                a -= 1;
                if cur[a] < hi[a] {
                    cur[a] += 1;
                    break;
                }
                cur[a] = lo[a];
            }
        }
    }

    /// Visits the cells at Chebyshev index distance exactly `ring` from `center`.
    fn for_ring(&self, center: &[i64], ring: i64, mut f: impl FnMut(usize)) {
        let dim = center.len();
        let lo: Vec<i64> = center.iter().map(|c| (c - ring).max(0)).collect();
        let hi: Vec<i64> = (0..dim).map(|a| (center[a] + ring).min(self.shape[a] as i64 - 1)).collect();
        self.for_block(&lo, &hi, |cell| {
            if cell.iter().zip(center).any(|(c, m)| (c - m).abs() == ring) {
                f(self.flat(cell));
            }
        });
    }

    fn max_ring(&self, center: &[i64]) -> i64 {
        center
            .iter()
            .zip(&self.shape)
            .map(|(&c, &s)| c.max(s as i64 - 1 - c))
            .max()
            .unwrap_or(0)
    }

    /// Total order used for neighbour ranking: squared distance, then coordinates, then index.
    pub fn rank_cmp(&self, a: (f64, usize), b: (f64, usize)) -> Ordering {
        a.0.total_cmp(&b.0)
            .then_with(|| lex_cmp(self.config.point(a.1), self.config.point(b.1)))
            .then(a.1.cmp(&b.1))
    }

    /// The `k` nearest points to `x` in ascending rank order. With `exclude_self`, a
    /// configuration point located exactly at `x` is skipped.
    pub fn knn(&self, x: &[f64], k: usize, exclude_self: bool) -> Vec<usize> {
        self.knn_with_dist(x, k, exclude_self).into_iter().map(|(_, i)| i).collect()
    }

    /// As [`knn`](Self::knn), returning `(squared distance, index)` pairs.
    pub fn knn_with_dist(&self, x: &[f64], k: usize, exclude_self: bool) -> Vec<(f64, usize)> {
        assert!(k >= 1, "k must be positive");
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
        if self.config.is_empty() {
            return best;
        }
        let center = self.cell_coords(x);
        let last = self.max_ring(&center);
        for ring in 0..=last {
            self.for_ring(&center, ring, |c| {
                for &i in self.bucket(c) {
                    let d = dist2(self.config.point(i), x);
                    if exclude_self && d == 0.0 {
                        continue;
                    }
                    let cand = (d, i);
                    if best.len() == k && self.rank_cmp(cand, best[k - 1]) != Ordering::Less {
                        continue;
                    }
                    let pos = best.partition_point(|&b| self.rank_cmp(b, cand) == Ordering::Less);
                    best.insert(pos, cand);
                    best.truncate(k);
                }
            });
            // unseen points lie at least `ring · h` away
            if best.len() == k {
                let reach = ring as f64 * self.cell;
                if best[k - 1].0 < reach * reach * (1.0 - 1e-9) {
                    break;
                }
            }
        }
        best
    }

    /// Indices `i` with `‖p_i − x‖ ≤ r`, ascending.
    pub fn range(&self, x: &[f64], r: f64) -> Vec<usize> {
        assert!(r >= 0.0, "radius must be non-negative");
        let mut out = Vec::new();
        if self.config.is_empty() {
            return out;
        }
        let lo: Vec<i64> = (0..x.len()).map(|a| self.axis_cell(a, x[a] - r)).collect();
        let hi: Vec<i64> = (0..x.len()).map(|a| self.axis_cell(a, x[a] + r)).collect();
        let r2 = r * r;
        self.for_block(&lo, &hi, |cell| {
            for &i in self.bucket(self.flat(cell)) {
                if dist2(self.config.point(i), x) <= r2 {
                    out.push(i);
                }
            }
        });
        out.sort_unstable();
        out
    }

    /// Calls `f(d², i)` for points in order of non-decreasing certified distance
    /// bands: after `ring`, every point closer than `ring · h` has been passed to
    /// `f`. `f` returns the squared radius beyond which no further points are
    /// wanted; the walk stops once that radius is certified.
    pub(crate) fn expanding_rings(&self, x: &[f64], mut f: impl FnMut(&[(f64, usize)], f64) -> f64) {
        if self.config.is_empty() {
            f(&[], f64::INFINITY);
            return;
        }
        let center = self.cell_coords(x);
        let last = self.max_ring(&center);
        let mut batch = Vec::new();
        for ring in 0..=last {
            batch.clear();
            self.for_ring(&center, ring, |c| {
                for &i in self.bucket(c) {
                    batch.push((dist2(self.config.point(i), x), i));
                }
            });
            let certified = if ring == last {
                f64::INFINITY
            } else {
                let reach = ring as f64 * self.cell;
                reach * reach * (1.0 - 1e-9)
            };
            let wanted = f(&batch, certified);
            if certified > wanted {
                return;
            }
        }
    }
}

/// Linear-scan kNN with the same tie rule, for tests and small inputs.
pub fn knn_brute_force(config: &PointConfiguration, x: &[f64], k: usize, exclude_self: bool) -> Vec<usize> {
    let mut all: Vec<(f64, usize)> = config
        .points()
        .enumerate()
        .map(|(i, p)| (dist2(p, x), i))
        .filter(|&(d, _)| !(exclude_self && d == 0.0))
        .collect();
    all.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then_with(|| lex_cmp(config.point(a.1), config.point(b.1)))
            .then(a.1.cmp(&b.1))
    });
    all.truncate(k);
    all.into_iter().map(|(_, i)| i).collect()
}

/// Linear-scan closed-ball query, ascending indices.
pub fn range_brute_force(config: &PointConfiguration, x: &[f64], r: f64) -> Vec<usize> {
    config
        .points()
        .enumerate()
        .filter(|(_, p)| dist2(p, x) <= r * r)
        .map(|(i, _)| i)
        .collect()
}
