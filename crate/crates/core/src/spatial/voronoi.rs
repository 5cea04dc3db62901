use super::index::SpatialIndex;
use super::polygon::{self, Point2};
use crate::domain::{dist2, lex_cmp, PointConfiguration, Region};
use crate::error::{Error, Result};

/// Voronoi cell of one nucleus, clipped to the window. Vertices are counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct CellPolygon {
    pub nucleus: usize,
    pub vertices: Vec<Point2>,
}

impl CellPolygon {
    pub fn area(&self) -> f64 {
        polygon::area(&self.vertices)
    }

    /// `ℓ(cell ∩ region)`, exact for boxes, balls and polytopes in the plane.
    pub fn area_within(&self, region: &Region) -> Result<f64> {
        match region {
            Region::Box { lower, upper } if lower.len() == 2 => {
                Ok(polygon::area(&polygon::clip_box(&self.vertices, [lower[0], lower[1]], [upper[0], upper[1]])))
            }
            Region::Ball { center, radius } if center.len() == 2 => {
                Ok(polygon::disk_intersection_area(&self.vertices, [center[0], center[1]], *radius))
            }
            Region::HalfspacePolytope(p) if p.dim() == 2 => {
                let mut poly = self.vertices.clone();
                for h in p.halfspaces() {
                    if poly.is_empty() {
                        break;
                    }
                    poly = polygon::clip_linear(&poly, [h.normal[0], h.normal[1]], h.offset);
                }
                Ok(polygon::area(&poly))
            }
            _ => Err(Error::Method("cell intersection needs a planar region".into())),
        }
    }
}

fn window_corners(window: &Region) -> Result<Vec<Point2>> {
    match window {
        Region::Box { lower, upper } if lower.len() == 2 => Ok(vec![
            [lower[0], lower[1]],
            [upper[0], lower[1]],
            [upper[0], upper[1]],
            [lower[0], upper[1]],
        ]),
        Region::Box { .. } => Err(Error::Unsupported("Voronoi cells are only exact in two dimensions".into())),
        _ => Err(Error::Unsupported("Voronoi window must be a box".into())),
    }
}

/// Clips to the half-plane of points at least as close to `p` as to `q`.
fn clip_bisector(poly: &[Point2], p: &[f64], q: &[f64]) -> Option<Vec<Point2>> {
    let a = [q[0] - p[0], q[1] - p[1]];
    let m = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
    polygon::clip_halfplane(poly, |v| a[0] * (v[0] - m[0]) + a[1] * (v[1] - m[1]))
}

fn max_vertex_dist2(poly: &[Point2], p: &[f64]) -> f64 {
    poly.iter().map(|v| dist2(v, p)).fold(0.0, f64::max)
}

fn check_nucleus(config: &PointConfiguration, i: usize) -> Result<()> {
    if config.dim() != 2 {
        return Err(Error::Unsupported("Voronoi cells are only exact in two dimensions".into()));
    }
    if i >= config.len() {
        return Err(Error::Precondition(format!("point index {i} out of range")));
    }
    Ok(())
}

/// Cell of nucleus `i`, using the grid index to skip bisectors that provably
/// cannot cut the current polygon.
pub fn voronoi_cell_2d(config: &PointConfiguration, i: usize, window: &Region) -> Result<CellPolygon> {
    check_nucleus(config, i)?;
    let index = SpatialIndex::new(config);
    voronoi_cell_indexed(&index, i, window)
}

/// As [`voronoi_cell_2d`] with a prebuilt index.
pub fn voronoi_cell_indexed(index: &SpatialIndex<'_>, i: usize, window: &Region) -> Result<CellPolygon> {
    let config = index.config();
    check_nucleus(config, i)?;
    let p = config.point(i);
    let mut poly = window_corners(window)?;
    let mut reach2 = max_vertex_dist2(&poly, p);
    let mut pending: Vec<(f64, usize)> = Vec::new();
    index.expanding_rings(p, |batch, certified| {
        pending.extend(batch.iter().copied().filter(|&(_, j)| j != i));
        pending.sort_by(|&a, &b| index.rank_cmp(a, b));
        let ready = pending.partition_point(|c| c.0 < certified);
        for (_, j) in pending.drain(..ready) {
            if let Some(next) = clip_bisector(&poly, p, config.point(j)) {
                poly = next;
                reach2 = max_vertex_dist2(&poly, p);
            }
        }
        4.0 * reach2 * (1.0 + 1e-9)
    });
    assert!(poly.len() >= 3, "Voronoi cell of nucleus {i} degenerated");
    Ok(CellPolygon { nucleus: i, vertices: poly })
}

/// Reference implementation: clips by all `N − 1` bisectors in rank order.
pub fn voronoi_cell_naive(config: &PointConfiguration, i: usize, window: &Region) -> Result<CellPolygon> {
    check_nucleus(config, i)?;
    let p = config.point(i);
    let mut others: Vec<(f64, usize)> =
        (0..config.len()).filter(|&j| j != i).map(|j| (dist2(config.point(j), p), j)).collect();
    others.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then_with(|| lex_cmp(config.point(a.1), config.point(b.1)))
            .then(a.1.cmp(&b.1))
    });
    let mut poly = window_corners(window)?;
    for (_, j) in others {
        if let Some(next) = clip_bisector(&poly, p, config.point(j)) {
            poly = next;
        }
    }
    assert!(poly.len() >= 3, "Voronoi cell of nucleus {i} degenerated");
    Ok(CellPolygon { nucleus: i, vertices: poly })
}

/// All cells of the tessellation, in nucleus order.
pub fn voronoi_cells(config: &PointConfiguration, window: &Region) -> Result<Vec<CellPolygon>> {
    if config.is_empty() {
        return Ok(Vec::new());
    }
    check_nucleus(config, 0)?;
    let index = SpatialIndex::new(config);
    (0..config.len()).map(|i| voronoi_cell_indexed(&index, i, window)).collect()
}

/// Index of the nucleus closest to `x` under the neighbour tie rule.
pub fn nearest_nucleus(index: &SpatialIndex<'_>, x: &[f64]) -> Option<usize> {
    index.knn(x, 1, false).first().copied()
}
