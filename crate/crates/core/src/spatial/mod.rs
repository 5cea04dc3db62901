//! Grid-based neighbour queries and exact planar Voronoi cells.

mod index;
pub mod polygon;
mod voronoi;

pub use index::{knn_brute_force, range_brute_force, SpatialIndex};
pub use voronoi::{
    nearest_nucleus, voronoi_cell_2d, voronoi_cell_indexed, voronoi_cell_naive, voronoi_cells, CellPolygon,
};

use crate::domain::PointConfiguration;

/// Builds an index with the default cell edge, or `cell_edge` when given.
pub fn build_index(config: &PointConfiguration, cell_edge: Option<f64>) -> SpatialIndex<'_> {
    match cell_edge {
        Some(h) => SpatialIndex::with_cell_edge(config, h),
        None => SpatialIndex::new(config),
    }
}
