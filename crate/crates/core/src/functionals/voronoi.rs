use super::VolumeMethod;
use crate::domain::{PointConfiguration, Region};
use crate::error::{Error, Result};
use crate::rng::{Purpose, RngStream};
use crate::spatial::{nearest_nucleus, voronoi_cell_2d, voronoi_cells, SpatialIndex};

/// Whole-tessellation quantities of the Voronoi approximation `A_n` of `A`.
#[derive(Debug, Clone, PartialEq)]
pub struct VoronoiMeasure {
    /// `ℓ(A_n)`, the volume of the union of cells whose nucleus lies in `A`.
    pub approx_volume: f64,
    /// `ℓ(A)`: exact for [`VolumeMethod::Exact2D`], estimated on the same quadrature
    /// nodes for [`VolumeMethod::MonteCarlo`].
    pub target_volume: f64,
    /// `ξ(x) = 1_A(x) ℓ(C(x) ∩ Aᶜ) − 1_{Aᶜ}(x) ℓ(C(x) ∩ A)` per nucleus.
    pub scores: Vec<f64>,
}

/// Quadrature nodes are tied to the realization (master seed, scale index) so that
/// adding a point re-uses the same nodes.
fn quadrature_stream(config: &PointConfiguration) -> RngStream {
    RngStream::tagged(config.master_seed(), Purpose::Quadrature, config.scale_index().unwrap_or(0))
}

impl VoronoiMeasure {
    pub fn compute(config: &PointConfiguration, a: &Region, method: VolumeMethod) -> Result<Self> {
        let window = config.window();
        match method {
            VolumeMethod::Exact2D => {
                if config.dim() != 2 {
                    return Err(Error::Method("exact Voronoi volumes are only available in two dimensions".into()));
                }
                let cells = voronoi_cells(config, window)?;
                let mut approx = 0.0;
                let mut scores = Vec::with_capacity(cells.len());
                for cell in &cells {
                    let inside = cell.area_within(a)?;
                    if a.contains(config.point(cell.nucleus)) {
                        let total = cell.area();
                        approx += total;
                        scores.push(total - inside);
                    } else {
                        scores.push(-inside);
                    }
                }
                Ok(VoronoiMeasure { approx_volume: approx, target_volume: a.volume(), scores })
            }
            VolumeMethod::MonteCarlo { quadrature_count } => {
                if quadrature_count == 0 {
                    return Err(Error::Method("quadrature count must be positive".into()));
                }
                let index = SpatialIndex::new(config);
                let mut rng = quadrature_stream(config).rng();
                let mut node = vec![0.0; config.dim()];
                let mut in_a = vec![0u64; config.len()];
                let mut out_a = vec![0u64; config.len()];
                let mut nodes_in_a = 0u64;
                for _ in 0..quadrature_count {
                    window.sample_point(&mut rng, &mut node);
                    let node_in_a = a.contains(&node);
                    nodes_in_a += node_in_a as u64;
                    if let Some(j) = nearest_nucleus(&index, &node) {
                        if node_in_a {
                            in_a[j] += 1;
                        } else {
                            out_a[j] += 1;
                        }
                    }
                }
                let w = window.volume() / quadrature_count as f64;
                let mut approx_nodes = 0u64;
                let scores = (0..config.len())
                    .map(|i| {
                        if a.contains(config.point(i)) {
                            approx_nodes += in_a[i] + out_a[i];
                            w * out_a[i] as f64
                        } else {
                            -w * in_a[i] as f64
                        }
                    })
                    .collect();
                Ok(VoronoiMeasure {
                    approx_volume: w * approx_nodes as f64,
                    target_volume: w * nodes_in_a as f64,
                    scores,
                })
            }
        }
    }
}

/// Score of nucleus `i`; the exact method computes only that cell.
pub fn voronoi_score(config: &PointConfiguration, i: usize, a: &Region, method: VolumeMethod) -> Result<f64> {
    if i >= config.len() {
        return Err(Error::Precondition(format!("point index {i} out of range")));
    }
    match method {
        VolumeMethod::Exact2D => {
            if config.dim() != 2 {
                return Err(Error::Method("exact Voronoi volumes are only available in two dimensions".into()));
            }
            let cell = voronoi_cell_2d(config, i, config.window())?;
            let inside = cell.area_within(a)?;
            Ok(if a.contains(config.point(i)) { cell.area() - inside } else { -inside })
        }
        VolumeMethod::MonteCarlo { .. } => Ok(VoronoiMeasure::compute(config, a, method)?.scores[i]),
    }
}

pub fn voronoi_scores(config: &PointConfiguration, a: &Region, method: VolumeMethod) -> Result<Vec<f64>> {
    Ok(VoronoiMeasure::compute(config, a, method)?.scores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn y() -> Region {
        Region::centered_unit_cube(2)
    }

    #[test]
    fn single_point_scores() {
        let a = Region::ball(vec![0.0, 0.0], 0.25).unwrap();
        let inside = PointConfiguration::new(vec![vec![0.0, 0.1]], y(), Some(1), 0).unwrap();
        assert_abs_diff_eq!(voronoi_score(&inside, 0, &a, VolumeMethod::Exact2D).unwrap(), 1.0 - a.volume(), epsilon = 1e-14);
        let outside = PointConfiguration::new(vec![vec![0.4, 0.4]], y(), Some(1), 0).unwrap();
        assert_abs_diff_eq!(voronoi_score(&outside, 0, &a, VolumeMethod::Exact2D).unwrap(), -a.volume(), epsilon = 1e-14);
    }

    #[test]
    fn box_target() {
        let a = Region::new_box(vec![-0.25, -0.25], vec![0.25, 0.25]).unwrap();
        let c = PointConfiguration::new(vec![vec![-0.2, 0.0], vec![0.2, 0.0]], y(), Some(1), 0).unwrap();
        // both nuclei in A; each cell is half of Y
        let m = VoronoiMeasure::compute(&c, &a, VolumeMethod::Exact2D).unwrap();
        assert_abs_diff_eq!(m.approx_volume, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m.scores[0], 0.5 - 0.125, epsilon = 1e-14);
    }
}
