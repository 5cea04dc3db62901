use crate::domain::PointConfiguration;
use crate::error::{Error, Result};
use crate::spatial::SpatialIndex;

#[inline]
fn edge_weight(d2: f64, m: f64) -> f64 {
    if m == 0.0 {
        1.0
    } else if m == 2.0 {
        d2
    } else if m == 1.0 {
        d2.sqrt()
    } else {
        d2.sqrt().powf(m)
    }
}

fn neighbours(index: &SpatialIndex<'_>, i: usize, k: usize) -> Vec<(f64, usize)> {
    index.knn_with_dist(index.config().point(i), k, true)
}

fn score_from(i: usize, own: &[(f64, usize)], m: f64, is_mutual: impl Fn(usize, usize) -> bool) -> f64 {
    own.iter()
        .map(|&(d2, j)| {
            let w = edge_weight(d2, m);
            if is_mutual(i, j) {
                0.5 * w
            } else {
                w
            }
        })
        .sum()
}

/// `Σ_{y ∈ V_k(x)} ρ^{(m)}(x, y)` for `x = p_i`, where mutual kNN edges count half.
/// With fewer than `k` other points, `V_k(x)` is all of them.
pub fn knn_score(config: &PointConfiguration, i: usize, k: usize, m: f64) -> Result<f64> {
    if config.len() < 2 {
        return Err(Error::DegenerateScore("kNN score needs at least two points".into()));
    }
    let index = SpatialIndex::new(config);
    let own = neighbours(&index, i, k);
    let lists: Vec<Vec<(f64, usize)>> = own.iter().map(|&(_, j)| neighbours(&index, j, k)).collect();
    Ok(score_from(i, &own, m, |i, j| {
        let pos = own.iter().position(|&(_, q)| q == j).expect("j is a neighbour of i");
        lists[pos].iter().any(|&(_, q)| q == i)
    }))
}

/// Scores of all points, sharing one index and one set of neighbour lists.
pub fn knn_scores(config: &PointConfiguration, k: usize, m: f64) -> Result<Vec<f64>> {
    if config.len() < 2 {
        return Err(Error::DegenerateScore("kNN score needs at least two points".into()));
    }
    let index = SpatialIndex::new(config);
    let lists: Vec<Vec<(f64, usize)>> = (0..config.len()).map(|i| neighbours(&index, i, k)).collect();
    Ok((0..config.len())
        .map(|i| score_from(i, &lists[i], m, |i, j| lists[j].iter().any(|&(_, q)| q == i)))
        .collect())
}
