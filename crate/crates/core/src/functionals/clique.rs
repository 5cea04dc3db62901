use crate::domain::PointConfiguration;
use crate::spatial::SpatialIndex;

/// Neighbour lists of the geometric graph with closed connection radius `radius`,
/// sorted ascending and without the vertex itself.
fn adjacency(config: &PointConfiguration, radius: f64) -> Vec<Vec<usize>> {
    let index = SpatialIndex::new(config);
    (0..config.len())
        .map(|i| {
            let mut nb = index.range(config.point(i), radius);
            nb.retain(|&j| j != i);
            nb
        })
        .collect()
}

fn intersect_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Number of `depth`-cliques among `cands` (all pairwise adjacent sets of that size).
fn count_in(adj: &[Vec<usize>], cands: &[usize], depth: usize) -> u64 {
    match depth {
        0 => 1,
        1 => cands.len() as u64,
        _ => cands
            .iter()
            .enumerate()
            .map(|(t, &c)| count_in(adj, &intersect_sorted(&cands[t + 1..], &adj[c]), depth - 1))
            .sum(),
    }
}

/// Calls `visit` on every `depth`-clique among `cands`, extending `stack`.
fn visit_in(adj: &[Vec<usize>], cands: &[usize], depth: usize, stack: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if depth == 0 {
        visit(stack);
        return;
    }
    for (t, &c) in cands.iter().enumerate() {
        stack.push(c);
        let next = intersect_sorted(&cands[t + 1..], &adj[c]);
        visit_in(adj, &next, depth - 1, stack, visit);
        stack.pop();
    }
}

/// `C_k`: the number of `(k+1)`-cliques of the geometric graph with radius `radius`.
pub fn clique_count(config: &PointConfiguration, k: usize, radius: f64) -> u64 {
    let adj = adjacency(config, radius);
    (0..config.len())
        .map(|v| {
            let higher: Vec<usize> = adj[v].iter().copied().filter(|&u| u > v).collect();
            count_in(&adj, &higher, k)
        })
        .sum()
}

/// Number of `(k+1)`-cliques containing `p_i`, divided by `k + 1` so that the scores
/// add up to `C_k`.
pub fn clique_score(config: &PointConfiguration, i: usize, k: usize, radius: f64) -> f64 {
    let index = SpatialIndex::new(config);
    let mut nb = index.range(config.point(i), radius);
    nb.retain(|&j| j != i);
    // adjacency restricted to the neighbourhood of i is all the recursion needs
    let mut adj = vec![Vec::new(); config.len()];
    for &j in &nb {
        adj[j] = index.range(config.point(j), radius).into_iter().filter(|&q| q != j).collect();
    }
    count_in(&adj, &nb, k) as f64 / (k + 1) as f64
}

pub fn clique_scores(config: &PointConfiguration, k: usize, radius: f64) -> Vec<f64> {
    let adj = adjacency(config, radius);
    let mut per_point = vec![0u64; config.len()];
    let mut stack = Vec::with_capacity(k + 1);
    for v in 0..config.len() {
        let higher: Vec<usize> = adj[v].iter().copied().filter(|&u| u > v).collect();
        stack.push(v);
        visit_in(&adj, &higher, k, &mut stack, &mut |clique| {
            for &u in clique {
                per_point[u] += 1;
            }
        });
        stack.pop();
    }
    per_point.into_iter().map(|c| c as f64 / (k + 1) as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Region;

    fn plane(points: &[[f64; 2]]) -> PointConfiguration {
        let w = Region::centered_unit_cube(2).scaled(10.0);
        PointConfiguration::new(points.iter().map(|p| p.to_vec()).collect(), w, Some(1), 0).unwrap()
    }

    #[test]
    fn triangle() {
        let c = plane(&[[0.0, 0.0], [1.0, 0.0], [0.5, 0.8]]);
        assert_eq!(clique_count(&c, 2, 1.0), 1);
        for i in 0..3 {
            assert_eq!(clique_score(&c, i, 2, 1.0), 1.0 / 3.0);
        }
        assert_eq!(clique_scores(&c, 2, 1.0), vec![1.0 / 3.0; 3]);
    }

    #[test]
    fn path() {
        let c = plane(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]);
        assert_eq!(clique_count(&c, 1, 1.0), 2);
        assert_eq!(clique_scores(&c, 1, 1.0).iter().sum::<f64>(), 2.0);
        assert_eq!(clique_count(&c, 2, 1.0), 0);
    }

    #[test]
    fn isolated_points() {
        let c = plane(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]);
        assert_eq!(clique_scores(&c, 1, 0.5), vec![0.0; 3]);
        assert_eq!(clique_count(&c, 3, 0.5), 0);
    }
}
