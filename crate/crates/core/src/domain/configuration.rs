use super::region::Region;
use crate::error::{Error, Result};

/// Finite simple point set in `R^d` together with the window it was generated on.
///
/// `scale_index` is `Some(n)` for a restriction `η_n ∩ Y` and `None` for an unscaled
/// master sample.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfiguration {
    coords: Vec<f64>,
    dim: usize,
    window: Region,
    scale_index: Option<u64>,
    master_seed: u64,
}

impl PointConfiguration {
    pub fn new(points: Vec<Vec<f64>>, window: Region, scale_index: Option<u64>, master_seed: u64) -> Result<Self> {
        let dim = window.dim();
        if let Some(bad) = points.iter().position(|p| p.len() != dim) {
            return Err(Error::Domain(format!("point {bad} has the wrong dimension")));
        }
        Self::from_flat(points.concat(), window, scale_index, master_seed)
    }

    /// Builds a configuration from row-major coordinates.
    pub fn from_flat(coords: Vec<f64>, window: Region, scale_index: Option<u64>, master_seed: u64) -> Result<Self> {
        let dim = window.dim();
        if coords.len() % dim != 0 {
            return Err(Error::Domain("coordinate count is not a multiple of the dimension".into()));
        }
        if scale_index == Some(0) {
            return Err(Error::Domain("scale index must be positive".into()));
        }
        let cfg = PointConfiguration { coords, dim, window, scale_index, master_seed };
        for i in 0..cfg.len() {
            let p = cfg.point(i);
            if p.iter().any(|v| !v.is_finite()) || !cfg.window.contains(p) {
                return Err(Error::OutsideWindow { index: i });
            }
        }
        cfg.check_distinct()?;
        Ok(cfg)
    }

    /// Caller guarantees containment and distinctness.
    pub(crate) fn from_parts_unchecked(coords: Vec<f64>, window: Region, scale_index: Option<u64>, master_seed: u64) -> Self {
        let dim = window.dim();
        debug_assert_eq!(coords.len() % dim, 0);
        PointConfiguration { coords, dim, window, scale_index, master_seed }
    }

    pub fn empty(window: Region, scale_index: Option<u64>, master_seed: u64) -> Self {
        Self::from_parts_unchecked(Vec::new(), window, scale_index, master_seed)
    }

    fn check_distinct(&self) -> Result<()> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_unstable_by(|&a, &b| lex_cmp(self.point(a), self.point(b)));
        for w in order.windows(2) {
            if self.point(w[0]) == self.point(w[1]) {
                return Err(Error::DuplicatePoint(w[0].max(w[1])));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn window(&self) -> &Region {
        &self.window
    }

    pub fn scale_index(&self) -> Option<u64> {
        self.scale_index
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn position(&self, x: &[f64]) -> Option<usize> {
        self.points().position(|p| p == x)
    }

    /// `self ∪ {y}`; the new point gets the last index.
    pub fn with_point(&self, y: &[f64]) -> Result<Self> {
        if y.len() != self.dim {
            return Err(Error::Precondition("added point has the wrong dimension".into()));
        }
        if self.position(y).is_some() {
            return Err(Error::Precondition("added point already belongs to the configuration".into()));
        }
        if y.iter().any(|v| !v.is_finite()) || !self.window.contains(y) {
            return Err(Error::OutsideWindow { index: self.len() });
        }
        let mut coords = Vec::with_capacity(self.coords.len() + self.dim);
        coords.extend_from_slice(&self.coords);
        coords.extend_from_slice(y);
        Ok(Self::from_parts_unchecked(coords, self.window.clone(), self.scale_index, self.master_seed))
    }

    /// `self ∪ ys`, appended in order.
    pub fn with_points(&self, ys: &[Vec<f64>]) -> Result<Self> {
        ys.iter().try_fold(self.clone(), |acc, y| acc.with_point(y))
    }

    /// Points at the given indices, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Self {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        Self::from_parts_unchecked(coords, self.window.clone(), self.scale_index, self.master_seed)
    }

    pub fn with_scale_index(mut self, n: u64) -> Self {
        assert!(n > 0, "scale index must be positive");
        self.scale_index = Some(n);
        self
    }
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}
