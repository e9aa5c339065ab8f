use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigurationError {
    #[error("dimension must be 1 or 2, got {0}")]
    BadDimension(usize),
    #[error("coordinate buffer of length {len} is not a multiple of dimension {dim}")]
    Ragged { len: usize, dim: usize },
}

/// A finite labeled point set in dimension 1 or 2.
///
/// Coordinates are stored flat, point `i` occupying
/// `coords[i * dim..(i + 1) * dim]`. The label of a point is its index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    dim: usize,
    coords: Vec<f64>,
}

impl Configuration {
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self, ConfigurationError> {
        if dim != 1 && dim != 2 {
            return Err(ConfigurationError::BadDimension(dim));
        }
        if coords.len() % dim != 0 {
            return Err(ConfigurationError::Ragged { len: coords.len(), dim });
        }
        Ok(Self { dim, coords })
    }

    pub fn line(xs: Vec<f64>) -> Self {
        Self { dim: 1, coords: xs }
    }

    pub fn plane(points: &[[f64; 2]]) -> Self {
        Self {
            dim: 2,
            coords: points.iter().flat_map(|p| p.iter().copied()).collect(),
        }
    }

    pub fn empty(dim: usize) -> Self {
        Self { dim, coords: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn coords_mut(&mut self) -> &mut [f64] {
        &mut self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// Euclidean norm of point `i`.
    pub fn radius(&self, i: usize) -> f64 {
        self.point(i).iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn max_radius(&self) -> f64 {
        (0..self.len()).map(|i| self.radius(i)).fold(0.0, f64::max)
    }

    /// True when a 1-D configuration is strictly increasing in label order.
    pub fn is_strictly_increasing(&self) -> bool {
        self.dim == 1 && self.coords.windows(2).all(|w| w[0] < w[1])
    }

    /// Smallest pairwise distance, `+inf` for fewer than two points.
    pub fn min_gap(&self) -> f64 {
        let n = self.len();
        let mut best = f64::INFINITY;
        if self.dim == 1 {
            let mut xs = self.coords.clone();
            xs.sort_by(f64::total_cmp);
            for w in xs.windows(2) {
                best = best.min(w[1] - w[0]);
            }
            return best;
        }
        for i in 0..n {
            for j in i + 1..n {
                best = best.min(distance(self.point(i), self.point(j)));
            }
        }
        best
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }

    /// Reorders the labels: point `k` of the result is point `perm[k]` of `self`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut coords = Vec::with_capacity(self.coords.len());
        for &p in perm {
            coords.extend_from_slice(self.point(p));
        }
        Self { dim: self.dim, coords }
    }
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert_eq!(
            Configuration::from_flat(3, vec![0.0; 3]),
            Err(ConfigurationError::BadDimension(3))
        );
        assert_eq!(
            Configuration::from_flat(2, vec![0.0; 3]),
            Err(ConfigurationError::Ragged { len: 3, dim: 2 })
        );
    }

    #[test]
    fn min_gap_ignores_label_order() {
        let c = Configuration::line(vec![3.0, -1.0, 0.5]);
        assert_eq!(c.min_gap(), 1.5);
        assert!(!c.is_strictly_increasing());
        let p = Configuration::plane(&[[0.0, 0.0], [3.0, 4.0], [0.0, 1.0]]);
        assert_eq!(p.min_gap(), 1.0);
        assert_eq!(p.radius(1), 5.0);
    }

    #[test]
    fn permutation_moves_points() {
        let c = Configuration::plane(&[[0.0, 1.0], [2.0, 3.0]]);
        let p = c.permuted(&[1, 0]);
        assert_eq!(p.point(0), &[2.0, 3.0]);
        assert_eq!(p.point(1), &[0.0, 1.0]);
    }
}
