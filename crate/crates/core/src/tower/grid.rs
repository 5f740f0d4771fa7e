//! Lattice grids `G_n = {(k + i l)/n : |k + i l| <= n^2}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    n: usize,
    /// Extra truncation `|z| <= cap` on top of `|z| <= n`.
    cap: Option<f64>,
    points: Vec<Complex64>,
}

impl SpectralGrid {
    pub fn new(n: usize) -> Result<Self> {
        Self::truncated(n, None)
    }

    pub fn truncated(n: usize, cap: Option<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("grid index starts at 1".into()));
        }
        if let Some(c) = cap {
            if !(c >= 0.0) {
                return Err(Error::InvalidArgument("grid cap must be nonnegative".into()));
            }
        }
        let n2 = (n as i64).checked_mul(n as i64).ok_or(Error::Overflow("grid"))?;
        let radius = cap.map_or(n as f64, |c| c.min(n as f64));
        let kmax = (radius * n as f64).floor() as i64;
        let limit = n2 * n2;
        let mut points = Vec::new();
        for k in -kmax..=kmax {
            for l in -kmax..=kmax {
                let r2 = k * k + l * l;
                if r2 > limit {
                    continue;
                }
                let z = Complex64::new(k as f64 / n as f64, l as f64 / n as f64);
                if cap.map_or(true, |c| z.norm() <= c) {
                    points.push(z);
                }
            }
        }
        Ok(SpectralGrid { n, cap, points })
    }

    pub fn index(&self) -> usize {
        self.n
    }

    pub fn cap(&self) -> Option<f64> {
        self.cap
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Covering radius of the lattice: every plane point inside the grid's
    /// disk lies within this distance of a grid point.
    pub fn mesh(&self) -> f64 {
        std::f64::consts::FRAC_1_SQRT_2 / self.n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_counts() {
        assert_eq!(SpectralGrid::new(1).unwrap().len(), 5);
        // lattice points with k^2 + l^2 <= 16
        assert_eq!(SpectralGrid::new(2).unwrap().len(), 49);
        assert!(SpectralGrid::new(0).is_err());
    }

    #[test]
    fn truncation() {
        let g = SpectralGrid::truncated(4, Some(1.0)).unwrap();
        assert!(g.points().iter().all(|z| z.norm() <= 1.0));
        // k^2 + l^2 <= 16
        assert_eq!(g.len(), 49);
        assert!(g.points().contains(&Complex64::new(1.0, 0.0)));
    }
}
