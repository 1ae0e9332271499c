use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid on `[-L, L]` with an odd number of nodes, so `x = 0` is a node.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    half_length: f64,
    points: usize,
}

impl Grid {
    pub fn new(half_length: f64, points: usize) -> Result<Self> {
        if !(half_length > 0.0) || !half_length.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "grid half-length must be positive, got {half_length}"
            )));
        }
        if points < 3 || points % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "grid needs an odd number of at least 3 points, got {points}"
            )));
        }
        Ok(Grid {
            half_length,
            points,
        })
    }

    /// Smallest odd grid on `[-L, L]` whose spacing does not exceed `h`.
    pub fn with_spacing(half_length: f64, h: f64) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidParameter(format!("grid spacing must be positive, got {h}")));
        }
        let intervals = (2.0 * half_length / h).ceil().max(2.0) as usize;
        let intervals = intervals + intervals % 2;
        Grid::new(half_length, intervals + 1)
    }

    pub fn half_length(&self) -> f64 {
        self.half_length
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn h(&self) -> f64 {
        2.0 * self.half_length / (self.points - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        (i as f64 - 0.5 * (self.points - 1) as f64) * self.h()
    }

    /// Midpoint between nodes `i` and `i + 1`.
    pub fn mid(&self, i: usize) -> f64 {
        (i as f64 + 0.5 - 0.5 * (self.points - 1) as f64) * self.h()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.points).map(|i| self.x(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_nodes() {
        let g = Grid::new(5.0, 11).unwrap();
        assert_eq!(g.h(), 1.0);
        assert_eq!(g.x(5), 0.0);
        assert_eq!(g.x(0), -5.0);
        assert_eq!(g.x(10), 5.0);
        assert_eq!(g.mid(4), -0.5);
    }

    #[test]
    fn spacing_rounds_to_odd() {
        let g = Grid::with_spacing(3.0, 0.07).unwrap();
        assert!(g.h() <= 0.07);
        assert_eq!(g.points() % 2, 1);
        assert!(Grid::new(1.0, 4).is_err());
        assert!(Grid::new(-1.0, 5).is_err());
    }
}
