use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 4;

/// Uniform periodic grid on the torus `[0, 2pi)^dim` with `points` samples per axis.
///
/// Flat indices are row-major (last axis fastest). The frequency attached to
/// axis index `i` is `i` for `i < N/2` and `i - N` otherwise, so the Nyquist
/// mode sits at `-N/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    points: usize,
}

impl GridSpec {
    pub const MIN_POINTS: usize = 16;

    pub fn new(dim: usize, points: usize) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::InvalidGrid(format!(
                "dimension {dim} not in 1..={MAX_DIM}"
            )));
        }
        if points < Self::MIN_POINTS || !points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "points per axis must be a power of two >= {}, got {points}",
                Self::MIN_POINTS
            )));
        }
        let total = (points as u128).pow(dim as u32);
        if total > (1u128 << 31) {
            return Err(Error::InvalidGrid(format!(
                "{points}^{dim} samples is beyond the supported size"
            )));
        }
        Ok(Self { dim, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Total number of lattice sites, `N^dim`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn nyquist(&self) -> usize {
        self.points / 2
    }

    /// Signed lattice frequency of an axis index.
    #[inline]
    pub fn axis_frequency(&self, i: usize) -> i64 {
        let n = self.points;
        if i < n / 2 {
            i as i64
        } else {
            i as i64 - n as i64
        }
    }

    /// Axis index holding a signed frequency, if it is addressable.
    pub fn axis_index(&self, freq: i64) -> Option<usize> {
        let half = (self.points / 2) as i64;
        if freq < -half || freq >= half {
            return None;
        }
        Some(if freq >= 0 {
            freq as usize
        } else {
            (freq + self.points as i64) as usize
        })
    }

    #[inline]
    pub fn multi_index(&self, mut flat: usize) -> [usize; MAX_DIM] {
        let mut out = [0usize; MAX_DIM];
        for axis in (0..self.dim).rev() {
            out[axis] = flat % self.points;
            flat /= self.points;
        }
        out
    }

    #[inline]
    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi[..self.dim]
            .iter()
            .fold(0usize, |acc, &i| acc * self.points + i)
    }

    /// Lattice frequency vector of a flat index (unused axes are zero).
    #[inline]
    pub fn frequency(&self, flat: usize) -> [f64; MAX_DIM] {
        let m = self.multi_index(flat);
        let mut xi = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            xi[axis] = self.axis_frequency(m[axis]) as f64;
        }
        xi
    }

    /// Physical coordinate `x = 2 pi i / N` of a flat index.
    #[inline]
    pub fn point(&self, flat: usize) -> [f64; MAX_DIM] {
        let m = self.multi_index(flat);
        let h = 2.0 * PI / self.points as f64;
        let mut x = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            x[axis] = h * m[axis] as f64;
        }
        x
    }

    /// True when any axis sits on the Nyquist index `N/2`.
    #[inline]
    pub fn is_nyquist(&self, flat: usize) -> bool {
        let m = self.multi_index(flat);
        m[..self.dim].iter().any(|&i| i == self.points / 2)
    }

    /// Euclidean norms `|xi|` for every flat index.
    pub fn frequency_norms(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| norm(&self.frequency(i)[..self.dim]))
            .collect()
    }

    /// Largest `|xi|` on the lattice (all axes at the Nyquist frequency).
    pub fn max_frequency_norm(&self) -> f64 {
        (self.points as f64 / 2.0) * (self.dim as f64).sqrt()
    }

    /// Distance from a grid point to the origin in the periodic metric.
    #[inline]
    pub fn periodic_radius(&self, flat: usize) -> f64 {
        let x = self.point(flat);
        let mut s = 0.0;
        for &xa in &x[..self.dim] {
            let w = wrap_centered(xa);
            s += w * w;
        }
        s.sqrt()
    }

    pub fn label(&self) -> String {
        format!("{}d/N={}", self.dim, self.points)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Representative of `x` modulo `2 pi` in `[-pi, pi)`.
#[inline]
pub fn wrap_centered(x: f64) -> f64 {
    let t = (x + PI).rem_euclid(2.0 * PI);
    t - PI
}

#[inline]
pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

pub(crate) fn ensure_same(a: &GridSpec, b: &GridSpec) -> Result<()> {
    if a != b {
        return Err(Error::GridMismatch {
            left: a.label(),
            right: b.label(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_or_odd_grids() {
        assert!(GridSpec::new(2, 8).is_err());
        assert!(GridSpec::new(2, 24).is_err());
        assert!(GridSpec::new(0, 16).is_err());
        assert!(GridSpec::new(5, 16).is_err());
        assert!(GridSpec::new(3, 16).is_ok());
    }

    #[test]
    fn frequency_layout() {
        let g = GridSpec::new(1, 16).unwrap();
        assert_eq!(g.axis_frequency(0), 0);
        assert_eq!(g.axis_frequency(7), 7);
        assert_eq!(g.axis_frequency(8), -8);
        assert_eq!(g.axis_frequency(15), -1);
        assert!(g.is_nyquist(8));
        assert_eq!(g.axis_index(-1), Some(15));
        assert_eq!(g.axis_index(8), None);
    }

    #[test]
    fn flat_and_multi_index_agree() {
        let g = GridSpec::new(3, 16).unwrap();
        for flat in [0, 1, 17, 300, g.len() - 1] {
            let m = g.multi_index(flat);
            assert_eq!(g.flat_index(&m), flat);
        }
    }

    #[test]
    fn wrap_is_centered() {
        assert!((wrap_centered(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((wrap_centered(0.25) - 0.25).abs() < 1e-15);
    }
}
