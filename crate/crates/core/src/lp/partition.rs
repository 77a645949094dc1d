use crate::error::{Error, Result};
use crate::field::SpectralField;
use crate::grid::GridSpec;

/// Radius below which the low cap is identically one.
pub const CAP_INNER: f64 = 6.0 / 5.0;
/// Radius beyond which the low cap vanishes.
pub const CAP_OUTER: f64 = 5.0 / 3.0;

fn g(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

/// C-infinity step: 0 for `s <= 0`, 1 for `s >= 1`.
pub fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let a = g(s);
        a / (a + g(1.0 - s))
    }
}

/// Low-frequency cap profile: 1 on `t <= 6/5`, 0 on `t >= 5/3`.
pub fn cap(t: f64) -> f64 {
    1.0 - smooth_step((t - CAP_INNER) / (CAP_OUTER - CAP_INNER))
}

/// Shell profile as a function of `|xi|`: the cap for `j = 0`, and
/// `cap(|xi| / 2^j) - cap(|xi| / 2^(j-1))` otherwise.
pub fn profile(j: usize, radius: f64) -> f64 {
    if j == 0 {
        cap(radius)
    } else {
        let s = (j as f64).exp2();
        cap(radius / s) - cap(2.0 * radius / s)
    }
}

/// Closed annulus `[2^j 3/5, 2^j 5/3]` outside of which shell `j >= 1` vanishes.
pub fn ring_bounds(j: usize) -> (f64, f64) {
    let s = (j as f64).exp2();
    (0.6 * s, CAP_OUTER * s)
}

/// Dyadic partition of unity sampled on a grid's frequency lattice.
///
/// Shell 0 is the low cap. Shells run up to [`LpPartition::top`], the first
/// index whose cap covers every lattice frequency (Nyquist corners included),
/// so the profiles sum to one everywhere. [`LpPartition::resolved`] is the
/// last shell whose whole annulus fits below the Nyquist frequency of a
/// single axis.
#[derive(Debug, Clone)]
pub struct LpPartition {
    grid: GridSpec,
    top: usize,
    resolved: usize,
    /// `caps[j][i] = cap(|xi_i| / 2^j)`.
    caps: Vec<Vec<f64>>,
}

impl LpPartition {
    pub fn build(grid: GridSpec) -> Result<Self> {
        let max = grid.max_frequency_norm();
        let mut top = 0usize;
        while (top as f64).exp2() * CAP_INNER < max {
            top += 1;
        }
        let resolved = (grid.points().trailing_zeros() as usize).saturating_sub(2);
        if top < 3 {
            return Err(Error::TooFewShells(top));
        }
        let norms = grid.frequency_norms();
        let caps = (0..=top)
            .map(|j| {
                let s = (j as f64).exp2();
                norms.iter().map(|r| cap(r / s)).collect()
            })
            .collect();
        Ok(Self {
            grid,
            top,
            resolved,
            caps,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Highest shell index; shells `0..=top` partition the whole lattice.
    pub fn top(&self) -> usize {
        self.top
    }

    /// Largest `j` with `2^(j+1) <= N/2`.
    pub fn resolved(&self) -> usize {
        self.resolved
    }

    pub fn shell_count(&self) -> usize {
        self.top + 1
    }

    fn check(&self, j: usize) -> Result<()> {
        if j > self.top {
            return Err(Error::ShellOutOfRange {
                index: j,
                max: self.top,
            });
        }
        Ok(())
    }

    /// Values of shell `j` on the lattice.
    pub fn multiplier(&self, j: usize) -> Result<Vec<f64>> {
        self.window(j, j)
    }

    /// Sum of shells `lo..=hi` on the lattice (telescoped, so exact in the
    /// sense that it equals the sum of the individual profiles up to roundoff).
    /// `hi` is clipped to `top`; an empty window gives zeros.
    pub fn window(&self, lo: usize, hi: usize) -> Result<Vec<f64>> {
        self.check(lo)?;
        let hi = hi.min(self.top);
        let len = self.grid.len();
        if hi < lo {
            return Ok(vec![0.0; len]);
        }
        let upper = &self.caps[hi];
        Ok(if lo == 0 {
            upper.clone()
        } else {
            let lower = &self.caps[lo - 1];
            upper.iter().zip(lower).map(|(a, b)| a - b).collect()
        })
    }

    /// `P_j f`.
    pub fn project(&self, f: &SpectralField, j: usize) -> Result<SpectralField> {
        crate::grid::ensure_same(&self.grid, f.grid())?;
        Ok(f.multiplied(&self.multiplier(j)?))
    }

    /// `sum_{j = lo..=hi} P_j f`.
    pub fn project_window(&self, f: &SpectralField, lo: usize, hi: usize) -> Result<SpectralField> {
        crate::grid::ensure_same(&self.grid, f.grid())?;
        Ok(f.multiplied(&self.window(lo, hi)?))
    }

    /// `P_{a < . < b} f = sum_{j = a+1}^{b-1} P_j f`; `a = -1` includes the cap.
    pub fn project_range(&self, f: &SpectralField, a: i64, b: i64) -> Result<SpectralField> {
        let lo = (a + 1).max(0);
        let hi = b - 1;
        if hi < lo {
            crate::grid::ensure_same(&self.grid, f.grid())?;
            return Ok(SpectralField::zeros(self.grid, f.components()));
        }
        let hi = (hi as usize).min(self.top);
        let lo = lo as usize;
        if lo > self.top {
            return Ok(SpectralField::zeros(self.grid, f.components()));
        }
        self.project_window(f, lo, hi)
    }

    /// Largest deviation of the summed profiles from one over the lattice.
    pub fn partition_deviation(&self) -> f64 {
        let len = self.grid.len();
        let mut sum = vec![0.0; len];
        for j in 0..=self.top {
            let m = self.multiplier(j).expect("in range");
            for (s, v) in sum.iter_mut().zip(m) {
                *s += v;
            }
        }
        sum.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max)
    }
}
