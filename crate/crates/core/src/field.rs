//! Complex fields on the periodic grid with a physical and/or a frequency
//! representation.
//!
//! Frequency coefficients are Fourier-series coefficients,
//! `f(x) = sum_xi fhat(xi) e^{i x.xi}`, so `fhat = N^{-n} * DFT(f)`. With the
//! normalized measure `dx / (2 pi)^n` used by [`lp_norm`] this makes the
//! transform an isometry between `L^2` and `l^2`.

use std::borrow::Cow;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::grid::{ensure_same, GridSpec, MAX_DIM};

#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: GridSpec,
    components: usize,
    physical: Option<Vec<Complex64>>,
    spectral: Option<Vec<Complex64>>,
}

impl SpectralField {
    fn check_len(grid: &GridSpec, components: usize, len: usize) -> Result<()> {
        if components == 0 {
            return Err(Error::ComponentMismatch("a field needs at least one component".into()));
        }
        if len != components * grid.len() {
            return Err(Error::ComponentMismatch(format!(
                "expected {} values for {} component(s) on {}, got {len}",
                components * grid.len(),
                components,
                grid
            )));
        }
        Ok(())
    }

    /// Field from physical samples, component-major.
    pub fn from_physical(grid: GridSpec, components: usize, values: Vec<Complex64>) -> Result<Self> {
        Self::check_len(&grid, components, values.len())?;
        Ok(Self {
            grid,
            components,
            physical: Some(values),
            spectral: None,
        })
    }

    /// Field from Fourier coefficients, component-major.
    pub fn from_spectral(grid: GridSpec, components: usize, values: Vec<Complex64>) -> Result<Self> {
        Self::check_len(&grid, components, values.len())?;
        Ok(Self {
            grid,
            components,
            physical: None,
            spectral: Some(values),
        })
    }

    pub fn zeros(grid: GridSpec, components: usize) -> Self {
        let n = grid.len() * components.max(1);
        Self {
            grid,
            components: components.max(1),
            physical: Some(vec![Complex64::default(); n]),
            spectral: Some(vec![Complex64::default(); n]),
        }
    }

    pub fn constant(grid: GridSpec, value: Complex64) -> Self {
        let mut spec = vec![Complex64::default(); grid.len()];
        spec[0] = value;
        Self {
            grid,
            components: 1,
            physical: Some(vec![value; grid.len()]),
            spectral: Some(spec),
        }
    }

    /// Scalar field sampled from a function of the physical coordinate.
    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> Complex64) -> Self {
        let d = grid.dim();
        let values = (0..grid.len()).map(|i| f(&grid.point(i)[..d])).collect();
        Self {
            grid,
            components: 1,
            physical: Some(values),
            spectral: None,
        }
    }

    /// `e^{i xi.x}` for an addressable lattice frequency.
    pub fn plane_wave(grid: GridSpec, freq: &[i64]) -> Result<Self> {
        if freq.len() != grid.dim() {
            return Err(Error::InvalidParams(format!(
                "frequency has {} entries on a {}-d grid",
                freq.len(),
                grid.dim()
            )));
        }
        let mut multi = [0usize; MAX_DIM];
        for (axis, &k) in freq.iter().enumerate() {
            multi[axis] = grid.axis_index(k).ok_or_else(|| {
                Error::InvalidParams(format!("frequency {k} is not addressable on {grid}"))
            })?;
        }
        let mut spec = vec![Complex64::default(); grid.len()];
        spec[grid.flat_index(&multi)] = Complex64::new(1.0, 0.0);
        Self::from_spectral(grid, 1, spec)
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn has_physical(&self) -> bool {
        self.physical.is_some()
    }

    pub fn has_spectral(&self) -> bool {
        self.spectral.is_some()
    }

    pub fn physical(&self) -> Cow<'_, [Complex64]> {
        match &self.physical {
            Some(v) => Cow::Borrowed(v),
            None => Cow::Owned(self.synthesize()),
        }
    }

    pub fn spectral(&self) -> Cow<'_, [Complex64]> {
        match &self.spectral {
            Some(v) => Cow::Borrowed(v),
            None => Cow::Owned(self.analyze()),
        }
    }

    pub fn into_physical(self) -> Vec<Complex64> {
        match self.physical {
            Some(v) => v,
            None => self.synthesize(),
        }
    }

    pub fn into_spectral(self) -> Vec<Complex64> {
        match self.spectral {
            Some(v) => v,
            None => self.analyze(),
        }
    }

    fn dims(&self) -> Vec<usize> {
        vec![self.grid.points(); self.grid.dim()]
    }

    fn analyze(&self) -> Vec<Complex64> {
        let mut data = self
            .physical
            .clone()
            .expect("field carries at least one representation");
        let len = self.grid.len();
        let dims = self.dims();
        let scale = 1.0 / len as f64;
        for chunk in data.chunks_mut(len) {
            fft::transform(chunk, &dims, false);
            for v in chunk.iter_mut() {
                *v *= scale;
            }
        }
        data
    }

    fn synthesize(&self) -> Vec<Complex64> {
        let mut data = self
            .spectral
            .clone()
            .expect("field carries at least one representation");
        let len = self.grid.len();
        let dims = self.dims();
        for chunk in data.chunks_mut(len) {
            fft::transform(chunk, &dims, true);
        }
        data
    }

    /// Same field with the frequency representation populated.
    pub fn forward_transform(&self) -> Self {
        let mut out = self.clone();
        if out.spectral.is_none() {
            out.spectral = Some(self.analyze());
        }
        out
    }

    /// Same field with the physical representation populated.
    pub fn inverse_transform(&self) -> Self {
        let mut out = self.clone();
        if out.physical.is_none() {
            out.physical = Some(self.synthesize());
        }
        out
    }

    /// Copy holding only the frequency representation.
    pub fn spectral_only(&self) -> Self {
        Self {
            grid: self.grid,
            components: self.components,
            physical: None,
            spectral: Some(self.spectral().into_owned()),
        }
    }

    pub fn component(&self, c: usize) -> Result<Self> {
        if c >= self.components {
            return Err(Error::ComponentMismatch(format!(
                "component {c} of a {}-component field",
                self.components
            )));
        }
        let len = self.grid.len();
        let take = |v: &Vec<Complex64>| v[c * len..(c + 1) * len].to_vec();
        Ok(Self {
            grid: self.grid,
            components: 1,
            physical: self.physical.as_ref().map(take),
            spectral: self.spectral.as_ref().map(take),
        })
    }

    /// Concatenate fields into one multi-component field.
    pub fn stack(parts: &[SpectralField]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::ComponentMismatch("nothing to stack".into()))?;
        let grid = first.grid;
        let mut values = Vec::new();
        let mut comps = 0;
        for p in parts {
            ensure_same(&grid, &p.grid)?;
            values.extend_from_slice(&p.spectral());
            comps += p.components;
        }
        Self::from_spectral(grid, comps, values)
    }

    /// Multiply every component's coefficients by a real multiplier indexed by lattice site.
    pub fn multiplied(&self, multiplier: &[f64]) -> Self {
        let len = self.grid.len();
        debug_assert_eq!(multiplier.len(), len);
        let mut spec = self.spectral().into_owned();
        for chunk in spec.chunks_mut(len) {
            for (v, &m) in chunk.iter_mut().zip(multiplier) {
                *v *= m;
            }
        }
        Self {
            grid: self.grid,
            components: self.components,
            physical: None,
            spectral: Some(spec),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        let map = |v: &Vec<Complex64>| v.iter().map(|a| a * factor).collect::<Vec<_>>();
        Self {
            grid: self.grid,
            components: self.components,
            physical: self.physical.as_ref().map(map),
            spectral: self.spectral.as_ref().map(map),
        }
    }

    fn combine(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        ensure_same(&self.grid, &other.grid)?;
        if self.components != other.components {
            return Err(Error::ComponentMismatch(format!(
                "{} vs {} components",
                self.components, other.components
            )));
        }
        let zip = |a: &[Complex64], b: &[Complex64]| {
            a.iter().zip(b).map(|(x, y)| op(*x, *y)).collect::<Vec<_>>()
        };
        let (physical, spectral) = match (&self.spectral, &other.spectral, &self.physical, &other.physical) {
            (Some(a), Some(b), _, _) => (None, Some(zip(a, b))),
            (_, _, Some(a), Some(b)) => (Some(zip(a, b)), None),
            _ => (None, Some(zip(&self.spectral(), &other.spectral()))),
        };
        Ok(Self {
            grid: self.grid,
            components: self.components,
            physical,
            spectral,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, |a, b| a - b)
    }

    /// Pointwise Euclidean modulus across components, on the grid.
    pub fn magnitudes(&self) -> Vec<f64> {
        let len = self.grid.len();
        let phys = self.physical();
        let mut out = vec![0.0; len];
        for chunk in phys.chunks(len) {
            for (o, v) in out.iter_mut().zip(chunk) {
                *o += v.norm_sqr();
            }
        }
        out.iter_mut().for_each(|o| *o = o.sqrt());
        out
    }

    /// `l^2` norm of the Fourier coefficients (all components).
    pub fn coefficient_norm(&self) -> f64 {
        self.spectral().iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Mean of each component (the `xi = 0` coefficient).
    pub fn means(&self) -> Vec<Complex64> {
        let len = self.grid.len();
        self.spectral().chunks(len).map(|c| c[0]).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.magnitudes().into_iter().fold(0.0, f64::max)
    }
}

/// Check an integrability exponent lies in `[1, inf]`.
pub fn validate_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// Uniform-quadrature `L^p` norm against the normalized measure
/// `dx / (2 pi)^n`; `p = inf` gives the largest modulus.
pub fn lp_norm(f: &SpectralField, p: f64) -> Result<f64> {
    validate_exponent(p)?;
    Ok(lp_norm_of_magnitudes(&f.magnitudes(), p))
}

pub(crate) fn lp_norm_of_magnitudes(mags: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        return mags.iter().copied().fold(0.0, f64::max);
    }
    let scale = mags.iter().copied().fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let mean = mags.iter().map(|m| (m / scale).powf(p)).sum::<f64>() / mags.len() as f64;
    scale * mean.powf(1.0 / p)
}

/// `||a - b||_2 / ||b||_2` computed on coefficients.
pub fn relative_l2_error(a: &SpectralField, b: &SpectralField) -> Result<f64> {
    let diff = a.sub(b)?;
    let denom = b.coefficient_norm();
    let num = diff.coefficient_norm();
    Ok(if denom == 0.0 { num } else { num / denom })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_has_only_mean() {
        let g = GridSpec::new(2, 16).unwrap();
        let f = SpectralField::from_fn(g, |_| Complex64::new(1.0, 0.0)).forward_transform();
        let spec = f.spectral();
        assert!((spec[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(spec[1..].iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn norms_of_constants_and_waves() {
        let g = GridSpec::new(2, 16).unwrap();
        let c = SpectralField::constant(g, Complex64::new(-3.0, 4.0));
        let w = SpectralField::plane_wave(g, &[3, -2]).unwrap();
        for p in [1.0, 1.5, 2.0, 7.0, f64::INFINITY] {
            assert!((lp_norm(&c, p).unwrap() - 5.0).abs() < 1e-12);
            assert!((lp_norm(&w, p).unwrap() - 1.0).abs() < 1e-12);
        }
        assert!(matches!(lp_norm(&c, 0.5), Err(Error::InvalidExponent(_))));
    }

    #[test]
    fn add_requires_same_grid() {
        let a = SpectralField::zeros(GridSpec::new(1, 16).unwrap(), 1);
        let b = SpectralField::zeros(GridSpec::new(1, 32).unwrap(), 1);
        assert!(matches!(a.add(&b), Err(Error::GridMismatch { .. })));
    }
}
