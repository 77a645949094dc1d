//! Dealiased pointwise products by zero padding.
//!
//! Quadratic products are evaluated on a `3N/2` grid and cubic ones on a `2N`
//! grid; both are exact for coefficients with `|xi_i| < N/2` and the result is
//! truncated back to that band. Nyquist inputs are dropped.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft;
use crate::field::SpectralField;
use crate::grid::{ensure_same, GridSpec};

struct Padding {
    dims: Vec<usize>,
    /// N-grid flat index -> padded flat index, `None` on Nyquist sites.
    map: Vec<Option<usize>>,
}

impl Padding {
    fn new(grid: &GridSpec, factor_num: usize, factor_den: usize) -> Self {
        let n = grid.points();
        let m = n * factor_num / factor_den;
        let d = grid.dim();
        let map = (0..grid.len())
            .map(|flat| {
                let multi = grid.multi_index(flat);
                let mut idx = 0usize;
                for &i in &multi[..d] {
                    if i == n / 2 {
                        return None;
                    }
                    let k = grid.axis_frequency(i);
                    let j = if k >= 0 { k as usize } else { (m as i64 + k) as usize };
                    idx = idx * m + j;
                }
                Some(idx)
            })
            .collect();
        Self { dims: vec![m; d], map }
    }

    fn padded_len(&self) -> usize {
        self.dims.iter().product()
    }

    fn to_padded_physical(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let mut buf = vec![Complex64::default(); self.padded_len()];
        for (c, slot) in coeffs.iter().zip(&self.map) {
            if let Some(j) = slot {
                buf[*j] = *c;
            }
        }
        fft::transform(&mut buf, &self.dims, true);
        buf
    }

    fn to_coefficients(&self, mut buf: Vec<Complex64>) -> Vec<Complex64> {
        fft::transform(&mut buf, &self.dims, false);
        let scale = 1.0 / self.padded_len() as f64;
        self.map
            .iter()
            .map(|slot| slot.map_or(Complex64::default(), |j| buf[j] * scale))
            .collect()
    }
}

fn padded_components(pad: &Padding, f: &SpectralField) -> Vec<Vec<Complex64>> {
    let len = f.grid().len();
    f.spectral()
        .chunks(len)
        .map(|c| pad.to_padded_physical(c))
        .collect()
}

/// Bilinear form `out[o] = sum over (o, a, b) of f[a] * g[b]`.
fn bilinear(
    f: &SpectralField,
    g: &SpectralField,
    out_components: usize,
    terms: &[(usize, usize, usize)],
) -> Result<SpectralField> {
    ensure_same(f.grid(), g.grid())?;
    let grid = *f.grid();
    let pad = Padding::new(&grid, 3, 2);
    let fp = padded_components(&pad, f);
    let gp = padded_components(&pad, g);
    let plen = pad.padded_len();
    let mut out = Vec::with_capacity(out_components * grid.len());
    for o in 0..out_components {
        let mut acc = vec![Complex64::default(); plen];
        for &(_, a, b) in terms.iter().filter(|t| t.0 == o) {
            for ((s, x), y) in acc.iter_mut().zip(&fp[a]).zip(&gp[b]) {
                *s += x * y;
            }
        }
        out.extend(pad.to_coefficients(acc));
    }
    SpectralField::from_spectral(grid, out_components, out)
}

/// Dealiased product. A scalar factor multiplies every component of the
/// other; equal component counts multiply componentwise.
pub fn pointwise_product(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    let (cf, cg) = (f.components(), g.components());
    if cf == 1 {
        let terms: Vec<_> = (0..cg).map(|i| (i, 0, i)).collect();
        bilinear(f, g, cg, &terms)
    } else if cg == 1 {
        let terms: Vec<_> = (0..cf).map(|i| (i, i, 0)).collect();
        bilinear(f, g, cf, &terms)
    } else if cf == cg {
        let terms: Vec<_> = (0..cf).map(|i| (i, i, i)).collect();
        bilinear(f, g, cf, &terms)
    } else {
        Err(Error::ComponentMismatch(format!(
            "cannot multiply {cf}- and {cg}-component fields pointwise"
        )))
    }
}

/// Dealiased contraction `out_i = sum_j f_j g_{j*c + i}` for an `m`-component
/// `f` and an `m*c`-component `g`. With `g = grad u` laid out as `d_j u_i`
/// this is `(f . grad) u`.
pub fn contract(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    let m = f.components();
    if g.components() % m != 0 {
        return Err(Error::ComponentMismatch(format!(
            "contraction of {m} with {} components",
            g.components()
        )));
    }
    let c = g.components() / m;
    let terms: Vec<_> = (0..c)
        .flat_map(|i| (0..m).map(move |j| (i, j, j * c + i)))
        .collect();
    bilinear(f, g, c, &terms)
}

/// Dealiased triple product of scalar fields on a `2N` padded grid.
pub fn triple_product(
    f: &SpectralField,
    g: &SpectralField,
    h: &SpectralField,
) -> Result<SpectralField> {
    ensure_same(f.grid(), g.grid())?;
    ensure_same(f.grid(), h.grid())?;
    if f.components() != 1 || g.components() != 1 || h.components() != 1 {
        return Err(Error::ComponentMismatch("triple product takes scalar fields".into()));
    }
    let grid = *f.grid();
    let pad = Padding::new(&grid, 2, 1);
    let a = pad.to_padded_physical(&f.spectral());
    let b = pad.to_padded_physical(&g.spectral());
    let c = pad.to_padded_physical(&h.spectral());
    let prod: Vec<_> = a.iter().zip(&b).zip(&c).map(|((x, y), z)| x * y * z).collect();
    SpectralField::from_spectral(grid, 1, pad.to_coefficients(prod))
}

/// Plain grid product without padding: the quantization of a multiplication
/// operator evaluated at the samples.
pub fn grid_product(f: &SpectralField, g: &SpectralField) -> Result<SpectralField> {
    ensure_same(f.grid(), g.grid())?;
    let len = f.grid().len();
    let (cf, cg) = (f.components(), g.components());
    if cf != 1 && cg != 1 && cf != cg {
        return Err(Error::ComponentMismatch(format!(
            "cannot multiply {cf}- and {cg}-component fields pointwise"
        )));
    }
    let comps = cf.max(cg);
    let (a, b) = (f.physical(), g.physical());
    let mut out = Vec::with_capacity(comps * len);
    for c in 0..comps {
        let fa = &a[(c % cf) * len..][..len];
        let gb = &b[(c % cg) * len..][..len];
        out.extend(fa.iter().zip(gb).map(|(x, y)| x * y));
    }
    SpectralField::from_physical(*f.grid(), comps, out)
}
