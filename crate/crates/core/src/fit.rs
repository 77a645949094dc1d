//! Ordinary least-squares line fits used for decay and growth slopes.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub points: usize,
}

/// Fit `y = slope * x + intercept`. Needs at least two distinct abscissae.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Option<LineFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    Some(LineFit {
        slope,
        intercept,
        residual: (ss / n as f64).sqrt(),
        points: n,
    })
}

/// Slope of `log2 values[k]` against the shell index, over entries that are
/// positive and finite.
pub fn log2_slope(indices: &[usize], values: &[f64]) -> Option<LineFit> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = indices
        .iter()
        .zip(values)
        .filter(|(_, v)| v.is_finite() && **v > 0.0)
        .map(|(k, v)| (*k as f64, v.log2()))
        .unzip();
    fit_line(&xs, &ys)
}
