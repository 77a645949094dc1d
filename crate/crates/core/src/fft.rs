//! Multi-dimensional complex FFT over row-major buffers, one axis at a time.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(len)
        } else {
            p.plan_fft_forward(len)
        }
    })
}

/// Unnormalized transform of a row-major array of shape `dims`.
/// Forward uses `exp(-i x xi)`, inverse `exp(+i x xi)`.
pub(crate) fn transform(data: &mut [Complex64], dims: &[usize], inverse: bool) {
    let total: usize = dims.iter().product();
    debug_assert_eq!(total, data.len());
    let ndim = dims.len();
    for axis in 0..ndim {
        let len = dims[axis];
        if len == 1 {
            continue;
        }
        let fft = plan(len, inverse);
        let stride: usize = dims[axis + 1..].iter().product();
        if stride == 1 {
            fft.process(data);
            continue;
        }
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        let mut line = vec![Complex64::default(); len];
        let block = len * stride;
        for outer in 0..total / block {
            let base = outer * block;
            for inner in 0..stride {
                let start = base + inner;
                for (k, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + k * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (k, v) in line.iter().enumerate() {
                    data[start + k * stride] = *v;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_axis_transform_matches_direct_sum() {
        let dims = [4usize, 8usize];
        let input: Vec<Complex64> = (0..32)
            .map(|k| Complex64::new((k as f64).sin(), (k as f64 * 0.3).cos()))
            .collect();
        let mut out = input.clone();
        transform(&mut out, &dims, false);
        for a in 0..4 {
            for b in 0..8 {
                let mut acc = Complex64::default();
                for x in 0..4 {
                    for y in 0..8 {
                        let ph = -2.0 * std::f64::consts::PI
                            * ((a * x) as f64 / 4.0 + (b * y) as f64 / 8.0);
                        acc += input[x * 8 + y] * Complex64::from_polar(1.0, ph);
                    }
                }
                assert!((acc - out[a * 8 + b]).norm() < 1e-12);
            }
        }
    }
}
