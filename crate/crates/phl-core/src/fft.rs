//! Axis-wise FFT driver for row-major buffers.
//!
//! Plans are created per call and reused across all lanes of the axis;
//! scratch space is per-invocation, so concurrent calls never share state.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Visit every 1-d lane along `axis` of a row-major array of the given shape,
/// yielding `(base, stride)` so the lane elements are `base + k * stride`.
pub(crate) fn for_each_lane<F>(shape: &[usize], axis: usize, mut visit: F)
where
    F: FnMut(usize, usize),
{
    let n_axis = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    for o in 0..outer {
        for i in 0..inner {
            visit(o * n_axis * inner + i, inner);
        }
    }
}

/// In-place DFT along one axis. Forward is the unnormalized
/// `sum_k f_k e^(-2 pi i k m / n)`; inverse divides by `n`.
pub(crate) fn dft_axis(values: &mut [Complex64], shape: &[usize], axis: usize, inverse: bool) {
    let n = shape[axis];
    let mut planner = FftPlanner::<f64>::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let inner: usize = shape[axis + 1..].iter().product();

    if inner == 1 {
        for lane in values.chunks_exact_mut(n) {
            fft.process_with_scratch(lane, &mut scratch);
        }
    } else {
        let mut lane = vec![Complex64::default(); n];
        for_each_lane(shape, axis, |base, stride| {
            for k in 0..n {
                lane[k] = values[base + k * stride];
            }
            fft.process_with_scratch(&mut lane, &mut scratch);
            for k in 0..n {
                values[base + k * stride] = lane[k];
            }
        });
    }

    if inverse {
        let scale = 1.0 / n as f64;
        for v in values.iter_mut() {
            *v *= scale;
        }
    }
}
