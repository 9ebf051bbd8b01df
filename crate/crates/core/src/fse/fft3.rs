//! Separable 3D FFT over flat buffers laid out with the first axis fastest.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use super::grid::Dims3;

#[derive(Clone)]
struct Plans {
    axes: [Arc<dyn Fft<f64>>; 3],
}

type PlanCache = (FftPlanner<f64>, HashMap<(Dims3, bool), Plans>);

thread_local! {
    static PLANNER: RefCell<PlanCache> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plans(dims: Dims3, direction: FftDirection) -> Plans {
    let inverse = direction == FftDirection::Inverse;
    PLANNER.with(|cell| {
        let mut guard = cell.borrow_mut();
        let (planner, cache) = &mut *guard;
        cache
            .entry((dims, inverse))
            .or_insert_with(|| Plans {
                axes: [
                    planner.plan_fft(dims.m, direction),
                    planner.plan_fft(dims.n, direction),
                    planner.plan_fft(dims.p, direction),
                ],
            })
            .clone()
    })
}

fn transform(data: &mut [Complex64], dims: Dims3, direction: FftDirection) {
    assert_eq!(data.len(), dims.len());
    let plans = plans(dims, direction);

    // first axis: contiguous rows
    plans.axes[0].process(data);

    let mut line = Vec::new();
    let mut scratch = Vec::new();
    for (axis, len, stride) in [(1, dims.n, dims.m), (2, dims.p, dims.m * dims.n)] {
        if len == 1 {
            continue;
        }
        let fft = &plans.axes[axis];
        scratch.resize(fft.get_inplace_scratch_len(), Complex64::default());
        line.resize(len, Complex64::default());
        let outer = dims.len() / (len * stride);
        for o in 0..outer {
            for s in 0..stride {
                let base = o * len * stride + s;
                for (i, v) in line.iter_mut().enumerate() {
                    *v = data[base + i * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, v) in line.iter().enumerate() {
                    data[base + i * stride] = *v;
                }
            }
        }
    }
}

/// In-place forward transform `X[k] = Σ x[j] exp(-2πi k·j / dims)`.
pub fn forward(data: &mut [Complex64], dims: Dims3) {
    transform(data, dims, FftDirection::Forward);
}

/// In-place unnormalized inverse transform `x[j] = Σ X[k] exp(+2πi k·j / dims)`.
pub fn inverse_unnormalized(data: &mut [Complex64], dims: Dims3) {
    transform(data, dims, FftDirection::Inverse);
}

/// Embeds a real volume at the origin of a zero-filled grid.
pub fn embed_real(values: &[f64], dims: Dims3, grid: Dims3) -> Vec<Complex64> {
    let mut out = vec![Complex64::default(); grid.len()];
    for p in 0..dims.p {
        for n in 0..dims.n {
            let src = dims.index(0, n, p);
            let dst = grid.index(0, n, p);
            for m in 0..dims.m {
                out[dst + m] = Complex64::new(values[src + m], 0.0);
            }
        }
    }
    out
}
