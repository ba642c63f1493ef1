use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(len, direction))
}

/// Unnormalised in-place n-dimensional DFT of a row-major cube of side `size`.
pub(crate) fn fft_nd(data: &mut [Complex64], dim: usize, size: usize, direction: FftDirection) {
    debug_assert_eq!(data.len(), size.pow(dim as u32));
    let fft = plan(size, direction);
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];

    // Last axis is contiguous.
    for line in data.chunks_exact_mut(size) {
        fft.process_with_scratch(line, &mut scratch);
    }

    // Strided axes: gather up to BATCH neighbouring lines at once so that the
    // reads along the contiguous direction stay cache-friendly.
    const BATCH: usize = 64;
    let mut buf = vec![Complex64::default(); size * BATCH];
    for axis in 0..dim - 1 {
        let stride = size.pow((dim - 1 - axis) as u32);
        let outer = size.pow(axis as u32);
        for o in 0..outer {
            let base = o * size * stride;
            let mut inner = 0;
            while inner < stride {
                let width = BATCH.min(stride - inner);
                for j in 0..size {
                    let row = &data[base + j * stride + inner..][..width];
                    for (b, v) in row.iter().enumerate() {
                        buf[b * size + j] = *v;
                    }
                }
                fft.process_with_scratch(&mut buf[..width * size], &mut scratch);
                for j in 0..size {
                    let row = &mut data[base + j * stride + inner..][..width];
                    for (b, v) in row.iter_mut().enumerate() {
                        *v = buf[b * size + j];
                    }
                }
                inner += width;
            }
        }
    }
}
