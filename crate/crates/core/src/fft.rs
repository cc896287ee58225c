//! Multi-dimensional complex FFT over row-major arrays (last axis contiguous).

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

type Plans = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

thread_local! {
    static PLANS: RefCell<HashMap<usize, Plans>> = RefCell::new(HashMap::new());
}

fn plans(n: usize) -> Plans {
    PLANS.with(|cache| {
        cache
            .borrow_mut()
            .entry(n)
            .or_insert_with(|| {
                let mut planner = FftPlanner::new();
                (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
            })
            .clone()
    })
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum Direction {
    Forward,
    Inverse,
}

/// In-place transform of an `n^dim` array. The inverse is normalized by `n^dim`.
pub(crate) fn transform(data: &mut [Complex64], n: usize, dim: usize, direction: Direction) {
    debug_assert_eq!(data.len(), n.pow(dim as u32));
    let (fwd, inv) = plans(n);
    let plan = match direction {
        Direction::Forward => fwd,
        Direction::Inverse => inv,
    };

    // Last axis: contiguous runs, rustfft processes every chunk of length n.
    plan.process(data);

    let mut line = vec![Complex64::new(0.0, 0.0); n];
    for axis in 0..dim.saturating_sub(1) {
        let stride = n.pow((dim - 1 - axis) as u32);
        let block = stride * n;
        for base in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let start = base + offset;
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = data[start + i * stride];
                }
                plan.process(&mut line);
                for (i, value) in line.iter().enumerate() {
                    data[start + i * stride] = *value;
                }
            }
        }
    }

    if direction == Direction::Inverse {
        let scale = 1.0 / data.len() as f64;
        for value in data.iter_mut() {
            *value *= scale;
        }
    }
}
