//! Row-parallel field evaluation.
//!
//! Each row is filled by [`FieldEvaluator::fill_row`] with no cross-row
//! arithmetic, so the result is bitwise identical for any worker count.

use crate::Result;
use lissajous_core::fields::{FieldEvaluator, FieldGrid, Resolution, WaveField};
use lissajous_core::states::LissajousState;
use lissajous_core::Complex64;
use rayon::prelude::*;

/// Evaluates every row of `eval` on the current rayon pool.
pub fn evaluate(eval: &FieldEvaluator) -> Result<WaveField> {
    let grid = *eval.grid();
    let nx = grid.nx;
    let zero = Complex64::new(0.0, 0.0);
    let mut psi = vec![zero; grid.len()];
    let mut gx = vec![zero; grid.len()];
    let mut gy = vec![zero; grid.len()];
    psi.par_chunks_mut(nx)
        .zip(gx.par_chunks_mut(nx))
        .zip(gy.par_chunks_mut(nx))
        .enumerate()
        .for_each(|(j, ((p, x), y))| eval.fill_row(j, p, x, y));
    let mut field = WaveField::from_parts(grid, psi, gx, gy)?;
    field.resolved = eval.resolved();
    Ok(field)
}

pub fn eval_state(state: &LissajousState, grid: &FieldGrid, policy: Resolution) -> Result<WaveField> {
    evaluate(&FieldEvaluator::new(state, *grid, policy)?)
}

/// Runs `f` on a pool of `threads` workers, or on the global pool for `None`.
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}
