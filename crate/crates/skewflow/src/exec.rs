//! Sweep execution: data-parallel with rayon by default, sequential when the
//! `parallel` feature is disabled.
//!
//! Per-item evaluation is pure; result order always matches input order, so
//! downstream reductions (max residual, argmax tuple) are deterministic
//! regardless of the execution mode.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Map `f` over `items`, preserving order.
pub(crate) fn sweep_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
