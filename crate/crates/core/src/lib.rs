//! Intoxication detection from wearable gait recordings.
//!
//! Each subject walks twice, before and after drinking. Both sessions are
//! windowed, resampled to a common rate and smoothed; four feature families
//! are extracted per axis and device; the after-minus-before difference
//! vector is labeled with the subject's breath alcohol concentration and fed
//! to tree ensembles or Lasso under leave-one-subject-out evaluation.

#[cfg(feature = "cli")]
pub mod cli;
pub mod datamodel;
pub mod error;
pub mod eval;
pub mod features;
pub mod models;
pub mod signal;
pub mod synth;

pub use error::{Error, Result};

/// Order-preserving map, parallel when the `parallel` feature is on.
pub(crate) fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
