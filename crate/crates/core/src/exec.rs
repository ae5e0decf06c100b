//! Data-parallel map with a sequential fallback.
//!
//! Every parallel region in the crate goes through [`map_indexed`], which
//! returns the per-index results in index order. Reductions are performed
//! afterwards by the caller with a fixed summation tree, so results do not
//! depend on the number of worker threads.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Exec {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled; sequential otherwise.
    #[default]
    Parallel,
}

impl Exec {
    pub fn is_parallel_available() -> bool {
        cfg!(feature = "parallel")
    }
}

pub fn map_indexed<T, F>(exec: Exec, len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Exec::Parallel => {
            use rayon::prelude::*;
            (0..len).into_par_iter().map(f).collect()
        }
        _ => (0..len).map(f).collect(),
    }
}
