//! Dyadic grids, Muckenhoupt weights, level-set functionals and wavelet
//! systems for checking weighted weak-type gradient inequalities numerically.

pub mod bsvy;
pub mod cddd;
pub mod error;
pub mod experiments;
pub mod funcspace;
pub mod grid;
pub mod quad;
pub mod report;
pub mod wavelet;
pub mod weights;

pub use error::{Error, Result};

#[cfg(feature = "parallel")]
pub(crate) fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T: Sync, U: Send>(items: &[T], f: impl Fn(&T) -> U + Sync + Send) -> Vec<U> {
    items.iter().map(f).collect()
}
