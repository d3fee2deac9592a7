//! Analysis toolkit for package dependency networks.
//!
//! The crate centers on [`DependencyGraph`], an immutable directed graph in
//! which an edge `u -> v` records that package `u` depends on package `v`.
//! Both adjacency directions are materialized so that dependency queries
//! (out-edges) and dependent queries (in-edges) are equally cheap, which the
//! failure simulations in [`robustness`] rely on.
//!
//! Everything here is deterministic: all randomized procedures take an
//! explicit 64-bit seed and drive a ChaCha20 stream, ties are broken by node
//! id, and floating-point reductions run in a fixed order. Repeated runs with
//! the same inputs produce identical results regardless of thread count.
//!
//! The crate is `no_std` (with `alloc`); IO, file formats and the command
//! line front end live in the companion `depnet-cli` crate. Enabling the
//! `parallel` feature lets a few read-only inner loops fan out over a rayon
//! pool without affecting results.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod centrality;
pub mod community;
mod error;
pub mod evolution;
pub mod generate;
pub mod graph;
mod parallel;
pub mod robustness;

pub use error::Error;
pub use graph::{ComponentLabeling, DependencyGraph, DroppedEdges, NodeId};

/// Crate-wide result type.
pub type Result<T> = core::result::Result<T, Error>;

/// Smallest integer `>= fraction * count`, computed without `f64::ceil`
/// (which is unavailable in `core`).
pub(crate) fn ceil_fraction(fraction: f64, count: usize) -> usize {
    let x = fraction * count as f64;
    let truncated = x as usize;
    if (truncated as f64) < x {
        truncated + 1
    } else {
        truncated
    }
}

#[cfg(test)]
mod tests {
    use super::ceil_fraction;

    #[test]
    fn ceil_fraction_matches_f64_ceil() {
        assert_eq!(ceil_fraction(0.5, 10), 5);
        assert_eq!(ceil_fraction(0.1, 782_332), 78_234);
        assert_eq!(ceil_fraction(1.0, 7), 7);
        assert_eq!(ceil_fraction(0.3, 1), 1);
        assert_eq!(ceil_fraction(0.0, 100), 0);
        for n in 0..500usize {
            for f in [0.01, 0.1, 0.25, 0.3333333, 0.5, 0.9, 1.0] {
                assert_eq!(ceil_fraction(f, n), (f * n as f64).ceil() as usize);
            }
        }
    }
}
