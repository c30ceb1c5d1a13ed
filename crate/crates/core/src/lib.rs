//! A laboratory for approximate policy iteration on finite discounted MDPs.
//!
//! The crate builds exact finite-MDP machinery (kernels, Bellman operators,
//! certified linear solves, occupancy measures), random Garnet benchmark
//! problems, a controllable approximate greedy operator with exactly measured
//! errors, four policy-search loops (DPI, CPI with adaptive/fixed/line-search
//! steps, and NSDPI), concentrability coefficients with certified truncation
//! intervals, and a verifier that checks every performance bound against the
//! recorded traces.
//!
//! With the default `parallel` feature, sweeps and per-target concentrability
//! inductions fan out over rayon; disabling it swaps in sequential loops with
//! identical outputs.

pub mod algorithms;
pub mod bounds;
pub mod concentrability;
pub mod error;
pub mod garnet;
pub mod greedy;
pub mod linalg;
pub mod mdp;
pub mod parallel;
pub mod plot;
pub mod rng;
pub mod sweep;
pub mod trace;

pub use error::{Error, Result};
