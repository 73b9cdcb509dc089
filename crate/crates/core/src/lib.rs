//! Algorithmic core: Parisi functional evaluation and minimization, sparse
//! multigraph ensembles with half-edge surgery, extremal cut solvers, and
//! Sherrington-Kirkpatrick ground-state / free-energy routines.
//!
//! The crate is `no_std` (alloc only); all floating-point transcendentals go
//! through `libm`. Everything downstream of a seed is deterministic: the same
//! seed and parameters reproduce results bitwise on any platform.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod cuts;
pub mod graphs;
pub mod math;
pub mod parisi;
pub mod quad;
pub mod rng;
pub mod sk;
