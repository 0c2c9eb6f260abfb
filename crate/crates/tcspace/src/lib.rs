//! Exact transportation-cost (Lipschitz-free) norms on finite metric spaces,
//! with the machinery used to embed such spaces into `l1` and to certify
//! lower bounds on the distortion of any such embedding:
//!
//! * validated metric spaces, weighted graphs, and generated families;
//! * the transportation-cost norm via exact min-cost flow, optimal plans,
//!   norming Lipschitz potentials, optimal bijections, and Birkhoff
//!   decompositions;
//! * closed-form norms on weighted trees and the induced isometry into
//!   weighted `l1`;
//! * stochastic tree embeddings (hierarchical ball-carving samplers, tree
//!   restriction onto kept leaves, bijective embeddings) and the induced
//!   `l1` maps with distortion reports;
//! * discrete vector calculus on graphs (gradients, line integrals, the
//!   integral operator and its stochastic extension);
//! * isoperimetric constants, Sobolev-type inequalities, Lipschitz-spectral
//!   profiles, and the resulting distortion lower bounds.


// Index-coupled numeric loops (matrix sweeps, bitmask subsets) keep
// explicit indices for error reporting and cross-indexing.
#![allow(clippy::needless_range_loop)]
pub mod calculus;
pub mod embed;
pub mod error;
pub mod io;
pub mod measure;
pub mod metric;
pub mod spectral;
pub mod tol;
pub mod tree;
pub mod transport;

pub use error::{Error, Result};
