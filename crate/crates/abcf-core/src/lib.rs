//! Continued fractions with two rounding parameters `(a, b)`: exact digit
//! expansions, natural-extension attractors, geodesic reduction and coding,
//! duality, sofic transition structure, and invariant measures.
//!
//! The crate is organized bottom-up:
//!
//! - [`exact`]: quadratic surds, the extended real line, unimodular maps,
//!   and the number syntax.
//! - [`cf`]: the `(a, b)` digit map, expansions, convergents, evaluation.
//! - [`attractor`]: boundary-orbit cycles, the natural-extension domain with
//!   its step-function boundary, and a simulation oracle.
//! - [`reduction`]: geodesic reduction to the attractor, two-sided coding,
//!   and the cross-section of the modular surface.
//! - [`duality`]: the dual parameter pair and the reflection identity
//!   between natural extensions.
//! - [`sofic`]: the refined digit partition, its transition matrix, and
//!   admissibility of digit words.
//! - [`measure`]: the smooth invariant measure, the transfer operator,
//!   entropy, and growth-rate checks.
//! - [`verify`]: self-contained named checks used by the acceptance suite
//!   and the command-line tool.

pub mod attractor;
pub mod cf;
pub mod duality;
pub mod error;
pub mod exact;
pub mod measure;
pub mod numerics;
pub mod reduction;
pub mod sofic;
pub mod verify;

pub use error::{AbcfError, Result};
