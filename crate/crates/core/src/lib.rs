//! Numerical geometry of immersed submanifolds `x: U ⊂ Rⁿ → Eᵐ`.
//!
//! Immersions are evaluated as truncated Taylor jets ([`jets`]) so every
//! derivative up to third order is exact to rounding. On top of that sit
//! pointwise fundamental forms and curvature ([`geometry`]), the
//! rectifying-submanifold analysis ([`rectify`]), a text format for
//! immersions ([`exprdsl`]) and the `rectify` command line ([`cli`]).
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord, clippy::should_implement_trait)]

pub mod chart;
pub mod exprdsl;
pub mod immersion;
pub mod jets;
pub mod geometry;
pub mod linalg;
pub mod format;
pub mod parallel;
pub mod rectify;
pub mod cli;
