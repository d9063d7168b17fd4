//! Verifiable Multilateration (VM) and the two-player localization game
//! played between a set of trusted verifiers and a malicious node.
//!
//! The crate is `no_std` (it needs `alloc`). All lengths are plain `f64`
//! values; callers usually normalize them so that the verifiers' range `R`
//! equals one, which is how every game-level number is reported.
//!
//! Modules, bottom-up:
//!
//! - [`geometry`]: points, polar frames, triangle predicates.
//! - [`vm`]: distance bounds, least-squares estimation, the delta test and
//!   the point-in-triangle test.
//! - [`region`]: the attacker's plausibility predicate, payoffs and region
//!   rasters.
//! - [`pure`]: pure-strategy analysis (witness claims, maxmin search, the
//!   verifier best response).
//! - [`lp`] and [`discrete`]: the grid-discretized finite game solved as a
//!   linear program.
//! - [`mixed`]: the fixed-orthocenter mixed-strategy game.
#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

mod error;
mod float;

pub mod discrete;
pub mod geometry;
pub mod lp;
pub mod mixed;
pub mod optimize;
pub mod pure;
pub mod region;
pub mod vm;

pub use error::{Error, Result};
pub use geometry::{Point, PolarPoint, Triangle};
pub use region::{Claim, UtilityCriterion};
pub use vm::{Outcome, VerifierConfig};
