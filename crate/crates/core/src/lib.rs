//! Exact, finite-horizon machinery for asymptotic cones.
//!
//! The crate works with finite pointed metric spaces whose distances are
//! exact rationals, finitely generated filter bases on truncations of `ℕ`,
//! and three-valued verdicts for limit statements that can only be
//! semi-decided at a finite horizon. The main pieces are:
//!
//! - [`metric`]: finite (pseudo-)metric spaces, annuli, rescaling, wedges.
//! - [`decone`]: the factorial-scaled wedge of annuli whose cone is a given
//!   space, together with its scale-window checks.
//! - [`filters`]: thin/fast index sets, density ratios, filter bases,
//!   floor-scaling pushforwards and bounded accumulation.
//! - [`ultralimit`]: limits along filter bases and cone distances.
//! - [`slowuf`]: interval systems around a thin seed and the re-indexing map.
//! - [`gh`]: pointed Gromov–Hausdorff bounds and exact search.
//! - [`suite`]: the reproducible acceptance harness used by the CLI.

pub mod certified;
pub mod decone;
pub mod error;
pub mod filters;
pub mod gh;
pub mod indexset;
pub mod io;
pub mod metric;
pub mod rational;
pub mod sample;
pub mod slowuf;
pub mod suite;
pub mod ultralimit;
mod verdict;

pub use error::{Error, Result};
pub use indexset::{Eventual, IndexSet, SetRule};
pub use metric::{FiniteMetricSpace, ScaleFactor};
pub use num_rational::BigRational;
pub use verdict::Verdict;
