//! Noisy boson sampling simulation and certification.
//!
//! The crate simulates photons travelling through Haar-random linear
//! interferometers, with per-photon loss and partial distinguishability, and
//! checks recorded or simulated output against five statistical tests. A
//! device passes at photon number `n` when every test passes; the largest such
//! `n` is its photonic quality factor.
//!
//! | module | contents |
//! |---|---|
//! | [`linalg`] | complex matrices, unitaries, Fock patterns, permanents, Haar sampling |
//! | [`samplers`] | samplers for every particle model and the exact output oracle |
//! | [`stats`] | estimators, reference values, verdicts and sample planning |
//! | [`engine`] | campaigns, quality factor and species comparison |
//! | [`routing`] | swap-gadget routing of inputs onto the canonical pattern |
//! | [`io`] | unitary, click and report files |
//!
//! ```
//! use pqf::engine::{run_campaign, ExperimentPlan};
//! use pqf::samplers::Source;
//!
//! let mut plan = ExperimentPlan::new(3, 1_000, 4, 1, Source::ideal());
//! plan.analysis.min_records = 100;
//! let result = run_campaign(&plan).unwrap();
//! assert_eq!(result.m, 16);
//! ```
//!
//! A guide with longer examples lives in `book/`.

pub mod engine;
pub mod error;
pub mod io;
pub mod linalg;
pub mod numeric;
pub mod rng;
pub mod routing;
pub mod samplers;
pub mod stats;
pub mod tolerance;

pub use error::{Error, Result};

#[cfg(doctest)]
#[doc = include_str!("../../../README.md")]
mod readme {}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/getting-started.md")]
    mod getting_started {}
    #[doc = include_str!("../../../book/src/interferometers.md")]
    mod interferometers {}
    #[doc = include_str!("../../../book/src/sources.md")]
    mod sources {}
    #[doc = include_str!("../../../book/src/tests.md")]
    mod tests {}
    #[doc = include_str!("../../../book/src/campaigns.md")]
    mod campaigns {}
    #[doc = include_str!("../../../book/src/routing.md")]
    mod routing {}
    #[doc = include_str!("../../../book/src/formats.md")]
    mod formats {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
