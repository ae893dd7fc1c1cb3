//! Estimators, reference values and pass/fail logic for the five tests.
//!
//! * `t_loss`: the estimated per-photon loss must vanish with `n`.
//! * `t_d1`..`t_d3`: normalised mean, coefficient of variation and skewness of
//!   the two-mode correlators must match the ideal-boson values.
//! * `t_d4`: the probability that all detected photons land in the first `K`
//!   modes must match the ideal value.

pub mod bootstrap;
mod bunching;
mod correlators;
mod lemma;
mod loss;
mod moments;
pub mod reference;
mod sampling;
mod verdict;

pub use bunching::{
    default_block, estimate_bunching, haar_bunching_exact, test_bunching, theory_bunching_id, theory_bunching_shift,
};
pub use correlators::{compute_cdataset, pair_index, CDataSet, PartialSums, SectorCounts, SPLITS};
pub use lemma::{lemma_series_gap, SeriesGap};
pub use loss::{estimate_loss, estimate_loss_from_histograms, loss_histograms, loss_window, LossEstimate, LossWindow};
pub use moments::{
    haar_average_moments, test_moments, theory_moments, theory_moments_with, MomentErrors, MomentTriple, PooledMoments,
};
pub use reference::{ReferenceConfig, ReferenceKind, SectorReference};
pub use sampling::chebyshev_sample_size;
pub use verdict::{Outcome, TestId, TestVerdict, Thresholds};
