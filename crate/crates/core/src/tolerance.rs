//! Numerical tolerances shared by every module.
//!
//! All arithmetic is `f64`. The constants below are the only place where
//! acceptance tolerances for floating-point checks live.

/// Tolerance record used by validation routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Maximum entry of `|U^dag U - I|` accepted for a unitary.
    pub unitarity: f64,
    /// Slack on probability normalisation of exact distributions.
    pub normalization: f64,
    /// Deviation from an exact 0/1 entry accepted for permutation matrices.
    pub permutation: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        unitarity: 1e-10,
        normalization: 1e-9,
        permutation: 1e-12,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
