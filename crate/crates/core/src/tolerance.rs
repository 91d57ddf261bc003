//! Numerical tolerances used throughout the crate.
//!
//! Dimensions never exceed 16 in any supported configuration, so double
//! precision leaves roughly five digits of headroom over these thresholds.

/// Structural checks: unitarity, Hermiticity, positivity, completeness.
pub const STRUCTURAL: f64 = 1e-10;

/// State-vector and program-amplitude normalization.
pub const NORMALIZATION: f64 = 1e-12;

/// Tight identities that hold to rounding error (amplitude bookkeeping).
pub const AMPLITUDE: f64 = 1e-12;

/// Slack accepted on an externally supplied probability vector before it is
/// renormalized for sampling.
pub const SAMPLE_SUM: f64 = 1e-9;

/// Eigenvalues in `[-STRUCTURAL, 0)` count as numerical zero; anything more
/// negative is a hard validation failure, since effect positivity is exact
/// in the underlying algebra.
pub const EIGENVALUE_FLOOR: f64 = -STRUCTURAL;
