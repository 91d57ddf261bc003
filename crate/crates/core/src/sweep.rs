//! Tabulated device performance across a range of pair angles, for fixed
//! design angle: the data behind the ratio-versus-angle curves.

use crate::discriminator::{
    optimal_probability, quasiclassical_probability, ratio_to_optimal, success_probability,
    DiscriminatorDesign, DiscriminatorError, StatePair,
};
use crate::optimize::Interval;

/// One grid point of a sweep. For real pairs
/// `p_success = p_optimal * ratio` holds by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub phi: f64,
    pub ratio: f64,
    pub p_success: f64,
    pub p_optimal: f64,
    pub p_quasiclassical: f64,
}

/// Evaluate the device on `steps` equally spaced pair angles across the
/// interval (both endpoints included; `steps >= 2`).
pub fn sweep(
    design: &DiscriminatorDesign,
    interval: &Interval,
    steps: usize,
) -> Result<Vec<SweepRow>, DiscriminatorError> {
    assert!(steps >= 2, "a sweep needs at least two grid points");
    let h = interval.width() / (steps - 1) as f64;
    let mut rows = Vec::with_capacity(steps);
    for i in 0..steps {
        let phi = interval.lo() + h * i as f64;
        let pair = StatePair::from_angle(phi)?;
        rows.push(SweepRow {
            phi,
            ratio: ratio_to_optimal(phi, design.phi0()),
            p_success: success_probability(&pair, design)?,
            p_optimal: optimal_probability(phi),
            p_quasiclassical: quasiclassical_probability(phi),
        });
    }
    Ok(rows)
}
