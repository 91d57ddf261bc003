//! Device tuning: averaging the success ratio over an interval of pair
//! angles, one-dimensional maximization of the design angle, and banks of
//! switched designs with per-pair selection.

use thiserror::Error;

use crate::discriminator::{
    self, ratio_to_optimal, AncillaProgram, DiscriminatorDesign, DiscriminatorError, StatePair,
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum OptimizeError {
    #[error("invalid interval [{lo}, {hi}]: need 0 <= lo < hi <= pi/2")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("subdivision count {n} is below the minimum of 16")]
    TooFewSubdivisions { n: usize },
    #[error("design bank needs at least one design")]
    EmptyBank,
    #[error("design angles must be strictly increasing and inside (0, pi/2]")]
    BankNotIncreasing,
    #[error("no design in the bank can be programmed for this pair")]
    NoFeasibleDesign,
    #[error(transparent)]
    Discriminator(#[from] DiscriminatorError),
}

/// Closed interval of pair angles inside `[0, pi/2]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, OptimizeError> {
        if !(lo >= 0.0 && lo < hi && hi <= std::f64::consts::FRAC_PI_2 + 1e-12) {
            return Err(OptimizeError::InvalidInterval { lo, hi });
        }
        Ok(Self {
            lo,
            hi: hi.min(std::f64::consts::FRAC_PI_2),
        })
    }

    /// The full `[0, pi/2]` working range.
    pub fn full() -> Self {
        Self {
            lo: 0.0,
            hi: std::f64::consts::FRAC_PI_2,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Default Simpson subdivision count; the integrand is smooth, so the
/// averages are stable to well below 1e-8 at this resolution.
pub const DEFAULT_SUBDIVISIONS: usize = 1024;

/// Average of the success ratio over the interval by composite Simpson
/// quadrature with `n` subdivisions (rounded up to even).
pub fn average_ratio(phi0: f64, interval: &Interval, n: usize) -> Result<f64, OptimizeError> {
    if n < 16 {
        return Err(OptimizeError::TooFewSubdivisions { n });
    }
    let n = n + n % 2;
    let h = interval.width() / n as f64;
    let f = |i: usize| ratio_to_optimal(interval.lo + h * i as f64, phi0);
    let mut sum = f(0) + f(n);
    for i in 1..n {
        sum += f(i) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    Ok(sum * h / 3.0 / interval.width())
}

/// Golden-section refinement of a unimodal maximum inside `[lo, hi]`.
fn golden_section_maximize(
    f: impl Fn(f64) -> f64,
    mut lo: f64,
    mut hi: f64,
    x_tol: f64,
) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > x_tol {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Design angle maximizing the average ratio over the interval, found by a
/// coarse 64-point scan over `[0, pi/2)` followed by golden-section
/// refinement to `|delta phi0| < 1e-6`. Returns `(phi0, average)`.
pub fn best_phi0(interval: &Interval) -> Result<(f64, f64), OptimizeError> {
    let objective = |phi0: f64| {
        average_ratio(phi0, interval, DEFAULT_SUBDIVISIONS).expect("subdivisions fixed above 16")
    };
    const SCAN: usize = 64;
    let domain_hi = std::f64::consts::FRAC_PI_2 * (1.0 - 1e-9);
    let step = domain_hi / SCAN as f64;
    let mut best_index = 0;
    let mut best_value = f64::NEG_INFINITY;
    for i in 0..=SCAN {
        let v = objective(step * i as f64);
        if v > best_value {
            best_value = v;
            best_index = i;
        }
    }
    let lo = step * best_index.saturating_sub(1) as f64;
    let hi = (step * (best_index + 1) as f64).min(domain_hi);
    Ok(golden_section_maximize(objective, lo, hi, 1e-6))
}

/// Ordered bank of switched designs.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignBank {
    designs: Vec<DiscriminatorDesign>,
}

impl DesignBank {
    pub fn new(designs: Vec<DiscriminatorDesign>) -> Result<Self, OptimizeError> {
        if designs.is_empty() {
            return Err(OptimizeError::EmptyBank);
        }
        let increasing = designs.windows(2).all(|w| w[0].phi0() < w[1].phi0());
        let in_range = designs
            .iter()
            .all(|d| d.phi0() > 0.0 && d.phi0() <= std::f64::consts::FRAC_PI_2);
        if !increasing || !in_range {
            return Err(OptimizeError::BankNotIncreasing);
        }
        Ok(Self { designs })
    }

    pub fn designs(&self) -> &[DiscriminatorDesign] {
        &self.designs
    }

    pub fn len(&self) -> usize {
        self.designs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.designs.is_empty()
    }
}

/// Bank of `k` designs, each maximizing the average ratio over one of the
/// `k` equal subdivisions of the interval.
pub fn design_bank(k: usize, interval: &Interval) -> Result<DesignBank, OptimizeError> {
    if k == 0 {
        return Err(OptimizeError::EmptyBank);
    }
    let width = interval.width() / k as f64;
    let mut designs = Vec::with_capacity(k);
    for segment in 0..k {
        let lo = interval.lo() + width * segment as f64;
        let segment_interval = Interval::new(lo, lo + width)?;
        let (phi0, _) = best_phi0(&segment_interval)?;
        designs.push(DiscriminatorDesign::new(phi0)?);
    }
    DesignBank::new(designs)
}

/// Rule for picking a design out of the bank for a given pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionRule {
    /// Maximize the achieved success probability (equivalently the ratio to
    /// the optimum, whose denominator does not depend on the design).
    MaxRatio,
    /// Pick the design angle closest to the pair angle; simpler but not
    /// always optimal.
    NearestAngle,
}

/// Select a design from the bank and solve its program for the pair. Ties
/// break toward the smaller index; designs that cannot be programmed for
/// the pair are skipped.
pub fn select_program(
    bank: &DesignBank,
    pair: &StatePair,
    rule: SelectionRule,
) -> Result<(usize, AncillaProgram), OptimizeError> {
    let mut best: Option<(usize, AncillaProgram, f64)> = None;
    for (index, design) in bank.designs().iter().enumerate() {
        let Ok(program) = discriminator::solve_program(pair, design) else {
            continue;
        };
        let score = match rule {
            SelectionRule::MaxRatio => {
                discriminator::evolve(pair, design, &program, discriminator::PreparedState::Psi1)
                    .success_probability()
            }
            SelectionRule::NearestAngle => -(design.phi0() - pair.phi()).abs(),
        };
        let improves = match &best {
            Some((_, _, incumbent)) => score > *incumbent,
            None => true,
        };
        if improves {
            best = Some((index, program, score));
        }
    }
    best.map(|(index, program, _)| (index, program))
        .ok_or(OptimizeError::NoFeasibleDesign)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn interval_enforces_bounds() {
        assert!(Interval::new(-0.1, 1.0).is_err());
        assert!(Interval::new(0.5, 0.5).is_err());
        assert!(Interval::new(0.0, 2.0).is_err());
        assert!(Interval::new(0.0, FRAC_PI_2).is_ok());
    }

    #[test]
    fn average_over_quasiclassical_curve_has_closed_form() {
        // Average of (1 + cos phi)/2 over [0, pi/2] is 1/2 + 1/pi.
        let avg = average_ratio(0.0, &Interval::full(), 1024).unwrap();
        assert_abs_diff_eq!(avg, 0.5 + 1.0 / PI, epsilon = 1e-10);
    }

    #[test]
    fn average_is_stable_under_subdivision_doubling() {
        let iv = Interval::full();
        let a = average_ratio(0.7, &iv, 1024).unwrap();
        let b = average_ratio(0.7, &iv, 2048).unwrap();
        assert!((a - b).abs() < 1e-8);
    }

    #[test]
    fn average_over_narrow_interval_approaches_one() {
        let phi0 = 0.9;
        for half_width in [1e-2, 1e-4, 1e-6] {
            let iv = Interval::new(phi0 - half_width, phi0 + half_width).unwrap();
            let avg = average_ratio(phi0, &iv, 64).unwrap();
            assert!(
                (1.0 - avg) < 2.0 * half_width,
                "width {half_width}: avg {avg}"
            );
        }
    }

    #[test]
    fn average_rejects_coarse_grids() {
        assert!(matches!(
            average_ratio(0.3, &Interval::full(), 8),
            Err(OptimizeError::TooFewSubdivisions { n: 8 })
        ));
    }

    #[test]
    fn best_phi0_matches_reported_optimum() {
        let (phi0, avg) = best_phi0(&Interval::full()).unwrap();
        // Known optimum near 0.235 pi with average ratio near 0.92.
        assert_abs_diff_eq!(phi0, 0.235 * PI, epsilon = 0.005 * PI);
        assert_abs_diff_eq!(avg, 0.92, epsilon = 0.01);
    }

    #[test]
    fn best_phi0_agrees_with_grid_scan() {
        let iv = Interval::new(0.2, 1.1).unwrap();
        let (phi0, value) = best_phi0(&iv).unwrap();
        let grid = 10_000;
        let mut best_grid = (0.0, f64::NEG_INFINITY);
        for i in 0..grid {
            let x = FRAC_PI_2 * i as f64 / grid as f64;
            let v = average_ratio(x, &iv, 256).unwrap();
            if v > best_grid.1 {
                best_grid = (x, v);
            }
        }
        let spacing = FRAC_PI_2 / grid as f64;
        assert!(
            (phi0 - best_grid.0).abs() <= spacing,
            "golden {phi0} vs grid {}",
            best_grid.0
        );
        assert!(value >= best_grid.1 - 1e-6);
    }

    #[test]
    fn best_phi0_tracks_a_shrinking_interval() {
        let target = 0.8;
        for half_width in [0.1, 0.01] {
            let iv = Interval::new(target - half_width, target + half_width).unwrap();
            let (phi0, _) = best_phi0(&iv).unwrap();
            assert!(
                (phi0 - target).abs() < 2.5 * half_width,
                "width {half_width}: phi0 {phi0}"
            );
        }
    }

    #[test]
    fn singleton_bank_reduces_to_best_phi0() {
        let iv = Interval::full();
        let bank = design_bank(1, &iv).unwrap();
        let (phi0, _) = best_phi0(&iv).unwrap();
        assert_eq!(bank.len(), 1);
        assert_abs_diff_eq!(bank.designs()[0].phi0(), phi0, epsilon = 1e-9);
    }

    #[test]
    fn two_segment_bank_beats_each_segment_grid() {
        let iv = Interval::full();
        let bank = design_bank(2, &iv).unwrap();
        assert!(bank.designs()[0].phi0() < bank.designs()[1].phi0());
        for (segment, design) in bank.designs().iter().enumerate() {
            let lo = iv.lo() + iv.width() / 2.0 * segment as f64;
            let seg = Interval::new(lo, lo + iv.width() / 2.0).unwrap();
            let achieved = average_ratio(design.phi0(), &seg, 512).unwrap();
            for i in 0..200 {
                let x = FRAC_PI_2 * i as f64 / 200.0;
                let v = average_ratio(x, &seg, 512).unwrap();
                assert!(achieved >= v - 1e-6, "segment {segment}: {x} gives {v}");
            }
        }
    }

    #[test]
    fn bank_rejects_unordered_designs() {
        let designs = vec![
            DiscriminatorDesign::new(0.5).unwrap(),
            DiscriminatorDesign::new(0.3).unwrap(),
        ];
        assert!(matches!(
            DesignBank::new(designs),
            Err(OptimizeError::BankNotIncreasing)
        ));
    }

    #[test]
    fn select_program_prefers_the_exact_design_point() {
        let bank = DesignBank::new(vec![
            DiscriminatorDesign::new(PI / 8.0).unwrap(),
            DiscriminatorDesign::new(FRAC_PI_4).unwrap(),
            DiscriminatorDesign::new(3.0 * PI / 8.0).unwrap(),
        ])
        .unwrap();
        let pair = StatePair::from_angle(FRAC_PI_4).unwrap();
        let (index, program) = select_program(&bank, &pair, SelectionRule::MaxRatio).unwrap();
        assert_eq!(index, 1);
        assert_abs_diff_eq!(program.a().re, 1.0, epsilon = 1e-12);
        assert!(program.b().norm() < 1e-12);
        assert_abs_diff_eq!(
            ratio_to_optimal(pair.phi(), bank.designs()[index].phi0()),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn select_program_uses_the_ratio_not_the_distance() {
        let bank = DesignBank::new(vec![
            DiscriminatorDesign::new(PI / 8.0).unwrap(),
            DiscriminatorDesign::new(FRAC_PI_4).unwrap(),
            DiscriminatorDesign::new(3.0 * PI / 8.0).unwrap(),
        ])
        .unwrap();
        let pair = StatePair::from_angle(0.3 * PI).unwrap();
        let (index, _) = select_program(&bank, &pair, SelectionRule::MaxRatio).unwrap();
        // Evaluating the ratio at the three designs picks pi/4.
        assert_eq!(index, 1);
        let (nearest, _) = select_program(&bank, &pair, SelectionRule::NearestAngle).unwrap();
        assert_eq!(nearest, 1);
    }

    #[test]
    fn singleton_bank_always_selects_its_design() {
        let bank = DesignBank::new(vec![DiscriminatorDesign::new(0.4).unwrap()]).unwrap();
        for i in 1..20 {
            let pair = StatePair::from_angle(FRAC_PI_2 * i as f64 / 20.0).unwrap();
            let (index, _) = select_program(&bank, &pair, SelectionRule::MaxRatio).unwrap();
            assert_eq!(index, 0);
        }
    }

    #[test]
    fn bank_of_only_half_pi_fails_for_non_orthogonal_pairs() {
        let bank = DesignBank::new(vec![DiscriminatorDesign::new(FRAC_PI_2).unwrap()]).unwrap();
        let pair = StatePair::from_angle(0.7).unwrap();
        assert!(matches!(
            select_program(&bank, &pair, SelectionRule::MaxRatio),
            Err(OptimizeError::NoFeasibleDesign)
        ));
    }

    #[test]
    fn selection_never_underperforms_any_single_design() {
        let bank = DesignBank::new(vec![
            DiscriminatorDesign::new(0.2).unwrap(),
            DiscriminatorDesign::new(0.7).unwrap(),
            DiscriminatorDesign::new(1.2).unwrap(),
        ])
        .unwrap();
        for i in 1..40 {
            let pair = StatePair::from_angle(FRAC_PI_2 * i as f64 / 40.0).unwrap();
            let (index, _) = select_program(&bank, &pair, SelectionRule::MaxRatio).unwrap();
            let chosen_p =
                discriminator::success_probability(&pair, &bank.designs()[index]).unwrap();
            for d in bank.designs() {
                if let Ok(p) = discriminator::success_probability(&pair, d) {
                    assert!(chosen_p >= p - 1e-12);
                }
            }
        }
    }
}
