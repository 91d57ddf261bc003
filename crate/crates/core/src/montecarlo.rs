//! Seeded Monte Carlo discrimination trials against the full-state oracle.
//!
//! Each trial draws an input state by the priors and samples a verdict from
//! the outcome distribution computed by [`crate::multimeter::simulate`] for
//! the evolved composite state. Per-trial streams are addressed by mixing
//! the seed with the trial index, so runs are reproducible regardless of
//! how trials are partitioned across workers.

use thiserror::Error;

use crate::discriminator::{
    design_unitary, solve_program, AncillaProgram, DiscriminatorDesign, DiscriminatorError,
    PreparedState, StatePair, Verdict,
};
use crate::linalg::Ket;
use crate::multimeter::{simulate, MeasurementModel, MultimeterError, Processor};
use crate::povm::{sample_outcome, PovmError};
use crate::rng;
use num_complex::Complex64;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum TrialError {
    #[error("invalid scenario: {reason}")]
    InvalidScenario { reason: String },
    #[error(transparent)]
    Discriminator(#[from] DiscriminatorError),
    #[error(transparent)]
    Multimeter(#[from] MultimeterError),
    #[error(transparent)]
    Povm(#[from] PovmError),
}

/// One Monte Carlo configuration: the pair, the device design, an optional
/// explicit program (otherwise solved from the pair), input priors, trial
/// count and seed.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub pair: StatePair,
    pub design: DiscriminatorDesign,
    pub program: Option<AncillaProgram>,
    pub priors: [f64; 2],
    pub trials: u64,
    pub seed: u64,
}

impl Scenario {
    /// Equal priors, automatic program.
    pub fn balanced(
        pair: StatePair,
        design: DiscriminatorDesign,
        trials: u64,
        seed: u64,
    ) -> Self {
        Self {
            pair,
            design,
            program: None,
            priors: [0.5, 0.5],
            trials,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), TrialError> {
        if self.trials == 0 {
            return Err(TrialError::InvalidScenario {
                reason: "trials must be at least 1".into(),
            });
        }
        let sum = self.priors[0] + self.priors[1];
        if self.priors.iter().any(|&p| !(0.0..=1.0).contains(&p)) || (sum - 1.0).abs() > 1e-9 {
            return Err(TrialError::InvalidScenario {
                reason: format!("priors {:?} do not sum to 1", self.priors),
            });
        }
        Ok(())
    }
}

/// Trial counts per (prepared state, verdict), with seed provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialStats {
    counts: [[u64; 3]; 2],
    trials: u64,
    seed: u64,
}

impl TrialStats {
    pub fn count(&self, prepared: PreparedState, verdict: Verdict) -> u64 {
        self.counts[prepared.index()][verdict.index()]
    }

    pub fn counts(&self) -> &[[u64; 3]; 2] {
        &self.counts
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Trials in which the prepared state was correctly identified.
    pub fn successes(&self) -> u64 {
        self.count(PreparedState::Psi1, Verdict::Psi1)
            + self.count(PreparedState::Psi2, Verdict::Psi2)
    }

    /// Trials in which the wrong state was named; any nonzero count breaks
    /// the error-free guarantee.
    pub fn wrong_identifications(&self) -> u64 {
        self.count(PreparedState::Psi1, Verdict::Psi2)
            + self.count(PreparedState::Psi2, Verdict::Psi1)
    }

    pub fn inconclusive(&self) -> u64 {
        self.count(PreparedState::Psi1, Verdict::Inconclusive)
            + self.count(PreparedState::Psi2, Verdict::Inconclusive)
    }

    pub fn prepared_total(&self, prepared: PreparedState) -> u64 {
        self.counts[prepared.index()].iter().sum()
    }

    pub fn success_frequency(&self) -> f64 {
        self.successes() as f64 / self.trials as f64
    }
}

/// Outcome distributions for both prepared states, computed through the
/// full-state oracle: the device as a single-operation processor with the
/// program ancilla, measured in the data `x` basis and the ancilla
/// computational basis.
pub fn outcome_distributions(
    pair: &StatePair,
    design: &DiscriminatorDesign,
    program: &AncillaProgram,
) -> Result<[[f64; 3]; 2], TrialError> {
    let processor = Processor::new(
        vec![design_unitary(design)],
        vec![Ket::basis(1, 0)],
        2,
        2,
    )?;
    let s = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
    let x_basis = vec![
        Ket::from_amplitudes(vec![s, s]).expect("static"),
        Ket::from_amplitudes(vec![s, -s]).expect("static"),
    ];
    let meas = MeasurementModel::new(
        x_basis,
        vec![Ket::basis(2, 0), Ket::basis(2, 1)],
        vec![Ket::basis(1, 0)],
    )?;
    let rho_ancilla = program.ket().projector();
    let rho_program = crate::linalg::ComplexMatrix::identity(1);

    let mut dists = [[0.0; 3]; 2];
    for prepared in PreparedState::ALL {
        let rho_data = pair.ket(prepared).projector();
        let table = simulate(&processor, &meas, &rho_data, &rho_ancilla, &rho_program)?;
        // (x+, anc 0) identifies psi_1, (x-, anc 0) identifies psi_2,
        // ancilla 1 is inconclusive.
        dists[prepared.index()] = [
            table.prob(0, 0, 0),
            table.prob(1, 0, 0),
            table.prob(0, 1, 0) + table.prob(1, 1, 0),
        ];
    }
    Ok(dists)
}

/// Run the scenario: deterministic in `(seed, trials)` alone.
pub fn monte_carlo(scenario: &Scenario) -> Result<TrialStats, TrialError> {
    scenario.validate()?;
    let program = match &scenario.program {
        Some(p) => *p,
        None => solve_program(&scenario.pair, &scenario.design)?,
    };
    let dists = outcome_distributions(&scenario.pair, &scenario.design, &program)?;

    let mut counts = [[0u64; 3]; 2];
    for trial in 0..scenario.trials {
        let trial_state = rng::substream(scenario.seed, trial);
        let u_input = rng::uniform_f64(rng::mix64(rng::substream(trial_state, 0)));
        let prepared = if u_input < scenario.priors[0] {
            PreparedState::Psi1
        } else {
            PreparedState::Psi2
        };
        let verdict = sample_outcome(
            &dists[prepared.index()],
            rng::substream(trial_state, 1),
        )?;
        counts[prepared.index()][verdict] += 1;
    }
    Ok(TrialStats {
        counts,
        trials: scenario.trials,
        seed: scenario.seed,
    })
}

/// Comparison of empirical and analytic success statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticComparison {
    pub expected_probability: f64,
    pub observed_frequency: f64,
    /// Binomial standard deviation `sqrt(p (1-p) / trials)`.
    pub sigma: f64,
    pub z_score: f64,
    pub wrong_identifications: u64,
    pub passed: bool,
}

/// Four-sigma acceptance band on the success frequency plus a hard zero on
/// wrong identifications.
pub fn compare_analytic(stats: &TrialStats, p_success: f64) -> AnalyticComparison {
    let observed = stats.success_frequency();
    let sigma = (p_success * (1.0 - p_success) / stats.trials() as f64).sqrt();
    let delta = observed - p_success;
    let z_score = if sigma > 0.0 {
        delta / sigma
    } else if delta == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    let wrong = stats.wrong_identifications();
    AnalyticComparison {
        expected_probability: p_success,
        observed_frequency: observed,
        sigma,
        z_score,
        wrong_identifications: wrong,
        passed: wrong == 0 && z_score.abs() <= 4.0,
    }
}
