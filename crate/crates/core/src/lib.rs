//! Simulation of programmable quantum measurement devices.
//!
//! A fixed controlled-unitary processor plus a fixed product projective
//! measurement realizes a whole family of generalized measurements (POVMs)
//! on a data register, selected purely by the quantum state of an ancilla
//! and a program register. This crate provides:
//!
//! - dense complex linear algebra over small tensor-product spaces
//!   ([`linalg`]),
//! - the POVM data model with validation, Born-rule evaluation, sampling,
//!   and the reductions from the composite device to effective data-space
//!   POVMs ([`povm`]),
//! - the composite device itself with a full-state simulation that serves
//!   as the ground-truth oracle ([`multimeter`]),
//! - a programmable unambiguous discriminator of symmetric qubit pairs with
//!   all of its analytic probability formulas ([`discriminator`]),
//! - tuning of the device design angle against an interval of pairs,
//!   including banks of switched designs ([`optimize`], [`sweep`]),
//! - deterministic seeded Monte Carlo certification ([`montecarlo`]), and
//! - a self-contained verification suite tying everything together
//!   ([`verify`]).

pub mod discriminator;
pub mod linalg;
pub mod montecarlo;
pub mod multimeter;
pub mod optimize;
pub mod povm;
pub mod rng;
pub mod sampling;
pub mod sweep;
pub mod tolerance;
pub mod verify;

pub use num_complex::Complex64;

pub use discriminator::{
    design_unitary, discrimination_projectors, evolve, optimal_probability, outcome_map,
    quasiclassical_probability, ratio_to_optimal, solve_program, success_closed_form,
    success_closed_form_variant, success_probability, AncillaProgram, DiscriminationOutcome,
    DiscriminatorDesign, DiscriminatorError, PreparedState, StatePair, Verdict,
};
pub use linalg::{
    check_unitary, hermitian_eigenvalues, partial_trace, ComplexMatrix, HilbertLayout, Ket,
    LinalgError, UnitaryCheck,
};
pub use montecarlo::{
    compare_analytic, monte_carlo, AnalyticComparison, Scenario, TrialError, TrialStats,
};
pub use multimeter::{
    build_measurement, build_processor_unitary, simulate, spin_axis_bank, MeasurementModel,
    MultimeterError, OutcomeTable, Processor,
};
pub use optimize::{
    average_ratio, best_phi0, design_bank, select_program, DesignBank, Interval, OptimizeError,
    SelectionRule,
};
pub use povm::{
    born_probabilities, induced_povm_general, induced_povm_matched, induced_povm_no_ancilla,
    program_contraction, sample_outcome, validate_povm, Effect, Povm, PovmError, PovmValidation,
    PureProgram,
};
pub use sweep::{sweep, SweepRow};
pub use verify::{run_all, CheckOutcome, VerifyConfig};
