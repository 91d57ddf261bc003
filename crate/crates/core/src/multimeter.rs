//! The composite programmable measurement device: a controlled-unitary
//! processor acting on data and ancilla, steered by a program register, and
//! a fixed product projective measurement on all three subsystems.
//!
//! [`simulate`] evolves the full composite density matrix and is the
//! ground-truth oracle every reduced construction is checked against.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{
    self, ComplexMatrix, HilbertLayout, Ket, LinalgError,
};
use crate::povm::{self, PovmError};
use crate::tolerance;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum MultimeterError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Povm(#[from] PovmError),
    #[error("operation {index} is not unitary (deviation {deviation:.3e})")]
    OperationNotUnitary { index: usize, deviation: f64 },
    #[error("operation {index} acts on dimension {found}, expected {expected}")]
    OperationDimension {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("program basis has {found} states, expected {expected}")]
    ProgramBasisSize { expected: usize, found: usize },
    #[error("basis is not orthonormal and complete (deviation {deviation:.3e})")]
    BasisNotOrthonormal { deviation: f64 },
    #[error("density matrix dimension {found} does not match factor dimension {expected}")]
    DensityDimension { expected: usize, found: usize },
    #[error("measurement dimensions {found:?} do not match processor layout {expected:?}")]
    LayoutMismatch {
        expected: [usize; 3],
        found: [usize; 3],
    },
}

/// Controlled-unitary processor: one joint data-ancilla operation per
/// orthonormal program state.
#[derive(Debug, Clone, PartialEq)]
pub struct Processor {
    unitaries: Vec<ComplexMatrix>,
    program_basis: Vec<Ket>,
    layout: HilbertLayout,
}

impl Processor {
    pub fn new(
        unitaries: Vec<ComplexMatrix>,
        program_basis: Vec<Ket>,
        data_dim: usize,
        ancilla_dim: usize,
    ) -> Result<Self, MultimeterError> {
        let program_dim = program_basis.len();
        if program_dim == 0 {
            return Err(MultimeterError::ProgramBasisSize {
                expected: 1,
                found: 0,
            });
        }
        if unitaries.len() != program_dim {
            return Err(MultimeterError::ProgramBasisSize {
                expected: unitaries.len(),
                found: program_dim,
            });
        }
        let joint = data_dim * ancilla_dim;
        for (index, u) in unitaries.iter().enumerate() {
            if !u.is_square() || u.rows() != joint {
                return Err(MultimeterError::OperationDimension {
                    index,
                    expected: joint,
                    found: u.rows(),
                });
            }
            let check = linalg::check_unitary(u, tolerance::STRUCTURAL)?;
            if !check.passed {
                return Err(MultimeterError::OperationNotUnitary {
                    index,
                    deviation: check.deviation,
                });
            }
        }
        let deviation = linalg::basis_deviation(&program_basis)?;
        if deviation > tolerance::STRUCTURAL {
            return Err(MultimeterError::BasisNotOrthonormal { deviation });
        }
        let layout = HilbertLayout::new(vec![data_dim, ancilla_dim, program_dim])?;
        Ok(Self {
            unitaries,
            program_basis,
            layout,
        })
    }

    pub fn unitaries(&self) -> &[ComplexMatrix] {
        &self.unitaries
    }

    pub fn program_basis(&self) -> &[Ket] {
        &self.program_basis
    }

    pub fn layout(&self) -> &HilbertLayout {
        &self.layout
    }

    pub fn data_dim(&self) -> usize {
        self.layout.factors()[0]
    }

    pub fn ancilla_dim(&self) -> usize {
        self.layout.factors()[1]
    }

    pub fn program_dim(&self) -> usize {
        self.layout.factors()[2]
    }
}

/// Product measurement: one orthonormal basis per subsystem.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementModel {
    data_basis: Vec<Ket>,
    ancilla_basis: Vec<Ket>,
    program_basis: Vec<Ket>,
}

impl MeasurementModel {
    pub fn new(
        data_basis: Vec<Ket>,
        ancilla_basis: Vec<Ket>,
        program_basis: Vec<Ket>,
    ) -> Result<Self, MultimeterError> {
        for basis in [&data_basis, &ancilla_basis, &program_basis] {
            let deviation = linalg::basis_deviation(basis)?;
            if deviation > tolerance::STRUCTURAL {
                return Err(MultimeterError::BasisNotOrthonormal { deviation });
            }
        }
        Ok(Self {
            data_basis,
            ancilla_basis,
            program_basis,
        })
    }

    /// Computational bases on all three subsystems.
    pub fn computational(
        data_dim: usize,
        ancilla_dim: usize,
        program_dim: usize,
    ) -> Self {
        let basis = |d: usize| (0..d).map(|i| Ket::basis(d, i)).collect::<Vec<_>>();
        Self {
            data_basis: basis(data_dim),
            ancilla_basis: basis(ancilla_dim),
            program_basis: basis(program_dim),
        }
    }

    pub fn data_basis(&self) -> &[Ket] {
        &self.data_basis
    }

    pub fn ancilla_basis(&self) -> &[Ket] {
        &self.ancilla_basis
    }

    pub fn program_basis(&self) -> &[Ket] {
        &self.program_basis
    }

    pub fn dims(&self) -> [usize; 3] {
        [
            self.data_basis.len(),
            self.ancilla_basis.len(),
            self.program_basis.len(),
        ]
    }
}

/// The block unitary `sum_k U_k (x) |P_k><P_k|` on data (x) ancilla (x)
/// program.
pub fn build_processor_unitary(processor: &Processor) -> ComplexMatrix {
    let total = processor.layout().total_dim();
    let mut out = ComplexMatrix::zeros(total, total);
    for (u, pk) in processor
        .unitaries()
        .iter()
        .zip(processor.program_basis())
    {
        out = out.add(&u.kron(&pk.projector()));
    }
    out
}

/// Rank-1 projectors `|D_i A_j P'_k><D_i A_j P'_k|` in lexicographic
/// `(i, j, k)` order.
pub fn build_measurement(meas: &MeasurementModel) -> Vec<ComplexMatrix> {
    let mut projectors =
        Vec::with_capacity(meas.data_basis.len() * meas.ancilla_basis.len() * meas.program_basis.len());
    for d in &meas.data_basis {
        let proj_d = d.projector();
        for a in &meas.ancilla_basis {
            let proj_da = proj_d.kron(&a.projector());
            for p in &meas.program_basis {
                projectors.push(proj_da.kron(&p.projector()));
            }
        }
    }
    projectors
}

/// Probability table over outcome triples `(i, j, k)`, stored in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeTable {
    dims: [usize; 3],
    probabilities: Vec<f64>,
}

impl OutcomeTable {
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn prob(&self, i: usize, j: usize, k: usize) -> f64 {
        let [_, dj, dk] = self.dims;
        self.probabilities[(i * dj + j) * dk + k]
    }

    /// Iterate `((i, j, k), p)` in storage order.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize, usize), f64)> + '_ {
        let [_, dj, dk] = self.dims;
        self.probabilities.iter().enumerate().map(move |(idx, &p)| {
            let k = idx % dk;
            let j = (idx / dk) % dj;
            let i = idx / (dj * dk);
            ((i, j, k), p)
        })
    }

    /// Marginal distribution over the data outcome index.
    pub fn data_marginal(&self) -> Vec<f64> {
        let [di, dj, dk] = self.dims;
        let mut out = vec![0.0; di];
        for i in 0..di {
            for j in 0..dj {
                for k in 0..dk {
                    out[i] += self.prob(i, j, k);
                }
            }
        }
        out
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

/// Full-state simulation of the device: evolve
/// `rho_D (x) rho_A (x) rho_P` through the processor unitary and project on
/// the product measurement. The canonical oracle for every reduced
/// construction.
pub fn simulate(
    processor: &Processor,
    meas: &MeasurementModel,
    rho_data: &ComplexMatrix,
    rho_ancilla: &ComplexMatrix,
    rho_program: &ComplexMatrix,
) -> Result<OutcomeTable, MultimeterError> {
    let dims = [
        processor.data_dim(),
        processor.ancilla_dim(),
        processor.program_dim(),
    ];
    if meas.dims() != dims {
        return Err(MultimeterError::LayoutMismatch {
            expected: dims,
            found: meas.dims(),
        });
    }
    for (rho, expected) in [
        (rho_data, dims[0]),
        (rho_ancilla, dims[1]),
        (rho_program, dims[2]),
    ] {
        povm::validate_density(rho, tolerance::STRUCTURAL)?;
        if rho.rows() != expected {
            return Err(MultimeterError::DensityDimension {
                expected,
                found: rho.rows(),
            });
        }
    }

    let unitary = build_processor_unitary(processor);
    let rho = rho_data.kron(rho_ancilla).kron(rho_program);
    let evolved = unitary.matmul(&rho).matmul(&unitary.dagger());
    let probabilities = build_measurement(meas)
        .iter()
        .map(|proj| proj.matmul(&evolved).trace().re.clamp(0.0, 1.0))
        .collect();
    Ok(OutcomeTable {
        dims,
        probabilities,
    })
}

/// Data-only operation bank that routes a single-qubit von Neumann
/// measurement onto one of the three fixed orthogonal spatial axes: the
/// identity plus the two rotations `(sigma_x + sigma_z)/sqrt(2)` and
/// `(sigma_y + sigma_z)/sqrt(2)`.
pub fn spin_axis_bank() -> Processor {
    let inv_sqrt2 = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
    let unitaries = vec![
        ComplexMatrix::identity(2),
        linalg::pauli_x().add(&linalg::pauli_z()).scale(inv_sqrt2),
        linalg::pauli_y().add(&linalg::pauli_z()).scale(inv_sqrt2),
    ];
    let program_basis = (0..3).map(|i| Ket::basis(3, i)).collect();
    Processor::new(unitaries, program_basis, 2, 1).expect("static bank is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{check_unitary, pauli_x};
    use crate::rng::SplitMix64;
    use crate::sampling;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_identity_processor_builds_identity() {
        let p = Processor::new(
            vec![ComplexMatrix::identity(4)],
            vec![Ket::basis(1, 0)],
            2,
            2,
        )
        .unwrap();
        assert_eq!(build_processor_unitary(&p), ComplexMatrix::identity(4));
    }

    #[test]
    fn two_branch_processor_is_block_diagonal() {
        // Data-only qubit with bank {I, sigma_x} and computational program
        // basis: the processor is a controlled-NOT with program as control.
        // Layout is data (x) program, so the blocks interleave in the data
        // index; check the action on basis states instead of the raw blocks.
        let p = Processor::new(
            vec![ComplexMatrix::identity(2), pauli_x()],
            vec![Ket::basis(2, 0), Ket::basis(2, 1)],
            2,
            1,
        )
        .unwrap();
        let u = build_processor_unitary(&p);
        assert!(check_unitary(&u, 1e-10).unwrap().passed);
        let layout = HilbertLayout::new(vec![2, 1, 2]).unwrap();
        // |d=0, p=1> -> |d=1, p=1>
        let input = Ket::basis(4, layout.compose(&[0, 0, 1]));
        let output = u.matvec(&input);
        let expect = Ket::basis(4, layout.compose(&[1, 0, 1]));
        assert!((output.inner(&expect).norm() - 1.0).abs() < 1e-12);
        // |d=0, p=0> is left alone
        let input = Ket::basis(4, layout.compose(&[0, 0, 0]));
        let output = u.matvec(&input);
        assert!((output.inner(&input).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn processor_unitary_is_unitary_for_random_banks() {
        let mut rng = SplitMix64::new(51);
        for _ in 0..5 {
            let p = Processor::new(
                vec![
                    sampling::random_unitary(4, &mut rng),
                    sampling::random_unitary(4, &mut rng),
                    sampling::random_unitary(4, &mut rng),
                ],
                sampling::random_basis(3, &mut rng),
                2,
                2,
            )
            .unwrap();
            let u = build_processor_unitary(&p);
            assert!(check_unitary(&u, 1e-10).unwrap().passed);
        }
    }

    #[test]
    fn processor_rejects_non_unitary_operation() {
        let bad = ComplexMatrix::identity(2).scale(c(1.001, 0.0));
        let err = Processor::new(vec![bad], vec![Ket::basis(1, 0)], 2, 1).unwrap_err();
        assert!(matches!(err, MultimeterError::OperationNotUnitary { .. }));
    }

    #[test]
    fn measurement_of_computational_bases_is_complete_and_orthogonal() {
        let meas = MeasurementModel::computational(2, 2, 2);
        let projectors = build_measurement(&meas);
        assert_eq!(projectors.len(), 8);
        let mut sum = ComplexMatrix::zeros(8, 8);
        for p in &projectors {
            sum = sum.add(p);
        }
        assert!(sum.max_abs_diff(&ComplexMatrix::identity(8)) < 1e-12);
        for (a, pa) in projectors.iter().enumerate() {
            for (b, pb) in projectors.iter().enumerate() {
                let prod = pa.matmul(pb);
                if a == b {
                    assert!(prod.max_abs_diff(pa) < 1e-12);
                } else {
                    assert!(prod.max_abs_entry() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn trivial_device_reads_out_basis_states() {
        let p = Processor::new(
            vec![ComplexMatrix::identity(4), ComplexMatrix::identity(4)],
            vec![Ket::basis(2, 0), Ket::basis(2, 1)],
            2,
            2,
        )
        .unwrap();
        let meas = MeasurementModel::computational(2, 2, 2);
        // |1 0 1>
        let table = simulate(
            &p,
            &meas,
            &Ket::basis(2, 1).projector(),
            &Ket::basis(2, 0).projector(),
            &Ket::basis(2, 1).projector(),
        )
        .unwrap();
        assert_abs_diff_eq!(table.prob(1, 0, 1), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(table.total(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn simulate_probabilities_are_normalized() {
        let mut rng = SplitMix64::new(61);
        let p = Processor::new(
            vec![
                sampling::random_unitary(4, &mut rng),
                sampling::random_unitary(4, &mut rng),
            ],
            sampling::random_basis(2, &mut rng),
            2,
            2,
        )
        .unwrap();
        let meas = MeasurementModel::new(
            sampling::random_basis(2, &mut rng),
            sampling::random_basis(2, &mut rng),
            sampling::random_basis(2, &mut rng),
        )
        .unwrap();
        let table = simulate(
            &p,
            &meas,
            &sampling::random_density(2, &mut rng),
            &sampling::random_density(2, &mut rng),
            &sampling::random_density(2, &mut rng),
        )
        .unwrap();
        assert_abs_diff_eq!(table.total(), 1.0, epsilon = 1e-10);
        assert!(table.probabilities().iter().all(|&p| p >= 0.0));
    }

    #[test]
    fn spin_axis_bank_is_valid_and_routes_measurements() {
        let bank = spin_axis_bank();
        for u in bank.unitaries() {
            assert!(check_unitary(u, 1e-10).unwrap().passed);
        }
        let meas = MeasurementModel::computational(2, 1, 3);
        let plus = Ket::normalized(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();

        // Program |P_2>: Hadamard-like rotation maps |+> to |0>,
        // so the data outcome is deterministic.
        let table = simulate(
            &bank,
            &meas,
            &plus.projector(),
            &ComplexMatrix::identity(1),
            &Ket::basis(3, 1).projector(),
        )
        .unwrap();
        let marginal = table.data_marginal();
        assert_abs_diff_eq!(marginal[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(marginal[1], 0.0, epsilon = 1e-12);

        // Program |P_1>: plain z measurement of |+> is a fair coin.
        let table = simulate(
            &bank,
            &meas,
            &plus.projector(),
            &ComplexMatrix::identity(1),
            &Ket::basis(3, 0).projector(),
        )
        .unwrap();
        let marginal = table.data_marginal();
        assert_abs_diff_eq!(marginal[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(marginal[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn global_phase_on_an_operation_leaves_matched_probabilities_unchanged() {
        // With the program measured in its own encoding basis the branches
        // never interfere, so a phase on one operation cancels. (Measuring
        // the program in a rotated basis instead would expose the phase as
        // a relative one between branches.)
        let mut rng = SplitMix64::new(71);
        let u1 = sampling::random_unitary(4, &mut rng);
        let u2 = sampling::random_unitary(4, &mut rng);
        let program_basis = sampling::random_basis(2, &mut rng);
        let rho_d = sampling::random_density(2, &mut rng);
        let rho_a = sampling::random_density(2, &mut rng);
        let rho_p = sampling::random_density(2, &mut rng);
        let meas = MeasurementModel::new(
            sampling::random_basis(2, &mut rng),
            sampling::random_basis(2, &mut rng),
            program_basis.clone(),
        )
        .unwrap();

        let phase = Complex64::from_polar(1.0, 1.234);
        let base = Processor::new(
            vec![u1.clone(), u2.clone()],
            program_basis.clone(),
            2,
            2,
        )
        .unwrap();
        let phased = Processor::new(
            vec![u1.scale(phase), u2],
            program_basis,
            2,
            2,
        )
        .unwrap();
        let t1 = simulate(&base, &meas, &rho_d, &rho_a, &rho_p).unwrap();
        let t2 = simulate(&phased, &meas, &rho_d, &rho_a, &rho_p).unwrap();
        for (a, b) in t1.probabilities().iter().zip(t2.probabilities()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn processor_commutes_with_program_projectors() {
        let mut rng = SplitMix64::new(81);
        let p = Processor::new(
            vec![
                sampling::random_unitary(4, &mut rng),
                sampling::random_unitary(4, &mut rng),
            ],
            sampling::random_basis(2, &mut rng),
            2,
            2,
        )
        .unwrap();
        let u = build_processor_unitary(&p);
        let id_da = ComplexMatrix::identity(4);
        for pk in p.program_basis() {
            let proj = id_da.kron(&pk.projector());
            let left = u.matmul(&proj);
            let right = proj.matmul(&u);
            assert!(left.max_abs_diff(&right) < 1e-12);
        }
    }
}
