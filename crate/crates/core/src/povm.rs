//! POVM data model, validation, Born-rule evaluation and sampling, plus the
//! constructions that reduce a programmable composite device to an effective
//! POVM on the data register alone.
//!
//! Four reductions are provided, from most to least general:
//! `induced_povm_general` (program measured in an arbitrary basis),
//! `induced_povm_matched` (program measured in the encoding basis),
//! `induced_povm_no_ancilla` (operations on the data register only), and
//! `program_contraction` (pure program, mismatched bases; yields operators
//! that are neither unitary nor Hermitian in general).

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{
    self, hermitian_eigenvalues, partial_trace, ComplexMatrix, HilbertLayout, Ket, LinalgError,
};
use crate::rng;
use crate::tolerance;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PovmError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("POVM has no effects")]
    Empty,
    #[error("effect dimension {found} differs from POVM dimension {expected}")]
    EffectDimension { expected: usize, found: usize },
    #[error("effects do not sum to identity (deviation {deviation:.3e})")]
    NotComplete { deviation: f64 },
    #[error("effect has eigenvalue {min_eigenvalue:.3e} below the positivity floor")]
    NotPositive { min_eigenvalue: f64 },
    #[error("basis is not orthonormal and complete (deviation {deviation:.3e})")]
    BasisNotOrthonormal { deviation: f64 },
    #[error("operator is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },
    #[error("invalid density matrix: {reason}")]
    InvalidDensity { reason: String },
    #[error("program amplitudes are not normalized (|xi|^2 = {norm_sqr})")]
    ProgramNotNormalized { norm_sqr: f64 },
    #[error("operation count {operations} does not match program dimension {program_dim}")]
    ProgramCountMismatch {
        operations: usize,
        program_dim: usize,
    },
    #[error("empty probability list")]
    EmptyDistribution,
    #[error("probabilities sum to {sum}, too far from 1 to renormalize")]
    DistributionNotNormalized { sum: f64 },
    #[error("negative probability {value:.3e} at index {index}")]
    NegativeProbability { index: usize, value: f64 },
}

/// One positive operator of a POVM, tagged with its outcome indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect {
    pub label: Vec<usize>,
    pub operator: ComplexMatrix,
}

impl Effect {
    pub fn new(label: Vec<usize>, operator: ComplexMatrix) -> Self {
        Self { label, operator }
    }
}

/// Ordered list of effects decomposing the identity on the data space.
///
/// Effects of negligible norm are retained so that outcome labels stay
/// aligned with their index grid; reporting layers may filter.
#[derive(Debug, Clone, PartialEq)]
pub struct Povm {
    effects: Vec<Effect>,
    dim: usize,
}

impl Povm {
    pub fn new(effects: Vec<Effect>) -> Result<Self, PovmError> {
        let Some(first) = effects.first() else {
            return Err(PovmError::Empty);
        };
        let dim = first.operator.rows();
        for e in &effects {
            if !e.operator.is_square() || e.operator.rows() != dim {
                return Err(PovmError::EffectDimension {
                    expected: dim,
                    found: e.operator.rows(),
                });
            }
        }
        Ok(Self { effects, dim })
    }

    pub fn effects(&self) -> &[Effect] {
        &self.effects
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    /// Entrywise sum of all effects.
    pub fn effect_sum(&self) -> ComplexMatrix {
        let mut sum = ComplexMatrix::zeros(self.dim, self.dim);
        for e in &self.effects {
            sum = sum.add(&e.operator);
        }
        sum
    }
}

/// Pure program state expressed by its amplitudes over the encoding basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureProgram {
    amplitudes: Vec<Complex64>,
}

impl PureProgram {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self, PovmError> {
        let norm_sqr: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > tolerance::NORMALIZATION {
            return Err(PovmError::ProgramNotNormalized { norm_sqr });
        }
        Ok(Self { amplitudes })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    /// Density matrix `|xi><xi|` in the encoding basis.
    pub fn density(&self) -> ComplexMatrix {
        let ket = Ket::from_amplitudes(self.amplitudes.clone()).expect("amplitudes are finite");
        ket.projector()
    }
}

/// Validation report: completeness deviation plus the smallest eigenvalue of
/// every effect.
#[derive(Debug, Clone, PartialEq)]
pub struct PovmValidation {
    pub completeness_deviation: f64,
    pub min_eigenvalues: Vec<f64>,
    pub passed: bool,
}

/// Check the decomposition of the identity and the positivity of every
/// effect. Eigenvalues in `[-tol, 0)` count as numerical zero.
pub fn validate_povm(povm: &Povm, tol: f64) -> Result<PovmValidation, PovmError> {
    let completeness_deviation = povm
        .effect_sum()
        .max_abs_diff(&ComplexMatrix::identity(povm.dim()));
    let mut min_eigenvalues = Vec::with_capacity(povm.len());
    for e in povm.effects() {
        let eigs = hermitian_eigenvalues(&e.operator, tol)?;
        min_eigenvalues.push(eigs[0]);
    }
    let passed = completeness_deviation <= tol
        && min_eigenvalues.iter().all(|&m| m >= -tol);
    Ok(PovmValidation {
        completeness_deviation,
        min_eigenvalues,
        passed,
    })
}

/// Check Hermiticity, unit trace and positivity of a density matrix.
pub fn validate_density(rho: &ComplexMatrix, tol: f64) -> Result<(), PovmError> {
    if !rho.is_square() {
        return Err(PovmError::InvalidDensity {
            reason: format!("not square ({}x{})", rho.rows(), rho.cols()),
        });
    }
    let herm = rho.hermitian_deviation();
    if herm > tol {
        return Err(PovmError::InvalidDensity {
            reason: format!("not Hermitian (deviation {herm:.3e})"),
        });
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
        return Err(PovmError::InvalidDensity {
            reason: format!("trace {} + {}i is not 1", tr.re, tr.im),
        });
    }
    let eigs = hermitian_eigenvalues(rho, tol)?;
    if eigs[0] < -tol {
        return Err(PovmError::InvalidDensity {
            reason: format!("negative eigenvalue {:.3e}", eigs[0]),
        });
    }
    Ok(())
}

/// Born rule: `p_mu = Re tr(A_mu rho)`, clamped to `[0, 1]`.
pub fn born_probabilities(povm: &Povm, rho: &ComplexMatrix) -> Result<Vec<f64>, PovmError> {
    validate_density(rho, tolerance::STRUCTURAL)?;
    if rho.rows() != povm.dim() {
        return Err(PovmError::EffectDimension {
            expected: povm.dim(),
            found: rho.rows(),
        });
    }
    let mut probs = Vec::with_capacity(povm.len());
    for e in povm.effects() {
        let p = e.operator.matmul(rho).trace().re;
        if p < -tolerance::AMPLITUDE {
            return Err(PovmError::NegativeProbability {
                index: probs.len(),
                value: p,
            });
        }
        probs.push(p.clamp(0.0, 1.0));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > tolerance::STRUCTURAL {
        return Err(PovmError::DistributionNotNormalized { sum });
    }
    Ok(probs)
}

/// Draw an outcome index by inverse CDF. A pure function of
/// `(probabilities, rng_state)`; callers own stream splitting.
pub fn sample_outcome(probabilities: &[f64], rng_state: u64) -> Result<usize, PovmError> {
    if probabilities.is_empty() {
        return Err(PovmError::EmptyDistribution);
    }
    let mut sum = 0.0;
    for (index, &p) in probabilities.iter().enumerate() {
        if p < -tolerance::AMPLITUDE {
            return Err(PovmError::NegativeProbability { index, value: p });
        }
        sum += p.max(0.0);
    }
    if (sum - 1.0).abs() > tolerance::SAMPLE_SUM {
        return Err(PovmError::DistributionNotNormalized { sum });
    }
    let u = rng::uniform_f64(rng::mix64(rng_state)) * sum;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (index, &p) in probabilities.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last_positive = index;
        if u < acc {
            return Ok(index);
        }
    }
    Ok(last_positive)
}

fn require_orthonormal(kets: &[Ket]) -> Result<(), PovmError> {
    let deviation = linalg::basis_deviation(kets)?;
    if deviation > tolerance::STRUCTURAL {
        return Err(PovmError::BasisNotOrthonormal { deviation });
    }
    Ok(())
}

fn require_unitary(ops: &[ComplexMatrix], dim: usize) -> Result<(), PovmError> {
    for u in ops {
        if !u.is_square() || u.rows() != dim {
            return Err(PovmError::EffectDimension {
                expected: dim,
                found: u.rows(),
            });
        }
        let check = linalg::check_unitary(u, tolerance::STRUCTURAL)?;
        if !check.passed {
            return Err(PovmError::NotUnitary {
                deviation: check.deviation,
            });
        }
    }
    Ok(())
}

/// Effective POVM of the full device: joint operations on data and ancilla
/// selected by the program register, followed by independent projective
/// measurements on all three subsystems (the program measured in an
/// arbitrary basis `program_meas_basis`).
///
/// One effect per `(i, j, k)` outcome triple, in lexicographic order.
#[allow(clippy::too_many_arguments)]
pub fn induced_povm_general(
    unitaries: &[ComplexMatrix],
    program_basis: &[Ket],
    data_basis: &[Ket],
    ancilla_basis: &[Ket],
    program_meas_basis: &[Ket],
    rho_ancilla: &ComplexMatrix,
    rho_program: &ComplexMatrix,
) -> Result<Povm, PovmError> {
    let program_dim = program_basis.len();
    let data_dim = data_basis.len();
    let ancilla_dim = ancilla_basis.len();
    if unitaries.len() != program_dim {
        return Err(PovmError::ProgramCountMismatch {
            operations: unitaries.len(),
            program_dim,
        });
    }
    require_orthonormal(program_basis)?;
    require_orthonormal(data_basis)?;
    require_orthonormal(ancilla_basis)?;
    require_orthonormal(program_meas_basis)?;
    if program_meas_basis.len() != program_dim {
        return Err(PovmError::ProgramCountMismatch {
            operations: program_meas_basis.len(),
            program_dim,
        });
    }
    require_unitary(unitaries, data_dim * ancilla_dim)?;
    validate_density(rho_ancilla, tolerance::STRUCTURAL)?;
    validate_density(rho_program, tolerance::STRUCTURAL)?;
    if rho_ancilla.rows() != ancilla_dim || rho_program.rows() != program_dim {
        return Err(PovmError::EffectDimension {
            expected: ancilla_dim,
            found: rho_ancilla.rows(),
        });
    }

    let joint_layout = HilbertLayout::new(vec![data_dim, ancilla_dim])?;
    let id_rho_a = ComplexMatrix::identity(data_dim).kron(rho_ancilla);

    // <P_l| rho_P |P_n> in the encoding basis.
    let program_element = |l: usize, n: usize| -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        let pl = program_basis[l].amplitudes();
        let pn = program_basis[n].amplitudes();
        for r in 0..program_dim {
            for c in 0..program_dim {
                acc += pl[r].conj() * rho_program.get(r, c) * pn[c];
            }
        }
        acc
    };

    let mut effects = Vec::with_capacity(data_dim * ancilla_dim * program_dim);
    for i in 0..data_dim {
        let proj_d = data_basis[i].projector();
        for j in 0..ancilla_dim {
            let proj_da = proj_d.kron(&ancilla_basis[j].projector());
            for k in 0..program_dim {
                let mut acc = ComplexMatrix::zeros(data_dim, data_dim);
                for n in 0..program_dim {
                    let meas_n = program_meas_basis[k].inner(&program_basis[n]).conj();
                    if meas_n.norm() < 1e-300 {
                        continue;
                    }
                    for l in 0..program_dim {
                        let meas_l = program_meas_basis[k].inner(&program_basis[l]);
                        let weight = program_element(l, n) * meas_l * meas_n;
                        if weight.norm() < 1e-300 {
                            continue;
                        }
                        let m = unitaries[n]
                            .dagger()
                            .matmul(&proj_da)
                            .matmul(&unitaries[l])
                            .matmul(&id_rho_a);
                        let reduced = partial_trace(&m, &joint_layout, &[0])?;
                        acc = acc.add(&reduced.scale(weight));
                    }
                }
                effects.push(Effect::new(vec![i, j, k], acc));
            }
        }
    }
    Povm::new(effects)
}

/// Specialization of [`induced_povm_general`] to a program measured in its
/// own encoding basis: each effect carries the weight `<P_k| rho_P |P_k>`.
pub fn induced_povm_matched(
    unitaries: &[ComplexMatrix],
    program_basis: &[Ket],
    data_basis: &[Ket],
    ancilla_basis: &[Ket],
    rho_ancilla: &ComplexMatrix,
    rho_program: &ComplexMatrix,
) -> Result<Povm, PovmError> {
    let program_dim = program_basis.len();
    let data_dim = data_basis.len();
    let ancilla_dim = ancilla_basis.len();
    if unitaries.len() != program_dim {
        return Err(PovmError::ProgramCountMismatch {
            operations: unitaries.len(),
            program_dim,
        });
    }
    require_orthonormal(program_basis)?;
    require_orthonormal(data_basis)?;
    require_orthonormal(ancilla_basis)?;
    require_unitary(unitaries, data_dim * ancilla_dim)?;
    validate_density(rho_ancilla, tolerance::STRUCTURAL)?;
    validate_density(rho_program, tolerance::STRUCTURAL)?;

    let joint_layout = HilbertLayout::new(vec![data_dim, ancilla_dim])?;
    let id_rho_a = ComplexMatrix::identity(data_dim).kron(rho_ancilla);

    let mut effects = Vec::with_capacity(data_dim * ancilla_dim * program_dim);
    for i in 0..data_dim {
        let proj_d = data_basis[i].projector();
        for j in 0..ancilla_dim {
            let proj_da = proj_d.kron(&ancilla_basis[j].projector());
            for k in 0..program_dim {
                let pk = &program_basis[k];
                let weight = pk.inner(&rho_program.matvec(pk));
                let m = unitaries[k]
                    .dagger()
                    .matmul(&proj_da)
                    .matmul(&unitaries[k])
                    .matmul(&id_rho_a);
                let reduced = partial_trace(&m, &joint_layout, &[0])?;
                effects.push(Effect::new(vec![i, j, k], reduced.scale(weight)));
            }
        }
    }
    Povm::new(effects)
}

/// No ancilla and operations on the data register only:
/// `A_ik = U_k† |D_i><D_i| U_k <P_k| rho_P |P_k>`.
///
/// This is the coin-tossing regime: the output depends only on the diagonal
/// of the program state in the encoding basis.
pub fn induced_povm_no_ancilla(
    unitaries: &[ComplexMatrix],
    program_basis: &[Ket],
    data_basis: &[Ket],
    rho_program: &ComplexMatrix,
) -> Result<Povm, PovmError> {
    let program_dim = program_basis.len();
    let data_dim = data_basis.len();
    if unitaries.len() != program_dim {
        return Err(PovmError::ProgramCountMismatch {
            operations: unitaries.len(),
            program_dim,
        });
    }
    require_orthonormal(program_basis)?;
    require_orthonormal(data_basis)?;
    require_unitary(unitaries, data_dim)?;
    validate_density(rho_program, tolerance::STRUCTURAL)?;

    let mut effects = Vec::with_capacity(data_dim * program_dim);
    for i in 0..data_dim {
        let proj_d = data_basis[i].projector();
        for k in 0..program_dim {
            let pk = &program_basis[k];
            let weight = pk.inner(&rho_program.matvec(pk));
            let op = unitaries[k]
                .dagger()
                .matmul(&proj_d)
                .matmul(&unitaries[k])
                .scale(weight);
            effects.push(Effect::new(vec![i, k], op));
        }
    }
    Povm::new(effects)
}

/// Contraction of the operation bank over a pure program state measured in
/// a (possibly different) program basis:
/// `X_k = sum_m U_m xi_m <P'_k|P_m>`, with effects `A_ik = X_k† |D_i><D_i| X_k`.
///
/// The operators `X_k` are neither unitary nor Hermitian in general. Returns
/// the contracted operators together with the POVM they induce.
pub fn program_contraction(
    unitaries: &[ComplexMatrix],
    program: &PureProgram,
    program_basis: &[Ket],
    program_meas_basis: &[Ket],
    data_basis: &[Ket],
) -> Result<(Vec<ComplexMatrix>, Povm), PovmError> {
    let program_dim = program_basis.len();
    let data_dim = data_basis.len();
    if unitaries.len() != program_dim || program.dim() != program_dim {
        return Err(PovmError::ProgramCountMismatch {
            operations: unitaries.len(),
            program_dim,
        });
    }
    require_orthonormal(program_basis)?;
    require_orthonormal(program_meas_basis)?;
    require_orthonormal(data_basis)?;
    require_unitary(unitaries, data_dim)?;
    if program_meas_basis.len() != program_dim {
        return Err(PovmError::ProgramCountMismatch {
            operations: program_meas_basis.len(),
            program_dim,
        });
    }

    let mut contracted = Vec::with_capacity(program_dim);
    for k in 0..program_dim {
        let mut x = ComplexMatrix::zeros(data_dim, data_dim);
        for m in 0..program_dim {
            let overlap = program_meas_basis[k].inner(&program_basis[m]);
            let coeff = program.amplitudes()[m] * overlap;
            if coeff.norm() < 1e-300 {
                continue;
            }
            x = x.add(&unitaries[m].scale(coeff));
        }
        contracted.push(x);
    }

    let mut effects = Vec::with_capacity(data_dim * program_dim);
    for i in 0..data_dim {
        let proj_d = data_basis[i].projector();
        for (k, x) in contracted.iter().enumerate() {
            let op = x.dagger().matmul(&proj_d).matmul(x);
            effects.push(Effect::new(vec![i, k], op));
        }
    }
    let povm = Povm::new(effects)?;
    Ok((contracted, povm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{pauli_x, pauli_z};
    use crate::rng::SplitMix64;
    use crate::sampling;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn projective_z() -> Povm {
        Povm::new(vec![
            Effect::new(vec![0], Ket::basis(2, 0).projector()),
            Effect::new(vec![1], Ket::basis(2, 1).projector()),
        ])
        .unwrap()
    }

    #[test]
    fn validate_projective_measurement() {
        let report = validate_povm(&projective_z(), 1e-10).unwrap();
        assert!(report.passed);
        assert_eq!(report.completeness_deviation, 0.0);
    }

    #[test]
    fn validate_trivial_povm() {
        let half = ComplexMatrix::identity(2).scale(c(0.5, 0.0));
        let povm = Povm::new(vec![
            Effect::new(vec![0], half.clone()),
            Effect::new(vec![1], half),
        ])
        .unwrap();
        assert!(validate_povm(&povm, 1e-10).unwrap().passed);
    }

    #[test]
    fn validate_rejects_incomplete_set() {
        let p0 = Ket::basis(2, 0).projector();
        let povm = Povm::new(vec![
            Effect::new(vec![0], p0.clone()),
            Effect::new(vec![1], p0),
        ])
        .unwrap();
        let report = validate_povm(&povm, 1e-10).unwrap();
        assert!(!report.passed);
        // Entry (1,1) of the sum is 0 instead of 1.
        assert_abs_diff_eq!(report.completeness_deviation, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn born_rule_on_symmetric_projectors() {
        let plus = Ket::normalized(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let minus = Ket::normalized(vec![c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        let povm = Povm::new(vec![
            Effect::new(vec![0], plus.projector()),
            Effect::new(vec![1], minus.projector()),
        ])
        .unwrap();
        let probs = born_probabilities(&povm, &Ket::basis(2, 0).projector()).unwrap();
        assert_abs_diff_eq!(probs[0], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(probs[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn born_rule_on_maximally_mixed_state() {
        let mut rng = SplitMix64::new(31);
        let dim = 3;
        let u = sampling::random_unitary(dim, &mut rng);
        let basis = sampling::random_basis(dim, &mut rng);
        let effects: Vec<Effect> = basis
            .iter()
            .enumerate()
            .map(|(i, b)| {
                let v = u.matvec(b);
                Effect::new(vec![i], v.projector())
            })
            .collect();
        let povm = Povm::new(effects).unwrap();
        let mixed = ComplexMatrix::identity(dim).scale(c(1.0 / dim as f64, 0.0));
        let probs = born_probabilities(&povm, &mixed).unwrap();
        for (p, e) in probs.iter().zip(povm.effects()) {
            let expected = e.operator.trace().re / dim as f64;
            assert_abs_diff_eq!(*p, expected, epsilon = 1e-12);
        }
    }

    #[test]
    fn sample_degenerate_distributions() {
        assert_eq!(sample_outcome(&[1.0], 123).unwrap(), 0);
        for s in 0..64u64 {
            assert_eq!(sample_outcome(&[0.0, 1.0], s).unwrap(), 1);
        }
        assert!(matches!(
            sample_outcome(&[], 1),
            Err(PovmError::EmptyDistribution)
        ));
    }

    #[test]
    fn sample_is_pure_in_its_state() {
        let probs = [0.3, 0.2, 0.5];
        for s in [0u64, 1, 42, u64::MAX] {
            assert_eq!(
                sample_outcome(&probs, s).unwrap(),
                sample_outcome(&probs, s).unwrap()
            );
        }
    }

    #[test]
    fn sample_fair_coin_obeys_binomial_bound() {
        let n = 1_000_000u64;
        let mut heads = 0u64;
        for t in 0..n {
            if sample_outcome(&[0.5, 0.5], rng::substream(7, t)).unwrap() == 0 {
                heads += 1;
            }
        }
        // 3 sigma of Binomial(1e6, 1/2).
        let bound = 3.0 * (n as f64 * 0.25).sqrt();
        assert!(
            (heads as f64 - 500_000.0).abs() < bound,
            "heads = {heads}, bound = {bound}"
        );
    }

    #[test]
    fn no_ancilla_spin_axis_bank_gives_three_axes() {
        let inv_sqrt2 = c(1.0 / 2f64.sqrt(), 0.0);
        let bank = vec![
            ComplexMatrix::identity(2),
            pauli_x().add(&pauli_z()).scale(inv_sqrt2),
            crate::linalg::pauli_y().add(&pauli_z()).scale(inv_sqrt2),
        ];
        let program_basis = sampling::computational_basis(3);
        let data_basis = sampling::computational_basis(2);
        let rho_p = ComplexMatrix::identity(3).scale(c(1.0 / 3.0, 0.0));
        let povm =
            induced_povm_no_ancilla(&bank, &program_basis, &data_basis, &rho_p).unwrap();
        assert_eq!(povm.len(), 6);
        assert!(validate_povm(&povm, 1e-10).unwrap().passed);

        let third = c(1.0 / 3.0, 0.0);
        let z0 = Ket::basis(2, 0);
        let x_plus = Ket::normalized(vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let y_plus = Ket::normalized(vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        // Effects are ordered (i, k) lexicographically; k indexes the axis.
        let expect = |ket: &Ket| ket.projector().scale(third);
        assert!(povm.effects()[0].operator.max_abs_diff(&expect(&z0)) < 1e-12);
        assert!(povm.effects()[1].operator.max_abs_diff(&expect(&x_plus)) < 1e-12);
        assert!(povm.effects()[2].operator.max_abs_diff(&expect(&y_plus)) < 1e-12);
    }

    #[test]
    fn no_ancilla_pure_program_selects_one_branch() {
        let inv_sqrt2 = c(1.0 / 2f64.sqrt(), 0.0);
        let hadamard = pauli_x().add(&pauli_z()).scale(inv_sqrt2);
        let bank = vec![
            ComplexMatrix::identity(2),
            hadamard.clone(),
            crate::linalg::pauli_y().add(&pauli_z()).scale(inv_sqrt2),
        ];
        let program_basis = sampling::computational_basis(3);
        let data_basis = sampling::computational_basis(2);
        let rho_p = Ket::basis(3, 1).projector();
        let povm =
            induced_povm_no_ancilla(&bank, &program_basis, &data_basis, &rho_p).unwrap();
        // Only the k = 1 branch survives: exactly the sigma_x measurement.
        for e in povm.effects() {
            let expected = if e.label[1] == 1 {
                hadamard
                    .dagger()
                    .matmul(&data_basis[e.label[0]].projector())
                    .matmul(&hadamard)
            } else {
                ComplexMatrix::zeros(2, 2)
            };
            assert!(e.operator.max_abs_diff(&expected) < 1e-12);
        }
    }

    #[test]
    fn no_ancilla_ignores_program_off_diagonals() {
        let mut rng = SplitMix64::new(17);
        let bank = vec![
            sampling::random_unitary(2, &mut rng),
            sampling::random_unitary(2, &mut rng),
        ];
        let program_basis = sampling::computational_basis(2);
        let data_basis = sampling::computational_basis(2);
        let diag = ComplexMatrix::diagonal(&[c(0.7, 0.0), c(0.3, 0.0)]);
        let mut perturbed = diag.clone();
        perturbed.set(0, 1, c(0.2, 0.1));
        perturbed.set(1, 0, c(0.2, -0.1));
        let a = induced_povm_no_ancilla(&bank, &program_basis, &data_basis, &diag).unwrap();
        let b =
            induced_povm_no_ancilla(&bank, &program_basis, &data_basis, &perturbed).unwrap();
        for (ea, eb) in a.effects().iter().zip(b.effects()) {
            assert_eq!(ea.operator, eb.operator);
        }
    }

    #[test]
    fn matched_reduces_to_convex_mix_for_diagonal_program() {
        let mut rng = SplitMix64::new(23);
        let u1 = ComplexMatrix::identity(4);
        let u2 = sampling::random_unitary(2, &mut rng).kron(&ComplexMatrix::identity(2));
        let program_basis = sampling::computational_basis(2);
        let data_basis = sampling::computational_basis(2);
        let ancilla_basis = sampling::computational_basis(2);
        let rho_a = sampling::random_density(2, &mut rng);
        let rho_half = ComplexMatrix::identity(2).scale(c(0.5, 0.0));

        let mixed = induced_povm_matched(
            &[u1.clone(), u2.clone()],
            &program_basis,
            &data_basis,
            &ancilla_basis,
            &rho_a,
            &rho_half,
        )
        .unwrap();
        let only_first = induced_povm_matched(
            &[u1.clone(), u2.clone()],
            &program_basis,
            &data_basis,
            &ancilla_basis,
            &rho_a,
            &Ket::basis(2, 0).projector(),
        )
        .unwrap();
        let only_second = induced_povm_matched(
            &[u1, u2],
            &program_basis,
            &data_basis,
            &ancilla_basis,
            &rho_a,
            &Ket::basis(2, 1).projector(),
        )
        .unwrap();
        for ((m, f), s) in mixed
            .effects()
            .iter()
            .zip(only_first.effects())
            .zip(only_second.effects())
        {
            let blend = f.operator.scale(c(0.5, 0.0)).add(&s.operator.scale(c(0.5, 0.0)));
            assert!(m.operator.max_abs_diff(&blend) < 1e-12);
        }
    }

    #[test]
    fn general_agrees_with_matched_when_bases_coincide() {
        let mut rng = SplitMix64::new(29);
        let unitaries = vec![
            sampling::random_unitary(4, &mut rng),
            sampling::random_unitary(4, &mut rng),
        ];
        let program_basis = sampling::random_basis(2, &mut rng);
        let data_basis = sampling::random_basis(2, &mut rng);
        let ancilla_basis = sampling::random_basis(2, &mut rng);
        let rho_a = sampling::random_density(2, &mut rng);
        let rho_p = sampling::random_density(2, &mut rng);

        let general = induced_povm_general(
            &unitaries,
            &program_basis,
            &data_basis,
            &ancilla_basis,
            &program_basis,
            &rho_a,
            &rho_p,
        )
        .unwrap();
        let matched = induced_povm_matched(
            &unitaries,
            &program_basis,
            &data_basis,
            &ancilla_basis,
            &rho_a,
            &rho_p,
        )
        .unwrap();
        assert_eq!(general.len(), matched.len());
        for (g, m) in general.effects().iter().zip(matched.effects()) {
            assert_eq!(g.label, m.label);
            assert!(g.operator.max_abs_diff(&m.operator) < 1e-12);
        }
    }

    #[test]
    fn general_with_trivial_program_reduces_to_data_projectors() {
        // Single operation, dim-1 ancilla: effects are weighted data projectors.
        let data_basis = sampling::computational_basis(2);
        let ancilla_basis = vec![Ket::basis(1, 0)];
        let program_basis = vec![Ket::basis(1, 0)];
        let rho_a = ComplexMatrix::identity(1);
        let rho_p = ComplexMatrix::identity(1);
        let povm = induced_povm_general(
            &[ComplexMatrix::identity(2)],
            &program_basis,
            &data_basis,
            &ancilla_basis,
            &program_basis,
            &rho_a,
            &rho_p,
        )
        .unwrap();
        assert_eq!(povm.len(), 2);
        for (i, e) in povm.effects().iter().enumerate() {
            assert!(e.operator.max_abs_diff(&data_basis[i].projector()) < 1e-14);
        }
    }

    #[test]
    fn contraction_with_matched_bases_scales_the_bank() {
        let mut rng = SplitMix64::new(37);
        let unitaries = vec![
            sampling::random_unitary(2, &mut rng),
            sampling::random_unitary(2, &mut rng),
        ];
        let basis = sampling::computational_basis(2);
        let amp = 1.0 / 5f64.sqrt();
        let program = PureProgram::new(vec![c(amp, 0.0), c(2.0 * amp, 0.0)]).unwrap();
        let (xs, povm) =
            program_contraction(&unitaries, &program, &basis, &basis, &basis).unwrap();
        for (k, x) in xs.iter().enumerate() {
            let expected = unitaries[k].scale(program.amplitudes()[k]);
            assert!(x.max_abs_diff(&expected) < 1e-14);
        }
        assert!(validate_povm(&povm, 1e-10).unwrap().passed);
    }

    #[test]
    fn contraction_can_produce_non_unitary_operators() {
        // Bank {I, sigma_x}, uniform program, Hadamard-rotated measurement
        // basis: the first contracted operator is (I + sigma_x)/2, a rank-1
        // projector.
        let unitaries = vec![ComplexMatrix::identity(2), pauli_x()];
        let basis = sampling::computational_basis(2);
        let s = 1.0 / 2f64.sqrt();
        let meas_basis = vec![
            Ket::normalized(vec![c(s, 0.0), c(s, 0.0)]).unwrap(),
            Ket::normalized(vec![c(s, 0.0), c(-s, 0.0)]).unwrap(),
        ];
        let program = PureProgram::new(vec![c(s, 0.0), c(s, 0.0)]).unwrap();
        let (xs, povm) =
            program_contraction(&unitaries, &program, &basis, &meas_basis, &basis).unwrap();
        let plus_projector = ComplexMatrix::identity(2)
            .add(&pauli_x())
            .scale(c(0.5, 0.0));
        assert!(xs[0].max_abs_diff(&plus_projector) < 1e-14);
        assert!(!linalg::check_unitary(&xs[0], 1e-10).unwrap().passed);
        assert!(validate_povm(&povm, 1e-10).unwrap().passed);
    }

    #[test]
    fn contraction_matches_general_construction_with_pure_program() {
        let mut rng = SplitMix64::new(41);
        let unitaries = vec![
            sampling::random_unitary(2, &mut rng),
            sampling::random_unitary(2, &mut rng),
            sampling::random_unitary(2, &mut rng),
        ];
        let program_basis = sampling::computational_basis(3);
        let meas_basis = sampling::random_basis(3, &mut rng);
        let data_basis = sampling::computational_basis(2);
        let xi = sampling::random_ket(3, &mut rng);
        let program = PureProgram::new(xi.amplitudes().to_vec()).unwrap();

        let (_, contracted_povm) = program_contraction(
            &unitaries,
            &program,
            &program_basis,
            &meas_basis,
            &data_basis,
        )
        .unwrap();

        // Same device through the general reduction with a dim-1 ancilla.
        let lifted: Vec<ComplexMatrix> = unitaries
            .iter()
            .map(|u| u.kron(&ComplexMatrix::identity(1)))
            .collect();
        let general = induced_povm_general(
            &lifted,
            &program_basis,
            &data_basis,
            &[Ket::basis(1, 0)],
            &meas_basis,
            &ComplexMatrix::identity(1),
            &program.density(),
        )
        .unwrap();

        // General labels are (i, j=0, k); contraction labels are (i, k).
        for (ce, ge) in contracted_povm.effects().iter().zip(general.effects()) {
            assert_eq!(ce.label[0], ge.label[0]);
            assert_eq!(ce.label[1], ge.label[2]);
            assert!(ce.operator.max_abs_diff(&ge.operator) < 1e-12);
        }
    }
}
