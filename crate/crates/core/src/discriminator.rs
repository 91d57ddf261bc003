//! Programmable unambiguous discriminator for pairs of qubit states placed
//! symmetrically around `|0>`.
//!
//! The device is one fixed two-qubit unitary (parametrized by the design
//! angle `phi0`) plus a fixed projective measurement; the pair actually
//! discriminated is selected purely by the ancilla program state `(a, b)`.
//! A correctly programmed device never misidentifies the input; the price
//! is an inconclusive outcome whose weight grows as the pair angle moves
//! away from the design point.

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{ComplexMatrix, Ket};
use crate::tolerance;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum DiscriminatorError {
    #[error("design angle {phi0} is outside [0, pi/2]")]
    InvalidDesign { phi0: f64 },
    #[error("amplitudes are not normalized (|alpha|^2 + |beta|^2 = {norm_sqr})")]
    PairNotNormalized { norm_sqr: f64 },
    #[error("program amplitudes are not normalized (|a|^2 + |b|^2 = {norm_sqr})")]
    ProgramNotNormalized { norm_sqr: f64 },
    #[error("degenerate pair: alpha = 0 leaves no state to discriminate against")]
    DegeneratePair,
    #[error(
        "unprogrammable: phi0 = pi/2 admits only the orthogonal pair alpha = beta = 1/sqrt(2)"
    )]
    Unprogrammable,
}

/// The pair `|psi_1,2> = alpha |0> +/- beta |1>` to be discriminated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatePair {
    alpha: Complex64,
    beta: Complex64,
}

impl StatePair {
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self, DiscriminatorError> {
        let norm_sqr = alpha.norm_sqr() + beta.norm_sqr();
        if (norm_sqr - 1.0).abs() > tolerance::NORMALIZATION {
            return Err(DiscriminatorError::PairNotNormalized { norm_sqr });
        }
        Ok(Self { alpha, beta })
    }

    /// Real pair at separation angle `phi`: `alpha = cos(phi/2)`,
    /// `beta = sin(phi/2)`.
    pub fn from_angle(phi: f64) -> Result<Self, DiscriminatorError> {
        if !(0.0..=std::f64::consts::PI).contains(&phi) {
            return Err(DiscriminatorError::DegeneratePair);
        }
        Ok(Self {
            alpha: Complex64::new((phi / 2.0).cos(), 0.0),
            beta: Complex64::new((phi / 2.0).sin(), 0.0),
        })
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// Separation angle `2 atan2(beta, alpha)`, meaningful for real pairs.
    pub fn phi(&self) -> f64 {
        2.0 * self.beta.re.atan2(self.alpha.re)
    }

    pub fn is_real(&self) -> bool {
        self.alpha.im == 0.0 && self.beta.im == 0.0
    }

    /// `<psi_1|psi_2> = |alpha|^2 - |beta|^2`.
    pub fn overlap(&self) -> f64 {
        self.alpha.norm_sqr() - self.beta.norm_sqr()
    }

    /// The two members as state vectors.
    pub fn kets(&self) -> (Ket, Ket) {
        let psi1 = Ket::from_amplitudes(vec![self.alpha, self.beta]).expect("finite amplitudes");
        let psi2 = Ket::from_amplitudes(vec![self.alpha, -self.beta]).expect("finite amplitudes");
        (psi1, psi2)
    }

    pub fn ket(&self, which: PreparedState) -> Ket {
        let (psi1, psi2) = self.kets();
        match which {
            PreparedState::Psi1 => psi1,
            PreparedState::Psi2 => psi2,
        }
    }
}

/// Fixed device parameter: the pair angle `phi0` the hardware is optimal
/// for, with the internal rotation angle fixed by
/// `cos(theta) = tan(phi0/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscriminatorDesign {
    phi0: f64,
}

impl DiscriminatorDesign {
    pub fn new(phi0: f64) -> Result<Self, DiscriminatorError> {
        if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&phi0) {
            return Err(DiscriminatorError::InvalidDesign { phi0 });
        }
        Ok(Self { phi0 })
    }

    pub fn phi0(&self) -> f64 {
        self.phi0
    }

    pub fn cos_theta(&self) -> f64 {
        // tan(phi0/2) rounds just below 1 at the representable pi/2; pin the
        // boundary so the identity device is exact there instead of being
        // off by sqrt(ulp).
        if self.phi0 >= std::f64::consts::FRAC_PI_2 {
            1.0
        } else {
            (self.phi0 / 2.0).tan().min(1.0)
        }
    }

    pub fn sin_theta(&self) -> f64 {
        let ct = self.cos_theta();
        (1.0 - ct * ct).max(0.0).sqrt()
    }

    pub fn theta(&self) -> f64 {
        self.cos_theta().clamp(-1.0, 1.0).acos()
    }
}

/// Ancilla program state `a |0> + b |1>` selecting the pair to
/// discriminate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AncillaProgram {
    a: Complex64,
    b: Complex64,
}

impl AncillaProgram {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self, DiscriminatorError> {
        let norm_sqr = a.norm_sqr() + b.norm_sqr();
        if (norm_sqr - 1.0).abs() > tolerance::NORMALIZATION {
            return Err(DiscriminatorError::ProgramNotNormalized { norm_sqr });
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn ket(&self) -> Ket {
        Ket::from_amplitudes(vec![self.a, self.b]).expect("finite amplitudes")
    }
}

/// Which member of the pair entered the device.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PreparedState {
    Psi1,
    Psi2,
}

impl PreparedState {
    pub const ALL: [PreparedState; 2] = [PreparedState::Psi1, PreparedState::Psi2];

    pub fn sign(&self) -> f64 {
        match self {
            PreparedState::Psi1 => 1.0,
            PreparedState::Psi2 => -1.0,
        }
    }

    pub fn index(&self) -> usize {
        match self {
            PreparedState::Psi1 => 0,
            PreparedState::Psi2 => 1,
        }
    }
}

/// Measurement verdict of one discrimination shot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Psi1,
    Psi2,
    Inconclusive,
}

impl Verdict {
    pub const ALL: [Verdict; 3] = [Verdict::Psi1, Verdict::Psi2, Verdict::Inconclusive];

    pub fn index(&self) -> usize {
        match self {
            Verdict::Psi1 => 0,
            Verdict::Psi2 => 1,
            Verdict::Inconclusive => 2,
        }
    }
}

/// Verdict attached to each projector of [`discrimination_projectors`]:
/// index 0 identifies `psi_1`, 1 identifies `psi_2`, 2 is inconclusive.
pub fn outcome_map(projector_index: usize) -> Option<Verdict> {
    match projector_index {
        0 => Some(Verdict::Psi1),
        1 => Some(Verdict::Psi2),
        2 => Some(Verdict::Inconclusive),
        _ => None,
    }
}

/// The 4x4 device unitary on data (x) ancilla (basis order
/// `|00>, |01>, |10>, |11>`): a rotation by `theta` inside the
/// `{|00>, |01>}` plane, identity on the `data = 1` subspace.
pub fn design_unitary(design: &DiscriminatorDesign) -> ComplexMatrix {
    let ct = design.cos_theta();
    let st = design.sin_theta();
    let mut u = ComplexMatrix::zeros(4, 4);
    u.set(0, 0, Complex64::new(ct, 0.0));
    u.set(1, 0, Complex64::new(st, 0.0));
    u.set(0, 1, Complex64::new(-st, 0.0));
    u.set(1, 1, Complex64::new(ct, 0.0));
    u.set(2, 2, Complex64::new(1.0, 0.0));
    u.set(3, 3, Complex64::new(1.0, 0.0));
    u
}

/// The fixed projective measurement `{P_+, P_-, P_0}` with
/// `|+-> = (|0_D 0_A> +- |1_D 0_A>)/sqrt(2)` and `P_0` the rank-2 rest.
pub fn discrimination_projectors() -> [ComplexMatrix; 3] {
    let s = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let plus = Ket::from_amplitudes(vec![s, zero, s, zero]).expect("static");
    let minus = Ket::from_amplitudes(vec![s, zero, -s, zero]).expect("static");
    let p_plus = plus.projector();
    let p_minus = minus.projector();
    let p_rest = ComplexMatrix::identity(4).sub(&p_plus).sub(&p_minus);
    [p_plus, p_minus, p_rest]
}

/// The ancilla program `(a, b)` that makes the device unambiguous for the
/// given pair: `b/a = (cos(theta) - beta/alpha)/sin(theta)`, normalized
/// with `a` real and nonnegative.
pub fn solve_program(
    pair: &StatePair,
    design: &DiscriminatorDesign,
) -> Result<AncillaProgram, DiscriminatorError> {
    if pair.alpha().norm() < 1e-15 {
        return Err(DiscriminatorError::DegeneratePair);
    }
    let ct = Complex64::new(design.cos_theta(), 0.0);
    let st = design.sin_theta();
    if st < 1e-15 {
        // theta = 0 turns the device into the identity; the matching
        // condition collapses to alpha = beta.
        if (pair.alpha() - pair.beta()).norm() <= tolerance::NORMALIZATION {
            return AncillaProgram::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        }
        return Err(DiscriminatorError::Unprogrammable);
    }
    let ratio = (ct - pair.beta() / pair.alpha()) / st;
    let a = 1.0 / (1.0 + ratio.norm_sqr()).sqrt();
    AncillaProgram::new(Complex64::new(a, 0.0), ratio * a)
}

/// Amplitudes of the evolved total state, resolved against the measurement
/// of [`discrimination_projectors`].
///
/// When the program solves the matching condition the `wrong` amplitude
/// vanishes and `|success|^2 + |inconclusive|^2` carries all the weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscriminationOutcome {
    /// Amplitude on the projector identifying the prepared state.
    pub success: Complex64,
    /// Amplitude on the projector identifying the other state.
    pub wrong: Complex64,
    /// Amplitudes on `|0_D 1_A>` and `|1_D 1_A>` (inconclusive outcomes).
    pub inconclusive: [Complex64; 2],
}

impl DiscriminationOutcome {
    pub fn success_probability(&self) -> f64 {
        self.success.norm_sqr()
    }

    pub fn wrong_probability(&self) -> f64 {
        self.wrong.norm_sqr()
    }

    pub fn inconclusive_probability(&self) -> f64 {
        self.inconclusive[0].norm_sqr() + self.inconclusive[1].norm_sqr()
    }

    /// Probabilities in verdict order, relative to the prepared state.
    pub fn probabilities(&self) -> [f64; 3] {
        [
            self.success_probability(),
            self.wrong_probability(),
            self.inconclusive_probability(),
        ]
    }
}

/// Send one member of the pair through the device with the given program
/// and resolve the output amplitudes against the measurement.
pub fn evolve(
    pair: &StatePair,
    design: &DiscriminatorDesign,
    program: &AncillaProgram,
    which: PreparedState,
) -> DiscriminationOutcome {
    let ct = design.cos_theta();
    let st = design.sin_theta();
    let sign = Complex64::new(which.sign(), 0.0);
    let (alpha, beta) = (pair.alpha(), pair.beta());
    let (a, b) = (program.a(), program.b());

    // Image of (alpha a, alpha b, s beta a, s beta b) under the device.
    let c00 = alpha * a * ct - alpha * b * st;
    let c01 = alpha * a * st + alpha * b * ct;
    let c10 = sign * beta * a;
    let c11 = sign * beta * b;

    let inv_sqrt2 = Complex64::new(1.0 / 2f64.sqrt(), 0.0);
    let plus = (c00 + c10) * inv_sqrt2;
    let minus = (c00 - c10) * inv_sqrt2;
    let (success, wrong) = match which {
        PreparedState::Psi1 => (plus, minus),
        PreparedState::Psi2 => (minus, plus),
    };
    DiscriminationOutcome {
        success,
        wrong,
        inconclusive: [c01, c11],
    }
}

/// Ratio of the achieved success probability to the optimal one for a real
/// pair at angle `phi` on a device designed for `phi0`:
/// `cos(phi0) (cos(phi) + 1) / (1 + cos(phi0) - sin(phi) sin(phi0))`.
///
/// Valid for `phi` in `(0, pi)` and `phi0` in `[0, pi/2)`; the value at
/// `phi = 0` is the continuous limit of the ratio.
pub fn ratio_to_optimal(phi: f64, phi0: f64) -> f64 {
    phi0.cos() * (phi.cos() + 1.0) / (1.0 + phi0.cos() - phi.sin() * phi0.sin())
}

/// Success probability of the correctly programmed device, taken from the
/// evolved amplitudes (the oracle route).
pub fn success_probability(
    pair: &StatePair,
    design: &DiscriminatorDesign,
) -> Result<f64, DiscriminatorError> {
    let program = solve_program(pair, design)?;
    Ok(evolve(pair, design, &program, PreparedState::Psi1).success_probability())
}

/// Closed form of the success probability for arbitrary complex
/// amplitudes: `2 sin^2(theta) |alpha beta|^2 /
/// (1 - 2 cos(theta) Re(alpha conj(beta)))`.
///
/// Reduces to `optimal_probability(phi) * ratio_to_optimal(phi, phi0)` for
/// real pairs.
pub fn success_closed_form(pair: &StatePair, design: &DiscriminatorDesign) -> f64 {
    let ct = design.cos_theta();
    let st = design.sin_theta();
    let ab = (pair.alpha() * pair.beta()).norm_sqr();
    2.0 * st * st * ab / (1.0 - 2.0 * ct * (pair.alpha() * pair.beta().conj()).re)
}

/// Variant closed form with `sin(theta)` to the first power and
/// `Re(alpha beta)` without conjugation, as sometimes quoted. Kept only for
/// the numerical comparison against the evolved amplitudes run by the
/// verification suite; it does not reproduce them except at corner cases.
pub fn success_closed_form_variant(pair: &StatePair, design: &DiscriminatorDesign) -> f64 {
    let ct = design.cos_theta();
    let st = design.sin_theta();
    let ab = (pair.alpha() * pair.beta()).norm_sqr();
    2.0 * st * ab / (1.0 - 2.0 * ct * (pair.alpha() * pair.beta()).re)
}

/// Optimal unambiguous-discrimination probability for a real pair at angle
/// `phi`: `2 sin^2(phi/2) = 1 - <psi_1|psi_2>`.
pub fn optimal_probability(phi: f64) -> f64 {
    2.0 * (phi / 2.0).sin().powi(2)
}

/// Success probability of randomly alternating the two exclusion
/// measurements: `sin^2(phi) / 2`.
pub fn quasiclassical_probability(phi: f64) -> f64 {
    0.5 * phi.sin().powi(2)
}
