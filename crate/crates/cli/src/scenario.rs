//! Scenario files: flat JSON describing one discrimination run.
//!
//! Angles are radians; every angle key also has a `*_pi` variant taking
//! multiples of pi. The pair is given either by its angle (`phi`/`phi_pi`)
//! or by explicit complex amplitudes (`alpha_re`, `alpha_im`, `beta_re`,
//! `beta_im`). The ancilla program is solved automatically unless a
//! `program` object pins it.

use num_complex::Complex64;
use serde::Deserialize;

use qmm_core::discriminator::{AncillaProgram, DiscriminatorDesign, StatePair};
use qmm_core::montecarlo::Scenario;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub phi: Option<f64>,
    pub phi_pi: Option<f64>,
    pub alpha_re: Option<f64>,
    pub alpha_im: Option<f64>,
    pub beta_re: Option<f64>,
    pub beta_im: Option<f64>,
    pub phi0: Option<f64>,
    pub phi0_pi: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub priors: Option<[f64; 2]>,
    pub program: Option<ProgramSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProgramSpec {
    pub a_re: f64,
    #[serde(default)]
    pub a_im: f64,
    pub b_re: f64,
    #[serde(default)]
    pub b_im: f64,
}

/// A scenario file resolved against command-line overrides and defaults.
#[derive(Debug, Clone)]
pub struct ResolvedScenario {
    pub pair: StatePair,
    /// Absent only when the device is to be selected from a design bank.
    pub design: Option<DiscriminatorDesign>,
    pub program: Option<AncillaProgram>,
    pub priors: [f64; 2],
    pub trials: u64,
    pub seed: u64,
}

impl ResolvedScenario {
    /// Monte Carlo scenario for a concrete design (the file's own, or one
    /// picked from a bank).
    pub fn with_design(&self, design: DiscriminatorDesign) -> Scenario {
        Scenario {
            pair: self.pair,
            design,
            program: self.program,
            priors: self.priors,
            trials: self.trials,
            seed: self.seed,
        }
    }
}

fn angle(plain: Option<f64>, in_pi: Option<f64>, key: &str) -> Result<Option<f64>, String> {
    match (plain, in_pi) {
        (Some(_), Some(_)) => Err(format!("give either `{key}` or `{key}_pi`, not both")),
        (Some(v), None) => Ok(Some(v)),
        (None, Some(v)) => Ok(Some(v * std::f64::consts::PI)),
        (None, None) => Ok(None),
    }
}

pub const DEFAULT_TRIALS: u64 = 1_000_000;

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| format!("scenario does not parse: {e}"))
    }

    /// Apply precedence: command-line override, then file value, then the
    /// environment/default seed supplied by the caller.
    pub fn resolve(
        &self,
        trials_override: Option<u64>,
        seed_override: Option<u64>,
        fallback_seed: u64,
    ) -> Result<ResolvedScenario, String> {
        let pair_angle = angle(self.phi, self.phi_pi, "phi")?;
        let has_amplitudes = self.alpha_re.is_some()
            || self.alpha_im.is_some()
            || self.beta_re.is_some()
            || self.beta_im.is_some();
        let pair = match (pair_angle, has_amplitudes) {
            (Some(_), true) => {
                return Err("give either `phi` or explicit alpha/beta amplitudes, not both".into())
            }
            (Some(phi), false) => StatePair::from_angle(phi)
                .map_err(|e| format!("invalid pair angle: {e}"))?,
            (None, true) => {
                let (Some(alpha_re), Some(beta_re)) = (self.alpha_re, self.beta_re) else {
                    return Err("amplitude form needs at least `alpha_re` and `beta_re`".into());
                };
                StatePair::new(
                    Complex64::new(alpha_re, self.alpha_im.unwrap_or(0.0)),
                    Complex64::new(beta_re, self.beta_im.unwrap_or(0.0)),
                )
                .map_err(|e| format!("invalid pair amplitudes: {e}"))?
            }
            (None, false) => return Err("scenario gives no pair: set `phi` or amplitudes".into()),
        };

        let design = angle(self.phi0, self.phi0_pi, "phi0")?
            .map(|phi0| {
                DiscriminatorDesign::new(phi0).map_err(|e| format!("invalid design angle: {e}"))
            })
            .transpose()?;

        let program = self
            .program
            .as_ref()
            .map(|p| {
                AncillaProgram::new(
                    Complex64::new(p.a_re, p.a_im),
                    Complex64::new(p.b_re, p.b_im),
                )
                .map_err(|e| format!("invalid program: {e}"))
            })
            .transpose()?;

        Ok(ResolvedScenario {
            pair,
            design,
            program,
            priors: self.priors.unwrap_or([0.5, 0.5]),
            trials: trials_override.or(self.trials).unwrap_or(DEFAULT_TRIALS),
            seed: seed_override.or(self.seed).unwrap_or(fallback_seed),
        })
    }
}
