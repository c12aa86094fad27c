//! Randomized property suites for the pointer-basis results:
//!
//! - `theorem1`: correlation in the pointer basis is invariant under dephasing in that basis.
//! - `theorem2`: under phase damping, `J^max` is either constant or decays to the
//!   pointer-basis value at a finite strength and stays there.
//! - `lemma1`: for classical-quantum states the pointer basis is the unique maximizer.
//! - `remark`: without pointer-basis correlation `J^max` decays to zero with no plateau.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{apply_to_apparatus, pointer_decoherence};
use crate::correlations::{
    classical_correlation, conditional_state, maximize_classical_correlation, mutual_information,
    ProjectiveBasis,
};
use crate::dynamics::{sweep, uniform_grid, ChannelFamily, Regime, SweepConfig};
use crate::error::{Error, Result};
use crate::qstate::{make_x_state, remark_state, DensityMatrix};
use crate::sampling::{
    perturbed_basis, random_basis, random_classical_quantum, random_state, random_x_params,
    trial_rng,
};

pub const THEOREM1_STRENGTHS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];
pub const THEOREM1_TOL: f64 = 1e-10;
pub const THEOREM2_LEVEL_TOL: f64 = 1e-8;
/// Theorem 2 needs a strictly positive pointer-basis correlation.
pub const THEOREM2_MIN_JZ: f64 = 1e-3;
pub const THEOREM2_GRID_POINTS: usize = 101;
pub const LEMMA1_ANGLE_TOL: f64 = 1e-3;
pub const LEMMA1_VALUE_TOL: f64 = 1e-6;
pub const LEMMA1_PERTURBATIONS: usize = 20;
pub const REMARK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Theorem1,
    Theorem2,
    Lemma1,
    Remark,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Suite::Theorem1 => "theorem1",
            Suite::Theorem2 => "theorem2",
            Suite::Lemma1 => "lemma1",
            Suite::Remark => "remark",
        })
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "theorem1" => Ok(Suite::Theorem1),
            "theorem2" => Ok(Suite::Theorem2),
            "lemma1" => Ok(Suite::Lemma1),
            "remark" => Ok(Suite::Remark),
            _ => Err(Error::Config(format!(
                "unknown suite `{s}` (theorem1, theorem2, lemma1, remark)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationOutcome {
    pub suite: Suite,
    pub trials: usize,
    pub failures: usize,
    pub worst_violation: f64,
    pub seed: u64,
}

impl VerificationOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn from_trials(suite: Suite, seed: u64, results: Vec<TrialResult>) -> Self {
        VerificationOutcome {
            suite,
            trials: results.len(),
            failures: results.iter().filter(|r| !r.ok).count(),
            worst_violation: results.iter().map(|r| r.violation).fold(0.0, f64::max),
            seed,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct TrialResult {
    ok: bool,
    violation: f64,
}

fn check_trials(trials: usize) -> Result<()> {
    if trials == 0 {
        Err(Error::Config("at least one trial is required".into()))
    } else {
        Ok(())
    }
}

fn run_trials(
    trials: usize,
    trial: impl Fn(u64) -> Result<TrialResult> + Sync + Send,
) -> Result<Vec<TrialResult>> {
    (0..trials as u64).into_par_iter().map(trial).collect()
}

pub fn run_suite(suite: Suite, trials: usize, seed: u64) -> Result<VerificationOutcome> {
    match suite {
        Suite::Theorem1 => verify_theorem1(trials, seed),
        Suite::Theorem2 => verify_theorem2(trials, seed),
        Suite::Lemma1 => verify_lemma1(trials, seed),
        Suite::Remark => {
            let mut outcome = verify_remark(&uniform_grid(trials.max(2))?)?;
            outcome.seed = seed;
            Ok(outcome)
        }
    }
}

/// Largest change, over the dephasing strengths, of `J` in the pointer basis
/// and of the unnormalized conditional blocks `Π_i E_q(ρ) Π_i`.
pub fn pointer_invariance_violation(rho: &DensityMatrix, pointer: &ProjectiveBasis) -> Result<f64> {
    let j0 = classical_correlation(rho, pointer)?;
    let blocks = |state: &DensityMatrix| -> Result<Vec<nalgebra::DMatrix<num_complex::Complex64>>> {
        (0..2)
            .map(|i| {
                let c = conditional_state(state, pointer, i)?;
                Ok(match c.state {
                    Some(s) => s.into_entries().scale(c.probability),
                    None => nalgebra::DMatrix::zeros(2, 2),
                })
            })
            .collect()
    };
    let b0 = blocks(rho)?;
    let mut worst = 0.0f64;
    for q in THEOREM1_STRENGTHS {
        let evolved = apply_to_apparatus(&pointer_decoherence(pointer, q)?, rho)?;
        worst = worst.max((classical_correlation(&evolved, pointer)? - j0).abs());
        for (a, b) in blocks(&evolved)?.iter().zip(&b0) {
            let diff = (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max);
            worst = worst.max(diff);
        }
    }
    Ok(worst)
}

pub fn verify_theorem1(trials: usize, seed: u64) -> Result<VerificationOutcome> {
    check_trials(trials)?;
    let results = run_trials(trials, |t| {
        let mut rng = trial_rng(seed, t);
        let rho = random_state(&mut rng, 4);
        let pointer = random_basis(&mut rng);
        let violation = pointer_invariance_violation(&rho, &pointer)?;
        Ok(TrialResult {
            ok: violation < THEOREM1_TOL,
            violation,
        })
    })?;
    Ok(VerificationOutcome::from_trials(
        Suite::Theorem1,
        seed,
        results,
    ))
}

/// Checks one phase-damping sweep against the two allowed shapes of Theorem 2.
/// Returns `(ok, violation)`.
pub fn theorem2_check(
    rho: &DensityMatrix,
    grid: &[f64],
    config: &SweepConfig,
) -> Result<(bool, f64)> {
    let report = sweep(rho, ChannelFamily::PhaseDamping, grid, config)?;
    let j_pointer = classical_correlation(rho, &ProjectiveBasis::sigma_z())?;

    let rise = report
        .records
        .windows(2)
        .map(|w| w[1].j_max - w[0].j_max)
        .fold(0.0, f64::max);
    let tail_start = match report.transition_p {
        Some(t) => report.records.partition_point(|r| r.p < t),
        None => 0,
    };
    let level_dev = report.records[tail_start..]
        .iter()
        .map(|r| (r.j_max - j_pointer).abs())
        .fold(0.0, f64::max);

    let shape_ok = match report.regime {
        Regime::Constant => true,
        Regime::DecayThenConstant => report.transition_p.is_some_and(|t| t < 1.0),
        _ => false,
    };
    let ok = shape_ok && level_dev < THEOREM2_LEVEL_TOL && rise <= config.monotone_slack;
    Ok((ok, level_dev.max(rise)))
}

pub fn verify_theorem2(trials: usize, seed: u64) -> Result<VerificationOutcome> {
    verify_theorem2_on(trials, seed, &uniform_grid(THEOREM2_GRID_POINTS)?)
}

pub fn verify_theorem2_on(trials: usize, seed: u64, grid: &[f64]) -> Result<VerificationOutcome> {
    check_trials(trials)?;
    let config = SweepConfig::default();
    let results = run_trials(trials, |t| {
        let mut rng = trial_rng(seed, t);
        let rho = loop {
            let rho = make_x_state(random_x_params(&mut rng))?;
            if classical_correlation(&rho, &ProjectiveBasis::sigma_z())? > THEOREM2_MIN_JZ {
                break rho;
            }
        };
        let (ok, violation) = theorem2_check(&rho, grid, &config)?;
        Ok(TrialResult { ok, violation })
    })?;
    Ok(VerificationOutcome::from_trials(
        Suite::Theorem2,
        seed,
        results,
    ))
}

pub fn verify_lemma1(trials: usize, seed: u64) -> Result<VerificationOutcome> {
    check_trials(trials)?;
    let results = run_trials(trials, |t| {
        let mut rng = trial_rng(seed, t);
        let (rho, pointer) = random_classical_quantum(&mut rng, 0.3)?;
        let max = maximize_classical_correlation(&rho)?;
        let angle = max.basis.angular_distance(&pointer);
        let value_dev = (max.value - mutual_information(&rho)?).abs();
        let j_pointer = classical_correlation(&rho, &pointer)?;
        let mut dominated = true;
        for _ in 0..LEMMA1_PERTURBATIONS {
            let delta = rng.random_range(0.05..std::f64::consts::FRAC_PI_2);
            let other = perturbed_basis(&mut rng, &pointer, delta);
            if classical_correlation(&rho, &other)? >= j_pointer {
                dominated = false;
            }
        }
        Ok(TrialResult {
            ok: angle < LEMMA1_ANGLE_TOL && value_dev < LEMMA1_VALUE_TOL && dominated,
            violation: angle.max(value_dev),
        })
    })?;
    Ok(VerificationOutcome::from_trials(
        Suite::Lemma1,
        seed,
        results,
    ))
}

/// Remark state under σz phase damping; one trial per grid point.
pub fn verify_remark(grid: &[f64]) -> Result<VerificationOutcome> {
    let report = sweep(
        &remark_state(),
        ChannelFamily::PhaseDamping,
        grid,
        &SweepConfig::default(),
    )?;
    let records = &report.records;
    let results = records
        .iter()
        .enumerate()
        .map(|(k, r)| {
            let mut violation = r.j_z;
            let mut ok = r.j_z < REMARK_TOL;
            if r.p < 1.0 {
                ok &= r.j_max > REMARK_TOL;
            } else {
                ok &= r.j_max < 1e-9;
                violation = violation.max(r.j_max);
            }
            if let Some(next) = records.get(k + 1) {
                ok &= next.j_max < r.j_max;
                violation = violation.max(next.j_max - r.j_max);
            }
            TrialResult { ok, violation }
        })
        .collect();
    let mut outcome = VerificationOutcome::from_trials(Suite::Remark, 0, results);
    if report.regime != Regime::MonotonicDecay {
        outcome.failures += 1;
    }
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::XStateParams;
    use num_complex::Complex64;

    fn h2(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    #[test]
    fn suite_names_round_trip() {
        for s in [
            Suite::Theorem1,
            Suite::Theorem2,
            Suite::Lemma1,
            Suite::Remark,
        ] {
            assert_eq!(s.to_string().parse::<Suite>().unwrap(), s);
        }
        assert!("theorem3".parse::<Suite>().is_err());
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(verify_theorem1(0, 1).is_err());
        assert!(verify_lemma1(0, 1).is_err());
    }

    #[test]
    fn state_one_pointer_correlation_is_invariant() {
        let rho = make_x_state(XStateParams::STATE_1).unwrap();
        let z = ProjectiveBasis::sigma_z();
        assert!(pointer_invariance_violation(&rho, &z).unwrap() < 1e-14);
        for q in THEOREM1_STRENGTHS {
            let out = apply_to_apparatus(&pointer_decoherence(&z, q).unwrap(), &rho).unwrap();
            assert!((classical_correlation(&out, &z).unwrap() - (1.0 - h2(0.8))).abs() < 1e-12);
        }
    }

    #[test]
    fn product_state_stays_uncorrelated() {
        let rs =
            DensityMatrix::pure(&[Complex64::new(0.6, 0.0), Complex64::new(0.8, 0.0)]).unwrap();
        let ra = DensityMatrix::maximally_mixed(2).unwrap();
        let rho = rs.tensor(&ra).unwrap();
        let b = ProjectiveBasis::new(0.9, 2.0);
        for q in THEOREM1_STRENGTHS {
            let out = apply_to_apparatus(&pointer_decoherence(&b, q).unwrap(), &rho).unwrap();
            assert!(classical_correlation(&out, &b).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn theorem2_reference_states() {
        let grid = uniform_grid(41).unwrap();
        let cfg = SweepConfig::default();
        let (ok1, _) =
            theorem2_check(&make_x_state(XStateParams::STATE_1).unwrap(), &grid, &cfg).unwrap();
        let (ok2, _) =
            theorem2_check(&make_x_state(XStateParams::STATE_2).unwrap(), &grid, &cfg).unwrap();
        assert!(ok1 && ok2);
    }

    #[test]
    fn lemma1_textbook_cases() {
        let zero =
            DensityMatrix::pure(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]).unwrap();
        let one =
            DensityMatrix::pure(&[Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]).unwrap();
        let classical = |pointer: ProjectiveBasis| {
            let [p0, p1] = pointer.projectors();
            let lift = |p: nalgebra::Matrix2<Complex64>| {
                DensityMatrix::new(nalgebra::DMatrix::from_fn(2, 2, |i, j| p[(i, j)])).unwrap()
            };
            zero.tensor(&lift(p0))
                .unwrap()
                .mix(&one.tensor(&lift(p1)).unwrap(), 0.5)
                .unwrap()
        };
        let m = maximize_classical_correlation(&classical(ProjectiveBasis::sigma_z())).unwrap();
        assert!((m.value - 1.0).abs() < 1e-12);
        assert_eq!(m.basis, ProjectiveBasis::sigma_z());

        let m = maximize_classical_correlation(&classical(ProjectiveBasis::sigma_x())).unwrap();
        assert!((m.value - 1.0).abs() < 1e-12);
        assert!((m.basis.theta() - std::f64::consts::FRAC_PI_2).abs() < 1e-6);
    }

    #[test]
    fn small_suites_pass_and_reproduce() {
        let a = verify_theorem1(50, 42).unwrap();
        assert!(a.passed(), "{a:?}");
        assert!(a.worst_violation < 1e-10);
        assert_eq!(verify_theorem1(50, 42).unwrap(), a);

        let l = verify_lemma1(20, 3).unwrap();
        assert!(l.passed(), "{l:?}");

        let t2 = verify_theorem2_on(10, 7, &uniform_grid(41).unwrap()).unwrap();
        assert!(t2.passed(), "{t2:?}");

        let r = verify_remark(&uniform_grid(51).unwrap()).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}
