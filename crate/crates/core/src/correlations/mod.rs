//! Classical correlation of the system as read out through a projective
//! measurement on the apparatus, its maximum over measurement bases, mutual
//! information and quantum discord. All quantities are in bits.

mod basis;
mod optimizer;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use basis::ProjectiveBasis;
pub use optimizer::{maximize_classical_correlation, maximize_with, Maximum, OptimizerConfig};

use crate::error::{Error, Result};
use crate::qstate::{partial_trace, von_neumann_entropy, DensityMatrix, Subsystem};

/// Outcomes with lower probability are treated as never occurring.
pub const MIN_OUTCOME_PROBABILITY: f64 = 1e-14;
/// Discord in `[-DISCORD_TOL, 0)` is clamped to zero; lower values mean the optimizer failed.
pub const DISCORD_TOL: f64 = 1e-6;

/// A measurement outcome and the system state it leaves behind.
#[derive(Debug, Clone)]
pub struct ConditionalState {
    pub probability: f64,
    /// `None` when the outcome has (numerically) zero probability.
    pub state: Option<DensityMatrix>,
}

/// Measures the apparatus with `basis` and returns outcome `outcome`'s
/// probability and the normalized system state conditioned on it.
pub fn conditional_state(
    rho: &DensityMatrix,
    basis: &ProjectiveBasis,
    outcome: usize,
) -> Result<ConditionalState> {
    if rho.dim() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            found: rho.dim(),
        });
    }
    let projector = basis
        .projectors()
        .get(outcome)
        .copied()
        .ok_or(Error::Outcome(outcome))?;
    let m = rho.entries();
    // Tr_a[(I⊗Π) ρ (I⊗Π)] = Tr_a[(I⊗Π) ρ]
    let block = DMatrix::from_fn(2, 2, |s, t| {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..2 {
            for b in 0..2 {
                acc += projector[(a, b)] * m[(2 * s + b, 2 * t + a)];
            }
        }
        acc
    });
    let probability = block.trace().re;
    if probability < MIN_OUTCOME_PROBABILITY {
        return Ok(ConditionalState {
            probability: 0.0,
            state: None,
        });
    }
    let state = DensityMatrix::from_hermitian_part(block.unscale(probability))?;
    Ok(ConditionalState {
        probability,
        state: Some(state),
    })
}

/// `η(x) = -x log2 x`, zero for `x ≤ 0`.
fn eta(x: f64) -> f64 {
    if x > 0.0 {
        -x * x.log2()
    } else {
        0.0
    }
}

/// Hermitian 2×2 block `[[a, b], [b*, d]]`.
#[derive(Debug, Clone, Copy)]
struct Block {
    a: f64,
    d: f64,
    b: Complex64,
}

impl Block {
    fn combine(&self, other: &Block, sign: f64) -> Block {
        Block {
            a: self.a + sign * other.a,
            d: self.d + sign * other.d,
            b: self.b + other.b * sign,
        }
    }

    fn scale(&self, s: f64) -> Block {
        Block {
            a: self.a * s,
            d: self.d * s,
            b: self.b * s,
        }
    }

    /// `p S(M/p)` for an unnormalized block `M` with trace `p`, via the
    /// binary entropy of its larger normalized eigenvalue.
    fn weighted_entropy(&self) -> f64 {
        let p = self.a + self.d;
        if p < MIN_OUTCOME_PROBABILITY {
            return 0.0;
        }
        let half_diff = 0.5 * (self.a - self.d);
        let r = (half_diff * half_diff + self.b.norm_sqr()).sqrt();
        let hi = ((0.5 * p + r) / p).min(1.0);
        p * (eta(hi) + eta(1.0 - hi))
    }
}

/// Precomputed pieces of `J(n)` for one state, so that each basis costs a
/// handful of flops. The conditional block for axis `n` is
/// `(ρ_s ± Σ_i n_i T_i)/2` with `T_i = Tr_a[(I⊗σ_i) ρ]`.
#[derive(Debug, Clone)]
pub(crate) struct Objective {
    system_entropy: f64,
    rho_s: Block,
    pauli: [Block; 3],
}

impl Objective {
    pub(crate) fn new(rho: &DensityMatrix) -> Result<Self> {
        if rho.dim() != 4 {
            return Err(Error::Dimension {
                expected: 4,
                found: rho.dim(),
            });
        }
        let m = rho.entries();
        let i = Complex64::new(0.0, 1.0);
        // (I⊗σ)_{(s a),(s' a')} contracted: Tr_a[(I⊗σ) ρ]_{s t} = Σ_{a,b} σ_{a b} ρ_{(s b),(t a)}
        let contract = |sigma: [[Complex64; 2]; 2]| {
            let entry = |s: usize, t: usize| {
                let mut acc = Complex64::new(0.0, 0.0);
                for a in 0..2 {
                    for b in 0..2 {
                        acc += sigma[a][b] * m[(2 * s + b, 2 * t + a)];
                    }
                }
                acc
            };
            Block {
                a: entry(0, 0).re,
                d: entry(1, 1).re,
                b: entry(0, 1),
            }
        };
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        let rho_s = contract([[one, zero], [zero, one]]);
        let pauli = [
            contract([[zero, one], [one, zero]]),
            contract([[zero, -i], [i, zero]]),
            contract([[one, zero], [zero, -one]]),
        ];
        let reduced = partial_trace(rho, Subsystem::System)?;
        Ok(Objective {
            system_entropy: von_neumann_entropy(&reduced)?,
            rho_s,
            pauli,
        })
    }

    /// `J` for the measurement along the (unit) Bloch vector `n`.
    pub(crate) fn eval(&self, n: [f64; 3]) -> f64 {
        let t = self.pauli[0]
            .scale(n[0])
            .combine(&self.pauli[1].scale(n[1]), 1.0)
            .combine(&self.pauli[2].scale(n[2]), 1.0);
        let plus = self.rho_s.combine(&t, 1.0).scale(0.5);
        let minus = self.rho_s.combine(&t, -1.0).scale(0.5);
        let j = self.system_entropy - plus.weighted_entropy() - minus.weighted_entropy();
        j.clamp(0.0, self.system_entropy)
    }
}

/// `J = S(ρ_s) - Σ_i p_i S(ρ_s^i)` for the given apparatus measurement.
pub fn classical_correlation(rho: &DensityMatrix, basis: &ProjectiveBasis) -> Result<f64> {
    Ok(Objective::new(rho)?.eval(basis.bloch()))
}

/// `I = S(ρ_s) + S(ρ_a) - S(ρ_sa)`.
pub fn mutual_information(rho: &DensityMatrix) -> Result<f64> {
    let s = von_neumann_entropy(&partial_trace(rho, Subsystem::System)?)?;
    let a = von_neumann_entropy(&partial_trace(rho, Subsystem::Apparatus)?)?;
    let sa = von_neumann_entropy(rho)?;
    Ok((s + a - sa).max(0.0))
}

fn clamp_discord(raw: f64) -> Result<f64> {
    if raw < -DISCORD_TOL {
        Err(Error::OptimizerFailure(raw))
    } else {
        Ok(raw.max(0.0))
    }
}

/// Mutual information minus the maximized classical correlation.
pub fn quantum_discord(rho: &DensityMatrix) -> Result<f64> {
    let max = maximize_classical_correlation(rho)?;
    clamp_discord(mutual_information(rho)? - max.value)
}

/// Correlation quantities of one state, tagged with the channel strength
/// that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationRecord {
    pub p: f64,
    pub j_z: f64,
    pub j_x: f64,
    pub j_max: f64,
    pub opt_theta: f64,
    pub opt_phi: f64,
    pub mutual_info: f64,
    pub discord: f64,
}

impl CorrelationRecord {
    pub fn compute(p: f64, rho: &DensityMatrix, config: &OptimizerConfig) -> Result<Self> {
        let objective = Objective::new(rho)?;
        let max = optimizer::maximize_objective(&objective, config);
        let mutual_info = mutual_information(rho)?;
        Ok(CorrelationRecord {
            p,
            j_z: objective.eval(ProjectiveBasis::sigma_z().bloch()),
            j_x: objective.eval(ProjectiveBasis::sigma_x().bloch()),
            j_max: max.value,
            opt_theta: max.basis.theta(),
            opt_phi: max.basis.phi(),
            mutual_info,
            discord: clamp_discord(mutual_info - max.value)?,
        })
    }

    pub fn basis(&self) -> ProjectiveBasis {
        ProjectiveBasis::new(self.opt_theta, self.opt_phi)
    }
}
