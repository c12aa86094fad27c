//! Decoherence channels on the apparatus qubit, in Kraus form.
//!
//! Phase damping with strength `p` shrinks σz-basis coherences by exactly
//! `1 - p`. This is the same map as [`pointer_decoherence`] in the σz basis
//! with `q = p`, so the two strengths are used interchangeably.
//!
//! Amplitude damping decays `|1⟩` to `|0⟩`.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlations::ProjectiveBasis;
use crate::error::{Error, Result};
use crate::qstate::DensityMatrix;

pub const TRACE_PRESERVATION_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, PartialEq)]
pub struct KrausChannel {
    pub label: String,
    pub strength: f64,
    operators: Vec<Matrix2<Complex64>>,
}

impl KrausChannel {
    /// Checks `Σ K† K = I`. Zero operators are dropped.
    pub fn new(
        label: impl Into<String>,
        strength: f64,
        operators: Vec<Matrix2<Complex64>>,
    ) -> Result<Self> {
        let operators: Vec<_> = operators.into_iter().filter(|k| k.norm() > 0.0).collect();
        let channel = KrausChannel {
            label: label.into(),
            strength,
            operators,
        };
        let dev = channel.trace_preservation_error();
        if dev > TRACE_PRESERVATION_TOL {
            return Err(Error::NotTracePreserving(dev));
        }
        Ok(channel)
    }

    pub fn identity() -> Self {
        KrausChannel {
            label: "identity".into(),
            strength: 0.0,
            operators: vec![Matrix2::identity()],
        }
    }

    pub fn operators(&self) -> &[Matrix2<Complex64>] {
        &self.operators
    }

    /// Max-norm of `Σ K† K - I`.
    pub fn trace_preservation_error(&self) -> f64 {
        let sum = self
            .operators
            .iter()
            .fold(Matrix2::zeros(), |acc, k| acc + k.adjoint() * k);
        (sum - Matrix2::identity())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Applies the channel to a single-qubit state.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != 2 {
            return Err(Error::Dimension {
                expected: 2,
                found: rho.dim(),
            });
        }
        let r = rho.entries();
        let r = Matrix2::new(r[(0, 0)], r[(0, 1)], r[(1, 0)], r[(1, 1)]);
        let out = self
            .operators
            .iter()
            .fold(Matrix2::zeros(), |acc, k| acc + k * r * k.adjoint());
        DensityMatrix::from_hermitian_part(DMatrix::from_fn(2, 2, |i, j| out[(i, j)]))
    }
}

fn check_strength(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Strength(p))
    }
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `K0 = √(1 - p/2) I`, `K1 = √(p/2) σz`.
pub fn phase_damping(p: f64) -> Result<KrausChannel> {
    check_strength(p)?;
    let k0 = Matrix2::identity().scale((1.0 - p / 2.0).sqrt());
    let k1 = Matrix2::new(real(1.0), ZERO, ZERO, real(-1.0)).scale((p / 2.0).sqrt());
    KrausChannel::new("pd", p, vec![k0, k1])
}

/// `K0 = diag(1, √(1-p))`, `K1 = √p |0⟩⟨1|`.
pub fn amplitude_damping(p: f64) -> Result<KrausChannel> {
    check_strength(p)?;
    let k0 = Matrix2::new(real(1.0), ZERO, ZERO, real((1.0 - p).sqrt()));
    let k1 = Matrix2::new(ZERO, real(p.sqrt()), ZERO, ZERO);
    KrausChannel::new("ad", p, vec![k0, k1])
}

/// `ρ ↦ (1-q) ρ + q Σ_i Π_i ρ Π_i` on the apparatus.
pub fn pointer_decoherence(basis: &ProjectiveBasis, q: f64) -> Result<KrausChannel> {
    check_strength(q)?;
    let [p0, p1] = basis.projectors();
    let completeness = (p0 + p1 - Matrix2::identity())
        .iter()
        .chain((p0 * p1).iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if completeness > 1e-12 {
        return Err(Error::IncompleteBasis(completeness));
    }
    let ops = vec![
        Matrix2::identity().scale((1.0 - q).sqrt()),
        p0.scale(q.sqrt()),
        p1.scale(q.sqrt()),
    ];
    KrausChannel::new("pointer", q, ops)
}

/// `Σ_k (I⊗K_k) ρ (I⊗K_k)†`.
pub fn apply_to_apparatus(channel: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.dim() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            found: rho.dim(),
        });
    }
    let dev = channel.trace_preservation_error();
    if dev > TRACE_PRESERVATION_TOL {
        return Err(Error::NotTracePreserving(dev));
    }
    let id = DMatrix::<Complex64>::identity(2, 2);
    let r = rho.entries();
    let mut out = DMatrix::from_element(4, 4, ZERO);
    for k in channel.operators() {
        let k = DMatrix::from_fn(2, 2, |i, j| k[(i, j)]);
        let lifted = id.kronecker(&k);
        out += &lifted * r * lifted.adjoint();
    }
    DensityMatrix::from_hermitian_part(out)
}

/// Decay rate γ of the environment coupling; `p(t) = 1 - e^{-γt}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayRate {
    gamma: f64,
}

impl DecayRate {
    pub fn new(gamma: f64) -> Result<Self> {
        if gamma.is_finite() && gamma > 0.0 {
            Ok(DecayRate { gamma })
        } else {
            Err(Error::Config(format!(
                "decay rate must be positive, got {gamma}"
            )))
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn strength_at(&self, t: f64) -> f64 {
        1.0 - (-self.gamma * t).exp()
    }

    /// Inverse of [`strength_at`](Self::strength_at); infinite at `p = 1`.
    pub fn time_at(&self, p: f64) -> f64 {
        -(1.0 - p).ln() / self.gamma
    }

    /// Decoherence half-life `τ_D = 1/γ`.
    pub fn tau_d(&self) -> f64 {
        1.0 / self.gamma
    }
}

impl Default for DecayRate {
    fn default() -> Self {
        DecayRate { gamma: 1.0 }
    }
}

/// Gram matrix `⟨E_j|E_i⟩` of the two environment branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverlapMatrix {
    entries: Matrix2<Complex64>,
}

impl OverlapMatrix {
    /// Two-branch overlap with `⟨E_1|E_0⟩ = off_diagonal`.
    pub fn two_branch(off_diagonal: Complex64) -> Result<Self> {
        Self::new(Matrix2::new(
            real(1.0),
            off_diagonal.conj(),
            off_diagonal,
            real(1.0),
        ))
    }

    pub fn new(entries: Matrix2<Complex64>) -> Result<Self> {
        for i in 0..2 {
            if (entries[(i, i)] - real(1.0)).norm() > 1e-12 {
                return Err(Error::Overlap(format!("diagonal entry {i} is not 1")));
            }
        }
        if (entries[(0, 1)] - entries[(1, 0)].conj()).norm() > 1e-12 {
            return Err(Error::Overlap("not Hermitian".into()));
        }
        // A unit-diagonal 2×2 Hermitian matrix is PSD iff its off-diagonal modulus is ≤ 1.
        let modulus = entries[(1, 0)].norm();
        if modulus > 1.0 + 1e-12 {
            return Err(Error::Overlap(format!(
                "not positive semidefinite (|overlap| = {modulus})"
            )));
        }
        Ok(OverlapMatrix { entries })
    }

    /// `⟨E_j|E_i⟩`.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }
}

/// `ρ_sa = Σ_ij c_i c_j* ⟨E_j|E_i⟩ |ii⟩⟨jj|`.
pub fn state_from_overlaps(
    coeffs: [Complex64; 2],
    overlaps: &OverlapMatrix,
) -> Result<DensityMatrix> {
    let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(Error::Normalization(norm));
    }
    let mut m = DMatrix::from_element(4, 4, ZERO);
    for i in 0..2 {
        for j in 0..2 {
            m[(3 * i, 3 * j)] = coeffs[i] * coeffs[j].conj() * overlaps.get(i, j);
        }
    }
    DensityMatrix::from_hermitian_part(m)
}
