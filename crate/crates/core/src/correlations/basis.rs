use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Rank-1 projective measurement `{Π_0, Π_1}` on the apparatus qubit.
///
/// `Π_0` projects onto the Bloch direction `(θ, φ)` and `Π_1 = I - Π_0` onto
/// its antipode, so `(θ, φ)` and `(π - θ, φ + π)` describe the same basis
/// with the outcomes relabelled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveBasis {
    theta: f64,
    phi: f64,
}

impl ProjectiveBasis {
    /// Angles are wrapped onto `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
    pub fn new(theta: f64, phi: f64) -> Self {
        if (0.0..=PI).contains(&theta) {
            let phi = phi.rem_euclid(TAU);
            return ProjectiveBasis {
                theta,
                phi: if phi >= TAU { 0.0 } else { phi },
            };
        }
        let (x, y, z) = (
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        );
        Self::from_bloch_raw([x, y, z])
    }

    pub fn sigma_z() -> Self {
        ProjectiveBasis {
            theta: 0.0,
            phi: 0.0,
        }
    }

    pub fn sigma_x() -> Self {
        ProjectiveBasis {
            theta: FRAC_PI_2,
            phi: 0.0,
        }
    }

    pub fn sigma_y() -> Self {
        ProjectiveBasis {
            theta: FRAC_PI_2,
            phi: FRAC_PI_2,
        }
    }

    /// Basis whose first projector points along `v` (normalized here).
    pub fn from_bloch(v: [f64; 3]) -> Self {
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        Self::from_bloch_raw([v[0] / n, v[1] / n, v[2] / n])
    }

    fn from_bloch_raw(v: [f64; 3]) -> Self {
        let theta = v[2].clamp(-1.0, 1.0).acos();
        let phi = if v[0] == 0.0 && v[1] == 0.0 {
            0.0
        } else {
            v[1].atan2(v[0]).rem_euclid(TAU)
        };
        // rem_euclid can round up to exactly TAU
        let phi = if phi >= TAU { 0.0 } else { phi };
        ProjectiveBasis { theta, phi }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn bloch(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    /// The same basis expressed with its first axis in the upper hemisphere
    /// (`θ ≤ π/2`; on the equator `φ < π`; at the pole `φ = 0`).
    pub fn canonical(&self) -> Self {
        let [x, y, z] = self.bloch();
        // sign of the first component that is not numerically zero
        let lead = [z, x, y]
            .into_iter()
            .find(|c| c.abs() > 1e-12)
            .unwrap_or(0.0);
        let flip = lead < 0.0;
        let v = if flip { [-x, -y, -z] } else { [x, y, z] };
        let mut out = Self::from_bloch_raw(v);
        if out.theta < 1e-15 {
            out = Self::sigma_z();
        }
        out
    }

    /// Angle between the two measurement axes, identifying antipodes; in `[0, π/2]`.
    pub fn angular_distance(&self, other: &ProjectiveBasis) -> f64 {
        let a = self.bloch();
        let b = other.bloch();
        let dot = (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]).abs();
        dot.min(1.0).acos()
    }

    /// `[Π_0, Π_1]` with `Π_{0,1} = (I ± n·σ)/2`.
    pub fn projectors(&self) -> [Matrix2<Complex64>; 2] {
        let [x, y, z] = self.bloch();
        let half = |s: f64| {
            Matrix2::new(
                Complex64::new(0.5 * (1.0 + s * z), 0.0),
                Complex64::new(0.5 * s * x, -0.5 * s * y),
                Complex64::new(0.5 * s * x, 0.5 * s * y),
                Complex64::new(0.5 * (1.0 - s * z), 0.0),
            )
        };
        [half(1.0), half(-1.0)]
    }
}
