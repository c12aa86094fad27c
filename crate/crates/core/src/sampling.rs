//! Seeded random states, bases and channels for the property suites.
//!
//! Every trial gets its own ChaCha stream derived from `(seed, trial)`, so
//! trials can run in any order and still reproduce bit for bit.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channels::{amplitude_damping, phase_damping, pointer_decoherence, KrausChannel};
use crate::correlations::ProjectiveBasis;
use crate::error::Result;
use crate::qstate::{DensityMatrix, XStateParams};

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `A A† / Tr(A A†)` with `A` a complex Gaussian matrix.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DensityMatrix {
    loop {
        let a = DMatrix::from_fn(dim, dim, |_, _| complex_normal(rng));
        let m = &a * a.adjoint();
        let tr = m.trace().re;
        if tr <= 0.0 {
            continue;
        }
        if let Ok(rho) = DensityMatrix::from_hermitian_part(m.unscale(tr)) {
            return rho;
        }
    }
}

/// Uniformly distributed measurement axis.
pub fn random_basis<R: Rng + ?Sized>(rng: &mut R) -> ProjectiveBasis {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        if v.iter().map(|x| x * x).sum::<f64>() > 1e-12 {
            return ProjectiveBasis::from_bloch(v);
        }
    }
}

/// Axis at exactly `angle` from `basis`, in a random direction.
pub fn perturbed_basis<R: Rng + ?Sized>(
    rng: &mut R,
    basis: &ProjectiveBasis,
    angle: f64,
) -> ProjectiveBasis {
    let n = basis.bloch();
    let r = random_basis(rng).bloch();
    let dot = n[0] * r[0] + n[1] * r[1] + n[2] * r[2];
    let mut t = [r[0] - dot * n[0], r[1] - dot * n[1], r[2] - dot * n[2]];
    let len = (t[0] * t[0] + t[1] * t[1] + t[2] * t[2]).sqrt();
    if len < 1e-9 {
        return perturbed_basis(rng, basis, angle);
    }
    t = t.map(|x| x / len);
    let (s, c) = angle.sin_cos();
    ProjectiveBasis::from_bloch([
        c * n[0] + s * t[0],
        c * n[1] + s * t[1],
        c * n[2] + s * t[2],
    ])
}

/// Rejection sample of valid X-state parameters.
pub fn random_x_params<R: Rng + ?Sized>(rng: &mut R) -> XStateParams {
    loop {
        let c = 0.5 * rng.random::<f64>();
        let b = 0.5 - c;
        let z = rng.random_range(-0.5..0.5);
        let w = rng.random_range(-0.5..0.5);
        if let Ok(params) = XStateParams::new(c, b, z, w) {
            return params;
        }
    }
}

/// `Σ_i p_i ρ_s^i ⊗ Π_i` for a random pointer basis. The two conditional
/// system states are kept at trace distance ≥ `min_distance` so that the
/// pointer basis is a well-separated maximum.
pub fn random_classical_quantum<R: Rng + ?Sized>(
    rng: &mut R,
    min_distance: f64,
) -> Result<(DensityMatrix, ProjectiveBasis)> {
    let pointer = random_basis(rng);
    let weight = rng.random_range(0.2..0.8);
    let (s0, s1) = loop {
        let s0 = random_state(rng, 2);
        let s1 = random_state(rng, 2);
        if trace_distance_2(&s0, &s1) >= min_distance {
            break (s0, s1);
        }
    };
    let [p0, p1] = pointer.projectors();
    let lift = |p: nalgebra::Matrix2<Complex64>| {
        DensityMatrix::new(DMatrix::from_fn(2, 2, |i, j| p[(i, j)]))
    };
    let rho = s0
        .tensor(&lift(p0)?)?
        .mix(&s1.tensor(&lift(p1)?)?, weight)?;
    Ok((rho, pointer))
}

/// Trace distance of two qubit states: half the Bloch-vector separation.
fn trace_distance_2(a: &DensityMatrix, b: &DensityMatrix) -> f64 {
    let d = a.entries() - b.entries();
    let x = d[(0, 1)].re;
    let y = d[(1, 0)].im;
    let z = 0.5 * (d[(0, 0)].re - d[(1, 1)].re);
    (x * x + y * y + z * z).sqrt()
}

/// One of the apparatus channel families with a random strength (and a
/// random pointer basis for the dephasing family).
pub fn random_channel<R: Rng + ?Sized>(rng: &mut R) -> Result<KrausChannel> {
    let p = rng.random::<f64>();
    match rng.random_range(0..3) {
        0 => phase_damping(p),
        1 => amplitude_damping(p),
        _ => pointer_decoherence(&random_basis(rng), p),
    }
}
