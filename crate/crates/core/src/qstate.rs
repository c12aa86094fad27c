//! Density matrices for one and two qubits.
//!
//! Two-qubit states are ordered `|s⟩⊗|a⟩` with the system qubit first, so the
//! row index of `|s a⟩` is `2s + a`. Every module in the crate shares this
//! ordering.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues in `[-PSD_TOL, 0)` are clipped to zero; anything lower is rejected.
pub const PSD_TOL: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Which qubit of the system-apparatus pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subsystem {
    System,
    Apparatus,
}

/// A validated density matrix of dimension 2 or 4.
#[derive(Clone, PartialEq)]
pub struct DensityMatrix {
    entries: DMatrix<Complex64>,
}

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityMatrix")
            .field("dim", &self.dim())
            .field("entries", &self.entries)
            .finish()
    }
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        let (rows, cols) = entries.shape();
        if rows != cols {
            return Err(Error::Dimension {
                expected: rows,
                found: cols,
            });
        }
        if rows != 2 && rows != 4 {
            return Err(Error::Dimension {
                expected: 4,
                found: rows,
            });
        }
        let herm = hermiticity_deviation(&entries);
        if herm > HERMITIAN_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = entries.trace();
        let tr_dev = (tr - ONE).norm();
        if tr_dev > TRACE_TOL {
            return Err(Error::Trace(tr_dev));
        }
        let state = DensityMatrix { entries };
        let min = state.spectrum().min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(state)
    }

    /// Builds from row-major `(re, im)` pairs.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let n = rows.len();
        for row in rows {
            if row.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    found: row.len(),
                });
            }
        }
        Self::new(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
    }

    /// Symmetrizes `m` and validates the result. Used after arithmetic that is
    /// Hermitian in exact arithmetic but may drift by rounding.
    pub(crate) fn from_hermitian_part(m: DMatrix<Complex64>) -> Result<Self> {
        let sym = (&m + m.adjoint()).scale(0.5);
        Self::new(sym)
    }

    /// The pure state `|psi⟩⟨psi|`; `psi` is normalized first.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let v = DVector::from_column_slice(psi);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::Normalization(0.0));
        }
        let v = v.unscale(norm);
        Self::from_hermitian_part(&v * v.adjoint())
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        Self::new(DMatrix::identity(dim, dim).unscale(dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn into_entries(self) -> DMatrix<Complex64> {
        self.entries
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<Self> {
        if self.dim() != 2 || other.dim() != 2 {
            return Err(Error::Dimension {
                expected: 2,
                found: self.dim().max(other.dim()),
            });
        }
        Self::new(self.entries.kronecker(&other.entries))
    }

    /// Convex combination `weight * self + (1 - weight) * other`.
    pub fn mix(&self, other: &DensityMatrix, weight: f64) -> Result<Self> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        if !(0.0..=1.0).contains(&weight) {
            return Err(Error::Config(format!(
                "mixing weight {weight} outside [0, 1]"
            )));
        }
        Self::from_hermitian_part(self.entries.scale(weight) + other.entries.scale(1.0 - weight))
    }

    /// Largest absolute entry-wise difference.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn spectrum(&self) -> Spectrum {
        Spectrum::of(&self.entries)
    }
}

pub(crate) fn hermiticity_deviation(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Hermitian eigendecomposition, eigenvalues sorted in descending order.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<DVector<Complex64>>,
}

impl Spectrum {
    /// Decomposes a Hermitian matrix. Only the Hermitian part of `m` is used.
    pub fn of(m: &DMatrix<Complex64>) -> Self {
        let sym = (m + m.adjoint()).scale(0.5);
        let eig = sym.symmetric_eigen();
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        Spectrum {
            eigenvalues: order.iter().map(|&k| eig.eigenvalues[k]).collect(),
            eigenvectors: order
                .iter()
                .map(|&k| eig.eigenvectors.column(k).into_owned())
                .collect(),
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `V Λ V†`.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let n = self.eigenvalues.len();
        let mut out = DMatrix::from_element(n, n, ZERO);
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            out += (v * v.adjoint()).scale(*lambda);
        }
        out
    }
}

/// Entries of the Bell-diagonal X state
///
/// ```text
/// | c 0 0 w |
/// | 0 b z 0 |
/// | 0 z b 0 |
/// | w 0 0 c |
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XStateParams {
    pub c: f64,
    pub b: f64,
    pub z: f64,
    pub w: f64,
}

impl XStateParams {
    pub const STATE_1: XStateParams = XStateParams {
        c: 0.4,
        b: 0.1,
        z: 0.1,
        w: 0.4,
    };
    pub const STATE_2: XStateParams = XStateParams {
        c: 0.4,
        b: 0.1,
        z: 0.1,
        w: 0.15,
    };

    pub fn new(c: f64, b: f64, z: f64, w: f64) -> Result<Self> {
        let params = XStateParams { c, b, z, w };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        let XStateParams { c, b, z, w } = *self;
        if ![c, b, z, w].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidParams("non-finite entry".into()));
        }
        let trace = 2.0 * c + 2.0 * b;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidParams(format!(
                "unit trace violated: 2c + 2b = {trace}"
            )));
        }
        if w.abs() > c {
            return Err(Error::InvalidParams(format!(
                "positivity violated: |w| = {} > c = {c}",
                w.abs()
            )));
        }
        if z.abs() > b {
            return Err(Error::InvalidParams(format!(
                "positivity violated: |z| = {} > b = {b}",
                z.abs()
            )));
        }
        Ok(())
    }

    /// Reads the parameters back from a 4×4 state, if it has exact X shape
    /// with real entries and Bell-diagonal symmetry.
    pub fn from_state(rho: &DensityMatrix) -> Option<Self> {
        if rho.dim() != 4 {
            return None;
        }
        let m = rho.entries();
        let x_positions = [
            (0, 0),
            (1, 1),
            (2, 2),
            (3, 3),
            (0, 3),
            (3, 0),
            (1, 2),
            (2, 1),
        ];
        for i in 0..4 {
            for j in 0..4 {
                let v = m[(i, j)];
                if x_positions.contains(&(i, j)) {
                    if v.im != 0.0 {
                        return None;
                    }
                } else if v != ZERO {
                    return None;
                }
            }
        }
        let (c, b) = (m[(0, 0)].re, m[(1, 1)].re);
        if m[(3, 3)].re != c || m[(2, 2)].re != b {
            return None;
        }
        Some(XStateParams {
            c,
            b,
            z: m[(1, 2)].re,
            w: m[(0, 3)].re,
        })
    }
}

pub fn make_x_state(params: XStateParams) -> Result<DensityMatrix> {
    params.validate()?;
    let XStateParams { c, b, z, w } = params;
    let mut m = DMatrix::from_element(4, 4, ZERO);
    m[(0, 0)] = c.into();
    m[(3, 3)] = c.into();
    m[(1, 1)] = b.into();
    m[(2, 2)] = b.into();
    m[(0, 3)] = w.into();
    m[(3, 0)] = w.into();
    m[(1, 2)] = z.into();
    m[(2, 1)] = z.into();
    DensityMatrix::new(m)
}

/// `I/4 + σx⊗σx/4`.
pub fn remark_state() -> DensityMatrix {
    let mut m = DMatrix::from_element(4, 4, ZERO);
    for i in 0..4 {
        m[(i, i)] = Complex64::new(0.25, 0.0);
        m[(i, 3 - i)] = Complex64::new(0.25, 0.0);
    }
    DensityMatrix::new(m).expect("remark state is a valid density matrix")
}

/// `(|00⟩ + |11⟩)/√2`.
pub fn bell_phi_plus() -> DensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    DensityMatrix::pure(&[h.into(), ZERO, ZERO, h.into()]).expect("normalized")
}

/// Traces out one qubit of a two-qubit state and returns the kept one.
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> Result<DensityMatrix> {
    if rho.dim() != 4 {
        return Err(Error::Dimension {
            expected: 4,
            found: rho.dim(),
        });
    }
    let m = rho.entries();
    let out = DMatrix::from_fn(2, 2, |i, j| match keep {
        Subsystem::System => m[(2 * i, 2 * j)] + m[(2 * i + 1, 2 * j + 1)],
        Subsystem::Apparatus => m[(i, j)] + m[(2 + i, 2 + j)],
    });
    DensityMatrix::from_hermitian_part(out)
}

/// `-Σ λ log2 λ` with `0 log 0 = 0`.
pub(crate) fn shannon_bits(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .filter(|&x| x > 0.0)
        .map(|x| -x * x.log2())
        .sum()
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let spectrum = rho.spectrum();
    let min = spectrum.min_eigenvalue();
    if min < -PSD_TOL {
        return Err(Error::NotPositive(min));
    }
    let s = shannon_bits(spectrum.eigenvalues.iter().map(|&l| l.max(0.0)));
    Ok(s.clamp(0.0, (rho.dim() as f64).log2()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn diag2(a: f64, b: f64) -> DensityMatrix {
        DensityMatrix::from_rows(&[vec![c(a), c(0.0)], vec![c(0.0), c(b)]]).unwrap()
    }

    fn binary_entropy(p: f64) -> f64 {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }

    #[test]
    fn state_one_layout() {
        let rho = make_x_state(XStateParams::STATE_1).unwrap();
        let m = rho.entries();
        assert_eq!(m[(0, 0)], c(0.4));
        assert_eq!(m[(1, 1)], c(0.1));
        assert_eq!(m[(0, 3)], c(0.4));
        assert_eq!(m[(2, 1)], c(0.1));
        assert_eq!(m[(0, 1)], c(0.0));
        assert_eq!(XStateParams::from_state(&rho), Some(XStateParams::STATE_1));
    }

    #[test]
    fn quarter_params_give_identity_over_four() {
        let rho = make_x_state(XStateParams::new(0.25, 0.25, 0.0, 0.0).unwrap()).unwrap();
        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        assert_eq!(rho.max_abs_diff(&mixed), 0.0);
    }

    #[test]
    fn x_params_rejected_with_reason() {
        let trace = XStateParams::new(0.4, 0.2, 0.0, 0.0)
            .unwrap_err()
            .to_string();
        assert!(trace.contains("unit trace"), "{trace}");
        let w = XStateParams::new(0.4, 0.1, 0.0, 0.45)
            .unwrap_err()
            .to_string();
        assert!(w.contains("|w|"), "{w}");
        let z = XStateParams::new(0.4, 0.1, -0.2, 0.0)
            .unwrap_err()
            .to_string();
        assert!(z.contains("|z|"), "{z}");
    }

    #[test]
    fn constructor_rejects_bad_matrices() {
        let nonherm = DMatrix::from_row_slice(2, 2, &[c(0.5), c(0.1), c(0.2), c(0.5)]);
        assert!(matches!(
            DensityMatrix::new(nonherm),
            Err(Error::NotHermitian(_))
        ));
        let trace = DMatrix::from_row_slice(2, 2, &[c(0.6), c(0.0), c(0.0), c(0.5)]);
        assert!(matches!(DensityMatrix::new(trace), Err(Error::Trace(_))));
        let neg = DMatrix::from_row_slice(2, 2, &[c(1.1), c(0.0), c(0.0), c(-0.1)]);
        assert!(matches!(
            DensityMatrix::new(neg),
            Err(Error::NotPositive(_))
        ));
        let three = DMatrix::identity(3, 3).unscale(3.0);
        assert!(matches!(
            DensityMatrix::new(three),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn tiny_negative_eigenvalue_is_clipped() {
        let rho = diag2(1.0 + 5e-11, -5e-11);
        assert_abs_diff_eq!(von_neumann_entropy(&rho).unwrap(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn partial_trace_examples() {
        let half = DensityMatrix::maximally_mixed(2).unwrap();
        let bell = bell_phi_plus();
        let rs = partial_trace(&bell, Subsystem::System).unwrap();
        assert!(rs.max_abs_diff(&half) < 1e-15);

        let rho_s = diag2(0.7, 0.3);
        let rho_a = DensityMatrix::pure(&[c(1.0), Complex64::new(0.0, 1.0)]).unwrap();
        let prod = rho_s.tensor(&rho_a).unwrap();
        assert!(
            partial_trace(&prod, Subsystem::System)
                .unwrap()
                .max_abs_diff(&rho_s)
                < 1e-15
        );
        assert!(
            partial_trace(&prod, Subsystem::Apparatus)
                .unwrap()
                .max_abs_diff(&rho_a)
                < 1e-15
        );

        let s1 = make_x_state(XStateParams::STATE_1).unwrap();
        let ra = partial_trace(&s1, Subsystem::Apparatus).unwrap();
        assert!(ra.max_abs_diff(&half) < 1e-15);

        assert!(matches!(
            partial_trace(&half, Subsystem::System),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn entropy_examples() {
        let half = DensityMatrix::maximally_mixed(2).unwrap();
        assert_abs_diff_eq!(von_neumann_entropy(&half).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            von_neumann_entropy(&bell_phi_plus()).unwrap(),
            0.0,
            epsilon = 1e-12
        );
        let expected = binary_entropy(0.8);
        assert_abs_diff_eq!(expected, 0.721928, epsilon = 1e-6);
        assert_abs_diff_eq!(
            von_neumann_entropy(&diag2(0.8, 0.2)).unwrap(),
            expected,
            epsilon = 1e-12
        );
    }

    #[test]
    fn spectrum_examples() {
        let s1 = make_x_state(XStateParams::STATE_1).unwrap();
        // Bell weights: c ± w and b ± z.
        let p = XStateParams::STATE_1;
        let mut oracle = vec![p.c + p.w, p.c - p.w, p.b + p.z, p.b - p.z];
        oracle.sort_by(|a, b| b.total_cmp(a));
        let spec = s1.spectrum();
        for (got, want) in spec.eigenvalues.iter().zip(&oracle) {
            assert_abs_diff_eq!(*got, *want, epsilon = 1e-12);
        }
        assert_abs_diff_eq!(oracle[0], 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(oracle[1], 0.2, epsilon = 1e-15);

        for l in DensityMatrix::maximally_mixed(4)
            .unwrap()
            .spectrum()
            .eigenvalues
        {
            assert_abs_diff_eq!(l, 0.25, epsilon = 1e-14);
        }
        let ket0 = DensityMatrix::pure(&[c(1.0), c(0.0)]).unwrap();
        let e = ket0.spectrum().eigenvalues;
        assert_abs_diff_eq!(e[0], 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e[1], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn remark_state_layout() {
        let r = remark_state();
        for i in 0..4 {
            assert_eq!(r.entry(i, i), c(0.25));
            assert_eq!(r.entry(i, 3 - i), c(0.25));
        }
        assert_eq!(r.entry(0, 1), c(0.0));
        assert_abs_diff_eq!(r.entries().trace().re, 1.0, epsilon = 1e-15);
        let e = r.spectrum().eigenvalues;
        for (got, want) in e.iter().zip([0.5, 0.5, 0.0, 0.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }
}
