//! Plain-text density matrices, e.g. tomography output.
//!
//! ```text
//! # comment
//! dim 4
//! real
//! 0.4 0 0 0.4
//! ...
//! imag          (optional, zeros if absent)
//! ...
//! std_real      (optional)
//! ...
//! std_imag      (optional)
//! ...
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{DensityMatrix, Spectrum};

/// Largest max-norm change the physicality projection may make before the
/// data is rejected.
pub const MAX_PROJECTION_DISTANCE: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixFile {
    pub dim: usize,
    pub real: DMatrix<f64>,
    pub imag: DMatrix<f64>,
    /// Per-entry standard deviations of the real and imaginary parts.
    pub std: Option<(DMatrix<f64>, DMatrix<f64>)>,
}

/// How far the raw matrix was from a physical state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Deviations {
    /// `max |ρ_ij - conj(ρ_ji)|`.
    pub hermiticity: f64,
    /// `|Tr ρ - 1|`.
    pub trace: f64,
    /// Smallest eigenvalue of the Hermitian part.
    pub min_eigenvalue: f64,
    /// Max-norm distance between the raw matrix and the projected state.
    pub projection_distance: f64,
}

#[derive(Debug, Clone)]
pub struct ParsedMatrix {
    pub file: MatrixFile,
    pub state: DensityMatrix,
    pub deviations: Deviations,
}

#[derive(Clone, Copy, PartialEq)]
enum Block {
    Real,
    Imag,
    StdReal,
    StdImag,
}

impl MatrixFile {
    pub fn from_state(rho: &DensityMatrix) -> Self {
        let m = rho.entries();
        MatrixFile {
            dim: rho.dim(),
            real: m.map(|x| x.re),
            imag: m.map(|x| x.im),
            std: None,
        }
    }

    pub fn with_uniform_std(mut self, sigma: f64) -> Self {
        let s = DMatrix::from_element(self.dim, self.dim, sigma);
        self.std = Some((s.clone(), s));
        self
    }

    pub fn complex(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.dim, self.dim, |i, j| {
            Complex64::new(self.real[(i, j)], self.imag[(i, j)])
        })
    }

    pub fn parse_str(text: &str, path: &Path) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Parse {
            path: path.to_path_buf(),
            line,
            msg,
        };
        let mut dim: Option<usize> = None;
        let mut blocks: Vec<(Block, Vec<Vec<f64>>)> = Vec::new();

        for (k, raw) in text.lines().enumerate() {
            let line_no = k + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut words = line.split_whitespace();
            let head = words.next().unwrap_or("");
            let header = match head {
                "real" => Some(Block::Real),
                "imag" => Some(Block::Imag),
                "std_real" => Some(Block::StdReal),
                "std_imag" => Some(Block::StdImag),
                _ => None,
            };
            if head == "dim" {
                if dim.is_some() {
                    return Err(err(line_no, "duplicate `dim` line".into()));
                }
                let n = words
                    .next()
                    .and_then(|w| w.parse::<usize>().ok())
                    .ok_or_else(|| err(line_no, "expected `dim N`".into()))?;
                if n != 2 && n != 4 {
                    return Err(err(line_no, format!("dim must be 2 or 4, got {n}")));
                }
                dim = Some(n);
                continue;
            }
            if let Some(b) = header {
                if dim.is_none() {
                    return Err(err(line_no, "`dim` must precede the matrix blocks".into()));
                }
                if blocks.iter().any(|(seen, _)| *seen == b) {
                    return Err(err(line_no, format!("duplicate `{head}` block")));
                }
                if words.next().is_some() {
                    return Err(err(line_no, format!("unexpected text after `{head}`")));
                }
                blocks.push((b, Vec::new()));
                continue;
            }
            let n = dim.ok_or_else(|| err(line_no, "`dim` must come first".into()))?;
            let (_, rows) = blocks
                .last_mut()
                .ok_or_else(|| err(line_no, "numbers outside a block".into()))?;
            if rows.len() == n {
                return Err(err(line_no, format!("block already has {n} rows")));
            }
            let row: Vec<f64> = line
                .split_whitespace()
                .map(|w| w.parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| err(line_no, format!("bad number: {e}")))?;
            if row.len() != n {
                return Err(err(
                    line_no,
                    format!("expected {n} entries, found {}", row.len()),
                ));
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(err(line_no, "non-finite entry".into()));
            }
            rows.push(row);
        }

        let last_line = text.lines().count();
        let n = dim.ok_or_else(|| err(last_line, "missing `dim` line".into()))?;
        let mut get = |b: Block| -> Result<Option<DMatrix<f64>>> {
            let Some(pos) = blocks.iter().position(|(seen, _)| *seen == b) else {
                return Ok(None);
            };
            let (_, rows) = blocks.swap_remove(pos);
            if rows.len() != n {
                return Err(err(
                    last_line,
                    format!("block has {} rows, expected {n}", rows.len()),
                ));
            }
            Ok(Some(DMatrix::from_fn(n, n, |i, j| rows[i][j])))
        };
        let real =
            get(Block::Real)?.ok_or_else(|| err(last_line, "missing `real` block".into()))?;
        let imag = get(Block::Imag)?.unwrap_or_else(|| DMatrix::zeros(n, n));
        let std = match (get(Block::StdReal)?, get(Block::StdImag)?) {
            (None, None) => None,
            (r, i) => {
                let r = r.unwrap_or_else(|| DMatrix::zeros(n, n));
                let i = i.unwrap_or_else(|| DMatrix::zeros(n, n));
                if r.iter().chain(i.iter()).any(|s| *s < 0.0) {
                    return Err(err(last_line, "standard deviations must be >= 0".into()));
                }
                Some((r, i))
            }
        };
        Ok(MatrixFile {
            dim: n,
            real,
            imag,
            std,
        })
    }

    /// Text form; values use the shortest representation that round-trips.
    pub fn to_text(&self) -> String {
        let mut out = format!("dim {}\n", self.dim);
        let mut block = |name: &str, m: &DMatrix<f64>| {
            out.push_str(name);
            out.push('\n');
            for i in 0..self.dim {
                let row: Vec<String> = (0..self.dim).map(|j| format!("{:?}", m[(i, j)])).collect();
                let _ = writeln!(out, "{}", row.join(" "));
            }
        };
        block("real", &self.real);
        block("imag", &self.imag);
        if let Some((sr, si)) = &self.std {
            block("std_real", sr);
            block("std_imag", si);
        }
        out
    }
}

pub fn read_matrix_file(path: impl AsRef<Path>) -> Result<MatrixFile> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    MatrixFile::parse_str(&text, path)
}

pub fn write_matrix_file(path: impl AsRef<Path>, file: &MatrixFile) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, file.to_text()).map_err(|e| Error::io(path, e))
}

/// Reads a matrix file and maps it onto the nearest physical state.
pub fn parse_matrix_file(path: impl AsRef<Path>) -> Result<ParsedMatrix> {
    let file = read_matrix_file(path)?;
    let raw = file.complex();
    let (projected, mut deviations) = project_to_physical(&raw)?;
    if deviations.projection_distance > MAX_PROJECTION_DISTANCE {
        return Err(Error::DataQuality(deviations.projection_distance));
    }
    // a matrix that is already a valid state is used as written
    let state = match DensityMatrix::new(raw) {
        Ok(exact) => {
            deviations.projection_distance = 0.0;
            exact
        }
        Err(_) => projected,
    };
    Ok(ParsedMatrix {
        file,
        state,
        deviations,
    })
}

/// Hermitian part, negative eigenvalues clipped to zero, trace renormalized.
pub fn project_to_physical(raw: &DMatrix<Complex64>) -> Result<(DensityMatrix, Deviations)> {
    let n = raw.nrows();
    if raw.ncols() != n {
        return Err(Error::Dimension {
            expected: n,
            found: raw.ncols(),
        });
    }
    let mut hermiticity: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            hermiticity = hermiticity.max((raw[(i, j)] - raw[(j, i)].conj()).norm());
        }
    }
    let trace = (raw.trace().re - 1.0).abs();
    let mut spectrum = Spectrum::of(raw);
    let min_eigenvalue = spectrum.min_eigenvalue();
    for l in spectrum.eigenvalues.iter_mut() {
        *l = l.max(0.0);
    }
    let total: f64 = spectrum.eigenvalues.iter().sum();
    if total <= 0.0 {
        return Err(Error::DataQuality(f64::INFINITY));
    }
    for l in spectrum.eigenvalues.iter_mut() {
        *l /= total;
    }
    let state = DensityMatrix::from_hermitian_part(spectrum.reconstruct())?;
    let projection_distance = (raw - state.entries())
        .iter()
        .map(|x| x.norm())
        .fold(0.0, f64::max);
    Ok((
        state,
        Deviations {
            hermiticity,
            trace,
            min_eigenvalue,
            projection_distance,
        },
    ))
}

/// Skips the eigendecomposition when the matrix is already a valid state, so
/// exact inputs come back unchanged.
pub(crate) fn physical_or_projected(raw: DMatrix<Complex64>) -> Result<DensityMatrix> {
    match DensityMatrix::new(raw.clone()) {
        Ok(rho) => Ok(rho),
        Err(_) => project_to_physical(&raw).map(|(rho, _)| rho),
    }
}

/// Where a parse error should point when the text did not come from a file.
pub fn inline_path() -> PathBuf {
    PathBuf::from("<inline>")
}
