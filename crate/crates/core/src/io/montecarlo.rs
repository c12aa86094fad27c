//! Error bands for sweeps of a measured state: resample each matrix entry with
//! independent Gaussian noise, rerun the sweep, and summarize per grid point.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::matrix_file::{physical_or_projected, MatrixFile};
use crate::dynamics::{sweep, ChannelFamily, SweepConfig, TrajectoryReport};
use crate::error::{Error, Result};
use crate::sampling::trial_rng;

pub const DEFAULT_SAMPLES: usize = 1000;

#[derive(Debug, Clone)]
pub struct MonteCarloConfig {
    pub family: ChannelFamily,
    pub grid: Vec<f64>,
    pub sweep: SweepConfig,
    pub samples: usize,
    pub seed: u64,
}

/// Sample mean and sample standard deviation (`n - 1` denominator).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub mean: f64,
    pub std: f64,
}

impl Band {
    pub fn of(values: &[f64]) -> Option<Band> {
        let x0 = *values.first()?;
        let n = values.len() as f64;
        // shifted sums: identical inputs give exactly that value and std 0
        let mean = x0 + values.iter().map(|x| x - x0).sum::<f64>() / n;
        let std = if values.len() < 2 {
            0.0
        } else {
            (values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        };
        Some(Band { mean, std })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandRow {
    pub p: f64,
    pub j_z: Band,
    pub j_x: Band,
    pub j_max: Band,
    pub discord: Band,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloBands {
    pub channel: String,
    pub samples: usize,
    pub seed: u64,
    pub rows: Vec<BandRow>,
    /// Over the samples in which a basis change was detected.
    pub transition_p: Option<Band>,
    pub transitions_detected: usize,
}

/// One noisy realization of the measured matrix, Hermitian and physical.
pub fn resample<R: Rng + ?Sized>(file: &MatrixFile, rng: &mut R) -> Result<DMatrix<Complex64>> {
    let (sr, si) = file.std.as_ref().ok_or(Error::MissingUncertainties)?;
    let n = file.dim;
    let mut m = file.complex();
    // row-major draw order, two normals per entry regardless of the std values
    for i in 0..n {
        for j in 0..n {
            let dr: f64 = rng.sample(StandardNormal);
            let di: f64 = rng.sample(StandardNormal);
            m[(i, j)] += Complex64::new(sr[(i, j)] * dr, si[(i, j)] * di);
        }
    }
    let sym = (&m + m.adjoint()).scale(0.5);
    Ok(physical_or_projected(sym)?.into_entries())
}

pub fn monte_carlo_bands(file: &MatrixFile, config: &MonteCarloConfig) -> Result<MonteCarloBands> {
    if file.std.is_none() {
        return Err(Error::MissingUncertainties);
    }
    if config.samples < 2 {
        return Err(Error::Config("Monte Carlo needs at least 2 samples".into()));
    }
    let reports: Vec<TrajectoryReport> = (0..config.samples as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = trial_rng(config.seed, k);
            let rho = physical_or_projected(resample(file, &mut rng)?)?;
            sweep(&rho, config.family, &config.grid, &config.sweep)
        })
        .collect::<Result<_>>()?;

    let column = |i: usize, f: fn(&crate::correlations::CorrelationRecord) -> f64| {
        let v: Vec<f64> = reports.iter().map(|r| f(&r.records[i])).collect();
        Band::of(&v).expect("at least two samples")
    };
    let rows = config
        .grid
        .iter()
        .enumerate()
        .map(|(i, &p)| BandRow {
            p,
            j_z: column(i, |r| r.j_z),
            j_x: column(i, |r| r.j_x),
            j_max: column(i, |r| r.j_max),
            discord: column(i, |r| r.discord),
        })
        .collect();
    let transitions: Vec<f64> = reports.iter().filter_map(|r| r.transition_p).collect();
    Ok(MonteCarloBands {
        channel: config.family.to_string(),
        samples: config.samples,
        seed: config.seed,
        rows,
        transition_p: Band::of(&transitions),
        transitions_detected: transitions.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::uniform_grid;
    use crate::qstate::{make_x_state, XStateParams};

    fn config(samples: usize, points: usize) -> MonteCarloConfig {
        MonteCarloConfig {
            family: ChannelFamily::PhaseDamping,
            grid: uniform_grid(points).unwrap(),
            sweep: SweepConfig::default(),
            samples,
            seed: 11,
        }
    }

    fn state1_file(sigma: f64) -> MatrixFile {
        MatrixFile::from_state(&make_x_state(XStateParams::STATE_1).unwrap())
            .with_uniform_std(sigma)
    }

    #[test]
    fn band_statistics() {
        let b = Band::of(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(b.mean, 2.0);
        assert!((b.std - 1.0).abs() < 1e-15);
        let c = Band::of(&[0.1; 7]).unwrap();
        assert_eq!((c.mean, c.std), (0.1, 0.0));
        assert!(Band::of(&[]).is_none());
    }

    #[test]
    fn missing_uncertainties_is_an_error() {
        let file = MatrixFile::from_state(&make_x_state(XStateParams::STATE_1).unwrap());
        assert!(matches!(
            monte_carlo_bands(&file, &config(5, 5)),
            Err(Error::MissingUncertainties)
        ));
    }

    #[test]
    fn zero_noise_reproduces_the_noiseless_sweep() {
        let cfg = config(3, 11);
        let bands = monte_carlo_bands(&state1_file(0.0), &cfg).unwrap();
        let rho = make_x_state(XStateParams::STATE_1).unwrap();
        let nominal = sweep(&rho, cfg.family, &cfg.grid, &cfg.sweep).unwrap();
        for (row, rec) in bands.rows.iter().zip(&nominal.records) {
            assert_eq!(row.j_max.mean, rec.j_max);
            assert_eq!(row.j_z.mean, rec.j_z);
            assert_eq!(row.discord.mean, rec.discord);
            assert_eq!(row.j_max.std, 0.0);
            assert_eq!(row.j_x.std, 0.0);
        }
        assert_eq!(bands.transitions_detected, 3);
    }

    #[test]
    fn two_samples_give_finite_bands() {
        let bands = monte_carlo_bands(&state1_file(0.05), &config(2, 6)).unwrap();
        assert!(bands
            .rows
            .iter()
            .all(|r| r.j_max.std.is_finite() && r.j_max.std >= 0.0));
        assert!(bands.rows.iter().any(|r| r.j_max.std > 0.0));
    }

    #[test]
    fn seeded_runs_repeat() {
        let a = monte_carlo_bands(&state1_file(0.01), &config(4, 6)).unwrap();
        let b = monte_carlo_bands(&state1_file(0.01), &config(4, 6)).unwrap();
        assert_eq!(a, b);
    }
}
