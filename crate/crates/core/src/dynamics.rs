//! Sweeps a two-qubit state through a channel family, tracks where the
//! optimal measurement basis jumps, and classifies the resulting curve of
//! `J^max(p)`.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{
    amplitude_damping, apply_to_apparatus, phase_damping, pointer_decoherence, DecayRate,
    KrausChannel,
};
use crate::correlations::{
    classical_correlation, CorrelationRecord, OptimizerConfig, ProjectiveBasis,
};
use crate::error::{Error, Result};
use crate::qstate::{DensityMatrix, XStateParams};

pub const DEFAULT_GRID_POINTS: usize = 201;

/// Channel family parametrized by its strength `p ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelFamily {
    PhaseDamping,
    AmplitudeDamping,
    /// Dephasing in an arbitrary pointer basis.
    Pointer(ProjectiveBasis),
}

impl ChannelFamily {
    pub fn channel(&self, p: f64) -> Result<KrausChannel> {
        match self {
            ChannelFamily::PhaseDamping => phase_damping(p),
            ChannelFamily::AmplitudeDamping => amplitude_damping(p),
            ChannelFamily::Pointer(basis) => pointer_decoherence(basis, p),
        }
    }

    pub fn evolve(&self, rho: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
        apply_to_apparatus(&self.channel(p)?, rho)
    }
}

impl fmt::Display for ChannelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChannelFamily::PhaseDamping => write!(f, "pd"),
            ChannelFamily::AmplitudeDamping => write!(f, "ad"),
            ChannelFamily::Pointer(b) if *b == ProjectiveBasis::sigma_z() => write!(f, "pointer"),
            ChannelFamily::Pointer(b) => write!(f, "pointer:{},{}", b.theta(), b.phi()),
        }
    }
}

impl FromStr for ChannelFamily {
    type Err = Error;

    /// `pd`, `ad`, `pointer` (σz) or `pointer:THETA,PHI`.
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        match lower.as_str() {
            "pd" => return Ok(ChannelFamily::PhaseDamping),
            "ad" => return Ok(ChannelFamily::AmplitudeDamping),
            "pointer" => return Ok(ChannelFamily::Pointer(ProjectiveBasis::sigma_z())),
            _ => {}
        }
        let angles = lower
            .strip_prefix("pointer:")
            .ok_or_else(|| Error::UnknownChannel(s.to_string()))?;
        let parts: Vec<f64> = angles
            .split(',')
            .map(|x| x.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::UnknownChannel(s.to_string()))?;
        match parts.as_slice() {
            [theta, phi] => Ok(ChannelFamily::Pointer(ProjectiveBasis::new(*theta, *phi))),
            _ => Err(Error::UnknownChannel(s.to_string())),
        }
    }
}

/// `n` evenly spaced strengths from 0 to 1 inclusive.
pub fn uniform_grid(n: usize) -> Result<Vec<f64>> {
    match n {
        0 => Err(Error::Grid("empty grid".into())),
        1 => Ok(vec![0.0]),
        _ => Ok((0..n).map(|k| k as f64 / (n - 1) as f64).collect()),
    }
}

pub fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Grid("empty grid".into()));
    }
    if let Some(p) = grid.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(Error::Grid(format!("strength {p} outside [0, 1]")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Grid("strengths must be strictly increasing".into()));
    }
    Ok(())
}

/// Thresholds for transition detection and regime classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub optimizer: OptimizerConfig,
    /// `max - min` of `J^max` below this counts as constant (bits).
    pub plateau_tol: f64,
    /// Allowed increase between consecutive points for a non-increasing curve (bits).
    pub monotone_slack: f64,
    /// Minimum argmax-axis jump that signals a change of optimal basis (rad).
    pub jump_angle: f64,
    /// The previous optimal basis must trail the new maximum by more than this.
    pub jump_value_tol: f64,
    /// Width in `p` at which the crossing bisection stops.
    pub bisection_tol: f64,
    pub decay_rate: DecayRate,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            optimizer: OptimizerConfig::default(),
            plateau_tol: 1e-6,
            monotone_slack: 1e-9,
            jump_angle: 0.1,
            jump_value_tol: 1e-9,
            bisection_tol: 1e-8,
            decay_rate: DecayRate::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Constant,
    DecayThenConstant,
    MonotonicDecay,
    SuddenChangeNoPlateau,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Constant => "constant",
            Regime::DecayThenConstant => "decay-then-constant",
            Regime::MonotonicDecay => "monotonic-decay",
            Regime::SuddenChangeNoPlateau => "sudden-change-no-plateau",
        })
    }
}

/// A change of optimal measurement basis between two grid points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Transition {
    /// Crossing point of the two competing basis values.
    pub p: f64,
    /// Index of the first grid point after the jump.
    pub grid_index: usize,
    pub from: ProjectiveBasis,
    pub to: ProjectiveBasis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryReport {
    pub channel: String,
    pub gamma: f64,
    pub records: Vec<CorrelationRecord>,
    pub transition_p: Option<f64>,
    pub regime: Regime,
    pub monotone: bool,
    /// Constant `J^max` value after the transition (or throughout).
    pub plateau_level: Option<f64>,
    /// `τ_E` in units of time, when a pointer basis emerges at a finite strength.
    pub emergence_time: Option<f64>,
    pub emergence_p: Option<f64>,
    /// `τ_D = 1/γ`.
    pub tau_d: f64,
    /// Channel strength reached at `τ_D`, i.e. `1 - 1/e`.
    pub p_at_tau_d: f64,
}

/// Correlation records along the grid. Points are evaluated independently
/// and collected in grid order.
pub fn compute_records(
    rho0: &DensityMatrix,
    family: ChannelFamily,
    grid: &[f64],
    optimizer: &OptimizerConfig,
) -> Result<Vec<CorrelationRecord>> {
    validate_grid(grid)?;
    grid.par_iter()
        .map(|&p| CorrelationRecord::compute(p, &family.evolve(rho0, p)?, optimizer))
        .collect()
}

pub fn sweep(
    rho0: &DensityMatrix,
    family: ChannelFamily,
    grid: &[f64],
    config: &SweepConfig,
) -> Result<TrajectoryReport> {
    let records = compute_records(rho0, family, grid, &config.optimizer)?;
    let transition = detect_transition(rho0, family, &records, config)?;
    let transition_p = transition.map(|t| t.p);
    let regime = classify_regime(&records, transition_p, config);
    let plateau_level = match regime {
        Regime::Constant => records.last().map(|r| r.j_max),
        Regime::DecayThenConstant => records.last().map(|r| r.j_max),
        _ => None,
    };
    let (emergence_p, emergence_time) = match (regime, transition_p) {
        (Regime::DecayThenConstant, Some(p)) => (Some(p), Some(config.decay_rate.time_at(p))),
        _ => (None, None),
    };
    Ok(TrajectoryReport {
        channel: family.to_string(),
        gamma: config.decay_rate.gamma(),
        monotone: is_monotone(&records, config.monotone_slack),
        records,
        transition_p,
        regime,
        plateau_level,
        emergence_time,
        emergence_p,
        tau_d: config.decay_rate.tau_d(),
        p_at_tau_d: config.decay_rate.strength_at(config.decay_rate.tau_d()),
    })
}

/// First grid step where the optimal axis moves by more than
/// `config.jump_angle` while the old axis stops being optimal, refined by
/// bisection on `J_old(p) - J_new(p)`. Points where the old axis still ties
/// with the new maximum keep the old axis as the reference.
pub fn detect_transition(
    rho0: &DensityMatrix,
    family: ChannelFamily,
    records: &[CorrelationRecord],
    config: &SweepConfig,
) -> Result<Option<Transition>> {
    let Some(first) = records.first() else {
        return Ok(None);
    };
    let mut reference = first.basis();
    let mut last_p = first.p;
    for (k, cur) in records.iter().enumerate().skip(1) {
        let to = cur.basis();
        if reference.angular_distance(&to) <= config.jump_angle {
            reference = to;
            last_p = cur.p;
            continue;
        }
        let rho = family.evolve(rho0, cur.p)?;
        if classical_correlation(&rho, &reference)? >= cur.j_max - config.jump_value_tol {
            last_p = cur.p;
            continue;
        }
        let from = reference;
        let gap = |p: f64| -> Result<f64> {
            let rho = family.evolve(rho0, p)?;
            Ok(classical_correlation(&rho, &from)? - classical_correlation(&rho, &to)?)
        };
        let (mut lo, mut hi) = (last_p, cur.p);
        while hi - lo > config.bisection_tol {
            let mid = 0.5 * (lo + hi);
            if gap(mid)? >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return Ok(Some(Transition {
            p: 0.5 * (lo + hi),
            grid_index: k,
            from,
            to,
        }));
    }
    Ok(None)
}

fn spread(records: &[CorrelationRecord]) -> Option<f64> {
    let mut it = records.iter().map(|r| r.j_max);
    let first = it.next()?;
    let (lo, hi) = it.fold((first, first), |(lo, hi), v| (lo.min(v), hi.max(v)));
    Some(hi - lo)
}

pub fn is_monotone(records: &[CorrelationRecord], slack: f64) -> bool {
    records.windows(2).all(|w| w[1].j_max <= w[0].j_max + slack)
}

pub fn classify_regime(
    records: &[CorrelationRecord],
    transition_p: Option<f64>,
    config: &SweepConfig,
) -> Regime {
    let flat = |rs: &[CorrelationRecord]| spread(rs).is_some_and(|s| s < config.plateau_tol);
    match transition_p {
        None if flat(records) => Regime::Constant,
        None => Regime::MonotonicDecay,
        Some(t) => {
            let start = records.partition_point(|r| r.p < t);
            if flat(&records[start..]) {
                Regime::DecayThenConstant
            } else {
                Regime::SuddenChangeNoPlateau
            }
        }
    }
}

/// Location of the largest second difference of `J^max`. Kinks in the curve
/// show up here; only a diagnostic, the transition itself comes from
/// [`detect_transition`].
pub fn kink_diagnostic(records: &[CorrelationRecord]) -> Option<(f64, f64)> {
    records
        .windows(3)
        .map(|w| (w[1].p, (w[2].j_max - 2.0 * w[1].j_max + w[0].j_max).abs()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Emergence {
    /// `τ_E`, in the same time units as `1/γ`.
    pub tau_e: f64,
    /// Channel strength at `τ_E`; independent of γ.
    pub p_e: f64,
    pub tau_d: f64,
    pub p_at_tau_d: f64,
}

/// Closed-form emergence time of the σz pointer basis for an X state under
/// phase damping: `τ_E = ln(D / |c - b|) / γ` with `D` the dominant
/// coherence `max(|z + w|, |z - w|)`.
///
/// Returns `Ok(None)` when `D ≤ |c - b|`, i.e. the pointer basis is optimal
/// from the start and no transition happens.
pub fn emergence_time(params: XStateParams, rate: DecayRate) -> Result<Option<Emergence>> {
    params.validate()?;
    let XStateParams { c, b, z, w } = params;
    if c == b {
        return Err(Error::InvalidParams(
            "c = b: the pointer-basis correlation vanishes and the emergence time diverges".into(),
        ));
    }
    let dominant = (z + w).abs().max((z - w).abs());
    let ratio = dominant / (c - b).abs();
    if ratio <= 1.0 {
        return Ok(None);
    }
    Ok(Some(Emergence {
        tau_e: ratio.ln() / rate.gamma(),
        p_e: 1.0 - 1.0 / ratio,
        tau_d: rate.tau_d(),
        p_at_tau_d: rate.strength_at(rate.tau_d()),
    }))
}
