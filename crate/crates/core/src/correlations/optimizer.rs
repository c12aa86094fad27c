//! Maximization of `J` over apparatus measurement axes.
//!
//! A uniform `(θ, φ)` grid locates the promising basins, then Nelder-Mead
//! refines each basin in the tangent plane of the sphere at the current best
//! axis, restarting until a restart gains less than the tolerance. Working in
//! the tangent plane keeps the refinement well conditioned at the poles.
//!
//! The objective is piecewise smooth (entropy kinks where conditional
//! eigenvalues cross), so no derivatives are used.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::{Objective, ProjectiveBasis};
use crate::error::Result;
use crate::qstate::DensityMatrix;

/// Values closer than this are treated as ties.
const TIE_TOL: f64 = 1e-12;
/// Refined maxima this close to a Pauli axis are replaced by the axis itself (rad).
const SNAP_ANGLE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub theta_steps: usize,
    pub phi_steps: usize,
    /// Refinement stops once a restart improves the value by less than this.
    pub tolerance: f64,
    /// Number of separated grid basins that get refined.
    pub basins: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            theta_steps: 64,
            phi_steps: 128,
            tolerance: 1e-10,
            basins: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Maximum {
    pub value: f64,
    /// Canonical form of the maximizing basis.
    pub basis: ProjectiveBasis,
}

pub fn maximize_classical_correlation(rho: &DensityMatrix) -> Result<Maximum> {
    maximize_with(rho, &OptimizerConfig::default())
}

pub fn maximize_with(rho: &DensityMatrix, config: &OptimizerConfig) -> Result<Maximum> {
    let objective = Objective::new(rho)?;
    Ok(maximize_objective(&objective, config))
}

fn grid_axis(theta_steps: usize, phi_steps: usize, i: usize, j: usize) -> ProjectiveBasis {
    let theta = if theta_steps > 1 {
        PI * i as f64 / (theta_steps - 1) as f64
    } else {
        0.0
    };
    ProjectiveBasis::new(theta, TAU * j as f64 / phi_steps as f64)
}

/// Lexicographic `(θ, φ)` order on canonical bases.
fn lex_less(a: &ProjectiveBasis, b: &ProjectiveBasis) -> bool {
    (a.theta(), a.phi()) < (b.theta(), b.phi())
}

pub(crate) fn maximize_objective(objective: &Objective, config: &OptimizerConfig) -> Maximum {
    let (nt, np) = (config.theta_steps.max(1), config.phi_steps.max(1));
    // Row nt-1-i shifted by half a turn in φ holds the antipodes of row i,
    // i.e. the same bases, so only the upper rows are evaluated when np is even.
    let mirrored = np % 2 == 0;
    let computed_rows = if mirrored { nt.div_ceil(2) } else { nt };
    let phis: Vec<(f64, f64)> = (0..np)
        .map(|j| grid_axis(nt, np, 0, j).phi().sin_cos())
        .collect();
    let upper: Vec<Vec<f64>> = (0..computed_rows)
        .map(|i| {
            let (st, ct) = grid_axis(nt, np, i, 0).theta().sin_cos();
            phis.iter()
                .map(|&(sp, cp)| objective.eval([st * cp, st * sp, ct]))
                .collect()
        })
        .collect();
    let values: Vec<f64> = (0..nt)
        .flat_map(|i| {
            let upper = &upper;
            (0..np).map(move |j| {
                if i < computed_rows {
                    upper[i][j]
                } else {
                    upper[nt - 1 - i][(j + np / 2) % np]
                }
            })
        })
        .collect();

    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // Grid order is lexicographic in (θ, φ), so the first near-maximal point
    // is the tie-break winner.
    let first = values
        .iter()
        .position(|&v| v >= best - TIE_TOL)
        .unwrap_or(0);
    let at = |i: usize, j: usize| values[i * np + j];
    let mut peaks: Vec<usize> = (0..nt)
        .flat_map(|i| (0..np).map(move |j| (i, j)))
        .filter(|&(i, j)| {
            let v = at(i, j);
            let rows = i.saturating_sub(1)..=(i + 1).min(nt - 1);
            rows.flat_map(|r| [np - 1, 0, 1].map(|dj| (r, (j + dj) % np)))
                .all(|(r, c)| at(r, c) <= v)
        })
        .map(|(i, j)| i * np + j)
        .collect();
    peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));

    let to_basis = |k: usize| grid_axis(nt, np, k / np, k % np);
    let mut seeds = vec![first];
    for &k in &peaks {
        if seeds.len() >= config.basins.max(1) {
            break;
        }
        let b = to_basis(k);
        if seeds
            .iter()
            .all(|&s| to_basis(s).angular_distance(&b) > 0.25)
        {
            seeds.push(k);
        }
    }

    let step = PI / nt.max(2) as f64;
    let mut candidates: Vec<Maximum> = seeds
        .iter()
        .map(|&k| {
            let start = to_basis(k);
            refine(objective, start, values[k], step, config.tolerance)
        })
        .collect();
    let paulis: Vec<Maximum> = [
        ProjectiveBasis::sigma_z(),
        ProjectiveBasis::sigma_x(),
        ProjectiveBasis::sigma_y(),
    ]
    .into_iter()
    .map(|axis| Maximum {
        value: objective.eval(axis.bloch()),
        basis: axis,
    })
    .collect();
    // A refined point sitting on a Pauli axis is that axis up to round-off.
    candidates.retain(|c| {
        !paulis.iter().any(|a| {
            a.basis.angular_distance(&c.basis) < SNAP_ANGLE && a.value >= c.value - TIE_TOL
        })
    });
    candidates.extend(paulis);

    let top = candidates
        .iter()
        .map(|c| c.value)
        .fold(f64::NEG_INFINITY, f64::max);
    let mut winner: Option<Maximum> = None;
    for c in candidates.into_iter().filter(|c| c.value >= top - TIE_TOL) {
        let c = Maximum {
            value: c.value,
            basis: c.basis.canonical(),
        };
        match winner {
            Some(w) if !lex_less(&c.basis, &w.basis) => {}
            _ => winner = Some(c),
        }
    }
    winner.expect("at least one candidate")
}

/// Orthonormal pair spanning the tangent plane at unit vector `n`.
fn tangent_frame(n: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let helper = if n[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let e1 = normalize(cross(n, helper));
    let e2 = cross(n, e1);
    (e1, e2)
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    [v[0] / n, v[1] / n, v[2] / n]
}

fn refine(
    objective: &Objective,
    start: ProjectiveBasis,
    start_value: f64,
    step: f64,
    tolerance: f64,
) -> Maximum {
    let mut center = start.bloch();
    let mut value = start_value;
    let mut step = step;
    for _ in 0..50 {
        let (e1, e2) = tangent_frame(center);
        let axis = |x: [f64; 2]| {
            normalize([
                center[0] + x[0] * e1[0] + x[1] * e2[0],
                center[1] + x[0] * e1[1] + x[1] * e2[1],
                center[2] + x[0] * e1[2] + x[1] * e2[2],
            ])
        };
        let (x, neg) = nelder_mead(|x| -objective.eval(axis(x)), step);
        let gained = -neg - value;
        if gained <= TIE_TOL {
            break;
        }
        center = axis(x);
        value = -neg;
        step = (step * 0.25).max(1e-6);
        if gained < tolerance {
            break;
        }
    }
    Maximum {
        value,
        basis: ProjectiveBasis::from_bloch(center),
    }
}

/// Minimizes `f` over the plane starting from the origin with a simplex of
/// edge `step`. Returns the best vertex and its value.
fn nelder_mead(f: impl Fn([f64; 2]) -> f64, step: f64) -> ([f64; 2], f64) {
    let mut simplex = [[0.0, 0.0], [step, 0.0], [0.0, step]];
    let mut values = simplex.map(&f);
    for _ in 0..2000 {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = idx.map(|k| simplex[k]);
        values = idx.map(|k| values[k]);

        let spread = values[2] - values[0];
        let size = simplex[1..]
            .iter()
            .map(|v| (v[0] - simplex[0][0]).hypot(v[1] - simplex[0][1]))
            .fold(0.0, f64::max);
        if (spread <= 1e-14 && size <= 1e-7) || size <= 1e-12 {
            break;
        }

        let centroid = [
            0.5 * (simplex[0][0] + simplex[1][0]),
            0.5 * (simplex[0][1] + simplex[1][1]),
        ];
        let along = |t: f64| {
            [
                centroid[0] + t * (simplex[2][0] - centroid[0]),
                centroid[1] + t * (simplex[2][1] - centroid[1]),
            ]
        };
        let reflected = along(-1.0);
        let fr = f(reflected);
        if fr < values[0] {
            let expanded = along(-2.0);
            let fe = f(expanded);
            if fe < fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
        } else if fr < values[1] {
            simplex[2] = reflected;
            values[2] = fr;
        } else {
            let (contracted, fc) = if fr < values[2] {
                let c = along(-0.5);
                (c, f(c))
            } else {
                let c = along(0.5);
                (c, f(c))
            };
            if fc < values[2].min(fr) {
                simplex[2] = contracted;
                values[2] = fc;
            } else {
                for k in 1..3 {
                    simplex[k] = [
                        simplex[0][0] + 0.5 * (simplex[k][0] - simplex[0][0]),
                        simplex[0][1] + 0.5 * (simplex[k][1] - simplex[0][1]),
                    ];
                    values[k] = f(simplex[k]);
                }
            }
        }
    }
    let best = (0..3)
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap_or(0);
    (simplex[best], values[best])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let (x, v) = nelder_mead(
            |x| (x[0] - 0.03).powi(2) + 2.0 * (x[1] + 0.01).powi(2),
            0.05,
        );
        assert!((x[0] - 0.03).abs() < 1e-6);
        assert!((x[1] + 0.01).abs() < 1e-6);
        assert!(v < 1e-12);
    }

    #[test]
    fn tangent_frame_is_orthonormal() {
        for n in [
            [0.0, 0.0, 1.0],
            [1.0, 0.0, 0.0],
            normalize([0.3, -0.4, 0.5]),
        ] {
            let (a, b) = tangent_frame(n);
            let dot = |u: [f64; 3], v: [f64; 3]| u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
            assert!(dot(a, n).abs() < 1e-14 && dot(b, n).abs() < 1e-14 && dot(a, b).abs() < 1e-14);
            assert!((dot(a, a) - 1.0).abs() < 1e-14 && (dot(b, b) - 1.0).abs() < 1e-14);
        }
    }
}
