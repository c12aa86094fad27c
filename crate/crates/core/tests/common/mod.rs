//! Independent reference computations shared by the integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::{PI, TAU};

use einselect::qstate::{partial_trace, von_neumann_entropy, DensityMatrix, Subsystem};

pub fn h2(p: f64) -> f64 {
    [p, 1.0 - p]
        .into_iter()
        .filter(|&x| x > 0.0)
        .map(|x| -x * x.log2())
        .sum()
}

/// Entropy of a 2x2 Hermitian block with trace `t`, normalized, from its
/// closed-form eigenvalues.
fn block_entropy(a: f64, d: f64, b_re: f64, b_im: f64) -> f64 {
    let t = a + d;
    let r = (((a - d) / 2.0).powi(2) + b_re * b_re + b_im * b_im).sqrt();
    h2(((t / 2.0 + r) / t).clamp(0.0, 1.0))
}

/// `J` for the projector onto Bloch direction `n` and its complement, via the
/// explicit sandwich `Tr_a[(I⊗Π) ρ (I⊗Π)]` written out entry by entry.
pub fn j_direct(rho: &DensityMatrix, s_sys: f64, n: [f64; 3]) -> f64 {
    let m = rho.entries();
    let mut j = s_sys;
    for sign in [1.0, -1.0] {
        // Π = (I + sign n·σ)/2
        let pi = [
            [
                (0.5 * (1.0 + sign * n[2]), 0.0),
                (0.5 * sign * n[0], -0.5 * sign * n[1]),
            ],
            [
                (0.5 * sign * n[0], 0.5 * sign * n[1]),
                (0.5 * (1.0 - sign * n[2]), 0.0),
            ],
        ];
        let mut blk = [[(0.0, 0.0); 2]; 2];
        for (s, row) in blk.iter_mut().enumerate() {
            for (t, cell) in row.iter_mut().enumerate() {
                let mut acc = (0.0, 0.0);
                for a in 0..2 {
                    for b in 0..2 {
                        // (I⊗Π) ρ (I⊗Π) traced over a: Σ_{a,b,c} Π_ab ρ_{(s,b),(t,c)} Π_ca
                        for c in 0..2 {
                            let x = m[(2 * s + b, 2 * t + c)];
                            let (p1r, p1i) = pi[a][b];
                            let (p2r, p2i) = pi[c][a];
                            let pr = p1r * p2r - p1i * p2i;
                            let pim = p1r * p2i + p1i * p2r;
                            acc.0 += pr * x.re - pim * x.im;
                            acc.1 += pr * x.im + pim * x.re;
                        }
                    }
                }
                *cell = acc;
            }
        }
        let p = blk[0][0].0 + blk[1][1].0;
        if p > 1e-14 {
            j -= p * block_entropy(blk[0][0].0, blk[1][1].0, blk[0][1].0, blk[0][1].1);
        }
    }
    j
}

/// Dense grid maximum of `J` over `nt x np` measurement directions.
pub fn brute_force_jmax(rho: &DensityMatrix, nt: usize, np: usize) -> f64 {
    let s_sys = von_neumann_entropy(&partial_trace(rho, Subsystem::System).unwrap()).unwrap();
    let mut best = f64::NEG_INFINITY;
    for i in 0..nt {
        let theta = PI * i as f64 / (nt - 1) as f64;
        for k in 0..np {
            let phi = TAU * k as f64 / np as f64;
            let n = [
                theta.sin() * phi.cos(),
                theta.sin() * phi.sin(),
                theta.cos(),
            ];
            best = best.max(j_direct(rho, s_sys, n));
        }
    }
    best
}
