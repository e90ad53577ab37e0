use std::f64::consts::PI;

use rand::RngCore;

use super::{BinLayout, Damping, DosConfig, SignatureKind, SignatureVector};
use crate::error::{Result, ScpdError};
use crate::graph::SpectralOperator;
use crate::rng::stream_rng;

/// Trace moments `d_m = tr(T_m(H)) / n`, raw and after damping.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevMoments {
    pub raw: Vec<f64>,
    pub damped: Vec<f64>,
}

/// Jackson kernel coefficients `g_0..g_{N-1}` for `N` moments.
pub fn jackson_coefficients(n_moments: usize) -> Vec<f64> {
    let big_n = n_moments as f64;
    let a = PI / (big_n + 1.0);
    (0..n_moments)
        .map(|m| {
            let m = m as f64;
            ((big_n - m + 1.0) * (a * m).cos() + (a * m).sin() / a.tan()) / (big_n + 1.0)
        })
        .collect()
}

/// Row-major `n x width` block of Rademacher probes scaled by `1/sqrt(n)`,
/// so each column has unit norm. Entry `(r, z)` takes bit `r * width + z` of
/// the stream, 64 bits per `next_u64` draw, least significant bit first.
pub fn rademacher_probes(n: usize, width: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, 0);
    let scale = 1.0 / (n as f64).sqrt();
    let mut out = Vec::with_capacity(n * width);
    let mut bits = 0u64;
    for idx in 0..n * width {
        if idx % 64 == 0 {
            bits = rng.next_u64();
        }
        out.push(if bits & 1 == 1 { scale } else { -scale });
        bits >>= 1;
    }
    out
}

/// Hutchinson estimates of the first `n_moments` Chebyshev moments of `H`
/// from the probe block, using `T_{m+1} = 2 H T_m - T_{m-1}`.
///
/// Moment `m` is the mean over probe columns of `z^T T_m(H) z`, accumulated
/// row by row in index order.
pub fn kpm_moments(op: &SpectralOperator, probes: &[f64], width: usize, n_moments: usize) -> Vec<f64> {
    let n = op.dim();
    assert_eq!(probes.len(), n * width);
    let mean_dot = |t: &[f64]| -> f64 {
        let total: f64 = probes.iter().zip(t).map(|(z, v)| z * v).sum();
        total / width as f64
    };

    let mut moments = Vec::with_capacity(n_moments);
    moments.push(mean_dot(probes));
    if n_moments == 1 {
        return moments;
    }
    let mut prev = probes.to_vec();
    let mut cur = vec![0.0; n * width];
    op.apply_block(&prev, &mut cur, width, 1.0, 0.0);
    moments.push(mean_dot(&cur));
    for _ in 2..n_moments {
        // prev <- 2 H cur - prev, then swap so cur holds the newest
        op.apply_block(&cur, &mut prev, width, 2.0, -1.0);
        std::mem::swap(&mut prev, &mut cur);
        moments.push(mean_dot(&cur));
    }
    moments
}

/// Bin masses of the Chebyshev expansion with the given (already damped)
/// moments, scaled to `n_nodes` total mass. Not clipped.
///
/// For bin `[a, b]` with `theta_x = acos(x)` the weight-function integrals are
/// `I_0 = (theta_a - theta_b) / pi` and
/// `I_m = (sin(m theta_a) - sin(m theta_b)) / (m pi)`.
pub fn chebyshev_histogram(damped: &[f64], layout: BinLayout, n_nodes: usize) -> Vec<f64> {
    let thetas: Vec<f64> = (0..=layout.len()).map(|i| layout.edge(i).clamp(-1.0, 1.0).acos()).collect();
    (0..layout.len())
        .map(|b| {
            let (ta, tb) = (thetas[b], thetas[b + 1]);
            let mut acc = damped[0] * (ta - tb) / PI;
            for (m, d) in damped.iter().enumerate().skip(1) {
                let mf = m as f64;
                acc += 2.0 * d * ((mf * ta).sin() - (mf * tb).sin()) / (mf * PI);
            }
            acc * n_nodes as f64
        })
        .collect()
}

impl ChebyshevMoments {
    pub fn estimate(op: &SpectralOperator, cfg: &DosConfig, seed: u64) -> Self {
        let probes = rademacher_probes(op.dim(), cfg.n_probe, seed);
        let raw = kpm_moments(op, &probes, cfg.n_probe, cfg.n_moments);
        Self::from_raw(raw, cfg.damping)
    }

    pub fn from_raw(raw: Vec<f64>, damping: Damping) -> Self {
        let damped = match damping {
            Damping::Jackson => raw.iter().zip(jackson_coefficients(raw.len())).map(|(d, g)| d * g).collect(),
            Damping::None => raw.clone(),
        };
        ChebyshevMoments { raw, damped }
    }

    /// Unclipped bin masses; they sum to `n_nodes * raw[0]`.
    pub fn histogram(&self, layout: BinLayout, n_nodes: usize) -> Vec<f64> {
        chebyshev_histogram(&self.damped, layout, n_nodes)
    }
}

/// KPM estimate of the global DOS histogram of `op`, with total mass close
/// to the node count. Negative bins are clipped to zero.
pub fn kpm_dos(op: &SpectralOperator, cfg: &DosConfig) -> Result<SignatureVector> {
    cfg.validate()?;
    let n = op.dim();
    if n == 0 {
        return Err(ScpdError::EmptyGraph);
    }
    let timestep = op.snapshot().timestep();
    let moments = ChebyshevMoments::estimate(op, cfg, cfg.probe_seed(timestep));
    let bins = moments.histogram(cfg.layout(), n).into_iter().map(|b| b.max(0.0)).collect();
    Ok(SignatureVector { bins, kind: SignatureKind::GlobalDos, timestep })
}
