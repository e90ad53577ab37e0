use super::{DosConfig, SignatureKind, SignatureVector};
use crate::error::{Result, ScpdError};
use crate::graph::SpectralOperator;

/// Krylov space exhausted below this residual norm.
const BREAKDOWN_TOL: f64 = 1e-10;

/// Tridiagonal coefficients from a Lanczos run. `beta[j]` couples steps `j`
/// and `j + 1`, so `beta.len() == alpha.len() - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LanczosRun {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

/// `steps` Lanczos iterations on `H` from `start / |start|` with full
/// (two-pass Gram-Schmidt) reorthogonalization. Stops early when the
/// residual falls below `1e-10`.
pub fn lanczos(op: &SpectralOperator, start: &[f64], steps: usize) -> LanczosRun {
    let n = op.dim();
    let steps = steps.min(n);
    let norm = start.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(steps);
    basis.push(start.iter().map(|x| x / norm).collect());
    let mut alpha = Vec::with_capacity(steps);
    let mut beta: Vec<f64> = Vec::with_capacity(steps);
    let mut w = vec![0.0; n];

    for j in 0..steps {
        op.apply(&basis[j], &mut w);
        let a = dot(&basis[j], &w);
        alpha.push(a);
        axpy(-a, &basis[j], &mut w);
        if j > 0 {
            axpy(-beta[j - 1], &basis[j - 1], &mut w);
        }
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                axpy(-c, q, &mut w);
            }
        }
        if j + 1 == steps {
            break;
        }
        let b = dot(&w, &w).sqrt();
        if b < BREAKDOWN_TOL {
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    LanczosRun { alpha, beta }
}

/// Eigenvalues of the symmetric tridiagonal matrix `(diag, off)` together with
/// the first component of each normalized eigenvector, by implicit QL with
/// Wilkinson shifts. Results are sorted by eigenvalue.
pub fn tridiagonal_eigen(diag: &[f64], off: &[f64]) -> Result<Vec<(f64, f64)>> {
    let n = diag.len();
    assert!(off.len() + 1 == n || (n == 0 && off.is_empty()));
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);
    let mut z = vec![0.0; n];
    if n > 0 {
        z[0] = 1.0;
    }

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(ScpdError::Eigen("tridiagonal QL did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }

    let mut pairs: Vec<(f64, f64)> = d.into_iter().zip(z).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs)
}

/// Gauss-quadrature estimate of the local density of states of `op` seen from
/// attribute vector `v`: each Ritz value `theta_j` of an `n_moments`-step
/// Lanczos run from `v` carries weight `|v|^2 s_j^2`, where `s_j` is the first
/// component of the matching tridiagonal eigenvector. Total mass is `|v|^2`.
///
/// Deterministic in `v`; the probe count is not used.
pub fn gql_ldos(op: &SpectralOperator, v: &[f64], cfg: &DosConfig) -> Result<SignatureVector> {
    cfg.validate()?;
    if op.dim() == 0 {
        return Err(ScpdError::EmptyGraph);
    }
    if v.len() != op.dim() {
        return Err(ScpdError::DimensionMismatch { got: v.len(), expected: op.dim() });
    }
    let norm_sq: f64 = v.iter().map(|x| x * x).sum();
    if norm_sq == 0.0 || !norm_sq.is_finite() {
        return Err(ScpdError::ZeroVector);
    }
    let run = lanczos(op, v, cfg.n_moments);
    let pairs = tridiagonal_eigen(&run.alpha, &run.beta)?;
    let bins = cfg
        .layout()
        .histogram(pairs.into_iter().map(|(theta, s)| (theta.clamp(-1.0, 1.0), norm_sq * s * s)));
    Ok(SignatureVector {
        bins,
        kind: SignatureKind::LocalDos(String::new()),
        timestep: op.snapshot().timestep(),
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(a: f64, x: &[f64], y: &mut [f64]) {
    for (yv, xv) in y.iter_mut().zip(x) {
        *yv += a * xv;
    }
}
