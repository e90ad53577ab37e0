//! Dense exact spectra for small graphs: ground truth for the KPM and GQL
//! approximations, and the LAD baseline embedding.
//!
//! The dense `L_sym` is assembled directly from the snapshot adjacency and
//! does not go through [`crate::graph::SpectralOperator`]. Isolated nodes get
//! a unit diagonal, matching the operator's zero row in `H = L_sym - I`.

use faer::{Mat, Side};

use crate::dos::{BinLayout, SignatureKind, SignatureVector};
use crate::error::{Result, ScpdError};
use crate::graph::Snapshot;

pub const DEFAULT_NODE_CAP: usize = 3000;

#[derive(Debug, Clone)]
pub struct ExactSpectrum {
    /// Eigenvalues of `L_sym`, ascending.
    pub eigenvalues: Vec<f64>,
    n: usize,
    /// Column-major eigenvectors, column `i` pairs with `eigenvalues[i]`.
    eigenvectors: Option<Vec<f64>>,
}

impl ExactSpectrum {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn has_vectors(&self) -> bool {
        self.eigenvectors.is_some()
    }

    pub fn eigenvector(&self, i: usize) -> Option<&[f64]> {
        self.eigenvectors.as_ref().map(|q| &q[i * self.n..(i + 1) * self.n])
    }

    /// `|v^T q_i|^2` for every eigenvector.
    pub fn projection_weights(&self, v: &[f64]) -> Result<Vec<f64>> {
        if !self.has_vectors() {
            return Err(ScpdError::MissingEigenvectors);
        }
        if v.len() != self.n {
            return Err(ScpdError::DimensionMismatch { got: v.len(), expected: self.n });
        }
        Ok((0..self.n)
            .map(|i| {
                let q = self.eigenvector(i).unwrap();
                let p: f64 = q.iter().zip(v).map(|(a, b)| a * b).sum();
                p * p
            })
            .collect())
    }
}

/// Dense `L_sym` in row-major order.
pub fn dense_laplacian(s: &Snapshot) -> Vec<f64> {
    let n = s.node_count();
    let deg = s.degrees();
    let mut l = vec![0.0; n * n];
    for r in 0..n {
        l[r * n + r] = 1.0;
        for (c, w) in s.neighbors(r) {
            if deg[r] > 0.0 && deg[c] > 0.0 {
                l[r * n + c] = -w / (deg[r] * deg[c]).sqrt();
            }
        }
    }
    l
}

pub fn exact_spectrum(s: &Snapshot, with_vectors: bool) -> Result<ExactSpectrum> {
    exact_spectrum_capped(s, with_vectors, DEFAULT_NODE_CAP)
}

pub fn exact_spectrum_capped(s: &Snapshot, with_vectors: bool, cap: usize) -> Result<ExactSpectrum> {
    let n = s.node_count();
    if n > cap {
        return Err(ScpdError::SpectrumCapExceeded { nodes: n, cap });
    }
    if n == 0 {
        return Ok(ExactSpectrum { eigenvalues: Vec::new(), n, eigenvectors: with_vectors.then(Vec::new) });
    }
    let dense = dense_laplacian(s);
    let m = Mat::<f64>::from_fn(n, n, |i, j| dense[i * n + j]);
    if with_vectors {
        let eig = m.self_adjoint_eigen(Side::Lower).map_err(|e| ScpdError::Eigen(format!("{e:?}")))?;
        let vals = eig.S().column_vector();
        let vecs = eig.U();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        let eigenvalues = order.iter().map(|&i| vals[i]).collect();
        let mut q = Vec::with_capacity(n * n);
        for &i in &order {
            q.extend((0..n).map(|r| vecs[(r, i)]));
        }
        Ok(ExactSpectrum { eigenvalues, n, eigenvectors: Some(q) })
    } else {
        let mut eigenvalues =
            m.self_adjoint_eigenvalues(Side::Lower).map_err(|e| ScpdError::Eigen(format!("{e:?}")))?;
        eigenvalues.sort_by(f64::total_cmp);
        Ok(ExactSpectrum { eigenvalues, n, eigenvectors: None })
    }
}

/// Exact histogram on the same bin layout as the approximations: eigenvalue
/// counts (global) or projection weights `|v^T q_i|^2` (local, needs vectors).
pub fn exact_histogram(spec: &ExactSpectrum, k: usize, v: Option<&[f64]>) -> Result<SignatureVector> {
    let layout = BinLayout::new(k);
    let shifted = spec.eigenvalues.iter().map(|l| l - 1.0);
    let (bins, kind) = match v {
        None => (layout.histogram(shifted.map(|x| (x, 1.0))), SignatureKind::GlobalDos),
        Some(v) => {
            let w = spec.projection_weights(v)?;
            (layout.histogram(shifted.zip(w)), SignatureKind::LocalDos(String::new()))
        }
    };
    Ok(SignatureVector { bins, kind, timestep: 0 })
}

/// LAD baseline embedding: all `L_sym` eigenvalues, ascending.
pub fn lad_embedding(s: &Snapshot) -> Result<Vec<f64>> {
    lad_embedding_capped(s, DEFAULT_NODE_CAP)
}

pub fn lad_embedding_capped(s: &Snapshot, cap: usize) -> Result<Vec<f64>> {
    Ok(exact_spectrum_capped(s, false, cap)?.eigenvalues)
}
