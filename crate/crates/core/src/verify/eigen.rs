use serde::{Deserialize, Serialize};

use crate::error::{CurvatureError, Result};
use crate::lie::{LieAlgebra, Vector};
use crate::metric::SelfAdjointMap;
use crate::par::map_indexed;
use crate::rng::{gaussian_vector, stream, Domain};

/// Relative gap below which neighbouring eigenvalues are merged.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-8;

const LEMMA_K_THRESHOLD: f64 = 1e-8;

/// Clustered spectral decomposition of a self-adjoint map.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenStructure {
    /// Ascending cluster means.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal basis of each eigenspace, aligned with `eigenvalues`.
    pub eigenspaces: Vec<Vec<Vector>>,
}

impl EigenStructure {
    pub fn multiplicities(&self) -> Vec<usize> {
        self.eigenspaces.iter().map(Vec::len).collect()
    }

    pub fn min_eigenspace(&self) -> &[Vector] {
        &self.eigenspaces[0]
    }

    /// Orthogonal projector onto the eigenspace with index `k`.
    pub fn projector(&self, k: usize) -> nalgebra::DMatrix<f64> {
        let n = self.eigenspaces[k][0].len();
        let mut p = nalgebra::DMatrix::zeros(n, n);
        for v in &self.eigenspaces[k] {
            p += v * v.transpose();
        }
        p
    }
}

/// Eigenvalues of `psi` grouped into clusters whose consecutive gaps are at most
/// `cluster_tol · max(1, ‖Ψ‖)`.
pub fn eigenstructure(psi: &SelfAdjointMap, cluster_tol: f64) -> EigenStructure {
    let (values, vectors) = psi.eigen();
    let scale = psi.spectral_norm().max(1.0);
    let mut eigenvalues = Vec::new();
    let mut eigenspaces: Vec<Vec<Vector>> = Vec::new();
    let mut members: Vec<f64> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        if let Some(&last) = members.last() {
            if v - last > cluster_tol * scale {
                eigenvalues.push(members.iter().sum::<f64>() / members.len() as f64);
                members.clear();
            }
        }
        if members.is_empty() {
            eigenspaces.push(Vec::new());
        }
        members.push(v);
        eigenspaces
            .last_mut()
            .expect("pushed")
            .push(vectors.column(i).into_owned());
    }
    if !members.is_empty() {
        eigenvalues.push(members.iter().sum::<f64>() / members.len() as f64);
    }
    EigenStructure {
        eigenvalues,
        eigenspaces,
    }
}

/// Outcome of the sampled test that `Ψ` maps commuting partners of the minimal
/// eigenspace `𝔭₀` back into `𝔭₀` under the bracket.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaKReport {
    pub min_eigenvalue: f64,
    pub p0_dim: usize,
    /// Samples with a commuting partner (those with 1-dimensional centralizer are skipped).
    pub samples_used: usize,
    /// Largest `|(I − P₀)[X, ΨY]| / (‖Ψ‖·|X|·|Y|)`.
    pub max_residual: f64,
    pub threshold: f64,
    pub pass: bool,
    /// `(X, Y)` attaining `max_residual`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub worst: Option<[Vec<f64>; 2]>,
}

/// Samples `X ∈ 𝔭₀` and `Y` in the centralizer of `X`, and measures how far
/// `[X, ΨY]` leaves `𝔭₀`. A nonnegatively curved variation forces this to vanish.
pub fn lemma_k_check(g: &LieAlgebra, psi: &SelfAdjointMap, n_samples: usize, seed: u64) -> Result<LemmaKReport> {
    if psi.dim() != g.dim() {
        return Err(CurvatureError::DimensionMismatch {
            expected: g.dim(),
            found: psi.dim(),
        });
    }
    let structure = eigenstructure(psi, DEFAULT_CLUSTER_TOL);
    let p0 = structure.min_eigenspace().to_vec();
    let proj = structure.projector(0);
    let norm = psi.spectral_norm();
    let results: Vec<Option<(f64, Vector, Vector)>> = map_indexed(n_samples, |i| {
        let mut rng = stream(seed, Domain::LemmaK, i as u64);
        let coeffs = gaussian_vector(&mut rng, p0.len());
        let mut x = g.zero();
        for (c, v) in coeffs.iter().zip(&p0) {
            x += v * *c;
        }
        let nx = x.norm();
        if !(nx > 0.0) {
            return None;
        }
        x /= nx;
        let cent = g.centralizer(&x, 1e-10);
        if cent.len() < 2 {
            return None;
        }
        let coeffs = gaussian_vector(&mut rng, cent.len());
        let mut y = g.zero();
        for (c, v) in coeffs.iter().zip(&cent) {
            y += v * *c;
        }
        let ny = y.norm();
        if !(ny > 0.0) {
            return None;
        }
        y /= ny;
        let w = g.bracket_vec(&x, &psi.apply(&y));
        let outside = &w - &proj * &w;
        let residual = if norm > 0.0 { outside.norm() / norm } else { 0.0 };
        Some((residual, x, y))
    });
    let mut used = 0;
    let mut worst: Option<(f64, Vector, Vector)> = None;
    for (r, x, y) in results.into_iter().flatten() {
        used += 1;
        if worst.as_ref().is_none_or(|w| r > w.0) {
            worst = Some((r, x, y));
        }
    }
    let max_residual = worst.as_ref().map_or(0.0, |w| w.0);
    Ok(LemmaKReport {
        min_eigenvalue: structure.eigenvalues[0],
        p0_dim: p0.len(),
        samples_used: used,
        max_residual,
        threshold: LEMMA_K_THRESHOLD,
        pass: max_residual < LEMMA_K_THRESHOLD,
        worst: worst.map(|(_, x, y)| [x.as_slice().to_vec(), y.as_slice().to_vec()]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{so4, Subalgebra};

    #[test]
    fn clusters_repeated_eigenvalues() {
        let psi = SelfAdjointMap::diagonal(&[2.0, -1.0, 2.0 + 1e-12, 0.5, -1.0, 2.0]);
        let s = eigenstructure(&psi, DEFAULT_CLUSTER_TOL);
        assert_eq!(s.multiplicities(), vec![2, 1, 3]);
        assert!((s.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((s.eigenvalues[2] - 2.0).abs() < 1e-12);
        let p = s.projector(0);
        assert!((p.trace() - 2.0).abs() < 1e-12);
        assert!((p[(1, 1)] - 1.0).abs() < 1e-12 && (p[(4, 4)] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn subalgebra_projections_pass() {
        let g = so4();
        for h in [Subalgebra::factor(&g, 0).unwrap(), Subalgebra::diagonal(&g).unwrap()] {
            let psi = SelfAdjointMap::new(h.projector(6)).unwrap();
            let r = lemma_k_check(&g, &psi, 200, 9).unwrap();
            assert!(r.pass, "residual {}", r.max_residual);
            assert_eq!(r.p0_dim, 3);
            assert!(r.samples_used > 150);
        }
    }

    #[test]
    fn coupled_map_fails() {
        let g = so4();
        let mut m = nalgebra::DMatrix::zeros(6, 6);
        m[(0, 0)] = -1.0;
        m[(3, 1)] = 0.5;
        m[(1, 3)] = 0.5;
        let psi = SelfAdjointMap::new(m).unwrap();
        let r = lemma_k_check(&g, &psi, 100, 1).unwrap();
        assert_eq!(r.p0_dim, 1);
        assert!(!r.pass);
        assert!(r.max_residual > 0.3 && r.max_residual <= 0.5 + 1e-12);
    }
}
