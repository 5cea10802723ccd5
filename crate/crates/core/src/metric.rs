//! Left-invariant metrics and their sectional curvature.
//!
//! The curvature is evaluated with Püttmann's formula
//!
//! ```text
//! k(Z₁,Z₂) = ½⟨[ΦZ₁,Z₂] + [Z₁,ΦZ₂], [Z₁,Z₂]⟩ − ¾|[Z₁,Z₂]|²_h
//!          + ⟨B(Z₁,Z₂), Φ⁻¹B(Z₁,Z₂)⟩ − ⟨B(Z₁,Z₁), Φ⁻¹B(Z₂,Z₂)⟩,
//! B(Z₁,Z₂) = ½([Z₁,ΦZ₂] + [Z₂,ΦZ₁]),
//! ```
//!
//! and cross-checked by [`koszul_oracle`], which builds the Levi-Civita
//! connection of the left-invariant frame from scratch.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{CurvatureError, Result};
use crate::lie::{LieAlgebra, Vector, MAX_DIM};

const SYMMETRY_TOL: f64 = 1e-12;

/// Relative eigenvalue floor for positive definiteness.
pub const POSITIVITY_TOL: f64 = 1e-12;

/// A map that is self-adjoint with respect to the bi-invariant inner product,
/// i.e. a symmetric matrix in the orthonormal basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SelfAdjointMap {
    mat: DMatrix<f64>,
}

impl SelfAdjointMap {
    /// Accepts a square matrix whose asymmetry is below `1e-12·max(1, |M|_max)`
    /// and stores its exact symmetrisation.
    pub fn new(mat: DMatrix<f64>) -> Result<Self> {
        Self::with_tolerance(mat, SYMMETRY_TOL)
    }

    pub fn with_tolerance(mat: DMatrix<f64>, tol: f64) -> Result<Self> {
        if !mat.is_square() {
            return Err(CurvatureError::InvalidInput(format!(
                "matrix is {}x{}, expected square",
                mat.nrows(),
                mat.ncols()
            )));
        }
        if mat.iter().any(|v| !v.is_finite()) {
            return Err(CurvatureError::InvalidInput("matrix has non-finite entries".into()));
        }
        let scale = mat.amax().max(1.0);
        let asym = (&mat - mat.transpose()).amax();
        if asym > tol * scale {
            return Err(CurvatureError::InvalidInput(format!(
                "matrix is not symmetric (residual {asym:e})"
            )));
        }
        let sym = (&mat + mat.transpose()) * 0.5;
        Ok(Self { mat: sym })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim),
        }
    }

    pub fn scalar(dim: usize, c: f64) -> Self {
        Self {
            mat: DMatrix::identity(dim, dim) * c,
        }
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        Self {
            mat: DMatrix::from_diagonal(&Vector::from_column_slice(entries)),
        }
    }

    pub fn from_row_slice(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(CurvatureError::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    pub fn apply(&self, x: &Vector) -> Vector {
        &self.mat * x
    }

    /// Eigen-decomposition with eigenvalues sorted ascending.
    pub fn eigen(&self) -> (Vec<f64>, DMatrix<f64>) {
        let eig = SymmetricEigen::new(self.mat.clone());
        let n = self.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors = DMatrix::zeros(n, n);
        for (col, &i) in order.iter().enumerate() {
            vectors.set_column(col, &eig.eigenvectors.column(i));
        }
        (values, vectors)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigen().0[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigen().0.last().expect("nonempty")
    }

    /// Applies `f` to the spectrum: `V f(Λ) Vᵀ`.
    pub fn spectral_map(&self, f: impl Fn(f64) -> f64) -> Self {
        let (values, vectors) = self.eigen();
        let d = DMatrix::from_diagonal(&Vector::from_iterator(values.len(), values.iter().map(|&v| f(v))));
        let mat = &vectors * d * vectors.transpose();
        let sym = (&mat + mat.transpose()) * 0.5;
        Self { mat: sym }
    }

    /// Checks the positive-definiteness gate `λ_min > 1e-12·λ_max`.
    pub fn check_positive_definite(&self) -> Result<()> {
        let (values, _) = self.eigen();
        let (lo, hi) = (values[0], *values.last().expect("nonempty"));
        if hi > 0.0 && lo > POSITIVITY_TOL * hi {
            Ok(())
        } else {
            Err(CurvatureError::NotPositiveDefinite {
                min_eigenvalue: lo,
                max_eigenvalue: hi,
            })
        }
    }

    /// Inverse via the symmetric eigendecomposition.
    pub fn inverse(&self) -> Result<Self> {
        self.check_positive_definite().or_else(|e| {
            // negative definite maps are invertible too; only refuse (near) singular ones
            let (values, _) = self.eigen();
            let big = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if values.iter().all(|v| v.abs() > POSITIVITY_TOL * big) {
                Ok(())
            } else {
                Err(e)
            }
        })?;
        Ok(self.spectral_map(|v| 1.0 / v))
    }

    /// Conjugation `R M Rᵀ` by an orthogonal matrix.
    pub fn conjugate(&self, rot: &DMatrix<f64>) -> Result<Self> {
        if rot.nrows() != self.dim() || rot.ncols() != self.dim() {
            return Err(CurvatureError::DimensionMismatch {
                expected: self.dim(),
                found: rot.nrows(),
            });
        }
        Self::with_tolerance(rot * &self.mat * rot.transpose(), 1e-10)
    }

    /// `‖M‖₂`, the largest absolute eigenvalue.
    pub fn spectral_norm(&self) -> f64 {
        self.eigen().0.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

impl TryFrom<Vec<Vec<f64>>> for SelfAdjointMap {
    type Error = CurvatureError;

    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(CurvatureError::InvalidInput(
                "matrix rows must form a nonempty square".into(),
            ));
        }
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        Self::from_row_slice(n, &flat)
    }
}

impl From<SelfAdjointMap> for Vec<Vec<f64>> {
    fn from(m: SelfAdjointMap) -> Self {
        m.mat.row_iter().map(|r| r.iter().cloned().collect()).collect()
    }
}

/// A left-invariant metric `h(A,B) = ⟨ΦA, B⟩` with `Φ ≻ 0`.
#[derive(Debug, Clone)]
pub struct LeftInvariantMetric {
    algebra: LieAlgebra,
    phi: SelfAdjointMap,
    phi_inv: SelfAdjointMap,
    // row-major copies for the allocation-free evaluator
    phi_flat: Vec<f64>,
    phi_inv_flat: Vec<f64>,
}

impl LeftInvariantMetric {
    pub fn new(algebra: LieAlgebra, phi: SelfAdjointMap) -> Result<Self> {
        if phi.dim() != algebra.dim() {
            return Err(CurvatureError::DimensionMismatch {
                expected: algebra.dim(),
                found: phi.dim(),
            });
        }
        phi.check_positive_definite()?;
        let phi_inv = phi.spectral_map(|v| 1.0 / v);
        let flat = |m: &SelfAdjointMap| m.matrix().transpose().as_slice().to_vec();
        Ok(Self {
            phi_flat: flat(&phi),
            phi_inv_flat: flat(&phi_inv),
            algebra,
            phi,
            phi_inv,
        })
    }

    /// The bi-invariant reference metric itself.
    pub fn bi_invariant(algebra: LieAlgebra) -> Self {
        let dim = algebra.dim();
        Self::new(algebra, SelfAdjointMap::identity(dim)).expect("identity is positive definite")
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn phi(&self) -> &SelfAdjointMap {
        &self.phi
    }

    pub fn phi_inverse(&self) -> &SelfAdjointMap {
        &self.phi_inv
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    /// `h(A, B) = ⟨ΦA, B⟩`.
    pub fn inner(&self, a: &Vector, b: &Vector) -> f64 {
        self.phi.apply(a).dot(b)
    }

    fn check(&self, v: &Vector) -> Result<()> {
        if v.len() != self.dim() {
            return Err(CurvatureError::DimensionMismatch {
                expected: self.dim(),
                found: v.len(),
            });
        }
        Ok(())
    }

    /// Unnormalized curvature on raw slices, without allocation.
    pub(crate) fn curvature_slices(&self, z1: &[f64], z2: &[f64]) -> f64 {
        let n = self.dim();
        let g = &self.algebra;
        let mut pz1 = [0.0; MAX_DIM];
        let mut pz2 = [0.0; MAX_DIM];
        mat_vec(&self.phi_flat, n, z1, &mut pz1);
        mat_vec(&self.phi_flat, n, z2, &mut pz2);
        let (pz1, pz2) = (&pz1[..n], &pz2[..n]);

        let mut c = [0.0; MAX_DIM];
        let mut p1z2 = [0.0; MAX_DIM];
        let mut z1p2 = [0.0; MAX_DIM];
        let mut z2p1 = [0.0; MAX_DIM];
        let mut b11 = [0.0; MAX_DIM];
        let mut b22 = [0.0; MAX_DIM];
        g.bracket_into(z1, z2, &mut c[..n]);
        g.bracket_into(pz1, z2, &mut p1z2[..n]);
        g.bracket_into(z1, pz2, &mut z1p2[..n]);
        g.bracket_into(z2, pz1, &mut z2p1[..n]);
        g.bracket_into(z1, pz1, &mut b11[..n]);
        g.bracket_into(z2, pz2, &mut b22[..n]);

        let mut b12 = [0.0; MAX_DIM];
        let mut first = 0.0;
        for k in 0..n {
            first += (p1z2[k] + z1p2[k]) * c[k];
            b12[k] = 0.5 * (z1p2[k] + z2p1[k]);
        }
        let mut pc = [0.0; MAX_DIM];
        mat_vec(&self.phi_flat, n, &c[..n], &mut pc);
        let mut ib12 = [0.0; MAX_DIM];
        let mut ib22 = [0.0; MAX_DIM];
        mat_vec(&self.phi_inv_flat, n, &b12[..n], &mut ib12);
        mat_vec(&self.phi_inv_flat, n, &b22[..n], &mut ib22);
        let mut c_h = 0.0;
        let mut last = 0.0;
        for k in 0..n {
            c_h += pc[k] * c[k];
            last += b12[k] * ib12[k] - b11[k] * ib22[k];
        }
        0.5 * first - 0.75 * c_h + last
    }

    /// Normalized curvature on slices; `Err` carries the relative Gram determinant of a degenerate plane.
    pub(crate) fn normalized_slices(&self, z1: &[f64], z2: &[f64]) -> std::result::Result<f64, f64> {
        let n = self.dim();
        let mut pz1 = [0.0; MAX_DIM];
        mat_vec(&self.phi_flat, n, z1, &mut pz1);
        let mut pz2 = [0.0; MAX_DIM];
        mat_vec(&self.phi_flat, n, z2, &mut pz2);
        let (mut h11, mut h22, mut h12) = (0.0, 0.0, 0.0);
        for k in 0..n {
            h11 += pz1[k] * z1[k];
            h22 += pz2[k] * z2[k];
            h12 += pz1[k] * z2[k];
        }
        let gram = h11 * h22 - h12 * h12;
        let rel = gram / (h11 * h22);
        if !(rel >= DEGENERACY_TOL) {
            return Err(if rel.is_finite() { rel } else { 0.0 });
        }
        Ok(self.curvature_slices(z1, z2) / gram)
    }
}

/// Relative Gram determinant below which a plane counts as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-14;

#[inline]
fn mat_vec(m: &[f64], n: usize, x: &[f64], out: &mut [f64; MAX_DIM]) {
    for i in 0..n {
        let row = &m[i * n..(i + 1) * n];
        out[i] = row.iter().zip(x).map(|(a, b)| a * b).sum();
    }
}

/// `B(Z₁,Z₂) = ½([Z₁,ΦZ₂] + [Z₂,ΦZ₁])`.
pub fn b_term(m: &LeftInvariantMetric, z1: &Vector, z2: &Vector) -> Result<Vector> {
    m.check(z1)?;
    m.check(z2)?;
    let g = m.algebra();
    let a = g.bracket_vec(z1, &m.phi.apply(z2));
    let b = g.bracket_vec(z2, &m.phi.apply(z1));
    Ok((a + b) * 0.5)
}

/// Unnormalized sectional curvature `k_h(Z₁, Z₂)` by Püttmann's formula.
pub fn puttmann_curvature(m: &LeftInvariantMetric, z1: &Vector, z2: &Vector) -> Result<f64> {
    m.check(z1)?;
    m.check(z2)?;
    Ok(m.curvature_slices(z1.as_slice(), z2.as_slice()))
}

/// `k_h(Z₁,Z₂) / (|Z₁|²_h |Z₂|²_h − h(Z₁,Z₂)²)`, the sectional curvature of the plane.
pub fn normalized_curvature(m: &LeftInvariantMetric, z1: &Vector, z2: &Vector) -> Result<f64> {
    m.check(z1)?;
    m.check(z2)?;
    m.normalized_slices(z1.as_slice(), z2.as_slice())
        .map_err(|gram| CurvatureError::DegeneratePlane { gram })
}

/// Unnormalized curvature `⟨R(Z₁,Z₂)Z₂, Z₁⟩_h` from the Levi-Civita connection
/// of the left-invariant frame.
///
/// For left-invariant fields metric coefficients are constant, so the Koszul
/// formula reduces to
/// `2h(∇_X Y, Z) = h([X,Y],Z) − h([Y,Z],X) + h([Z,X],Y)`, and
/// `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]} Z`.
pub fn koszul_oracle(m: &LeftInvariantMetric, z1: &Vector, z2: &Vector) -> Result<f64> {
    m.check(z1)?;
    m.check(z2)?;
    let g = m.algebra();
    let n = g.dim();
    let gram = m.phi.matrix().clone();
    let lu = gram.clone().lu();
    // gamma[i][j] = coordinates of ∇_{e_i} e_j
    let mut gamma = vec![vec![Vector::zeros(n); n]; n];
    for i in 0..n {
        for j in 0..n {
            let mut rhs = Vector::zeros(n);
            for l in 0..n {
                let mut s = 0.0;
                for k in 0..n {
                    s += g.structure_constant(i, j, k) * gram[(k, l)] - g.structure_constant(j, l, k) * gram[(k, i)]
                        + g.structure_constant(l, i, k) * gram[(k, j)];
                }
                rhs[l] = 0.5 * s;
            }
            gamma[i][j] = lu.solve(&rhs).ok_or(CurvatureError::NotPositiveDefinite {
                min_eigenvalue: 0.0,
                max_eigenvalue: 0.0,
            })?;
        }
    }
    let nabla = |x: &Vector, y: &Vector| -> Vector {
        let mut out = Vector::zeros(n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if y[j] != 0.0 {
                    out += &gamma[i][j] * (x[i] * y[j]);
                }
            }
        }
        out
    };
    let r = nabla(z1, &nabla(z2, z2)) - nabla(z2, &nabla(z1, z2)) - nabla(&g.bracket_vec(z1, z2), z2);
    Ok((&gram * r).dot(z1))
}
