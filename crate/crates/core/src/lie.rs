//! Finite-dimensional Lie algebras given by structure constants in an
//! orthonormal basis of a fixed bi-invariant inner product.
//!
//! Coordinates are always taken in that orthonormal basis, so the inner product
//! `⟨X, Y⟩` is the Euclidean dot product of coordinate vectors. For `so(4)` the
//! basis is ordered `(A₁, A₂, A₃, B₁, B₂, B₃)`, each triple a copy of `so(3)`
//! with `[e₁, e₂] = e₃` cyclically.

use nalgebra::{DMatrix, DVector};

use crate::error::{CurvatureError, Result};

/// Coordinates of a Lie algebra element in the orthonormal basis.
pub type Vector = DVector<f64>;

/// Largest dimension supported by the allocation-free evaluation paths.
pub const MAX_DIM: usize = 8;

const STRUCTURE_TOL: f64 = 1e-12;
const CLOSURE_TOL: f64 = 1e-10;

/// Relative size below which a factor projection counts as zero.
pub const REGULARITY_TOL: f64 = 1e-10;

/// A Lie algebra `𝔤` with structure tensor `c[i][j][k]`, i.e. `[eᵢ, eⱼ] = Σₖ c[i][j][k] eₖ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    dim: usize,
    structure: Vec<f64>,
    // nonzero (i, j, k, c) with i < j; the bracket is assembled from these
    terms: Vec<(usize, usize, usize, f64)>,
    factors: Option<[Vec<usize>; 2]>,
}

impl LieAlgebra {
    /// Builds an algebra from a dense `dim³` structure tensor, checking
    /// antisymmetry, the Jacobi identity, ad-invariance of the Euclidean inner
    /// product and, if given, that the two factors are commuting ideals.
    pub fn from_structure(dim: usize, structure: Vec<f64>, factors: Option<[Vec<usize>; 2]>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(CurvatureError::InvalidInput(format!(
                "algebra dimension must be in 1..={MAX_DIM}, got {dim}"
            )));
        }
        if structure.len() != dim * dim * dim {
            return Err(CurvatureError::DimensionMismatch {
                expected: dim * dim * dim,
                found: structure.len(),
            });
        }
        let idx = |i: usize, j: usize, k: usize| (i * dim + j) * dim + k;
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let c = structure[idx(i, j, k)];
                    if !c.is_finite() {
                        return Err(CurvatureError::InvalidInput("non-finite structure constant".into()));
                    }
                    if (c + structure[idx(j, i, k)]).abs() > STRUCTURE_TOL {
                        return Err(CurvatureError::InvalidInput(format!(
                            "structure constants not antisymmetric at ({i},{j},{k})"
                        )));
                    }
                    if (c + structure[idx(i, k, j)]).abs() > STRUCTURE_TOL {
                        return Err(CurvatureError::InvalidInput(format!(
                            "inner product is not ad-invariant at ({i},{j},{k})"
                        )));
                    }
                }
            }
        }
        let mut terms = Vec::new();
        for i in 0..dim {
            for j in (i + 1)..dim {
                for k in 0..dim {
                    let c = structure[idx(i, j, k)];
                    if c != 0.0 {
                        terms.push((i, j, k, c));
                    }
                }
            }
        }
        let algebra = Self {
            dim,
            structure,
            terms,
            factors,
        };
        let basis: Vec<Vector> = (0..dim).map(|i| algebra.basis_vector(i)).collect();
        for a in &basis {
            for b in &basis {
                for c in &basis {
                    if algebra.jacobi_residual(a, b, c) > STRUCTURE_TOL {
                        return Err(CurvatureError::InvalidInput("Jacobi identity fails".into()));
                    }
                }
            }
        }
        if let Some(parts) = &algebra.factors {
            let mut seen = vec![false; dim];
            for &i in parts.iter().flatten() {
                if i >= dim || seen[i] {
                    return Err(CurvatureError::InvalidInput("factor split is not a partition".into()));
                }
                seen[i] = true;
            }
            if seen.iter().any(|s| !s) {
                return Err(CurvatureError::InvalidInput("factor split is not a partition".into()));
            }
            for &i in &parts[0] {
                for &j in &parts[1] {
                    if algebra.bracket_vec(&basis[i], &basis[j]).amax() > STRUCTURE_TOL {
                        return Err(CurvatureError::InvalidInput("factors do not commute".into()));
                    }
                }
            }
            for part in parts {
                for &i in part {
                    for &j in part {
                        let z = algebra.bracket_vec(&basis[i], &basis[j]);
                        let outside: f64 = (0..dim)
                            .filter(|k| !part.contains(k))
                            .map(|k| z[k].abs())
                            .fold(0.0, f64::max);
                        if outside > STRUCTURE_TOL {
                            return Err(CurvatureError::InvalidInput(
                                "factor is not closed under bracket".into(),
                            ));
                        }
                    }
                }
            }
        }
        Ok(algebra)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Structure constant `c[i][j][k]`.
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> f64 {
        self.structure[(i * self.dim + j) * self.dim + k]
    }

    pub fn factors(&self) -> Option<&[Vec<usize>; 2]> {
        self.factors.as_ref()
    }

    pub fn basis_vector(&self, i: usize) -> Vector {
        let mut v = Vector::zeros(self.dim);
        v[i] = 1.0;
        v
    }

    pub fn zero(&self) -> Vector {
        Vector::zeros(self.dim)
    }

    fn check_dim(&self, v: &Vector) -> Result<()> {
        if v.len() != self.dim {
            return Err(CurvatureError::DimensionMismatch {
                expected: self.dim,
                found: v.len(),
            });
        }
        Ok(())
    }

    /// `out = [x, y]`, on raw coordinate slices. Slices must have length `dim`.
    #[inline]
    pub fn bracket_into(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        debug_assert!(x.len() == self.dim && y.len() == self.dim && out.len() == self.dim);
        out.iter_mut().for_each(|o| *o = 0.0);
        for &(i, j, k, c) in &self.terms {
            out[k] += c * (x[i] * y[j] - x[j] * y[i]);
        }
    }

    /// The Lie bracket `[X, Y]`.
    pub fn bracket(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        Ok(self.bracket_vec(x, y))
    }

    /// Bracket without the dimension check; panics on mismatched lengths.
    pub(crate) fn bracket_vec(&self, x: &Vector, y: &Vector) -> Vector {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        let mut out = Vector::zeros(self.dim);
        self.bracket_into(x.as_slice(), y.as_slice(), out.as_mut_slice());
        out
    }

    /// Matrix of `ad_X = [X, ·]`.
    pub fn ad_matrix(&self, x: &Vector) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for j in 0..self.dim {
            let col = self.bracket_vec(x, &self.basis_vector(j));
            m.set_column(j, &col);
        }
        m
    }

    /// Orthonormal basis of the centralizer `{Y : [X, Y] = 0}`, computed as the
    /// numerical null space of `ad_X` (singular values below `tol·max(1, σ_max)`).
    pub fn centralizer(&self, x: &Vector, tol: f64) -> Vec<Vector> {
        let ad = self.ad_matrix(x);
        let svd = ad.svd(false, true);
        let v_t = svd.v_t.expect("requested");
        let top = svd.singular_values.max();
        let cut = tol * top.max(1.0);
        (0..self.dim)
            .filter(|&i| svd.singular_values[i] <= cut)
            .map(|i| v_t.row(i).transpose())
            .collect()
    }

    /// `|[[X,Y],Z] + [[Y,Z],X] + [[Z,X],Y]|_∞`.
    pub fn jacobi_residual(&self, x: &Vector, y: &Vector, z: &Vector) -> f64 {
        let a = self.bracket_vec(&self.bracket_vec(x, y), z);
        let b = self.bracket_vec(&self.bracket_vec(y, z), x);
        let c = self.bracket_vec(&self.bracket_vec(z, x), y);
        (a + b + c).amax()
    }

    /// `|⟨[X,Y],Z⟩ + ⟨Y,[X,Z]⟩|`, zero for a bi-invariant inner product.
    pub fn invariance_residual(&self, x: &Vector, y: &Vector, z: &Vector) -> f64 {
        (self.bracket_vec(x, y).dot(z) + y.dot(&self.bracket_vec(x, z))).abs()
    }

    /// Orthogonal projection onto factor `k` (0 or 1). Requires a factor split.
    pub fn factor_projection(&self, k: usize, x: &Vector) -> Result<Vector> {
        self.check_dim(x)?;
        let parts = self
            .factors
            .as_ref()
            .ok_or_else(|| CurvatureError::InvalidInput("algebra has no factor split".into()))?;
        let part = parts
            .get(k)
            .ok_or_else(|| CurvatureError::InvalidInput(format!("no factor {k}")))?;
        let mut out = Vector::zeros(self.dim);
        for &i in part {
            out[i] = x[i];
        }
        Ok(out)
    }

    /// Embeds coordinates of a factor element into the whole algebra.
    pub fn embed_factor(&self, k: usize, coords: &[f64]) -> Result<Vector> {
        let parts = self
            .factors
            .as_ref()
            .ok_or_else(|| CurvatureError::InvalidInput("algebra has no factor split".into()))?;
        let part = parts
            .get(k)
            .ok_or_else(|| CurvatureError::InvalidInput(format!("no factor {k}")))?;
        if coords.len() != part.len() {
            return Err(CurvatureError::DimensionMismatch {
                expected: part.len(),
                found: coords.len(),
            });
        }
        let mut out = Vector::zeros(self.dim);
        for (&i, &c) in part.iter().zip(coords) {
            out[i] = c;
        }
        Ok(out)
    }

    /// Whether `X` has nonzero projections onto both factors.
    pub fn is_regular(&self, x: &Vector) -> Result<bool> {
        match self.regular_complement(x) {
            Ok(_) => Ok(true),
            Err(CurvatureError::SingularVector { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    }

    /// The canonical complement `Ā = (|A₂|/|A₁| A₁, −|A₁|/|A₂| A₂)` of a regular
    /// `A = (A₁, A₂)`: it commutes with `A`, is orthogonal to it and has the same norm.
    pub fn regular_complement(&self, a: &Vector) -> Result<Vector> {
        let a1 = self.factor_projection(0, a)?;
        let a2 = self.factor_projection(1, a)?;
        let (n1, n2) = (a1.norm(), a2.norm());
        let scale = a.norm();
        if !(n1 > REGULARITY_TOL * scale) {
            return Err(CurvatureError::SingularVector { factor: 0 });
        }
        if !(n2 > REGULARITY_TOL * scale) {
            return Err(CurvatureError::SingularVector { factor: 1 });
        }
        Ok(a1 * (n2 / n1) - a2 * (n1 / n2))
    }
}

fn so3_structure() -> Vec<f64> {
    let mut c = vec![0.0; 27];
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        c[(i * 3 + j) * 3 + k] = 1.0;
        c[(j * 3 + i) * 3 + k] = -1.0;
    }
    c
}

/// `so(3)` with `[e₁, e₂] = e₃` cyclically.
pub fn so3() -> LieAlgebra {
    LieAlgebra::from_structure(3, so3_structure(), None).expect("so(3) structure constants are valid")
}

/// `so(4) = 𝔤₁ ⊕ 𝔤₂` in the basis `(A₁, A₂, A₃, B₁, B₂, B₃)`.
pub fn so4() -> LieAlgebra {
    let small = so3_structure();
    let mut c = vec![0.0; 216];
    for offset in [0, 3] {
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    c[((i + offset) * 6 + j + offset) * 6 + k + offset] = small[(i * 3 + j) * 3 + k];
                }
            }
        }
    }
    LieAlgebra::from_structure(6, c, Some([vec![0, 1, 2], vec![3, 4, 5]])).expect("so(4) structure constants are valid")
}

/// A subalgebra `𝔥 ⊂ 𝔤` given by an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subalgebra {
    basis: Vec<Vector>,
}

impl Subalgebra {
    /// Validates orthonormality (1e-12) and bracket closure (1e-10).
    pub fn new(g: &LieAlgebra, basis: Vec<Vector>) -> Result<Self> {
        for v in &basis {
            g.check_dim(v)?;
        }
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                if (u.dot(v) - target).abs() > STRUCTURE_TOL {
                    return Err(CurvatureError::InvalidInput(
                        "subalgebra basis is not orthonormal".into(),
                    ));
                }
            }
        }
        let sub = Self { basis };
        for u in &sub.basis {
            for v in &sub.basis {
                let z = g.bracket_vec(u, v);
                let off = &z - sub.project_onto(&z);
                if off.norm() > CLOSURE_TOL {
                    return Err(CurvatureError::InvalidInput(
                        "subspace is not closed under bracket".into(),
                    ));
                }
            }
        }
        Ok(sub)
    }

    /// Factor `k` of a split algebra.
    pub fn factor(g: &LieAlgebra, k: usize) -> Result<Self> {
        let parts = g
            .factors()
            .ok_or_else(|| CurvatureError::InvalidInput("algebra has no factor split".into()))?;
        let part = parts
            .get(k)
            .ok_or_else(|| CurvatureError::InvalidInput(format!("no factor {k}")))?;
        Self::new(g, part.iter().map(|&i| g.basis_vector(i)).collect())
    }

    /// The diagonal `so(3) = {(v, v)}` inside `so(4)`.
    pub fn diagonal(g: &LieAlgebra) -> Result<Self> {
        let parts = g
            .factors()
            .ok_or_else(|| CurvatureError::InvalidInput("algebra has no factor split".into()))?;
        if parts[0].len() != parts[1].len() {
            return Err(CurvatureError::InvalidInput("factors have different dimensions".into()));
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let basis = parts[0]
            .iter()
            .zip(&parts[1])
            .map(|(&i, &j)| {
                let mut v = g.zero();
                v[i] = s;
                v[j] = s;
                v
            })
            .collect();
        Self::new(g, basis)
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    fn project_onto(&self, x: &Vector) -> Vector {
        let mut out = Vector::zeros(x.len());
        for b in &self.basis {
            out += b * b.dot(x);
        }
        out
    }

    /// Matrix of the orthogonal projection onto `𝔥`.
    pub fn projector(&self, dim: usize) -> DMatrix<f64> {
        let mut p = DMatrix::zeros(dim, dim);
        for b in &self.basis {
            p += b * b.transpose();
        }
        p
    }
}

/// Splits `X = X^𝔥 + X^⊥` into its components along and orthogonal to `𝔥`.
pub fn project(g: &LieAlgebra, x: &Vector, h: &Subalgebra) -> Result<(Vector, Vector)> {
    g.check_dim(x)?;
    let along = h.project_onto(x);
    let perp = x - &along;
    Ok((along, perp))
}
