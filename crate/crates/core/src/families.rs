//! The known nonnegatively curved left-invariant metrics on `SO(4)` and their
//! infinitesimal (variation) versions.
//!
//! All three families are Cheeger deformations of a product metric:
//!
//! 1. product metrics `Φ = Φ₁ ⊕ Φ₂`,
//! 2. torus-action metrics, Berger-type on each factor and arbitrary on
//!    `τ = span{A, B}` up to the `4/3` bound,
//! 3. `S³`-action metrics, block diagonal over `Vᵢ = span{Aᵢ, Bᵢ}`.
//!
//! Each generated `Φ` leaves three mutually orthogonal abelian planes invariant;
//! generators return those planes alongside the maps so that the property can
//! be checked directly.

use nalgebra::{DMatrix, Matrix2, Matrix3};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CurvatureError, Result};
use crate::lie::{so4, LieAlgebra, Vector};
use crate::metric::SelfAdjointMap;
use crate::rng::unit_vector;

/// Slack admitted on parameter-domain inequalities.
pub const DOMAIN_MARGIN: f64 = 1e-12;

/// Berger threshold: Hopf circles can be enlarged by at most this factor.
pub const BERGER_LIMIT: f64 = 4.0 / 3.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductParams {
    pub phi1: SelfAdjointMap,
    pub phi2: SelfAdjointMap,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusParams {
    pub c: f64,
    pub d: f64,
    /// Metric on `τ = span{A, B}` in the basis `(A, B)`.
    pub tau: [[f64; 2]; 2],
}

/// Parameters `(a, b, λ₁, λ₂, λ₃)` of the `S³`-action family. An infinite `λᵢ`
/// is allowed and gives `tᵢ = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct S3ActionParams {
    pub a: f64,
    pub b: f64,
    pub lambda: [f64; 3],
}

impl S3ActionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.a > 0.0 && self.b > 0.0 && self.a.is_finite() && self.b.is_finite()) {
            return Err(CurvatureError::FamilyConstraintViolated(format!(
                "a and b must be positive, got a = {}, b = {}",
                self.a, self.b
            )));
        }
        if self.lambda.iter().any(|&l| !(l > 0.0)) {
            return Err(CurvatureError::FamilyConstraintViolated(format!(
                "lambda must be positive, got {:?}",
                self.lambda
            )));
        }
        Ok(())
    }

    /// `tᵢ = λᵢ / (1 + λᵢ)`.
    pub fn t(&self) -> [f64; 3] {
        self.lambda.map(|l| 1.0 / (1.0 + 1.0 / l))
    }
}

/// A 2-dimensional abelian subalgebra `span{x, y}` with orthonormal `x, y`.
#[derive(Debug, Clone, PartialEq)]
pub struct AbelianPlane {
    pub x: Vector,
    pub y: Vector,
}

impl AbelianPlane {
    pub fn projector(&self) -> DMatrix<f64> {
        &self.x * self.x.transpose() + &self.y * self.y.transpose()
    }

    /// `|[x, y]|`.
    pub fn bracket_residual(&self, g: &LieAlgebra) -> f64 {
        g.bracket_vec(&self.x, &self.y).amax()
    }

    /// `‖(I − P) M P‖_max`: zero iff the plane is `M`-invariant.
    pub fn invariance_residual(&self, m: &SelfAdjointMap) -> f64 {
        let p = self.projector();
        let n = p.nrows();
        ((DMatrix::identity(n, n) - &p) * m.matrix() * &p).amax()
    }

    pub fn rotated(&self, rot: &DMatrix<f64>) -> Self {
        Self {
            x: rot * &self.x,
            y: rot * &self.y,
        }
    }
}

/// Largest residual over: bracket of each plane, mutual orthogonality, and
/// `M`-invariance. Zero for a decomposition into invariant abelian planes.
pub fn decomposition_residual(g: &LieAlgebra, m: &SelfAdjointMap, planes: &[AbelianPlane]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, p) in planes.iter().enumerate() {
        worst = worst.max(p.bracket_residual(g)).max(p.invariance_residual(m));
        worst = worst
            .max((p.x.norm() - 1.0).abs())
            .max((p.y.norm() - 1.0).abs())
            .max(p.x.dot(&p.y).abs());
        for q in &planes[i + 1..] {
            for (u, v) in [(&p.x, &q.x), (&p.x, &q.y), (&p.y, &q.x), (&p.y, &q.y)] {
                worst = worst.max(u.dot(v).abs());
            }
        }
    }
    worst
}

fn so4_vec(first: &[f64], second: &[f64]) -> Vector {
    let mut v = Vector::zeros(6);
    v.as_mut_slice()[..3].copy_from_slice(first);
    v.as_mut_slice()[3..].copy_from_slice(second);
    v
}

fn unit(i: usize) -> Vector {
    let mut v = Vector::zeros(6);
    v[i] = 1.0;
    v
}

/// Block-diagonal `Φ = Φ₁ ⊕ Φ₂` on `so(4)`.
pub fn product_phi(p: &ProductParams) -> Result<SelfAdjointMap> {
    for block in [&p.phi1, &p.phi2] {
        if block.dim() != 3 {
            return Err(CurvatureError::DimensionMismatch {
                expected: 3,
                found: block.dim(),
            });
        }
        block.check_positive_definite()?;
    }
    SelfAdjointMap::new(block_diag(p.phi1.matrix(), p.phi2.matrix()))
}

fn block_diag(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (n, m) = (a.nrows(), b.nrows());
    let mut out = DMatrix::zeros(n + m, n + m);
    out.view_mut((0, 0), (n, n)).copy_from(a);
    out.view_mut((n, n), (m, m)).copy_from(b);
    out
}

/// Invariant abelian planes of a product map: eigenvectors of the two blocks paired up.
pub fn product_planes(p: &ProductParams) -> Vec<AbelianPlane> {
    let (_, v1) = p.phi1.eigen();
    let (_, v2) = p.phi2.eigen();
    (0..3)
        .map(|i| AbelianPlane {
            x: so4_vec(v1.column(i).as_slice(), &[0.0; 3]),
            y: so4_vec(&[0.0; 3], v2.column(i).as_slice()),
        })
        .collect()
}

/// Eigenvalues `a λᵢ / (1 + λᵢ)` of the left-invariant metric on `S³` obtained
/// as the quotient `((S³, a·g₀) × (S³, g_R)) / S³`.
pub fn s3_quotient_eigenvalues(a: f64, lambda: [f64; 3]) -> [f64; 3] {
    lambda.map(|l| a * l / (1.0 + l))
}

/// Eigenvalues `λᵢ / (t + λᵢ(1 − αt))` along the inverse-linear path with
/// `Ψ = diag(α − 1/λᵢ)` on `so(3)`.
pub fn inverse_linear_eigs_s3(alpha: f64, lambda: [f64; 3], t: f64) -> Result<[f64; 3]> {
    let mut out = [0.0; 3];
    for (o, &l) in out.iter_mut().zip(&lambda) {
        let denom = t + l * (1.0 - alpha * t);
        if !(denom > 0.0) {
            return Err(CurvatureError::HorizonExceeded {
                t,
                t_min: f64::NEG_INFINITY,
                t_max: t,
            });
        }
        *o = l / denom;
    }
    Ok(out)
}

/// Eigenvalues `λᵢ / ((t + λᵢ)(1 − αt))` of the (non inverse-linear) family `g_t`.
pub fn cheeger_eigs_s3(alpha: f64, lambda: [f64; 3], t: f64) -> [f64; 3] {
    lambda.map(|l| l / ((t + l) * (1.0 - alpha * t)))
}

/// `Ψ = diag(α − 1/λᵢ)` on `so(3)`.
pub fn s3_quotient_psi(alpha: f64, lambda: [f64; 3]) -> SelfAdjointMap {
    SelfAdjointMap::diagonal(&lambda.map(|l| alpha - 1.0 / l))
}

impl TorusParams {
    /// Checks `c, d > 0`, `τ ≻ 0` and `τ ≼ (4/3)·diag(c, d)` as quadratic forms.
    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.d > 0.0) {
            return Err(CurvatureError::FamilyConstraintViolated(format!(
                "c and d must be positive, got c = {}, d = {}",
                self.c, self.d
            )));
        }
        let t = self.tau_matrix();
        if (t[(0, 1)] - self.tau[1][0]).abs() > DOMAIN_MARGIN * t.amax().max(1.0) {
            return Err(CurvatureError::FamilyConstraintViolated(
                "tau block is not symmetric".into(),
            ));
        }
        let eig = t.symmetric_eigenvalues();
        if !(eig.min() > 0.0) {
            return Err(CurvatureError::FamilyConstraintViolated(
                "tau block is not positive definite".into(),
            ));
        }
        // D^{-1/2} τ D^{-1/2} ≼ I with D = (4/3) diag(c, d)
        let s = Matrix2::new(
            1.0 / (BERGER_LIMIT * self.c).sqrt(),
            0.0,
            0.0,
            1.0 / (BERGER_LIMIT * self.d).sqrt(),
        );
        let rel = (s * t * s).symmetric_eigenvalues().max();
        if rel > 1.0 + DOMAIN_MARGIN {
            return Err(CurvatureError::FamilyConstraintViolated(format!(
                "tau block exceeds (4/3)·diag(c, d) (relative eigenvalue {rel})"
            )));
        }
        Ok(())
    }

    fn tau_matrix(&self) -> Matrix2<f64> {
        let off = 0.5 * (self.tau[0][1] + self.tau[1][0]);
        Matrix2::new(self.tau[0][0], off, off, self.tau[1][1])
    }
}

/// Orthonormal completion `(u, v, w)` of a unit vector `u ∈ R³` with `u × v = w`.
fn complete_frame(u: &[f64; 3]) -> Matrix3<f64> {
    let u = nalgebra::Vector3::from_column_slice(u).normalize();
    let pick = if u.x.abs() < 0.9 {
        nalgebra::Vector3::x()
    } else {
        nalgebra::Vector3::y()
    };
    let v = (pick - u * u.dot(&pick)).normalize();
    let w = u.cross(&v);
    Matrix3::from_columns(&[u, v, w])
}

fn factor_coords(g: &LieAlgebra, x: &Vector, k: usize) -> Result<[f64; 3]> {
    let p = g.factor_projection(k, x)?;
    let off = (x - &p).norm();
    if off > 1e-12 || (p.norm() - 1.0).abs() > 1e-12 {
        return Err(CurvatureError::InvalidInput(format!(
            "expected a unit vector in factor {}",
            k + 1
        )));
    }
    let range = if k == 0 { 0..3 } else { 3..6 };
    let s = &x.as_slice()[range];
    Ok([s[0], s[1], s[2]])
}

/// Torus-action metric: `c` on `𝔤₁ ⊖ A`, `d` on `𝔤₂ ⊖ B`, `τ` on `span{A, B}`.
pub fn torus_phi(p: &TorusParams, a: &Vector, b: &Vector) -> Result<SelfAdjointMap> {
    p.validate()?;
    let g = so4();
    let a3 = factor_coords(&g, a, 0)?;
    let b3 = factor_coords(&g, b, 1)?;
    let t = p.tau_matrix();
    let ua = nalgebra::Vector3::from_column_slice(&a3);
    let ub = nalgebra::Vector3::from_column_slice(&b3);
    let block1 = (Matrix3::identity() - ua * ua.transpose()) * p.c + ua * ua.transpose() * t[(0, 0)];
    let block2 = (Matrix3::identity() - ub * ub.transpose()) * p.d + ub * ub.transpose() * t[(1, 1)];
    let mut m = DMatrix::zeros(6, 6);
    m.view_mut((0, 0), (3, 3)).copy_from(&block1);
    m.view_mut((3, 3), (3, 3)).copy_from(&block2);
    let coupling = ua * ub.transpose() * t[(0, 1)];
    m.view_mut((0, 3), (3, 3)).copy_from(&coupling);
    m.view_mut((3, 0), (3, 3)).copy_from(&coupling.transpose());
    SelfAdjointMap::new(m)
}

/// [`torus_phi`] with the default choice `A = A₁`, `B = B₁`.
pub fn torus_phi_default(p: &TorusParams) -> Result<SelfAdjointMap> {
    torus_phi(p, &unit(0), &unit(3))
}

/// The three invariant abelian planes of a torus metric: `τ` and two planes
/// pairing the complements of `A` and `B`.
pub fn torus_planes(a: &Vector, b: &Vector) -> Result<Vec<AbelianPlane>> {
    let g = so4();
    let fa = complete_frame(&factor_coords(&g, a, 0)?);
    let fb = complete_frame(&factor_coords(&g, b, 1)?);
    let col = |f: &Matrix3<f64>, i: usize| [f[(0, i)], f[(1, i)], f[(2, i)]];
    let mut planes = vec![AbelianPlane {
        x: a.clone(),
        y: b.clone(),
    }];
    for i in 1..3 {
        planes.push(AbelianPlane {
            x: so4_vec(&col(&fa, i), &[0.0; 3]),
            y: so4_vec(&[0.0; 3], &col(&fb, i)),
        });
    }
    Ok(planes)
}

/// Infinitesimal torus family in the basis `{A₁, A₂, A₃, B₁, B₂, B₃}`:
/// `c` on `A₁, A₂`, the block `(a₁, a₃; a₃, a₂)` on `(A₃, B₁)`, `d` on `B₂, B₃`.
pub fn torus_psi(c: f64, d: f64, a1: f64, a2: f64, a3: f64) -> SelfAdjointMap {
    let mut m = DMatrix::zeros(6, 6);
    m[(0, 0)] = c;
    m[(1, 1)] = c;
    m[(2, 2)] = a1;
    m[(2, 3)] = a3;
    m[(3, 2)] = a3;
    m[(3, 3)] = a2;
    m[(4, 4)] = d;
    m[(5, 5)] = d;
    SelfAdjointMap::new(m).expect("symmetric by construction")
}

/// Invariant abelian planes of [`torus_psi`]: `span{A₃,B₁}`, `span{A₁,B₂}`, `span{A₂,B₃}`.
pub fn torus_psi_planes() -> Vec<AbelianPlane> {
    [(2, 3), (0, 4), (1, 5)]
        .iter()
        .map(|&(i, j)| AbelianPlane { x: unit(i), y: unit(j) })
        .collect()
}

/// The 2×2 block of the `S³`-action metric on `Vᵢ = span{Aᵢ, Bᵢ}`:
/// `1/(a+b) · (a(b + a tᵢ), ab(tᵢ − 1); ab(tᵢ − 1), b(a + b tᵢ))`.
pub fn s3_action_block(a: f64, b: f64, ti: f64) -> Matrix2<f64> {
    let s = 1.0 / (a + b);
    Matrix2::new(
        s * a * (b + a * ti),
        s * a * b * (ti - 1.0),
        s * a * b * (ti - 1.0),
        s * b * (a + b * ti),
    )
}

fn from_v_blocks(blocks: &[Matrix2<f64>; 3]) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(6, 6);
    for (i, blk) in blocks.iter().enumerate() {
        let (ai, bi) = (i, i + 3);
        m[(ai, ai)] = blk[(0, 0)];
        m[(ai, bi)] = blk[(0, 1)];
        m[(bi, ai)] = blk[(1, 0)];
        m[(bi, bi)] = blk[(1, 1)];
    }
    m
}

/// Extracts the `Vᵢ` block `(Aᵢ, Bᵢ)` of a 6×6 map.
pub fn v_block(m: &SelfAdjointMap, i: usize) -> Matrix2<f64> {
    let x = m.matrix();
    Matrix2::new(x[(i, i)], x[(i, i + 3)], x[(i + 3, i)], x[(i + 3, i + 3)])
}

/// `S³`-action metric, block diagonal over `V₁, V₂, V₃`.
pub fn s3_action_phi(p: &S3ActionParams) -> Result<SelfAdjointMap> {
    p.validate()?;
    let t = p.t();
    let blocks = [0, 1, 2].map(|i| s3_action_block(p.a, p.b, t[i]));
    SelfAdjointMap::new(from_v_blocks(&blocks))
}

/// `Vᵢ = span{Aᵢ, Bᵢ}`.
pub fn s3_action_planes() -> Vec<AbelianPlane> {
    (0..3)
        .map(|i| AbelianPlane {
            x: unit(i),
            y: unit(i + 3),
        })
        .collect()
}

/// Infinitesimal `S³`-action family: blocks `diag(α, β) − 1/(2λᵢ)·(1, 1; 1, 1)`.
pub fn s3_action_psi(alpha: f64, beta: f64, lambda: [f64; 3]) -> Result<SelfAdjointMap> {
    if lambda.iter().any(|&l| !(l > 0.0)) {
        return Err(CurvatureError::FamilyConstraintViolated(format!(
            "lambda must be positive, got {lambda:?}"
        )));
    }
    let blocks = [0, 1, 2].map(|i| {
        let s = 1.0 / (2.0 * lambda[i]);
        Matrix2::new(alpha - s, -s, -s, beta - s)
    });
    SelfAdjointMap::new(from_v_blocks(&blocks))
}

/// Parameters `(ā, b̄, λ̄)` with `(I − tΨ)⁻¹ = s3_action_phi(ā, b̄, λ̄)` for
/// `Ψ = s3_action_psi(α, β, λ)`:
///
/// ```text
/// ā = 1/(1 − αt),  b̄ = 1/(1 − βt),
/// λ̄ᵢ = 2λᵢ (1 − αt)(1 − βt) / (t ((1 − αt) + (1 − βt)))
/// ```
///
/// At `t = 0` every `λ̄ᵢ` is infinite (`tᵢ = 1`, the identity map).
pub fn barred_params(alpha: f64, beta: f64, lambda: [f64; 3], t: f64) -> Result<S3ActionParams> {
    let p = 1.0 - alpha * t;
    let q = 1.0 - beta * t;
    if !(p > DOMAIN_MARGIN && q > DOMAIN_MARGIN) {
        return Err(CurvatureError::HorizonExceeded {
            t,
            t_min: f64::NEG_INFINITY,
            t_max: t,
        });
    }
    if lambda.iter().any(|&l| !(l > 0.0)) {
        return Err(CurvatureError::FamilyConstraintViolated(format!(
            "lambda must be positive, got {lambda:?}"
        )));
    }
    if t < 0.0 {
        return Err(CurvatureError::InvalidInput(format!("t must be nonnegative, got {t}")));
    }
    let factor = 2.0 * p * q / (p + q);
    let lambda_bar = lambda.map(|l| if t == 0.0 { f64::INFINITY } else { l * factor / t });
    Ok(S3ActionParams {
        a: 1.0 / p,
        b: 1.0 / q,
        lambda: lambda_bar,
    })
}

/// Automorphism `diag(R₁, R₂)` of `so(4)` for rotations `R₁, R₂ ∈ SO(3)`.
pub fn factor_rotation(r1: &Matrix3<f64>, r2: &Matrix3<f64>) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(6, 6);
    m.view_mut((0, 0), (3, 3)).copy_from(r1);
    m.view_mut((3, 3), (3, 3)).copy_from(r2);
    m
}

/// Uniformly random rotation in `SO(3)`.
pub fn random_rotation<R: Rng + ?Sized>(rng: &mut R) -> Matrix3<f64> {
    let u = unit_vector(rng, 3);
    let frame = complete_frame(&[u[0], u[1], u[2]]);
    let angle = rng.random_range(0.0..std::f64::consts::TAU);
    let (s, c) = angle.sin_cos();
    let spin = Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c);
    frame * spin
}

/// Eigenvalues `s·(r, 1, 1)` in random order with `r ∈ [0.4, 4/3]`: a
/// nonnegatively curved (Berger) metric on `S³`.
pub fn random_berger_lambda<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    let r = rng.random_range(0.4..BERGER_LIMIT);
    let s = rng.random_range(0.5..3.0);
    let mut l = [s * r, s, s];
    l.swap(0, rng.random_range(0..3));
    l
}

/// Family labels for randomized draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    Product,
    Torus,
    S3Action,
}

impl FamilyKind {
    pub const ALL: [FamilyKind; 3] = [FamilyKind::Product, FamilyKind::Torus, FamilyKind::S3Action];

    pub fn name(self) -> &'static str {
        match self {
            FamilyKind::Product => "product",
            FamilyKind::Torus => "torus",
            FamilyKind::S3Action => "s3-action",
        }
    }
}

/// A random inverse-linear path through one family, with its invariant planes.
///
/// The path `(I − tΨ)⁻¹` stays inside the family (hence nonnegatively curved)
/// for `t ∈ [0, t_cap]`.
#[derive(Debug, Clone)]
pub struct FamilyPath {
    pub kind: FamilyKind,
    pub psi: SelfAdjointMap,
    pub t_cap: f64,
    pub planes: Vec<AbelianPlane>,
}

/// Draws a random member of `kind`, conjugated by a random automorphism.
pub fn random_family_path<R: Rng + ?Sized>(kind: FamilyKind, rng: &mut R) -> FamilyPath {
    let rot = factor_rotation(&random_rotation(rng), &random_rotation(rng));
    let (psi, planes) = match kind {
        FamilyKind::Product => {
            let lam1 = random_berger_lambda(rng);
            let lam2 = random_berger_lambda(rng);
            let alpha1 = rng.random_range(-1.0..0.9);
            let alpha2 = rng.random_range(-1.0..0.9);
            let psi1 = s3_quotient_psi(alpha1, lam1);
            let psi2 = s3_quotient_psi(alpha2, lam2);
            let psi = SelfAdjointMap::new(block_diag(psi1.matrix(), psi2.matrix())).expect("symmetric");
            (psi, s3_action_planes())
        }
        FamilyKind::Torus => {
            let c = rng.random_range(0.5..2.0);
            let d = rng.random_range(0.5..2.0);
            let bound = Matrix2::new((BERGER_LIMIT * c).sqrt(), 0.0, 0.0, (BERGER_LIMIT * d).sqrt());
            let angle: f64 = rng.random_range(0.0..std::f64::consts::PI);
            let (s, co) = angle.sin_cos();
            let q = Matrix2::new(co, -s, s, co);
            let spec = Matrix2::new(rng.random_range(0.2..0.98), 0.0, 0.0, rng.random_range(0.2..0.98));
            let tau = bound * q * spec * q.transpose() * bound;
            // metric at t = 1 in the basis of the infinitesimal torus form (τ = span{A₃, B₁})
            let inv = tau.try_inverse().expect("tau is positive definite");
            let psi = torus_psi(
                1.0 - 1.0 / c,
                1.0 - 1.0 / d,
                1.0 - inv[(0, 0)],
                1.0 - inv[(1, 1)],
                -inv[(0, 1)],
            );
            (psi, torus_psi_planes())
        }
        FamilyKind::S3Action => {
            let alpha = rng.random_range(-1.0..0.9);
            let beta = rng.random_range(-1.0..0.9);
            let lambda = random_berger_lambda(rng);
            (
                s3_action_psi(alpha, beta, lambda).expect("positive lambda"),
                s3_action_planes(),
            )
        }
    };
    FamilyPath {
        kind,
        psi: psi.conjugate(&rot).expect("rotation preserves symmetry"),
        t_cap: 1.0,
        planes: planes.iter().map(|p| p.rotated(&rot)).collect(),
    }
}
