//! Block normal form of a self-adjoint `Ψ` on `so(4)` and the bracket values
//! `[α₁,α₂,α₃,β₁,β₂,β₃] = κ'''(0)` used to classify it.
//!
//! The ordered basis is `{A₁,B₁,A₂,B₂,A₃,B₃}` with `A_i ∈ 𝔤₁`, `B_i ∈ 𝔤₂`. The
//! normal form has three 2×2 diagonal blocks on `span{A_i,B_i}` and two extra
//! couplings, `λ = ⟨ΨA₂,A₃⟩` and `μ = ⟨ΨB₂,B₃⟩`.

use nalgebra::{DMatrix, Matrix2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{CurvatureError, Result};
use crate::lie::{so4, Vector};
use crate::metric::SelfAdjointMap;
use crate::rng::{stream, unit_vector, Domain};
use crate::variation::kappa_third_unchecked;

use super::infinitesimal::tangent;

/// Standard `so(4)` index of each position of the ordered basis `{A₁,B₁,A₂,B₂,A₃,B₃}`.
pub const TH2_ORDER: [usize; 6] = [0, 3, 1, 4, 2, 5];

/// Entries allowed to be nonzero in the ordered basis (upper triangle).
const ALLOWED: [(usize, usize); 11] = [
    (0, 0),
    (0, 1),
    (1, 1),
    (2, 2),
    (2, 3),
    (3, 3),
    (4, 4),
    (4, 5),
    (5, 5),
    (2, 4),
    (3, 5),
];

const PLANE_SAMPLES: usize = 512;
const PLANE_POLISH: usize = 64;
const PLANE_TOL: f64 = 1e-8;
const SINGULAR_TOL: f64 = 1e-10;

/// Parameters of the normal form.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Th2Params {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl Th2Params {
    /// Matrix in the ordered basis `{A₁,B₁,A₂,B₂,A₃,B₃}`.
    pub fn ordered_matrix(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(6, 6);
        let mut set = |i: usize, j: usize, v: f64| {
            m[(i, j)] = v;
            m[(j, i)] = v;
        };
        set(0, 0, self.a1);
        set(1, 1, self.a2);
        set(0, 1, self.a3);
        set(2, 2, self.b1);
        set(3, 3, self.b2);
        set(2, 3, self.b3);
        set(4, 4, self.c1);
        set(5, 5, self.c2);
        set(4, 5, self.c3);
        set(2, 4, self.lambda);
        set(3, 5, self.mu);
        m
    }

    /// `Ψ` in the standard basis of `so(4)`.
    pub fn to_psi(&self) -> SelfAdjointMap {
        let ordered = self.ordered_matrix();
        let mut m = DMatrix::zeros(6, 6);
        for i in 0..6 {
            for j in 0..6 {
                m[(TH2_ORDER[i], TH2_ORDER[j])] = ordered[(i, j)];
            }
        }
        SelfAdjointMap::new(m).expect("symmetric by construction")
    }

    fn from_ordered(m: &DMatrix<f64>) -> Self {
        Self {
            a1: m[(0, 0)],
            a2: m[(1, 1)],
            a3: m[(0, 1)],
            b1: m[(2, 2)],
            b2: m[(3, 3)],
            b3: m[(2, 3)],
            c1: m[(4, 4)],
            c2: m[(5, 5)],
            c3: m[(4, 5)],
            lambda: m[(2, 4)],
            mu: m[(3, 5)],
        }
    }
}

/// Adapted bases and the matrix of `Ψ` in them.
#[derive(Debug, Clone, PartialEq)]
pub struct Th2Basis {
    /// `A₁, A₂, A₃` as vectors of `so(4)`.
    pub a_basis: [Vector; 3],
    /// `B₁, B₂, B₃` as vectors of `so(4)`.
    pub b_basis: [Vector; 3],
    /// `Ψ` in the ordered basis `{A₁,B₁,A₂,B₂,A₃,B₃}`.
    pub transformed: DMatrix<f64>,
    pub lambda_coupling: f64,
    pub mu_coupling: f64,
    pub params: Th2Params,
    /// Invariance residual of the plane `span{A₁,B₁}`.
    pub plane_residual: f64,
    /// Largest entry outside the allowed pattern.
    pub off_pattern_residual: f64,
    /// `|F(A₂)|` where `F(A) = ⟨T₁A, T₁RA⟩`.
    pub f_residual: f64,
    /// Whether `T₁` was treated as singular.
    pub singular_branch: bool,
}

/// Largest absolute entry of an ordered-basis matrix outside the normal-form pattern.
pub fn off_pattern_residual(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..6 {
        for j in i..6 {
            if !ALLOWED.contains(&(i, j)) {
                worst = worst.max(m[(i, j)].abs());
            }
        }
    }
    worst
}

fn embed(a: &Vector3<f64>, factor: usize) -> Vector {
    let mut v = Vector::zeros(6);
    for i in 0..3 {
        v[3 * factor + i] = a[i];
    }
    v
}

fn to3(v: &Vector) -> Vector3<f64> {
    Vector3::new(v[0], v[1], v[2])
}

/// Components of `(I − P)Ψa` and `(I − P)Ψb` for the plane `span{(A,0),(0,B)}`.
fn plane_residual_vec(psi: &DMatrix<f64>, a: &Vector3<f64>, b: &Vector3<f64>) -> [f64; 12] {
    let (a, b) = (embed(&a.normalize(), 0), embed(&b.normalize(), 1));
    let mut out = [0.0; 12];
    for (k, v) in [&a, &b].into_iter().enumerate() {
        let w = psi * v;
        let r = &w - &a * a.dot(&w) - &b * b.dot(&w);
        out[6 * k..6 * k + 6].copy_from_slice(r.as_slice());
    }
    out
}

fn norm12(r: &[f64; 12]) -> f64 {
    r.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Levenberg–Marquardt on the 4-dimensional chart of `S² × S²`.
fn polish(
    psi: &DMatrix<f64>,
    mut a: Vector3<f64>,
    mut b: Vector3<f64>,
    scale: f64,
) -> (f64, Vector3<f64>, Vector3<f64>) {
    const EPS: f64 = 1e-7;
    let mut r = plane_residual_vec(psi, &a, &b);
    let mut f = norm12(&r);
    let mut damping = 1e-3;
    for _ in 0..200 {
        if f < 1e-15 * scale || damping > 1e12 {
            break;
        }
        let ta = tangent(&Vector::from_column_slice(a.as_slice()));
        let tb = tangent(&Vector::from_column_slice(b.as_slice()));
        let dirs = [to3(&ta[0]), to3(&ta[1]), to3(&tb[0]), to3(&tb[1])];
        let shifted = |k: usize, s: f64| {
            if k < 2 {
                ((a + dirs[k] * s).normalize(), b)
            } else {
                (a, (b + dirs[k] * s).normalize())
            }
        };
        let mut jac = nalgebra::SMatrix::<f64, 12, 4>::zeros();
        for k in 0..4 {
            let (ap, bp) = shifted(k, EPS);
            let (am, bm) = shifted(k, -EPS);
            let rp = plane_residual_vec(psi, &ap, &bp);
            let rm = plane_residual_vec(psi, &am, &bm);
            for i in 0..12 {
                jac[(i, k)] = (rp[i] - rm[i]) / (2.0 * EPS);
            }
        }
        let rv = nalgebra::SVector::<f64, 12>::from_column_slice(&r);
        let jtj = jac.transpose() * jac;
        let jtr = jac.transpose() * rv;
        let mut improved = false;
        while damping <= 1e12 {
            let lhs = jtj + nalgebra::Matrix4::identity() * (damping * (1.0 + jtj.diagonal().max()));
            let Some(step) = lhs.lu().solve(&(-jtr)) else {
                damping *= 4.0;
                continue;
            };
            let na = (a + dirs[0] * step[0] + dirs[1] * step[1]).normalize();
            let nb = (b + dirs[2] * step[2] + dirs[3] * step[3]).normalize();
            let nr = plane_residual_vec(psi, &na, &nb);
            let nf = norm12(&nr);
            if nf < f {
                a = na;
                b = nb;
                r = nr;
                f = nf;
                damping = (damping / 3.0).max(1e-15);
                improved = true;
                break;
            }
            damping *= 4.0;
        }
        if !improved {
            break;
        }
    }
    (f, a, b)
}

/// Multistart search for a `Ψ`-invariant plane `span{(A,0),(0,B)}`.
fn find_invariant_plane(psi: &DMatrix<f64>, scale: f64) -> Result<(f64, Vector3<f64>, Vector3<f64>)> {
    let mut coarse: Vec<(f64, usize, Vector3<f64>, Vector3<f64>)> = (0..PLANE_SAMPLES)
        .map(|i| {
            let mut rng = stream(0, Domain::NormalForm, i as u64);
            let a = to3(&unit_vector(&mut rng, 3));
            let b = to3(&unit_vector(&mut rng, 3));
            (norm12(&plane_residual_vec(psi, &a, &b)), i, a, b)
        })
        .collect();
    coarse.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let mut best = f64::INFINITY;
    for (_, _, a, b) in coarse.into_iter().take(PLANE_POLISH) {
        let (f, a, b) = polish(psi, a, b, scale);
        if f <= PLANE_TOL * scale {
            return Ok((f, a.normalize(), b.normalize()));
        }
        best = best.min(f);
    }
    Err(CurvatureError::NormalFormUnavailable(format!(
        "no invariant abelian plane found (best residual {best:.3e})"
    )))
}

/// Computes adapted bases in which `Ψ` takes the block normal form.
///
/// A `Ψ`-invariant plane `span{A₁,B₁}` is located by search. On the
/// orthogonal complements `V₁ ⊂ 𝔤₁`, `V₂ ⊂ 𝔤₂` the coupling `T₁ = π₂Ψ|V₁`
/// decides the rest: for invertible `T₁`, `A₂` is a root of
/// `F(A) = ⟨T₁A, T₁RA⟩` (with `R` the quarter turn of `V₁`) found by
/// bisection, and `B₂, B₃` are the normalised images of `A₂, A₃ = RA₂`. For
/// singular `T₁`, `A₂` spans its kernel and `B₂` the kernel of `T₁ᵀ`.
pub fn th2_normal_form(psi: &SelfAdjointMap) -> Result<Th2Basis> {
    let g = so4();
    if psi.dim() != g.dim() {
        return Err(CurvatureError::DimensionMismatch {
            expected: g.dim(),
            found: psi.dim(),
        });
    }
    let m = psi.matrix();
    let scale = psi.spectral_norm();
    let (plane_residual, a1, b1) = if scale == 0.0 {
        (0.0, Vector3::x(), Vector3::x())
    } else {
        find_invariant_plane(m, scale)?
    };
    let frame = |u: &Vector3<f64>| {
        let t = tangent(&Vector::from_column_slice(u.as_slice()));
        let p = to3(&t[0]);
        (p, u.cross(&p))
    };
    let (p1, p2) = frame(&a1);
    let (q1, q2) = frame(&b1);
    let (ep, eq) = ([embed(&p1, 0), embed(&p2, 0)], [embed(&q1, 1), embed(&q2, 1)]);
    let t1 = Matrix2::from_fn(|r, c| eq[r].dot(&(m * &ep[c])));
    let sv = t1.svd(true, true);
    let (u, vt) = (sv.u.expect("requested"), sv.v_t.expect("requested"));
    let (smax, smin, imin) = if sv.singular_values[0] >= sv.singular_values[1] {
        (sv.singular_values[0], sv.singular_values[1], 1)
    } else {
        (sv.singular_values[1], sv.singular_values[0], 0)
    };
    let quarter = |v: &Vector3<f64>, axis: &Vector3<f64>| axis.cross(v);
    let singular = smin <= SINGULAR_TOL * scale.max(f64::MIN_POSITIVE);
    let (a2, b2, f_residual) = if singular {
        if smax <= SINGULAR_TOL * scale.max(f64::MIN_POSITIVE) {
            (p1, q1, 0.0)
        } else {
            let k = vt.row(imin);
            let l = u.column(imin);
            (p1 * k[0] + p2 * k[1], q1 * l[0] + q2 * l[1], 0.0)
        }
    } else {
        let a_of = |theta: f64| p1 * theta.cos() + p2 * theta.sin();
        let image = |a: &Vector3<f64>| {
            let c = nalgebra::Vector2::new(a.dot(&p1), a.dot(&p2));
            t1 * c
        };
        let f = |theta: f64| image(&a_of(theta)).dot(&image(&quarter(&a_of(theta), &a1)));
        let (mut lo, mut hi) = (0.0f64, std::f64::consts::FRAC_PI_2);
        let (mut flo, fhi) = (f(lo), f(hi));
        let theta = if flo == 0.0 {
            lo
        } else if fhi == 0.0 {
            hi
        } else {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                let fm = f(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (fm > 0.0) == (flo > 0.0) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            if f(lo).abs() <= f(hi).abs() {
                lo
            } else {
                hi
            }
        };
        let a2 = a_of(theta);
        let img = image(&a2);
        let b2 = (q1 * img[0] + q2 * img[1]).normalize();
        (a2, b2, f(theta).abs())
    };
    let a3 = quarter(&a2, &a1);
    let b3 = if singular {
        quarter(&b2, &b1)
    } else {
        let img = {
            let c = nalgebra::Vector2::new(a3.dot(&p1), a3.dot(&p2));
            t1 * c
        };
        (q1 * img[0] + q2 * img[1]).normalize()
    };
    let a_basis = [embed(&a1, 0), embed(&a2, 0), embed(&a3, 0)];
    let b_basis = [embed(&b1, 1), embed(&b2, 1), embed(&b3, 1)];
    let ordered = [
        &a_basis[0],
        &b_basis[0],
        &a_basis[1],
        &b_basis[1],
        &a_basis[2],
        &b_basis[2],
    ];
    let change = DMatrix::from_fn(6, 6, |r, c| ordered[c][r]);
    let transformed = change.transpose() * m * &change;
    let params = Th2Params::from_ordered(&transformed);
    Ok(Th2Basis {
        off_pattern_residual: off_pattern_residual(&transformed),
        lambda_coupling: params.lambda,
        mu_coupling: params.mu,
        params,
        transformed,
        a_basis,
        b_basis,
        plane_residual,
        f_residual,
        singular_branch: singular,
    })
}

/// `[α₁,α₂,α₃,β₁,β₂,β₃]`: `κ'''(0)` for `X = Σα_iA_i`, `Y = Σβ_iB_i` in the
/// normal form with the given parameters.
pub fn th1_bracket(params: &Th2Params, alpha: [f64; 3], beta: [f64; 3]) -> f64 {
    let g = so4();
    let psi = params.to_psi();
    let mut x = Vector::zeros(6);
    let mut y = Vector::zeros(6);
    for i in 0..3 {
        x[i] = alpha[i];
        y[3 + i] = beta[i];
    }
    kappa_third_unchecked(&g, &psi, &x, &y)
}

/// One bracket identity `lhs = K·rhs`, with its worst residual over the draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityRow {
    pub name: String,
    /// Worst `|lhs − K·rhs| / max(1, |lhs|)`.
    pub max_residual: f64,
    pub draws: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentitySuite {
    /// Proportionality constant, fitted once on the first identity.
    pub constant: f64,
    pub rows: Vec<IdentityRow>,
}

impl IdentitySuite {
    pub fn max_residual(&self) -> f64 {
        self.rows.iter().map(|r| r.max_residual).fold(0.0, f64::max)
    }
}

type Bracket = ([f64; 3], [f64; 3]);

struct Identity {
    name: &'static str,
    /// Constraint imposed on the draw before evaluating.
    constrain: fn(&mut Th2Params),
    terms: &'static [Bracket],
    rhs: fn(&Th2Params) -> f64,
}

fn no_constraint(_: &mut Th2Params) {}

fn reduced(p: &mut Th2Params) {
    p.b1 = p.a1;
    p.c1 = p.a1;
    p.b2 = p.a2;
    p.c2 = p.a2;
    p.lambda = 0.0;
    p.mu = 0.0;
}

const IDENTITIES: &[Identity] = &[
    Identity {
        name: "[0,1,1,1,0,0] = c3^2(a2-b2) + 4a3^2 lambda",
        constrain: no_constraint,
        terms: &[([0.0, 1.0, 1.0], [1.0, 0.0, 0.0])],
        rhs: |p| p.c3 * p.c3 * (p.a2 - p.b2) + 4.0 * p.a3 * p.a3 * p.lambda,
    },
    Identity {
        name: "[0,-1,1,1,0,0] = c3^2(a2-b2) - 4a3^2 lambda",
        constrain: no_constraint,
        terms: &[([0.0, -1.0, 1.0], [1.0, 0.0, 0.0])],
        rhs: |p| p.c3 * p.c3 * (p.a2 - p.b2) - 4.0 * p.a3 * p.a3 * p.lambda,
    },
    Identity {
        name: "[0,0,1,0,1,0] + [0,0,1,0,0,1] = c3^2(b2-a2)",
        constrain: no_constraint,
        terms: &[([0.0, 0.0, 1.0], [0.0, 1.0, 0.0]), ([0.0, 0.0, 1.0], [0.0, 0.0, 1.0])],
        rhs: |p| p.c3 * p.c3 * (p.b2 - p.a2),
    },
    Identity {
        name: "[1,0,0,0,1,1] = c3^2(a1-b1) + 4a3^2 mu",
        constrain: no_constraint,
        terms: &[([1.0, 0.0, 0.0], [0.0, 1.0, 1.0])],
        rhs: |p| p.c3 * p.c3 * (p.a1 - p.b1) + 4.0 * p.a3 * p.a3 * p.mu,
    },
    Identity {
        name: "[1,0,0,0,-1,1] = c3^2(a1-b1) - 4a3^2 mu",
        constrain: no_constraint,
        terms: &[([1.0, 0.0, 0.0], [0.0, -1.0, 1.0])],
        rhs: |p| p.c3 * p.c3 * (p.a1 - p.b1) - 4.0 * p.a3 * p.a3 * p.mu,
    },
    Identity {
        name: "[1,0,0,0,1,0] + [1,0,0,0,0,1] = c3^2(a1-b1)",
        constrain: no_constraint,
        terms: &[([1.0, 0.0, 0.0], [0.0, 1.0, 0.0]), ([1.0, 0.0, 0.0], [0.0, 0.0, 1.0])],
        rhs: |p| p.c3 * p.c3 * (p.a1 - p.b1),
    },
    Identity {
        name: "[0,1,0,1,0,0] = a3^2(b1-c1)",
        constrain: no_constraint,
        terms: &[([0.0, 1.0, 0.0], [1.0, 0.0, 0.0])],
        rhs: |p| p.a3 * p.a3 * (p.b1 - p.c1),
    },
    Identity {
        name: "[0,0,1,1,0,0] = -a3^2(b1-c1) | a2=b2",
        constrain: |p| p.b2 = p.a2,
        terms: &[([0.0, 0.0, 1.0], [1.0, 0.0, 0.0])],
        rhs: |p| -p.a3 * p.a3 * (p.b1 - p.c1),
    },
    Identity {
        name: "[1,0,0,0,1,0] = a3^2(b2-c2)",
        constrain: no_constraint,
        terms: &[([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])],
        rhs: |p| p.a3 * p.a3 * (p.b2 - p.c2),
    },
    Identity {
        name: "[1,0,0,0,0,1] = -a3^2(b2-c2) | a1=b1",
        constrain: |p| p.b1 = p.a1,
        terms: &[([1.0, 0.0, 0.0], [0.0, 0.0, 1.0])],
        rhs: |p| -p.a3 * p.a3 * (p.b2 - p.c2),
    },
    Identity {
        name: "[1,1,1,1,1,1] + [1,1,1,1,1,-1] = 2a3^2 c3 | reduced",
        constrain: reduced,
        terms: &[([1.0, 1.0, 1.0], [1.0, 1.0, 1.0]), ([1.0, 1.0, 1.0], [1.0, 1.0, -1.0])],
        rhs: |p| 2.0 * p.a3 * p.a3 * p.c3,
    },
    Identity {
        name: "[1,1,1,-1,1,1] + [1,1,1,1,-1,1] = -2a3^2 c3 | reduced",
        constrain: reduced,
        terms: &[([1.0, 1.0, 1.0], [-1.0, 1.0, 1.0]), ([1.0, 1.0, 1.0], [1.0, -1.0, 1.0])],
        rhs: |p| -2.0 * p.a3 * p.a3 * p.c3,
    },
];

/// Random normal-form parameters in `[-1, 1]` with `b₃ = 0`.
pub(crate) fn random_params(seed: u64, index: u64) -> Th2Params {
    use rand::Rng;
    let mut rng = stream(seed, Domain::Draws, index);
    let mut next = || rng.random_range(-1.0..1.0);
    Th2Params {
        a1: next(),
        a2: next(),
        a3: next(),
        b1: next(),
        b2: next(),
        b3: 0.0,
        c1: next(),
        c2: next(),
        c3: next(),
        lambda: next(),
        mu: next(),
    }
}

/// Checks the bracket identities as proportionalities `lhs = K·rhs` over
/// `draws` random parameter sets with `b₃ = 0`. `K` is fitted by least squares
/// on the first identity and then held fixed for all rows.
pub fn th1_identity_suite(draws: usize, seed: u64) -> IdentitySuite {
    let samples: Vec<Th2Params> = (0..draws as u64).map(|i| random_params(seed, i)).collect();
    let evaluate = |id: &Identity, base: &Th2Params| {
        let mut p = *base;
        (id.constrain)(&mut p);
        let lhs: f64 = id.terms.iter().map(|(a, b)| th1_bracket(&p, *a, *b)).sum();
        (lhs, (id.rhs)(&p))
    };
    let (num, den) = samples.iter().fold((0.0, 0.0), |(n, d), p| {
        let (l, r) = evaluate(&IDENTITIES[0], p);
        (n + l * r, d + r * r)
    });
    let constant = if den > 0.0 { num / den } else { 0.0 };
    let rows = IDENTITIES
        .iter()
        .map(|id| {
            let max_residual = samples
                .iter()
                .map(|p| {
                    let (l, r) = evaluate(id, p);
                    (l - constant * r).abs() / l.abs().max(1.0)
                })
                .fold(0.0, f64::max);
            IdentityRow {
                name: id.name.to_string(),
                max_residual,
                draws,
            }
        })
        .collect();
    IdentitySuite { constant, rows }
}
