//! Named reproduction suites. Each returns a residual table; the suite passes
//! when every row is within its tolerance.

use std::f64::consts::TAU;

use invariant_curvature::families::{barred_params, s3_action_phi, s3_action_psi, FamilyKind};
use invariant_curvature::lie::{project, so4, LieAlgebra, Subalgebra, Vector};
use invariant_curvature::metric::puttmann_curvature;
use invariant_curvature::rng::{gaussian_vector, stream, unit_vector, Domain};
use invariant_curvature::variation::{derivative_report, kappa_third_deriv, InverseLinearPath};
use invariant_curvature::verify::{infinitesimal_check, th1_identity_suite, Budget, CurvatureReport};
use invariant_curvature::SelfAdjointMap;
use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::report::ResidualRow;
use crate::run::family_paths;
use crate::Result;

pub struct Context {
    pub seed: u64,
    pub budget: Budget,
    pub tol: f64,
}

pub struct SuiteOutput {
    pub results: Vec<CurvatureReport>,
    pub residuals: Vec<ResidualRow>,
}

pub struct Suite {
    pub name: &'static str,
    pub description: &'static str,
    pub tolerance: &'static str,
    pub run: fn(&Context) -> Result<SuiteOutput>,
}

pub static SUITES: [Suite; 5] = [
    Suite {
        name: "lemma-2.2-fd",
        description: "k and κ along random inverse-linear paths: vanishing low derivatives at t = 0, \
                      closed-form k''(0) and κ'''(0) against Richardson finite differences (500 cases)",
        tolerance: "k'(0), κ(0..2): 1e-6·scale; k'': rel 1e-5; κ''': rel 1e-4",
        run: derivatives,
    },
    Suite {
        name: "example-2.3",
        description: "Ψ = ∓proj_h for h = first factor, diagonal and abelian subalgebras: κ'''(0) = 6|[X^h,Y^h]|², \
                      the zero-curvature criterion at t = 0.25, 0.5, and the infinitesimal minima",
        tolerance: "rel 1e-8 (κ'''), exact classification, rel 1e-6 (minimum)",
        run: projections,
    },
    Suite {
        name: "eq-yy",
        description: "(I − tΨ)⁻¹ for the S³-action variation equals the family metric at the barred parameters \
                      (200 draws)",
        tolerance: "max entry 1e-10",
        run: barred,
    },
    Suite {
        name: "th1-identities",
        description: "Bracket identities of the normal-form parameters, as proportionalities with one fitted \
                      constant (100 draws, b₃ = 0)",
        tolerance: "1e-10",
        run: identities,
    },
    Suite {
        name: "obs-3.2-paths",
        description: "Path scans over {0.1, …, 0.9} for 20 random members of each known family, with their \
                      invariant abelian planes",
        tolerance: "no negative witness; plane residual 1e-12",
        run: paths,
    },
];

pub fn find(name: &str) -> Option<&'static Suite> {
    SUITES.iter().find(|s| s.name == name)
}

const FD_CASES: usize = 500;
const PAIR_CASES: usize = 200;
const DRAWS_EQ: usize = 200;
const DRAWS_TH1: usize = 100;
const DRAWS_FAMILY: usize = 20;

fn rng_for(ctx: &Context, suite: u64, i: usize) -> ChaCha8Rng {
    stream(ctx.seed, Domain::Draws, (suite << 40) | i as u64)
}

fn random_symmetric(rng: &mut ChaCha8Rng, n: usize) -> SelfAdjointMap {
    let m = DMatrix::from_iterator(n, n, gaussian_vector(rng, n * n).iter().copied());
    SelfAdjointMap::new((&m + m.transpose()) * 0.5).expect("symmetric")
}

/// `X = cos s·(a,0) + sin s·(0,b)`, `Y = −sin u·(a,0) + cos u·(0,b)`, kept away from
/// parallel pairs.
fn random_commuting_pair(g: &LieAlgebra, rng: &mut ChaCha8Rng) -> (Vector, Vector) {
    let a = g.embed_factor(0, unit_vector(rng, 3).as_slice()).expect("so4");
    let b = g.embed_factor(1, unit_vector(rng, 3).as_slice()).expect("so4");
    loop {
        let s: f64 = rng.random_range(0.0..TAU);
        let u: f64 = rng.random_range(0.0..TAU);
        if (s - u).cos().abs() > 0.1 {
            return (&a * s.cos() + &b * s.sin(), &a * (-u.sin()) + &b * u.cos());
        }
    }
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn derivatives(ctx: &Context) -> Result<SuiteOutput> {
    let g = so4();
    let mut k1: f64 = 0.0;
    let mut k2_rel: f64 = 0.0;
    let mut k2_min = f64::INFINITY;
    let mut kappa_low: f64 = 0.0;
    let mut kappa3_rel: f64 = 0.0;
    for i in 0..FD_CASES {
        let mut rng = rng_for(ctx, 1, i);
        let psi = random_symmetric(&mut rng, 6);
        let (x, y) = random_commuting_pair(&g, &mut rng);
        let d = derivative_report(&g, &psi, &x, &y)?;
        let norm = psi.spectral_norm().max(1.0);
        let base = x.norm_squared() * y.norm_squared();
        let (scale2, scale3) = (norm * norm * base, norm.powi(3) * base);
        k1 = k1.max(d.fd_k1.abs() / scale2);
        k2_rel = k2_rel.max(rel_err(d.k2, d.fd_k2, scale2));
        k2_min = k2_min.min(d.k2);
        kappa_low = kappa_low.max(max_of([d.fd_kappa0, d.fd_kappa1, d.fd_kappa2].map(f64::abs)) / scale3);
        kappa3_rel = kappa3_rel.max(rel_err(d.kappa3, d.fd_kappa3, scale3));
    }
    Ok(SuiteOutput {
        results: Vec::new(),
        residuals: vec![
            ResidualRow::new("k'(0) by finite differences / scale", k1, 1e-6),
            ResidualRow::new("2k''(0) closed form vs finite differences (rel)", k2_rel, 1e-5),
            ResidualRow::new("negative part of k''(0)", (-k2_min).max(0.0), 0.0),
            ResidualRow::new("κ(0), κ'(0), κ''(0) by finite differences / scale", kappa_low, 1e-6),
            ResidualRow::new("κ'''(0) closed form vs finite differences (rel)", kappa3_rel, 1e-4),
        ],
    })
}

/// Relative error with the denominator floored at `1e-3·scale`, so that values
/// that vanish up to round-off are compared on the case's own scale.
fn rel_err(exact: f64, approx: f64, scale: f64) -> f64 {
    (exact - approx).abs() / exact.abs().max(1e-3 * scale)
}

fn proj_map(h: &Subalgebra, sign: f64) -> SelfAdjointMap {
    SelfAdjointMap::new(h.projector(6) * sign).expect("projector is symmetric")
}

fn h_bracket_sq(g: &LieAlgebra, h: &Subalgebra, x: &Vector, y: &Vector) -> Result<f64> {
    let (xh, _) = project(g, x, h)?;
    let (yh, _) = project(g, y, h)?;
    Ok(g.bracket(&xh, &yh)?.norm_squared())
}

/// Pairs for the zero-curvature criterion: generic commuting pairs, commuting
/// pairs `(a,0), (0,±a)` whose diagonal parts commute, and non-commuting pairs.
fn criterion_pairs(ctx: &Context, g: &LieAlgebra) -> Vec<(Vector, Vector)> {
    (0..PAIR_CASES)
        .map(|i| {
            let mut rng = rng_for(ctx, 3, i);
            match i % 10 {
                0..=3 => random_commuting_pair(g, &mut rng),
                4..=6 => {
                    let a = unit_vector(&mut rng, 3);
                    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                    let x = g.embed_factor(0, a.as_slice()).expect("so4");
                    let y = g.embed_factor(1, (&a * sign).as_slice()).expect("so4");
                    let s: f64 = rng.random_range(0.0..TAU);
                    (&x * s.cos() + &y * s.sin(), &x * (-s.sin()) + &y * s.cos())
                }
                _ => loop {
                    let x = gaussian_vector(&mut rng, 6);
                    let y = gaussian_vector(&mut rng, 6);
                    if g.bracket(&x, &y).expect("so4").norm() > 1e-2 * x.norm() * y.norm() {
                        break (x, y);
                    }
                },
            }
        })
        .collect()
}

fn projections(ctx: &Context) -> Result<SuiteOutput> {
    let g = so4();
    let first = Subalgebra::factor(&g, 0)?;
    let diagonal = Subalgebra::diagonal(&g)?;
    let mut rows = Vec::new();

    for (label, h) in [("first factor", &first), ("diagonal", &diagonal)] {
        let shrink = proj_map(h, -1.0);
        let mut worst: f64 = 0.0;
        for i in 0..PAIR_CASES {
            let (x, y) = random_commuting_pair(&g, &mut rng_for(ctx, 2, i));
            let expected = 6.0 * h_bracket_sq(&g, h, &x, &y)?;
            let got = kappa_third_deriv(&g, &shrink, &x, &y)?;
            worst = worst.max((got - expected).abs() / expected.max(x.norm_squared() * y.norm_squared()));
        }
        rows.push(ResidualRow::new(
            format!("κ'''(0) vs 6|[X^h,Y^h]|² for Ψ = -proj, h = {label} (rel)"),
            worst,
            1e-8,
        ));

        let path = InverseLinearPath::new(shrink);
        let pairs = criterion_pairs(ctx, &g);
        for t in [0.25, 0.5] {
            let metric = path.metric_at(&g, t)?;
            let inv = path.phi_inverse_at(t);
            let mut mismatches = 0usize;
            for (x, y) in &pairs {
                let scale = x.norm_squared() * y.norm_squared();
                let k = puttmann_curvature(&metric, &inv.apply(x), &inv.apply(y))?;
                let flat = k.abs() <= 1e-10 * scale;
                let predicted =
                    g.bracket(x, y)?.norm_squared() <= 1e-20 * scale && h_bracket_sq(&g, h, x, y)? <= 1e-20 * scale;
                if flat != predicted {
                    mismatches += 1;
                }
            }
            rows.push(ResidualRow::new(
                format!("zero-curvature criterion mismatches, h = {label}, t = {t}"),
                mismatches as f64,
                0.0,
            ));
        }
    }

    // orthonormal (a,0), (0,b): [X^h, Y^h] = (a×b, a×b)/4, so max |[X^h,Y^h]|² = 1/8
    let enlarge = infinitesimal_check(&g, &proj_map(&diagonal, 1.0), &ctx.budget, ctx.tol, ctx.seed)?;
    let expected = -6.0 / 8.0;
    rows.push(ResidualRow::new(
        "min κ'''(0) vs -6·max|[X^h,Y^h]|² for Ψ = +proj, h = diagonal (rel)",
        (enlarge.min_value - expected).abs() / expected.abs(),
        1e-6,
    ));
    let enlarge = infinitesimal_check(&g, &proj_map(&first, 1.0), &ctx.budget, ctx.tol, ctx.seed)?;
    rows.push(ResidualRow::new(
        "min κ'''(0) for Ψ = +proj, h = first factor",
        enlarge.min_value.abs(),
        1e-10,
    ));

    let a1 = g.basis_vector(0);
    let b1 = g.basis_vector(3);
    for (label, basis) in [("span{A1}", vec![a1.clone()]), ("span{A1,B1}", vec![a1, b1])] {
        let h = Subalgebra::new(&g, basis)?;
        let mut worst: f64 = 0.0;
        for sign in [1.0, -1.0] {
            let psi = proj_map(&h, sign);
            for i in 0..PAIR_CASES {
                let (x, y) = random_commuting_pair(&g, &mut rng_for(ctx, 4, i));
                worst = worst.max(kappa_third_deriv(&g, &psi, &x, &y)?.abs());
            }
        }
        rows.push(ResidualRow::new(
            format!("|κ'''(0)| for Ψ = ±proj, abelian h = {label}"),
            worst,
            1e-12,
        ));
    }

    Ok(SuiteOutput {
        results: Vec::new(),
        residuals: rows,
    })
}

fn barred(ctx: &Context) -> Result<SuiteOutput> {
    let mut worst: f64 = 0.0;
    for i in 0..DRAWS_EQ {
        let mut rng = rng_for(ctx, 5, i);
        let (alpha, beta, t) = loop {
            let alpha: f64 = rng.random_range(-2.0..2.0);
            let beta: f64 = rng.random_range(-2.0..2.0);
            let t: f64 = rng.random_range(0.01..1.0);
            if 1.0 - alpha * t > 0.05 && 1.0 - beta * t > 0.05 {
                break (alpha, beta, t);
            }
        };
        let lambda = [(); 3].map(|_| rng.random_range(0.2..5.0));
        let psi = s3_action_psi(alpha, beta, lambda)?;
        let along = InverseLinearPath::new(psi).phi_at(t)?;
        let family = s3_action_phi(&barred_params(alpha, beta, lambda, t)?)?;
        worst = worst.max((along.matrix() - family.matrix()).amax());
    }
    Ok(SuiteOutput {
        results: Vec::new(),
        residuals: vec![ResidualRow::new(
            "max |(I - tΨ)⁻¹ - Φ(ā, b̄, λ̄)| over draws",
            worst,
            1e-10,
        )],
    })
}

fn identities(ctx: &Context) -> Result<SuiteOutput> {
    let suite = th1_identity_suite(DRAWS_TH1, ctx.seed);
    let mut rows: Vec<ResidualRow> = suite
        .rows
        .iter()
        .map(|r| ResidualRow::new(r.name.clone(), r.max_residual, 1e-10))
        .collect();
    rows.push(ResidualRow::new(
        "fitted constant minus 6",
        (suite.constant - 6.0).abs(),
        1e-10,
    ));
    Ok(SuiteOutput {
        results: Vec::new(),
        residuals: rows,
    })
}

fn paths(ctx: &Context) -> Result<SuiteOutput> {
    let (results, residuals) = family_paths(&FamilyKind::ALL, DRAWS_FAMILY, &ctx.budget, ctx.tol, ctx.seed)?;
    Ok(SuiteOutput { results, residuals })
}
