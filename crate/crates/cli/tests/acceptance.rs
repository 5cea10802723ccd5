//! Acceptance criteria, one PASS/FAIL line each. Run with
//! `cargo test -p invariant-curvature-cli --test acceptance -- --nocapture`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use invariant_curvature::families::{
    barred_params, factor_rotation, inverse_linear_eigs_s3, random_rotation, s3_action_phi, s3_action_psi,
    s3_quotient_eigenvalues, torus_psi,
};
use invariant_curvature::lie::{so3, so4, Subalgebra, Vector};
use invariant_curvature::metric::{koszul_oracle, puttmann_curvature};
use invariant_curvature::variation::{k_of_t, k_second_deriv, kappa_of_t, kappa_third_deriv, InverseLinearPath};
use invariant_curvature::verify::{
    infinitesimal_check, min_curvature, th1_identity_suite, th2_normal_form, witness_value, Budget, Verdict,
    DEFAULT_TOL,
};
use invariant_curvature::{LeftInvariantMetric, SelfAdjointMap};
use invariant_curvature_cli::RunReport;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);
type Projection<'a> = &'a dyn Fn(&Vector) -> Vector;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(r: &mut ChaCha8Rng, n: usize) -> Vector {
    // Box-Muller keeps the oracle side free of library samplers
    DVector::from_fn(n, |_, _| {
        let u: f64 = r.random_range(f64::EPSILON..1.0);
        let v: f64 = r.random_range(0.0..std::f64::consts::TAU);
        (-2.0 * u.ln()).sqrt() * v.cos()
    })
}

fn unit3(r: &mut ChaCha8Rng) -> [f64; 3] {
    let v = gaussian(r, 3).normalize();
    [v[0], v[1], v[2]]
}

fn cross(a: &[f64], b: &[f64]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Oracle bracket: cross product on each `so(3)` factor.
fn bracket(x: &Vector, y: &Vector) -> Vector {
    let mut out = Vector::zeros(x.len());
    for off in (0..x.len()).step_by(3) {
        let c = cross(&x.as_slice()[off..off + 3], &y.as_slice()[off..off + 3]);
        out.as_mut_slice()[off..off + 3].copy_from_slice(&c);
    }
    out
}

fn so4_vec(a: [f64; 3], b: [f64; 3]) -> Vector {
    Vector::from_iterator(6, a.into_iter().chain(b))
}

/// `X = cos s·(a,0) + sin s·(0,b)`, `Y = −sin u·(a,0) + cos u·(0,b)`.
fn commuting_pair(r: &mut ChaCha8Rng) -> (Vector, Vector) {
    let a = so4_vec(unit3(r), [0.0; 3]);
    let b = so4_vec([0.0; 3], unit3(r));
    loop {
        let s: f64 = r.random_range(0.0..std::f64::consts::TAU);
        let u: f64 = r.random_range(0.0..std::f64::consts::TAU);
        if (s - u).cos().abs() > 0.1 {
            return (&a * s.cos() + &b * s.sin(), &a * (-u.sin()) + &b * u.cos());
        }
    }
}

fn random_spd(r: &mut ChaCha8Rng, n: usize) -> SelfAdjointMap {
    let m = DMatrix::from_iterator(n, n, gaussian(r, n * n).iter().copied());
    SelfAdjointMap::new(m.transpose() * &m + DMatrix::identity(n, n) * 0.1).unwrap()
}

fn random_symmetric(r: &mut ChaCha8Rng, n: usize) -> SelfAdjointMap {
    let m = DMatrix::from_iterator(n, n, gaussian(r, n * n).iter().copied());
    SelfAdjointMap::new((&m + m.transpose()) * 0.5).unwrap()
}

/// Richardson-refined central differences of orders 1 to 3 at 0.
fn fd(f: &dyn Fn(f64) -> f64, order: u8, h: f64) -> f64 {
    let d = |h: f64| match order {
        0 => f(0.0),
        1 => (f(h) - f(-h)) / (2.0 * h),
        2 => (f(h) - 2.0 * f(0.0) + f(-h)) / (h * h),
        _ => (f(2.0 * h) - 2.0 * f(h) + 2.0 * f(-h) - f(-2.0 * h)) / (2.0 * h * h * h),
    };
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

fn step(psi: &SelfAdjointMap) -> f64 {
    1e-2 * (1.0f64).min(0.25 / psi.spectral_norm().max(1e-300))
}

fn invcurv(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_invcurv"))
        .args(args)
        .env_remove("INVCURV_SEED")
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}

fn c1_puttmann_vs_koszul() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for (n, g) in [(3, so3()), (6, so4())] {
        let mut r = rng(100 + n as u64);
        for _ in 0..1000 {
            let m = LeftInvariantMetric::new(g.clone(), random_spd(&mut r, n)).unwrap();
            let (z1, z2) = (gaussian(&mut r, n), gaussian(&mut r, n));
            let p = puttmann_curvature(&m, &z1, &z2).unwrap();
            let k = koszul_oracle(&m, &z1, &z2).unwrap();
            let scale =
                m.phi().spectral_norm() * m.phi_inverse().spectral_norm() * z1.norm_squared() * z2.norm_squared();
            worst = worst.max((p - k).abs() / p.abs().max(1e-6 * scale));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst < 1e-8 && secs < 10.0,
        format!("max rel err {worst:.2e} over 2x1000 cases in {secs:.2} s"),
    )
}

fn c2_bi_invariant_law() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut r = rng(2);
    for (n, g) in [(3, so3()), (6, so4())] {
        let m = LeftInvariantMetric::bi_invariant(g);
        for _ in 0..500 {
            let (z1, z2) = (gaussian(&mut r, n), gaussian(&mut r, n));
            let expected = 0.25 * bracket(&z1, &z2).norm_squared();
            worst = worst.max((puttmann_curvature(&m, &z1, &z2).unwrap() - expected).abs() / expected.max(1.0));
        }
    }
    let m = LeftInvariantMetric::bi_invariant(so4());
    // split pairs (a,0), (0,b) have brackets that vanish in floating point;
    // mixed bases of the same planes only up to rounding of the products
    let mut nonzero = 0;
    let mut mixed: f64 = 0.0;
    for _ in 0..500 {
        let (a, b) = (so4_vec(unit3(&mut r), [0.0; 3]), so4_vec([0.0; 3], unit3(&mut r)));
        if puttmann_curvature(&m, &a, &b).unwrap() != 0.0 {
            nonzero += 1;
        }
        let (x, y) = commuting_pair(&mut r);
        mixed = mixed.max(puttmann_curvature(&m, &x, &y).unwrap().abs());
    }
    check(
        worst < 1e-12 && nonzero == 0 && mixed < 1e-15,
        format!("max err {worst:.2e}; split pairs nonzero {nonzero}/500; mixed pairs max |k| {mixed:.1e}"),
    )
}

fn c3_first_variation() -> Outcome {
    let g = so4();
    let mut r = rng(3);
    let (mut k1, mut rel, mut k2_min, mut closed) = (0.0f64, 0.0f64, f64::INFINITY, 0.0f64);
    for _ in 0..500 {
        let psi = random_symmetric(&mut r, 6);
        let (x, y) = commuting_pair(&mut r);
        let path = InverseLinearPath::new(psi.clone());
        let k = |t: f64| k_of_t(&g, &path, &x, &y, t).unwrap();
        let h = step(&psi);
        let scale = psi.spectral_norm().max(1.0).powi(2) * x.norm_squared() * y.norm_squared();
        // 2k''(0) = |[X,ΨY] + [ΨX,Y]|²
        let twice = (bracket(&x, &psi.apply(&y)) + bracket(&psi.apply(&x), &y)).norm_squared();
        let fd2 = fd(&k, 2, h);
        k1 = k1.max(fd(&k, 1, h).abs() / scale);
        rel = rel.max((twice - 2.0 * fd2).abs() / twice.max(1e-3 * scale));
        let lib = k_second_deriv(&g, &psi, &x, &y).unwrap();
        closed = closed.max((2.0 * lib - twice).abs() / scale);
        k2_min = k2_min.min(lib);
    }
    check(
        k1 < 1e-6 && rel < 1e-5 && k2_min >= 0.0 && closed < 1e-12,
        format!("k'(0)/scale {k1:.2e}; 2k'' vs FD rel {rel:.2e}; min k'' {k2_min:.2e}; library vs oracle {closed:.2e}"),
    )
}

fn c4_twisted_variation() -> Outcome {
    let g = so4();
    let mut r = rng(4);
    let (mut low, mut rel) = (0.0f64, 0.0f64);
    for _ in 0..500 {
        let psi = random_symmetric(&mut r, 6);
        let (x, y) = commuting_pair(&mut r);
        let path = InverseLinearPath::new(psi.clone());
        let kappa = |t: f64| kappa_of_t(&g, &path, &x, &y, t).unwrap();
        let h = step(&psi);
        let scale = psi.spectral_norm().max(1.0).powi(3) * x.norm_squared() * y.norm_squared();
        for order in 0..3 {
            low = low.max(fd(&kappa, order, h).abs() / scale);
        }
        let closed = kappa_third_deriv(&g, &psi, &x, &y).unwrap();
        rel = rel.max((closed - fd(&kappa, 3, h)).abs() / closed.abs().max(1e-3 * scale));
    }
    check(
        low < 1e-6 && rel < 1e-4,
        format!("κ, κ', κ'' at 0 / scale {low:.2e}; κ''' vs FD rel {rel:.2e}"),
    )
}

fn proj(h: &Subalgebra, sign: f64) -> SelfAdjointMap {
    SelfAdjointMap::new(h.projector(6) * sign).unwrap()
}

fn c5_projections() -> Outcome {
    let g = so4();
    // oracle projections: first factor keeps A-coordinates, diagonal averages them
    let first = |v: &Vector| so4_vec([v[0], v[1], v[2]], [0.0; 3]);
    let diag = |v: &Vector| {
        let m = [(v[0] + v[3]) / 2.0, (v[1] + v[4]) / 2.0, (v[2] + v[5]) / 2.0];
        so4_vec(m, m)
    };
    let subalgebras: [(&str, Subalgebra, Projection); 2] = [
        ("g1", Subalgebra::factor(&g, 0).unwrap(), &first),
        ("diag", Subalgebra::diagonal(&g).unwrap(), &diag),
    ];
    let mut r = rng(5);
    let mut rel: f64 = 0.0;
    let mut mismatches = 0;
    for (_, h, p) in &subalgebras {
        let psi = proj(h, -1.0);
        for _ in 0..200 {
            let (x, y) = commuting_pair(&mut r);
            let expected = 6.0 * bracket(&p(&x), &p(&y)).norm_squared();
            let got = kappa_third_deriv(&g, &psi, &x, &y).unwrap();
            rel = rel.max((got - expected).abs() / expected.max(x.norm_squared() * y.norm_squared()));
        }
        let path = InverseLinearPath::new(psi);
        for t in [0.25, 0.5] {
            let metric = path.metric_at(&g, t).unwrap();
            let inv = path.phi_inverse_at(t);
            for i in 0..200 {
                let (x, y) = match i % 3 {
                    0 => commuting_pair(&mut r),
                    1 => {
                        let a = unit3(&mut r);
                        let s: f64 = r.random_range(0.0..6.3);
                        let (xa, yb) = (so4_vec(a, [0.0; 3]), so4_vec([0.0; 3], a));
                        (&xa * s.cos() + &yb * s.sin(), &xa * (-s.sin()) + &yb * s.cos())
                    }
                    _ => (gaussian(&mut r, 6), gaussian(&mut r, 6)),
                };
                let scale = x.norm_squared() * y.norm_squared();
                let k = puttmann_curvature(&metric, &inv.apply(&x), &inv.apply(&y)).unwrap();
                let zero = bracket(&x, &y).norm_squared() <= 1e-20 * scale
                    && bracket(&p(&x), &p(&y)).norm_squared() <= 1e-20 * scale;
                if (k.abs() <= 1e-10 * scale) != zero {
                    mismatches += 1;
                }
            }
        }
    }
    // orthonormal (a,0), (0,b): [X^h, Y^h] = (a×b, a×b)/4 has squared norm |a×b|²/8 ≤ 1/8
    let budget = Budget::default();
    let diag_min = infinitesimal_check(&g, &proj(&subalgebras[1].1, 1.0), &budget, DEFAULT_TOL, 5)
        .unwrap()
        .min_value;
    let diag_rel = (diag_min + 0.75).abs() / 0.75;
    let g1_min = infinitesimal_check(&g, &proj(&subalgebras[0].1, 1.0), &budget, DEFAULT_TOL, 5)
        .unwrap()
        .min_value;
    let abelian = Subalgebra::new(&g, vec![g.basis_vector(0), g.basis_vector(3)]).unwrap();
    let mut abelian_max: f64 = 0.0;
    for _ in 0..200 {
        let (x, y) = commuting_pair(&mut r);
        abelian_max = abelian_max.max(kappa_third_deriv(&g, &proj(&abelian, 1.0), &x, &y).unwrap().abs());
    }
    check(
        rel < 1e-8 && mismatches == 0 && diag_rel < 1e-6 && g1_min.abs() < 1e-10 && abelian_max < 1e-12,
        format!(
            "κ''' vs 6|[X^h,Y^h]|² rel {rel:.2e}; criterion mismatches {mismatches}/1600; \
             +proj diag min {diag_min:.9} (rel {diag_rel:.1e}); +proj g1 min {g1_min:.1e}; abelian max {abelian_max:.1e}"
        ),
    )
}

fn c6_quotient_eigenvalues() -> Outcome {
    let mut r = rng(6);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let a: f64 = r.random_range(0.1..5.0);
        let alpha: f64 = r.random_range(-2.0..1.0);
        let t: f64 = r.random_range(0.0..1.0);
        let lambda = [(); 3].map(|_| r.random_range(0.1..5.0));
        let q = s3_quotient_eigenvalues(a, lambda);
        let e = inverse_linear_eigs_s3(alpha, lambda, t).unwrap();
        for i in 0..3 {
            let l = lambda[i];
            worst = worst.max((q[i] - a * l / (1.0 + l)).abs() / q[i]);
            worst = worst.max((e[i] - l / (t + l * (1.0 - alpha * t))).abs() / e[i]);
        }
    }
    let lambda = [0.7, 1.3, 2.9];
    let cutoff = inverse_linear_eigs_s3(1.0, lambda, 1.0).unwrap();
    let back = (0..3).map(|i| (cutoff[i] - lambda[i]).abs()).fold(0.0, f64::max);
    check(
        worst < 1e-14 && back < 1e-14,
        format!("max rel err {worst:.2e}; alpha = t = 1 recovers lambda to {back:.1e}"),
    )
}

fn c7_barred_parameters() -> Outcome {
    let mut r = rng(7);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let (alpha, beta, t) = loop {
            let (a, b, t): (f64, f64, f64) = (
                r.random_range(-2.0..2.0),
                r.random_range(-2.0..2.0),
                r.random_range(0.01..1.0),
            );
            if 1.0 - a * t > 0.05 && 1.0 - b * t > 0.05 {
                break (a, b, t);
            }
        };
        let lambda = [(); 3].map(|_| r.random_range(0.2..5.0));
        let psi = s3_action_psi(alpha, beta, lambda).unwrap();
        let along = (DMatrix::identity(6, 6) - psi.matrix() * t).try_inverse().unwrap();
        let family = s3_action_phi(&barred_params(alpha, beta, lambda, t).unwrap()).unwrap();
        worst = worst.max((along - family.matrix()).amax());
    }
    check(worst < 1e-10, format!("max entry residual {worst:.2e} over 200 draws"))
}

fn berger(r: f64) -> LeftInvariantMetric {
    LeftInvariantMetric::new(so4(), SelfAdjointMap::diagonal(&[r, 1.0, 1.0, 1.0, 1.0, 1.0])).unwrap()
}

fn c8_berger_threshold() -> Outcome {
    let budget = Budget::default();
    let start = Instant::now();
    let at = min_curvature(&berger(4.0 / 3.0), &budget, DEFAULT_TOL, 7);
    let mut slowest = start.elapsed().as_secs_f64();
    let m = berger(1.4);
    let mut detected = 0;
    let mut reproducible = true;
    for seed in 0..100 {
        let s = Instant::now();
        let rep = min_curvature(&m, &budget, DEFAULT_TOL, seed);
        slowest = slowest.max(s.elapsed().as_secs_f64());
        if rep.is_negative() {
            detected += 1;
            reproducible &= witness_value(&m, rep.witness.as_ref().unwrap()) == Some(rep.min_value);
        }
    }
    check(
        at.verdict == Verdict::NonnegativeWithinBudget && detected >= 99 && reproducible && slowest < 30.0,
        format!(
            "r = 4/3 min {:.2e}; r = 1.4 detected {detected}/100; slowest run {slowest:.3} s",
            at.min_value
        ),
    )
}

fn c9_family_paths() -> Outcome {
    let start = Instant::now();
    let (code, stdout) = invcurv(&["reproduce", "--suite", "obs-3.2-paths", "--seed", "9"]);
    let secs = start.elapsed().as_secs_f64();
    let report: RunReport = serde_json::from_slice(&stdout).map_err(|e| format!("no report: {e}"))?;
    let negatives = report.results.iter().filter(|r| r.is_negative()).count();
    let rows = report.residuals.unwrap_or_default();
    let planes = rows.iter().map(|r| r.value).fold(0.0, f64::max);
    check(
        code == 0 && report.results.len() == 3 * 20 * 9 && negatives == 0 && rows.len() == 3 && planes < 1e-12,
        format!(
            "{} scans, {negatives} negative; max plane residual {planes:.2e}; {secs:.1} s",
            report.results.len()
        ),
    )
}

fn c10_identity_suite() -> Outcome {
    let suite = th1_identity_suite(100, 10);
    let worst = suite.max_residual();
    check(
        suite.constant > 0.0 && worst < 1e-10 && suite.rows.len() >= 12,
        format!(
            "{} identities, constant {:.12}, max residual {worst:.2e}",
            suite.rows.len(),
            suite.constant
        ),
    )
}

fn c11_normal_form() -> Outcome {
    let mut r = rng(11);
    let mut pattern: f64 = 0.0;
    let mut coupling: f64 = 0.0;
    let mut inputs = Vec::new();
    for _ in 0..10 {
        let rot = factor_rotation(&random_rotation(&mut r), &random_rotation(&mut r));
        let lambda = [(); 3].map(|_| r.random_range(0.3..3.0));
        let s3 = s3_action_psi(r.random_range(-1.0..0.9), r.random_range(-1.0..0.9), lambda).unwrap();
        let t: [f64; 5] = [(); 5].map(|_| r.random_range(-1.0..1.0));
        inputs.push(s3.conjugate(&rot).unwrap());
        inputs.push(torus_psi(t[0], t[1], t[2], t[3], t[4]).conjugate(&rot).unwrap());
    }
    for psi in &inputs {
        let nf = th2_normal_form(psi).map_err(|e| e.to_string())?;
        pattern = pattern.max(nf.off_pattern_residual);
        coupling = coupling.max(nf.lambda_coupling.abs()).max(nf.mu_coupling.abs());
    }
    // invariant plane (A1,B1); A2 ↦ B2 is the only coupling on the complement
    let mut m = DMatrix::from_diagonal(&DVector::from_vec(vec![0.2, 0.5, 0.9, -0.3, 0.1, 0.4]));
    for (i, j, v) in [(0, 3, 0.25), (1, 4, 0.6)] {
        m[(i, j)] = v;
        m[(j, i)] = v;
    }
    let singular = th2_normal_form(&SelfAdjointMap::new(m).unwrap()).map_err(|e| e.to_string())?;
    check(
        pattern < 1e-8 && coupling < 1e-10 && singular.singular_branch && singular.off_pattern_residual < 1e-8,
        format!(
            "{} inputs: off-pattern {pattern:.2e}, |lambda|,|mu| {coupling:.2e}; rank-one coupling singular branch {}",
            inputs.len(),
            singular.singular_branch
        ),
    )
}

fn c12_thread_determinism() -> Outcome {
    let runs: [&[&str]; 3] = [
        &["check", "--phi", "diag:1.4,1,1,1,1,1", "--seed", "12"],
        &[
            "infinitesimal",
            "--family",
            "s3-action-psi",
            "--alpha",
            "0.3",
            "--beta",
            "-0.5",
            "--lambda",
            "2,1.5,1.5",
        ],
        &[
            "path",
            "--family",
            "torus-psi",
            "--c",
            "0.3",
            "--d",
            "0.2",
            "--tau",
            "0.1,-0.2,0.1",
            "--samples",
            "1024",
        ],
    ];
    let mut differing = Vec::new();
    for args in runs {
        let one = invcurv(&[args, &["--threads", "1"]].concat());
        let many = invcurv(&[args, &["--threads", "4"]].concat());
        if one != many || one.1.is_empty() {
            differing.push(args[0]);
        }
    }
    check(
        differing.is_empty(),
        format!("check/infinitesimal/path at 1 vs 4 threads; differing: {differing:?}"),
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("Püttmann formula vs Koszul oracle", c1_puttmann_vs_koszul),
        ("bi-invariant curvature law", c2_bi_invariant_law),
        ("first and second derivative of k", c3_first_variation),
        ("vanishing low derivatives and κ''' of κ", c4_twisted_variation),
        ("projection variations and zero-curvature criterion", c5_projections),
        ("S³ quotient eigenvalue formulas", c6_quotient_eigenvalues),
        ("barred parameters of the S³-action path", c7_barred_parameters),
        ("4/3 threshold of the Berger metric", c8_berger_threshold),
        ("paths through the known families", c9_family_paths),
        ("bracket identity suite", c10_identity_suite),
        ("normal form of family variations", c11_normal_form),
        ("thread-count determinism of reports", c12_thread_determinism),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                println!("FAIL {:>2} {name}: {detail}", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failing criteria: {failed:?}");
        std::process::exit(1);
    }
}
