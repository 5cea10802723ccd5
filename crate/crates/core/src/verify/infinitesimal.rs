//! Minimisation of `κ'''(0)` over commuting pairs of `so(4)`.
//!
//! Every abelian plane of `so(4)` is `span{(A,0), (0,B)}`, and `κ'''(0)` scales by
//! the squared determinant under a change of basis of the plane. So the search
//! runs over unit `(A, B) ∈ S² × S²` with the orthonormal pair `X = (A,0)`,
//! `Y = (0,B)`.

use crate::error::{CurvatureError, Result};
use crate::lie::{LieAlgebra, Vector};
use crate::metric::SelfAdjointMap;
use crate::par::map_indexed;
use crate::rng::{stream, unit_vector, Domain};
use crate::variation::{kappa_third_unchecked, kappa_unchecked, InverseLinearPath};

use super::{verdict_for, Budget, CurvatureReport, Verdict};

const GRAD_STEP: f64 = 1e-6;

/// `κ'''(0)` on the commuting pair `((a,0), (0,b))`, with `a, b` factor coordinates.
pub fn infinitesimal_value(g: &LieAlgebra, psi: &SelfAdjointMap, a: &[f64], b: &[f64]) -> Result<f64> {
    let (x, y) = pair(g, a, b)?;
    Ok(kappa_third_unchecked(g, psi, &x, &y))
}

fn pair(g: &LieAlgebra, a: &[f64], b: &[f64]) -> Result<(Vector, Vector)> {
    Ok((g.embed_factor(0, a)?, g.embed_factor(1, b)?))
}

/// Two unit vectors spanning the tangent plane of `S²` at unit `a`.
pub(super) fn tangent(a: &Vector) -> [Vector; 2] {
    let i = (0..3).min_by(|&i, &j| a[i].abs().total_cmp(&a[j].abs())).unwrap_or(0);
    let mut e = Vector::zeros(3);
    e[i] = 1.0;
    let t1 = (&e - a * a.dot(&e)).normalize();
    let t2 = Vector::from_column_slice(&[
        a[1] * t1[2] - a[2] * t1[1],
        a[2] * t1[0] - a[0] * t1[2],
        a[0] * t1[1] - a[1] * t1[0],
    ]);
    [t1, t2]
}

struct Objective<'a> {
    g: &'a LieAlgebra,
    psi: &'a SelfAdjointMap,
}

impl Objective<'_> {
    fn eval(&self, a: &Vector, b: &Vector) -> f64 {
        let a = a.normalize();
        let b = b.normalize();
        match pair(self.g, a.as_slice(), b.as_slice()) {
            Ok((x, y)) => kappa_third_unchecked(self.g, self.psi, &x, &y),
            Err(_) => f64::INFINITY,
        }
    }

    fn refine(&self, mut a: Vector, mut b: Vector, iters: usize) -> (f64, Vector, Vector) {
        let mut f = self.eval(&a, &b);
        let mut step = 0.1;
        for _ in 0..iters {
            let ta = tangent(&a);
            let tb = tangent(&b);
            let mut grad = [0.0; 4];
            for k in 0..2 {
                grad[k] = (self.eval(&(&a + &ta[k] * GRAD_STEP), &b) - self.eval(&(&a - &ta[k] * GRAD_STEP), &b))
                    / (2.0 * GRAD_STEP);
                grad[2 + k] = (self.eval(&a, &(&b + &tb[k] * GRAD_STEP)) - self.eval(&a, &(&b - &tb[k] * GRAD_STEP)))
                    / (2.0 * GRAD_STEP);
            }
            let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if !gnorm.is_finite() || gnorm < 1e-13 {
                break;
            }
            let mut accepted = false;
            while step > 1e-12 {
                let s = step / gnorm;
                let na = (&a - &ta[0] * (s * grad[0]) - &ta[1] * (s * grad[1])).normalize();
                let nb = (&b - &tb[0] * (s * grad[2]) - &tb[1] * (s * grad[3])).normalize();
                let fnew = self.eval(&na, &nb);
                if fnew < f - 1e-4 * step * gnorm {
                    a = na;
                    b = nb;
                    f = fnew;
                    accepted = true;
                    step = (step * 2.0).min(1.0);
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        (f, a, b)
    }
}

fn canonical_sign(v: Vector) -> Vector {
    match v.iter().find(|c| c.abs() > 1e-12) {
        Some(c) if *c < 0.0 => -v,
        _ => v,
    }
}

/// Minimises `κ'''(0)` over commuting orthonormal pairs.
///
/// Algebras without a two-factor split have no 2-dimensional abelian
/// subalgebra; the check is then vacuous and reports `NonnegativeWithinBudget`
/// with no witness. The witness pair is probed along the path at a small time
/// `t`, reported as `(t, κ(t))`.
pub fn infinitesimal_check(
    g: &LieAlgebra,
    psi: &SelfAdjointMap,
    budget: &Budget,
    tol: f64,
    seed: u64,
) -> Result<CurvatureReport> {
    if psi.dim() != g.dim() {
        return Err(CurvatureError::DimensionMismatch {
            expected: g.dim(),
            found: psi.dim(),
        });
    }
    let empty = CurvatureReport {
        verdict: Verdict::NonnegativeWithinBudget,
        min_value: 0.0,
        witness: None,
        samples: 0,
        restarts: 0,
        seed,
        t: None,
        probe: None,
    };
    let Some(parts) = g.factors() else {
        return Ok(empty);
    };
    if parts[0].len() != 3 || parts[1].len() != 3 {
        return Err(CurvatureError::InvalidInput(
            "infinitesimal check needs two 3-dimensional factors".into(),
        ));
    }
    let objective = Objective { g, psi };
    let samples = budget.samples.max(1);
    let draw = |i: usize| {
        let mut rng = stream(seed, Domain::PairSamples, i as u64);
        (unit_vector(&mut rng, 3), unit_vector(&mut rng, 3))
    };
    let mut coarse: Vec<(f64, usize)> = map_indexed(samples, |i| {
        let (a, b) = draw(i);
        (objective.eval(&a, &b), i)
    });
    coarse.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    let restarts = budget.restarts.min(samples);
    let starts: Vec<usize> = coarse.iter().take(restarts.max(1)).map(|&(_, i)| i).collect();
    let iters = if restarts == 0 { 0 } else { budget.iters };
    let refined: Vec<(f64, Vector, Vector)> = map_indexed(starts.len(), |r| {
        let (a, b) = draw(starts[r]);
        let (_, a, b) = objective.refine(a, b, iters);
        let (a, b) = (canonical_sign(a), canonical_sign(b));
        (objective.eval(&a, &b), a, b)
    });
    let (min_value, a, b) = refined
        .into_iter()
        .min_by(|x, y| {
            x.0.total_cmp(&y.0).then_with(|| {
                x.1.iter()
                    .chain(x.2.iter())
                    .zip(y.1.iter().chain(y.2.iter()))
                    .map(|(p, q)| p.total_cmp(q))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
        })
        .expect("at least one start");
    let (x, y) = pair(g, a.as_slice(), b.as_slice())?;
    let path = InverseLinearPath::new(psi.clone());
    let t_probe = 1e-2f64.min(path.t_max() / 4.0);
    let probe = kappa_unchecked(g, &path, &x, &y, t_probe).ok().map(|k| (t_probe, k));
    Ok(CurvatureReport {
        verdict: verdict_for(min_value, tol),
        min_value,
        witness: Some([x.as_slice().to_vec(), y.as_slice().to_vec()]),
        samples,
        restarts,
        seed,
        t: None,
        probe,
    })
}
