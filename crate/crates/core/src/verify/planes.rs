//! Multistart minimisation of sectional curvature over the Grassmannian of 2-planes.

use std::cmp::Ordering;

use crate::lie::Vector;
use crate::metric::{normalized_curvature, LeftInvariantMetric};
use crate::par::map_indexed;
use crate::rng::{gaussian_vector, stream, Domain};

use super::{verdict_for, Budget, CurvatureReport, Verdict};

const GRAD_STEP: f64 = 1e-6;

type Frame = (Vector, Vector);

/// Gram–Schmidt on `(u, v)`, then each vector sign-normalised so its first
/// entry above `1e-12` in magnitude is positive. `None` for a degenerate pair.
pub fn canonical_frame(u: &Vector, v: &Vector) -> Option<Frame> {
    let nu = u.norm();
    if !(nu > 0.0) {
        return None;
    }
    let u = u / nu;
    let w = v - &u * u.dot(v);
    let nw = w.norm();
    if !(nw > 1e-12 * v.norm()) {
        return None;
    }
    let w = w / nw;
    let fix = |x: Vector| match x.iter().find(|c| c.abs() > 1e-12) {
        Some(c) if *c < 0.0 => -x,
        _ => x,
    };
    Some((fix(u), fix(w)))
}

/// Re-evaluates a reported witness plane.
pub fn witness_value(m: &LeftInvariantMetric, witness: &[Vec<f64>; 2]) -> Option<f64> {
    let u = Vector::from_column_slice(&witness[0]);
    let v = Vector::from_column_slice(&witness[1]);
    normalized_curvature(m, &u, &v).ok()
}

fn eval(m: &LeftInvariantMetric, u: &Vector, v: &Vector) -> f64 {
    m.normalized_slices(u.as_slice(), v.as_slice()).unwrap_or(f64::INFINITY)
}

/// Orthonormal basis of the complement of span{u, v} (u, v orthonormal).
fn complement(u: &Vector, v: &Vector) -> Vec<Vector> {
    let n = u.len();
    let mut basis: Vec<Vector> = vec![u.clone(), v.clone()];
    let mut candidates: Vec<(f64, usize)> = (0..n)
        .map(|i| {
            let r = 1.0 - u[i] * u[i] - v[i] * v[i];
            (r, i)
        })
        .collect();
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    for (_, i) in candidates {
        if basis.len() == n {
            break;
        }
        let mut e = Vector::zeros(n);
        e[i] = 1.0;
        for b in &basis {
            let c = b.dot(&e);
            e -= b * c;
        }
        let norm = e.norm();
        if norm > 1e-3 {
            basis.push(e / norm);
        }
    }
    basis.split_off(2)
}

/// Gradient descent in the local chart `(u + W a, v + W b)` of the Grassmannian,
/// with numeric central-difference gradients, backtracking line search and
/// re-orthonormalisation after every accepted step.
fn refine(m: &LeftInvariantMetric, start: Frame, iters: usize) -> (f64, Frame) {
    let (mut u, mut v) = canonical_frame(&start.0, &start.1).unwrap_or(start);
    let mut f = eval(m, &u, &v);
    let mut step = 0.1;
    for _ in 0..iters {
        let w = complement(&u, &v);
        let k = w.len();
        let mut grad = vec![0.0; 2 * k];
        for (j, wj) in w.iter().enumerate() {
            let up = eval(m, &(&u + wj * GRAD_STEP), &v);
            let um = eval(m, &(&u - wj * GRAD_STEP), &v);
            grad[j] = (up - um) / (2.0 * GRAD_STEP);
            let vp = eval(m, &u, &(&v + wj * GRAD_STEP));
            let vm = eval(m, &u, &(&v - wj * GRAD_STEP));
            grad[k + j] = (vp - vm) / (2.0 * GRAD_STEP);
        }
        let g2: f64 = grad.iter().map(|g| g * g).sum();
        if !(g2.is_finite()) || g2 < 1e-26 {
            break;
        }
        let gnorm = g2.sqrt();
        let mut accepted = false;
        while step > 1e-12 {
            let mut du = Vector::zeros(u.len());
            let mut dv = Vector::zeros(u.len());
            for (j, wj) in w.iter().enumerate() {
                du -= wj * (step * grad[j] / gnorm);
                dv -= wj * (step * grad[k + j] / gnorm);
            }
            let Some((nu, nv)) = canonical_frame(&(&u + du), &(&v + dv)) else {
                step *= 0.5;
                continue;
            };
            let fnew = eval(m, &nu, &nv);
            if fnew < f - 1e-4 * step * gnorm {
                u = nu;
                v = nv;
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
    (f, (u, v))
}

fn random_frame(dim: usize, seed: u64, index: usize) -> Frame {
    let mut rng = stream(seed, Domain::PlaneSamples, index as u64);
    loop {
        let a = gaussian_vector(&mut rng, dim);
        let b = gaussian_vector(&mut rng, dim);
        if let Some(f) = canonical_frame(&a, &b) {
            return f;
        }
    }
}

fn lex_cmp(a: &Frame, b: &Frame) -> Ordering {
    a.0.iter()
        .chain(a.1.iter())
        .zip(b.0.iter().chain(b.1.iter()))
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Minimises normalized sectional curvature over 2-planes.
///
/// Coarse stage: `budget.samples` random orthonormal frames, each from its own
/// random stream. Refinement: the `budget.restarts` best samples are polished
/// by [`refine`]. The result is independent of thread count.
pub fn min_curvature(m: &LeftInvariantMetric, budget: &Budget, tol: f64, seed: u64) -> CurvatureReport {
    let dim = m.dim();
    if dim < 2 {
        return CurvatureReport {
            verdict: Verdict::NonnegativeWithinBudget,
            min_value: 0.0,
            witness: None,
            samples: 0,
            restarts: 0,
            seed,
            t: None,
            probe: None,
        };
    }
    let samples = budget.samples.max(1);
    let coarse: Vec<(f64, usize)> = map_indexed(samples, |i| {
        let (u, v) = random_frame(dim, seed, i);
        (eval(m, &u, &v), i)
    });
    let mut order = coarse;
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let restarts = budget.restarts.min(samples);
    let starts: Vec<usize> = order.iter().take(restarts.max(1)).map(|&(_, i)| i).collect();
    let iters = if restarts == 0 { 0 } else { budget.iters };
    let refined: Vec<(f64, Frame)> = map_indexed(starts.len(), |r| {
        let start = random_frame(dim, seed, starts[r]);
        let (_, frame) = refine(m, start, iters);
        // report exactly what re-evaluating the witness gives
        (eval(m, &frame.0, &frame.1), frame)
    });
    let (min_value, frame) = refined
        .into_iter()
        .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| lex_cmp(&a.1, &b.1)))
        .expect("at least one start");
    CurvatureReport {
        verdict: verdict_for(min_value, tol),
        min_value,
        witness: Some([frame.0.as_slice().to_vec(), frame.1.as_slice().to_vec()]),
        samples,
        restarts,
        seed,
        t: None,
        probe: None,
    }
}
