//! Browser bindings for the curvature demo in `www/`.
//!
//! Each export is a thin wrapper around a plain function of the same name in
//! [`ops`], so the numerics can be tested natively.

use wasm_bindgen::prelude::*;

pub mod ops {
    use invariant_curvature::families::s3_action_psi;
    use invariant_curvature::lie::{so4, Subalgebra};
    use invariant_curvature::verify::{infinitesimal_value, min_curvature, Budget, DEFAULT_TOL};
    use invariant_curvature::{InverseLinearPath, LeftInvariantMetric, SelfAdjointMap};

    fn budget(samples: usize) -> Budget {
        Budget {
            samples: samples.max(16),
            restarts: 8,
            iters: 80,
        }
    }

    /// Minimum normalized curvature of `diag(r,1,1) ⊕ I` for `steps` values of
    /// `r` in `[r_min, r_max]`, as `[r₀, min₀, r₁, min₁, …]`.
    pub fn berger_sweep(r_min: f64, r_max: f64, steps: usize, samples: usize, seed: u64) -> Result<Vec<f64>, String> {
        if !(r_min > 0.0 && r_max >= r_min && steps >= 2) {
            return Err("need 0 < r_min ≤ r_max and at least two steps".into());
        }
        let g = so4();
        let mut out = Vec::with_capacity(2 * steps);
        for i in 0..steps {
            let r = r_min + (r_max - r_min) * i as f64 / (steps - 1) as f64;
            let m = LeftInvariantMetric::new(g.clone(), SelfAdjointMap::diagonal(&[r, 1.0, 1.0, 1.0, 1.0, 1.0]))
                .map_err(|e| e.to_string())?;
            out.push(r);
            out.push(min_curvature(&m, &budget(samples), DEFAULT_TOL, seed).min_value);
        }
        Ok(out)
    }

    /// Row-major `Ψ` of the `S³`-action variation.
    pub fn s3_action_psi_matrix(alpha: f64, beta: f64, l1: f64, l2: f64, l3: f64) -> Result<Vec<f64>, String> {
        let psi = s3_action_psi(alpha, beta, [l1, l2, l3]).map_err(|e| e.to_string())?;
        Ok(psi.matrix().transpose().as_slice().to_vec())
    }

    /// Row-major `±proj_𝔥` for `which` ∈ {"first", "diagonal"}.
    pub fn projection_psi(which: &str, sign: f64) -> Result<Vec<f64>, String> {
        let g = so4();
        let h = match which {
            "first" => Subalgebra::factor(&g, 0),
            "diagonal" => Subalgebra::diagonal(&g),
            other => return Err(format!("unknown subalgebra {other:?}")),
        }
        .map_err(|e| e.to_string())?;
        Ok((h.projector(6) * sign).transpose().as_slice().to_vec())
    }

    fn psi_from(entries: &[f64]) -> Result<SelfAdjointMap, String> {
        if entries.len() != 36 {
            return Err(format!("expected 36 entries, got {}", entries.len()));
        }
        SelfAdjointMap::from_row_slice(6, entries).map_err(|e| e.to_string())
    }

    /// Minimum curvature along `(I − tΨ)⁻¹` at `steps` times in `(0, min(1, 0.95·t_max)]`,
    /// as `[t₀, min₀, …]`.
    pub fn path_curve(psi: &[f64], steps: usize, samples: usize, seed: u64) -> Result<Vec<f64>, String> {
        let psi = psi_from(psi)?;
        let path = InverseLinearPath::new(psi);
        let end = if path.t_max() > 1.0 { 1.0 } else { 0.95 * path.t_max() };
        let g = so4();
        let mut out = Vec::with_capacity(2 * steps);
        for i in 1..=steps.max(1) {
            let t = end * i as f64 / steps.max(1) as f64;
            let m = path.metric_at(&g, t).map_err(|e| e.to_string())?;
            out.push(t);
            out.push(min_curvature(&m, &budget(samples), DEFAULT_TOL, seed).min_value);
        }
        Ok(out)
    }

    /// `κ'''(0)` on the orthonormal commuting pairs `(a(θ),0), (0,b(φ))` with
    /// `a(θ) = (cos θ, sin θ, 0)`, `b(φ) = (cos φ, 0, sin φ)`, on an `n × n` grid
    /// of `[0, π)²`, row-major in `θ`.
    pub fn kappa3_heatmap(psi: &[f64], n: usize) -> Result<Vec<f64>, String> {
        let psi = psi_from(psi)?;
        let g = so4();
        let step = std::f64::consts::PI / n.max(1) as f64;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            let (st, ct) = (i as f64 * step).sin_cos();
            for j in 0..n {
                let (sp, cp) = (j as f64 * step).sin_cos();
                out.push(infinitesimal_value(&g, &psi, &[ct, st, 0.0], &[cp, 0.0, sp]).map_err(|e| e.to_string())?);
            }
        }
        Ok(out)
    }
}

fn js(r: Result<Vec<f64>, String>) -> Result<Vec<f64>, JsError> {
    r.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = bergerSweep)]
pub fn berger_sweep(r_min: f64, r_max: f64, steps: usize, samples: usize, seed: u32) -> Result<Vec<f64>, JsError> {
    js(ops::berger_sweep(r_min, r_max, steps, samples, seed as u64))
}

#[wasm_bindgen(js_name = s3ActionPsi)]
pub fn s3_action_psi_matrix(alpha: f64, beta: f64, l1: f64, l2: f64, l3: f64) -> Result<Vec<f64>, JsError> {
    js(ops::s3_action_psi_matrix(alpha, beta, l1, l2, l3))
}

#[wasm_bindgen(js_name = projectionPsi)]
pub fn projection_psi(which: &str, sign: f64) -> Result<Vec<f64>, JsError> {
    js(ops::projection_psi(which, sign))
}

#[wasm_bindgen(js_name = pathCurve)]
pub fn path_curve(psi: &[f64], steps: usize, samples: usize, seed: u32) -> Result<Vec<f64>, JsError> {
    js(ops::path_curve(psi, steps, samples, seed as u64))
}

#[wasm_bindgen(js_name = kappa3Heatmap)]
pub fn kappa3_heatmap(psi: &[f64], n: usize) -> Result<Vec<f64>, JsError> {
    js(ops::kappa3_heatmap(psi, n))
}
