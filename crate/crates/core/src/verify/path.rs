use crate::error::{CurvatureError, Result};
use crate::lie::LieAlgebra;
use crate::metric::SelfAdjointMap;
use crate::variation::InverseLinearPath;

use super::planes::min_curvature;
use super::{Budget, CurvatureReport};

/// The times `{0.1, …, 0.9}·t_cap`, with `t_cap = min(1, t_max)`.
pub fn default_t_grid(path: &InverseLinearPath) -> Vec<f64> {
    let cap = path.t_max().min(1.0);
    (1..=9).map(|k| cap * k as f64 / 10.0).collect()
}

/// Minimum curvature of the metric `(I − tΨ)⁻¹` at every time of `t_grid`.
///
/// All times are validated before any search starts.
pub fn path_scan(
    g: &LieAlgebra,
    psi: &SelfAdjointMap,
    t_grid: &[f64],
    budget: &Budget,
    tol: f64,
    seed: u64,
) -> Result<Vec<CurvatureReport>> {
    if psi.dim() != g.dim() {
        return Err(CurvatureError::DimensionMismatch {
            expected: g.dim(),
            found: psi.dim(),
        });
    }
    let path = InverseLinearPath::new(psi.clone());
    for &t in t_grid {
        path.check_admissible(t)?;
    }
    t_grid
        .iter()
        .map(|&t| {
            let metric = path.metric_at(g, t)?;
            let mut report = min_curvature(&metric, budget, tol, seed);
            report.t = Some(t);
            Ok(report)
        })
        .collect()
}
