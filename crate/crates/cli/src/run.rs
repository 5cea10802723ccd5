use invariant_curvature::families::{decomposition_residual, random_family_path, FamilyKind};
use invariant_curvature::lie::so4;
use invariant_curvature::rng::{stream, Domain};
use invariant_curvature::verify::{
    default_t_grid, infinitesimal_check, min_curvature, path_scan, Budget, CurvatureReport,
};
use invariant_curvature::InverseLinearPath;

use crate::config::{RunConfig, Task};
use crate::report::{ResidualRow, RunReport};
use crate::{invalid, source, suites, Result};

/// Block residual accepted for the invariant abelian planes of a family path.
pub const PLANE_TOL: f64 = 1e-12;

/// Runs one configuration. Errors are input errors (exit code 2); the verdicts
/// inside the report decide between exit codes 0 and 1.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    config.validate()?;
    let (results, residuals) = match &config.task {
        Task::Check { source } => {
            let m = source::metric(source)?;
            (vec![min_curvature(&m, &config.budget, config.tol, config.seed)], None)
        }
        Task::Infinitesimal { source } => {
            let (g, psi) = source::psi(source)?;
            (
                vec![infinitesimal_check(&g, &psi, &config.budget, config.tol, config.seed)?],
                None,
            )
        }
        Task::Path { source, t_grid } => {
            let (g, psi) = source::psi(source)?;
            let grid = match t_grid {
                Some(grid) => grid.clone(),
                None => default_t_grid(&InverseLinearPath::new(psi.clone())),
            };
            (
                path_scan(&g, &psi, &grid, &config.budget, config.tol, config.seed)?,
                None,
            )
        }
        Task::Family { kind, draws } => {
            let kinds = match kind {
                Some(k) => vec![*k],
                None => FamilyKind::ALL.to_vec(),
            };
            let (results, rows) = family_paths(&kinds, *draws, &config.budget, config.tol, config.seed)?;
            (results, Some(rows))
        }
        Task::Reproduce { suite } => {
            let s = suites::find(suite).ok_or_else(|| {
                invalid(format!(
                    "unknown suite {suite:?}; available: {}",
                    suites::SUITES.iter().map(|s| s.name).collect::<Vec<_>>().join(", ")
                ))
            })?;
            let out = (s.run)(&suites::Context {
                seed: config.seed,
                budget: config.budget,
                tol: config.tol,
            })?;
            (out.results, Some(out.residuals))
        }
    };
    Ok(RunReport::new(config.clone(), results, residuals))
}

/// Path scans over `{0.1, …, 0.9}·t_cap` for `draws` random members of each
/// family, plus one plane-residual row per family.
pub fn family_paths(
    kinds: &[FamilyKind],
    draws: usize,
    budget: &Budget,
    tol: f64,
    seed: u64,
) -> Result<(Vec<CurvatureReport>, Vec<ResidualRow>)> {
    let g = so4();
    let mut results = Vec::new();
    let mut rows = Vec::new();
    for &kind in kinds {
        let mut worst: f64 = 0.0;
        for i in 0..draws {
            let mut rng = stream(seed, Domain::Draws, ((kind as u64) << 32) | i as u64);
            let fp = random_family_path(kind, &mut rng);
            let grid: Vec<f64> = (1..=9).map(|k| fp.t_cap * k as f64 / 10.0).collect();
            let path = InverseLinearPath::new(fp.psi.clone());
            for &t in &grid {
                worst = worst.max(decomposition_residual(&g, &path.phi_at(t)?, &fp.planes));
            }
            let draw_seed = seed.wrapping_add(i as u64);
            results.extend(path_scan(&g, &fp.psi, &grid, budget, tol, draw_seed)?);
        }
        rows.push(ResidualRow::new(
            format!("{} invariant planes", kind.name()),
            worst,
            PLANE_TOL,
        ));
    }
    Ok((results, rows))
}
