use invariant_curvature::families::FamilyKind;
use invariant_curvature::verify::{Budget, DEFAULT_TOL};
use serde::{Deserialize, Serialize};

use crate::{invalid, Result};

/// Where the metric (or the path derivative `Ψ`) comes from.
///
/// Matrices are row-major lists of rows in the basis `(A₁, A₂, A₃)` or
/// `(A₁, A₂, A₃, B₁, B₂, B₃)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Source {
    Phi {
        matrix: Vec<Vec<f64>>,
    },
    Psi {
        matrix: Vec<Vec<f64>>,
    },
    Product {
        phi1: Vec<Vec<f64>>,
        phi2: Vec<Vec<f64>>,
    },
    /// `tau` holds `(τ₁₁, τ₁₂, τ₂₂)`.
    Torus {
        c: f64,
        d: f64,
        tau: [f64; 3],
    },
    S3Action {
        a: f64,
        b: f64,
        lambda: [f64; 3],
    },
    /// `tau` holds the `(A₃, B₁)` block `(a₁, a₂, a₃)` as in `torus_psi`.
    TorusPsi {
        c: f64,
        d: f64,
        tau: [f64; 3],
    },
    S3ActionPsi {
        alpha: f64,
        beta: f64,
        lambda: [f64; 3],
    },
}

impl Source {
    pub fn is_psi(&self) -> bool {
        matches!(
            self,
            Source::Psi { .. } | Source::TorusPsi { .. } | Source::S3ActionPsi { .. }
        )
    }

    fn scalars(&self) -> Vec<f64> {
        let rows = |m: &Vec<Vec<f64>>| m.iter().flatten().copied().collect::<Vec<_>>();
        match self {
            Source::Phi { matrix } | Source::Psi { matrix } => rows(matrix),
            Source::Product { phi1, phi2 } => [rows(phi1), rows(phi2)].concat(),
            Source::Torus { c, d, tau } | Source::TorusPsi { c, d, tau } => [&[*c, *d][..], tau].concat(),
            Source::S3Action { a, b, lambda } => [&[*a, *b][..], lambda].concat(),
            Source::S3ActionPsi { alpha, beta, lambda } => [&[*alpha, *beta][..], lambda].concat(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Task {
    /// Minimum sectional curvature of one metric.
    Check {
        source: Source,
    },
    /// Minimum of `κ'''(0)` over commuting pairs.
    Infinitesimal {
        source: Source,
    },
    /// Minimum curvature along `(I − tΨ)⁻¹`.
    Path {
        source: Source,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        t_grid: Option<Vec<f64>>,
    },
    /// Random paths through the known families; `kind = None` runs all three.
    Family {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        kind: Option<FamilyKind>,
        draws: usize,
    },
    Reproduce {
        suite: String,
    },
}

/// A complete, self-describing run. It is echoed verbatim into the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub task: Task,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub budget: Budget,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}

impl RunConfig {
    pub fn new(task: Task) -> Self {
        Self {
            task,
            seed: 0,
            budget: Budget::default(),
            tol: DEFAULT_TOL,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let b = &self.budget;
        if b.samples == 0 || b.restarts == 0 || b.iters == 0 {
            return Err(invalid(format!(
                "budget must be positive, got samples = {}, restarts = {}, iters = {}",
                b.samples, b.restarts, b.iters
            )));
        }
        if !(self.tol.is_finite() && self.tol >= 0.0) {
            return Err(invalid(format!("tol must be finite and nonnegative, got {}", self.tol)));
        }
        let source = match &self.task {
            Task::Check { source } | Task::Infinitesimal { source } | Task::Path { source, .. } => Some(source),
            _ => None,
        };
        if let Some(s) = source {
            if s.scalars().iter().any(|v| !v.is_finite()) {
                return Err(invalid("source parameters must be finite"));
            }
        }
        match &self.task {
            Task::Path { t_grid: Some(grid), .. } if grid.is_empty() || grid.iter().any(|t| !t.is_finite()) => {
                Err(invalid("t_grid must be a nonempty list of finite times"))
            }
            Task::Family { draws: 0, .. } => Err(invalid("draws must be positive")),
            _ => Ok(()),
        }
    }
}
