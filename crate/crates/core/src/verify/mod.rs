//! Numerical certification of (infinitesimal) nonnegative curvature.
//!
//! `NegativeWitness` verdicts are conclusive: the reported plane reproduces the
//! negative value when re-evaluated on its own. `NonnegativeWithinBudget` only
//! says that the bounded multistart search found nothing below `-tol`.

mod eigen;
mod infinitesimal;
mod normal_form;
mod path;
mod planes;
mod sampling;

pub use eigen::{eigenstructure, lemma_k_check, EigenStructure, LemmaKReport, DEFAULT_CLUSTER_TOL};
pub use infinitesimal::{infinitesimal_check, infinitesimal_value};
pub use normal_form::{
    th1_bracket, th1_identity_suite, th2_normal_form, IdentityRow, IdentitySuite, Th2Basis, Th2Params, TH2_ORDER,
};
pub use path::{default_t_grid, path_scan};
pub use planes::{canonical_frame, min_curvature, witness_value};
pub use sampling::{commuting_pairs_by_nullspace, is_split_plane, sample_commuting_pairs, CommutingPair};

use serde::{Deserialize, Serialize};

/// Default threshold on normalized curvature (and on `κ'''(0)`).
pub const DEFAULT_TOL: f64 = 1e-9;

/// Search budget for the multistart minimisers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Coarse random samples.
    pub samples: usize,
    /// Best coarse samples that get locally refined.
    pub restarts: usize,
    /// Descent iterations per refinement.
    pub iters: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            samples: 4096,
            restarts: 64,
            iters: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    NonnegativeWithinBudget,
    NegativeWitness,
}

/// Result of a minimisation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub verdict: Verdict,
    pub min_value: f64,
    /// The minimising plane (or commuting pair), basis vectors in algebra coordinates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<[Vec<f64>; 2]>,
    pub samples: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Path parameter, for reports produced along a path.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    /// Small-time probe `(t, κ(t))` on the minimising pair of an infinitesimal check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probe: Option<(f64, f64)>,
}

impl CurvatureReport {
    pub fn is_negative(&self) -> bool {
        self.verdict == Verdict::NegativeWitness
    }
}

pub(crate) fn verdict_for(min_value: f64, tol: f64) -> Verdict {
    if min_value < -tol {
        Verdict::NegativeWitness
    } else {
        Verdict::NonnegativeWithinBudget
    }
}
