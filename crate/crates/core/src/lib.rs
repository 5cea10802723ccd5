//! Curvature of left-invariant metrics on the compact Lie groups `SO(3)` and `SO(4)`.
//!
//! A left-invariant metric `h` is encoded by a self-adjoint, positive-definite map
//! `Φ` on the Lie algebra with `h(A, B) = ⟨Φ A, B⟩`, where `⟨·,·⟩` is a fixed
//! bi-invariant inner product. On top of that encoding the crate provides
//!
//! * exact bracket arithmetic for `so(3)` and `so(4) = so(3) ⊕ so(3)` ([`lie`]),
//! * sectional curvature through Püttmann's closed formula and an independent
//!   Koszul-formula oracle ([`metric`]),
//! * inverse-linear paths `Φ_t = (I − tΨ)⁻¹` together with the closed-form curvature
//!   derivatives at `t = 0` and finite-difference checks ([`variation`]),
//! * generators for the known nonnegatively curved families on `SO(4)` ([`families`]),
//! * numerical certification: multistart minimisation over 2-planes and commuting
//!   pairs, eigenspace tools and basis normal forms ([`verify`]).

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod families;
pub mod lie;
pub mod metric;
pub mod variation;
pub mod verify;

mod par;
pub mod rng;

pub use error::{CurvatureError, Result};
pub use lie::{LieAlgebra, Subalgebra, Vector};
pub use metric::{LeftInvariantMetric, SelfAdjointMap};
pub use variation::InverseLinearPath;
