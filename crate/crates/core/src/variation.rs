//! Inverse-linear metric paths `Φ_t = (I − tΨ)⁻¹` and curvature derivatives at `t = 0`.
//!
//! For a commuting pair `X, Y` two curvature functions are tracked along a path:
//!
//! * `k(t)`, the unnormalized curvature of `X, Y` under `h_t`, with
//!   `k(0) = k'(0) = 0` and `k''(0) = ½|[X,ΨY] + [ΨX,Y]|² ≥ 0`;
//! * `κ(t)`, the unnormalized curvature of `Φ_t⁻¹X, Φ_t⁻¹Y` under `h_t`, with
//!   `κ(0) = κ'(0) = κ''(0) = 0` and a closed form for `κ'''(0)`.
//!
//! Finite-difference estimators are provided to check both closed forms.

use serde::{Deserialize, Serialize};

use crate::error::{CurvatureError, Result};
use crate::lie::{LieAlgebra, Vector};
use crate::metric::{puttmann_curvature, LeftInvariantMetric, SelfAdjointMap};

/// `|[X,Y]| ≤ COMMUTING_TOL·|X||Y|` counts as commuting.
pub const COMMUTING_TOL: f64 = 1e-10;

/// Required margin `λ_min(I − tΨ) > HORIZON_GUARD`.
pub const HORIZON_GUARD: f64 = 1e-10;

const SPECTRUM_ZERO: f64 = 1e-13;

/// The path `t ↦ (I − tΨ)⁻¹`, admissible on the open interval `(t_min, t_max)`
/// where `I − tΨ` stays positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct InverseLinearPath {
    psi: SelfAdjointMap,
    spectrum: (f64, f64),
    t_min: f64,
    t_max: f64,
}

impl InverseLinearPath {
    pub fn new(psi: SelfAdjointMap) -> Self {
        let (values, _) = psi.eigen();
        let lo = values[0];
        let hi = *values.last().expect("nonempty");
        // eigenvalues within round-off of zero never reach a horizon
        let zero = SPECTRUM_ZERO * lo.abs().max(hi.abs());
        let t_max = if hi > zero { 1.0 / hi } else { f64::INFINITY };
        let t_min = if lo < -zero { 1.0 / lo } else { f64::NEG_INFINITY };
        Self {
            psi,
            spectrum: (lo, hi),
            t_min,
            t_max,
        }
    }

    /// The path ending at a given metric at `t = 1`: `Ψ = I − Φ⁻¹`.
    pub fn through(phi: &SelfAdjointMap) -> Result<Self> {
        phi.check_positive_definite()?;
        Ok(Self::new(phi.spectral_map(|v| 1.0 - 1.0 / v)))
    }

    pub fn psi(&self) -> &SelfAdjointMap {
        &self.psi
    }

    /// `1/λ_max(Ψ)`, or `+∞` when `Ψ` has no positive eigenvalue.
    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// `1/λ_min(Ψ)`, or `−∞` when `Ψ` has no negative eigenvalue.
    pub fn t_min(&self) -> f64 {
        self.t_min
    }

    /// `λ_min(I − tΨ)`.
    pub fn margin(&self, t: f64) -> f64 {
        let (lo, hi) = self.spectrum;
        (1.0 - t * lo).min(1.0 - t * hi)
    }

    pub fn check_admissible(&self, t: f64) -> Result<()> {
        if t.is_finite() && self.margin(t) > HORIZON_GUARD {
            Ok(())
        } else {
            Err(CurvatureError::HorizonExceeded {
                t,
                t_min: self.t_min,
                t_max: self.t_max,
            })
        }
    }

    /// `Φ_t = (I − tΨ)⁻¹`.
    pub fn phi_at(&self, t: f64) -> Result<SelfAdjointMap> {
        self.check_admissible(t)?;
        Ok(self.psi.spectral_map(|v| 1.0 / (1.0 - t * v)))
    }

    /// `Φ_t⁻¹ = I − tΨ`.
    pub fn phi_inverse_at(&self, t: f64) -> SelfAdjointMap {
        let n = self.psi.dim();
        let m = nalgebra::DMatrix::identity(n, n) - self.psi.matrix() * t;
        SelfAdjointMap::new(m).expect("I - tΨ is symmetric")
    }

    pub fn metric_at(&self, algebra: &LieAlgebra, t: f64) -> Result<LeftInvariantMetric> {
        LeftInvariantMetric::new(algebra.clone(), self.phi_at(t)?)
    }

    /// Default finite-difference step `1e-2·min(1, t_max/4, |t_min|/4)`.
    pub fn default_step(&self) -> f64 {
        1e-2 * 1.0_f64.min(self.t_max / 4.0).min(-self.t_min / 4.0)
    }
}

fn check_commuting(g: &LieAlgebra, x: &Vector, y: &Vector) -> Result<()> {
    let residual = g.bracket(x, y)?.norm();
    if residual <= COMMUTING_TOL * x.norm() * y.norm() {
        Ok(())
    } else {
        Err(CurvatureError::NotCommuting { residual })
    }
}

fn check_psi(g: &LieAlgebra, psi: &SelfAdjointMap) -> Result<()> {
    if psi.dim() != g.dim() {
        return Err(CurvatureError::DimensionMismatch {
            expected: g.dim(),
            found: psi.dim(),
        });
    }
    Ok(())
}

/// `k(t)`: unnormalized curvature of `X, Y` under `h_t` (no twisting).
pub fn k_of_t(g: &LieAlgebra, path: &InverseLinearPath, x: &Vector, y: &Vector, t: f64) -> Result<f64> {
    check_psi(g, path.psi())?;
    puttmann_curvature(&path.metric_at(g, t)?, x, y)
}

/// Closed form `k''(0) = ½|[X,ΨY] + [ΨX,Y]|²` for commuting `X, Y`.
pub fn k_second_deriv(g: &LieAlgebra, psi: &SelfAdjointMap, x: &Vector, y: &Vector) -> Result<f64> {
    check_psi(g, psi)?;
    check_commuting(g, x, y)?;
    let v = g.bracket(x, &psi.apply(y))? + g.bracket(&psi.apply(x), y)?;
    Ok(0.5 * v.norm_squared())
}

/// `κ(t)`: unnormalized curvature of `Φ_t⁻¹X, Φ_t⁻¹Y` under `h_t`.
pub fn kappa_of_t(g: &LieAlgebra, path: &InverseLinearPath, x: &Vector, y: &Vector, t: f64) -> Result<f64> {
    check_psi(g, path.psi())?;
    check_commuting(g, x, y)?;
    kappa_unchecked(g, path, x, y, t)
}

pub(crate) fn kappa_unchecked(g: &LieAlgebra, path: &InverseLinearPath, x: &Vector, y: &Vector, t: f64) -> Result<f64> {
    let metric = path.metric_at(g, t)?;
    let inv = path.phi_inverse_at(t);
    puttmann_curvature(&metric, &inv.apply(x), &inv.apply(y))
}

/// Closed form of `κ'''(0)` for commuting `X, Y`:
///
/// ```text
/// κ'''(0)/6 = ⟨[X,ΨY] + [ΨX,Y], [ΨX,ΨY]⟩ + ⟨[ΨX,X], Ψ[ΨY,Y]⟩
///           − ⟨[X,ΨY], Ψ[X,ΨY]⟩ − ⟨[X,ΨY], Ψ[ΨX,Y]⟩ − ⟨[ΨX,Y], Ψ[ΨX,Y]⟩
/// ```
pub fn kappa_third_deriv(g: &LieAlgebra, psi: &SelfAdjointMap, x: &Vector, y: &Vector) -> Result<f64> {
    check_psi(g, psi)?;
    check_commuting(g, x, y)?;
    Ok(kappa_third_unchecked(g, psi, x, y))
}

pub(crate) fn kappa_third_unchecked(g: &LieAlgebra, psi: &SelfAdjointMap, x: &Vector, y: &Vector) -> f64 {
    let px = psi.apply(x);
    let py = psi.apply(y);
    let x_py = g.bracket_vec(x, &py);
    let px_y = g.bracket_vec(&px, y);
    let px_py = g.bracket_vec(&px, &py);
    let px_x = g.bracket_vec(&px, x);
    let py_y = g.bracket_vec(&py, y);
    let sum = (&x_py + &px_y).dot(&px_py) + px_x.dot(&psi.apply(&py_y))
        - x_py.dot(&psi.apply(&x_py))
        - x_py.dot(&psi.apply(&px_y))
        - px_y.dot(&psi.apply(&px_y));
    6.0 * sum
}

/// Central finite difference of order 1, 2 or 3 at `t0` with step `h`.
///
/// Stencils: order 1 and 2 use `t0 ± h` (and `t0`); order 3 uses the five
/// points `t0 ± h, t0 ± 2h`. Truncation error is `O(h²)` in every case.
pub fn finite_diff(f: impl Fn(f64) -> Result<f64>, t0: f64, order: u8, h: f64) -> Result<f64> {
    if !(h > 0.0) {
        return Err(CurvatureError::InvalidInput(format!("step must be positive, got {h}")));
    }
    match order {
        1 => Ok((f(t0 + h)? - f(t0 - h)?) / (2.0 * h)),
        2 => Ok((f(t0 + h)? - 2.0 * f(t0)? + f(t0 - h)?) / (h * h)),
        3 => Ok((f(t0 + 2.0 * h)? - 2.0 * f(t0 + h)? + 2.0 * f(t0 - h)? - f(t0 - 2.0 * h)?) / (2.0 * h * h * h)),
        _ => Err(CurvatureError::InvalidInput(format!(
            "unsupported derivative order {order}"
        ))),
    }
}

/// One Richardson step on [`finite_diff`]: `(4 D(h/2) − D(h)) / 3`, error `O(h⁴)`.
pub fn richardson(f: impl Fn(f64) -> Result<f64>, t0: f64, order: u8, h: f64) -> Result<f64> {
    let coarse = finite_diff(&f, t0, order, h)?;
    let fine = finite_diff(&f, t0, order, h / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Closed-form derivatives next to their finite-difference estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivativeReport {
    pub k1: f64,
    pub k2: f64,
    pub fd_k1: f64,
    pub fd_k2: f64,
    pub kappa3: f64,
    pub fd_kappa0: f64,
    pub fd_kappa1: f64,
    pub fd_kappa2: f64,
    pub fd_kappa3: f64,
    pub step: f64,
}

/// Evaluates all closed forms and their Richardson-refined finite differences
/// along the inverse-linear path of `Ψ`.
pub fn derivative_report(g: &LieAlgebra, psi: &SelfAdjointMap, x: &Vector, y: &Vector) -> Result<DerivativeReport> {
    let path = InverseLinearPath::new(psi.clone());
    let h = path.default_step();
    let k = |t: f64| k_of_t(g, &path, x, y, t);
    let kappa = |t: f64| kappa_of_t(g, &path, x, y, t);
    Ok(DerivativeReport {
        k1: 0.0,
        k2: k_second_deriv(g, psi, x, y)?,
        fd_k1: richardson(k, 0.0, 1, h)?,
        fd_k2: richardson(k, 0.0, 2, h)?,
        kappa3: kappa_third_deriv(g, psi, x, y)?,
        fd_kappa0: kappa(0.0)?,
        fd_kappa1: richardson(kappa, 0.0, 1, h)?,
        fd_kappa2: richardson(kappa, 0.0, 2, h)?,
        fd_kappa3: richardson(kappa, 0.0, 3, h)?,
        step: h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{project, so4, Subalgebra};
    use approx::assert_relative_eq;
    use nalgebra::DMatrix;

    fn proj(g: &LieAlgebra, h: &Subalgebra, sign: f64) -> SelfAdjointMap {
        SelfAdjointMap::new(h.projector(g.dim()) * sign).unwrap()
    }

    #[test]
    fn phi_at_zero_is_identity() {
        let psi = SelfAdjointMap::diagonal(&[1.0, -2.0, 0.5]);
        let path = InverseLinearPath::new(psi);
        assert!((path.phi_at(0.0).unwrap().matrix() - DMatrix::identity(3, 3)).amax() < 1e-15);
        assert_eq!(path.t_max(), 1.0);
        assert_eq!(path.t_min(), -0.5);
    }

    #[test]
    fn shrinking_subalgebra_path() {
        let g = so4();
        let h = Subalgebra::diagonal(&g).unwrap();
        let path = InverseLinearPath::new(proj(&g, &h, -1.0));
        let t = 0.7;
        let phi = path.phi_at(t).unwrap();
        let x = Vector::from_column_slice(&[0.3, -1.0, 0.2, 0.5, 0.9, -0.4]);
        let (along, perp) = project(&g, &x, &h).unwrap();
        let expected = along / (1.0 + t) + perp;
        assert!((phi.apply(&x) - expected).amax() < 1e-14);
        assert_eq!(path.t_max(), f64::INFINITY);
    }

    #[test]
    fn enlarging_subalgebra_hits_horizon_at_one() {
        let g = so4();
        let h = Subalgebra::diagonal(&g).unwrap();
        let path = InverseLinearPath::new(proj(&g, &h, 1.0));
        assert!(matches!(path.phi_at(1.0), Err(CurvatureError::HorizonExceeded { .. })));
        assert!(path.phi_at(0.99).is_ok());
        // margin decreases monotonically towards the horizon
        let margins: Vec<f64> = (0..10).map(|i| path.margin(i as f64 * 0.1)).collect();
        assert!(margins.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn k_second_deriv_vanishes_for_scalar_psi() {
        let g = so4();
        let psi = SelfAdjointMap::scalar(6, 2.5);
        let (x, y) = (g.basis_vector(0), g.basis_vector(4));
        assert_eq!(k_second_deriv(&g, &psi, &x, &y).unwrap(), 0.0);
        assert_eq!(kappa_third_deriv(&g, &psi, &x, &y).unwrap(), 0.0);
    }

    #[test]
    fn k_second_deriv_by_hand() {
        // Ψ couples A₁ ↔ B₂ symmetrically; X = A₁, Y = B₁
        let g = so4();
        let mut m = DMatrix::zeros(6, 6);
        m[(0, 4)] = 1.0;
        m[(4, 0)] = 1.0;
        let psi = SelfAdjointMap::new(m).unwrap();
        let (x, y) = (g.basis_vector(0), g.basis_vector(3));
        // ΨY = 0 and ΨX = B₂, so [X,ΨY] + [ΨX,Y] = [B₂,B₁] = −B₃
        let value = k_second_deriv(&g, &psi, &x, &y).unwrap();
        assert_eq!(value, 0.5);
    }

    #[test]
    fn non_commuting_inputs_are_rejected() {
        let g = so4();
        let psi = SelfAdjointMap::identity(6);
        let (x, y) = (g.basis_vector(0), g.basis_vector(1));
        assert!(matches!(
            k_second_deriv(&g, &psi, &x, &y),
            Err(CurvatureError::NotCommuting { .. })
        ));
        assert!(matches!(
            kappa_third_deriv(&g, &psi, &x, &y),
            Err(CurvatureError::NotCommuting { .. })
        ));
    }

    #[test]
    fn finite_differences_of_polynomials() {
        let cube = |t: f64| Ok(t * t * t);
        for h in [1e-3, 1e-2, 0.1, 0.5] {
            assert_relative_eq!(finite_diff(cube, 0.3, 3, h).unwrap(), 6.0, max_relative = 1e-8);
        }
        let square = |t: f64| Ok(t * t);
        assert_relative_eq!(finite_diff(square, 1.0, 1, 1e-3).unwrap(), 2.0, max_relative = 1e-10);
        assert!(finite_diff(square, 1.0, 4, 1e-3).is_err());
        assert!(finite_diff(square, 1.0, 1, 0.0).is_err());
    }

    #[test]
    fn stencil_outside_domain_reports_horizon() {
        let g = so4();
        let psi = SelfAdjointMap::identity(6);
        let path = InverseLinearPath::new(psi);
        let (x, y) = (g.basis_vector(0), g.basis_vector(3));
        let f = |t: f64| kappa_of_t(&g, &path, &x, &y, t);
        assert!(matches!(
            finite_diff(f, 0.95, 3, 0.05),
            Err(CurvatureError::HorizonExceeded { .. })
        ));
    }

    #[test]
    fn shrinking_subalgebra_third_derivative() {
        let g = so4();
        let h = Subalgebra::diagonal(&g).unwrap();
        let psi = proj(&g, &h, -1.0);
        let x = g.embed_factor(0, &[0.6, 0.8, 0.0]).unwrap();
        let y = g.embed_factor(1, &[0.0, 0.0, 1.0]).unwrap();
        let (xh, _) = project(&g, &x, &h).unwrap();
        let (yh, _) = project(&g, &y, &h).unwrap();
        let expected = 6.0 * g.bracket(&xh, &yh).unwrap().norm_squared();
        assert_relative_eq!(
            kappa_third_deriv(&g, &psi, &x, &y).unwrap(),
            expected,
            max_relative = 1e-12
        );
    }
}
