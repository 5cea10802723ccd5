//! Matrix parsing and conversion of a [`Source`] into library objects.

use invariant_curvature::families::{
    product_phi, s3_action_phi, s3_action_psi, torus_phi_default, torus_psi, ProductParams, S3ActionParams, TorusParams,
};
use invariant_curvature::lie::{so3, so4};
use invariant_curvature::{InverseLinearPath, LeftInvariantMetric, LieAlgebra, SelfAdjointMap};
use nalgebra::DMatrix;

use crate::config::Source;
use crate::{invalid, Result};

/// Asymmetry accepted in user-supplied matrices before exact symmetrisation.
pub const INPUT_SYMMETRY_TOL: f64 = 1e-10;

/// Parses `diag:d₁,…,dₙ` or a row-major list of `n²` entries, `n ∈ {3, 6}`.
/// The result is symmetrised.
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<f64>>> {
    let text = text.trim();
    let (diag, body) = match text.strip_prefix("diag:") {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let values = parse_list(body)?;
    let rows: Vec<Vec<f64>> = if diag {
        let n = values.len();
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { values[i] } else { 0.0 }).collect())
            .collect()
    } else {
        let n = (values.len() as f64).sqrt().round() as usize;
        if n * n != values.len() {
            return Err(invalid(format!(
                "expected 9 or 36 row-major entries, got {}",
                values.len()
            )));
        }
        values.chunks(n).map(|r| r.to_vec()).collect()
    };
    Ok(rows_of(&to_map(&rows)?))
}

/// Comma-separated finite reals.
pub fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            match s.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(invalid(format!("not a finite number: {s:?}"))),
            }
        })
        .collect()
}

/// Exactly three comma-separated reals.
pub fn parse_triple(text: &str) -> Result<[f64; 3]> {
    let v = parse_list(text)?;
    <[f64; 3]>::try_from(v.as_slice()).map_err(|_| invalid(format!("expected 3 comma-separated values, got {text:?}")))
}

pub fn to_map(rows: &[Vec<f64>]) -> Result<SelfAdjointMap> {
    let n = rows.len();
    if n != 3 && n != 6 {
        return Err(invalid(format!("matrix must be 3x3 or 6x6, got {n} rows")));
    }
    if let Some(r) = rows.iter().find(|r| r.len() != n) {
        return Err(invalid(format!("matrix row has {} entries, expected {n}", r.len())));
    }
    let mat = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    Ok(SelfAdjointMap::with_tolerance(mat, INPUT_SYMMETRY_TOL)?)
}

pub fn rows_of(m: &SelfAdjointMap) -> Vec<Vec<f64>> {
    let mat = m.matrix();
    (0..mat.nrows()).map(|i| mat.row(i).iter().copied().collect()).collect()
}

fn algebra_for(dim: usize) -> LieAlgebra {
    if dim == 3 {
        so3()
    } else {
        so4()
    }
}

fn map_3x3(rows: &[Vec<f64>], name: &str) -> Result<SelfAdjointMap> {
    let m = to_map(rows)?;
    if m.dim() != 3 {
        return Err(invalid(format!("{name} must be 3x3")));
    }
    Ok(m)
}

/// The metric described by a metric source.
pub fn metric(source: &Source) -> Result<LeftInvariantMetric> {
    let phi = match source {
        Source::Phi { matrix } => to_map(matrix)?,
        Source::Product { phi1, phi2 } => product_phi(&ProductParams {
            phi1: map_3x3(phi1, "phi1")?,
            phi2: map_3x3(phi2, "phi2")?,
        })?,
        Source::Torus { c, d, tau } => {
            let p = TorusParams {
                c: *c,
                d: *d,
                tau: [[tau[0], tau[1]], [tau[1], tau[2]]],
            };
            p.validate()?;
            torus_phi_default(&p)?
        }
        Source::S3Action { a, b, lambda } => s3_action_phi(&S3ActionParams {
            a: *a,
            b: *b,
            lambda: *lambda,
        })?,
        _ => {
            return Err(invalid(
                "this command needs a metric (phi or a metric family), not a psi source",
            ))
        }
    };
    Ok(LeftInvariantMetric::new(algebra_for(phi.dim()), phi)?)
}

/// `Ψ` of the inverse-linear path described by `source`. Metric sources give
/// the path through that metric at `t = 1`, i.e. `Ψ = I − Φ⁻¹`.
pub fn psi(source: &Source) -> Result<(LieAlgebra, SelfAdjointMap)> {
    let psi = match source {
        Source::Psi { matrix } => to_map(matrix)?,
        Source::TorusPsi { c, d, tau } => torus_psi(*c, *d, tau[0], tau[1], tau[2]),
        Source::S3ActionPsi { alpha, beta, lambda } => s3_action_psi(*alpha, *beta, *lambda)?,
        _ => InverseLinearPath::through(metric(source)?.phi())?.psi().clone(),
    };
    Ok((algebra_for(psi.dim()), psi))
}
