use nalgebra::DMatrix;
use rand::Rng;

use crate::error::{CurvatureError, Result};
use crate::lie::{LieAlgebra, Vector};
use crate::par::map_indexed;
use crate::rng::{gaussian_vector, stream, unit_vector, Domain};
use crate::variation::COMMUTING_TOL;

/// Two linearly independent commuting vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutingPair {
    pub x: Vector,
    pub y: Vector,
}

impl CommutingPair {
    pub fn new(g: &LieAlgebra, x: Vector, y: Vector) -> Result<Self> {
        let residual = g.bracket(&x, &y)?.norm();
        if residual > COMMUTING_TOL * x.norm() * y.norm() {
            return Err(CurvatureError::NotCommuting { residual });
        }
        let (nx, ny) = (x.norm(), y.norm());
        let cos = x.dot(&y) / (nx * ny);
        if !(nx > 0.0 && ny > 0.0) || 1.0 - cos.abs() < 1e-12 {
            return Err(CurvatureError::DegeneratePlane { gram: 1.0 - cos * cos });
        }
        Ok(Self { x, y })
    }
}

/// Random commuting pairs spanning abelian planes `span{(A,0), (0,B)}` of `so(4)`:
/// `X = cos φ (A,0) + sin φ (0,B)`, `Y = −sin ψ (A,0) + cos ψ (0,B)`.
///
/// Returns an empty list for algebras without a two-factor split (e.g. `so(3)`,
/// which has no 2-dimensional abelian subalgebra).
pub fn sample_commuting_pairs(g: &LieAlgebra, n: usize, seed: u64) -> Vec<CommutingPair> {
    let Some(parts) = g.factors() else {
        return Vec::new();
    };
    let (k1, k2) = (parts[0].len(), parts[1].len());
    map_indexed(n, |i| {
        let mut rng = stream(seed, Domain::CommutingPairs, i as u64);
        let a = g
            .embed_factor(0, unit_vector(&mut rng, k1).as_slice())
            .expect("factor dimension");
        let b = g
            .embed_factor(1, unit_vector(&mut rng, k2).as_slice())
            .expect("factor dimension");
        let (phi, psi) = loop {
            let phi = rng.random_range(0.0..std::f64::consts::TAU);
            let psi = rng.random_range(0.0..std::f64::consts::TAU);
            // det of the mixing is cos(φ − ψ); keep the pair well conditioned
            if (phi - psi).cos().abs() > 0.1 {
                break (phi, psi);
            }
        };
        CommutingPair {
            x: &a * phi.cos() + &b * phi.sin(),
            y: &a * (-psi.sin()) + &b * psi.cos(),
        }
    })
}

/// Commuting pairs found without assuming their shape: `X` random, `Y` random in
/// the null space of `ad_X` and orthogonal to `X`. Pairs with a one-dimensional
/// centralizer are skipped.
pub fn commuting_pairs_by_nullspace(g: &LieAlgebra, n: usize, seed: u64) -> Vec<CommutingPair> {
    map_indexed(n, |i| {
        let mut rng = stream(seed, Domain::CommutingPairs, u64::MAX - i as u64);
        let x = unit_vector(&mut rng, g.dim());
        let basis = g.centralizer(&x, 1e-10);
        let mut y = Vector::zeros(g.dim());
        let coeffs = gaussian_vector(&mut rng, basis.len());
        for (c, b) in coeffs.iter().zip(&basis) {
            y += b * *c;
        }
        y -= &x * x.dot(&y);
        let norm = y.norm();
        (norm > 1e-6).then(|| CommutingPair { x, y: y / norm })
    })
    .into_iter()
    .flatten()
    .collect()
}

/// Whether `span{x, y}` is of the form `span{(A,0), (0,B)}`: both factor
/// projections of the plane have rank at most one.
pub fn is_split_plane(g: &LieAlgebra, x: &Vector, y: &Vector, tol: f64) -> Result<bool> {
    for k in 0..2 {
        let px = g.factor_projection(k, x)?;
        let py = g.factor_projection(k, y)?;
        let m = DMatrix::from_columns(&[px, py]);
        let sv = m.singular_values();
        if sv.min() > tol * (x.norm() * y.norm()).sqrt() {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{so3, so4};

    #[test]
    fn so3_has_no_commuting_pairs() {
        assert!(sample_commuting_pairs(&so3(), 10, 1).is_empty());
    }

    #[test]
    fn sampled_pairs_commute_exactly_and_are_deterministic() {
        let g = so4();
        let pairs = sample_commuting_pairs(&g, 200, 42);
        assert_eq!(pairs.len(), 200);
        for p in &pairs {
            assert!(g.bracket(&p.x, &p.y).unwrap().norm() < 1e-14);
            assert!(CommutingPair::new(&g, p.x.clone(), p.y.clone()).is_ok());
        }
        assert_eq!(pairs, sample_commuting_pairs(&g, 200, 42));
        assert_ne!(pairs[0], sample_commuting_pairs(&g, 1, 43)[0]);
    }

    #[test]
    fn pair_validation() {
        let g = so4();
        let e = |i| g.basis_vector(i);
        assert!(matches!(
            CommutingPair::new(&g, e(0), e(1)),
            Err(CurvatureError::NotCommuting { .. })
        ));
        assert!(matches!(
            CommutingPair::new(&g, e(0), e(0) * 2.0),
            Err(CurvatureError::DegeneratePlane { .. })
        ));
    }

    #[test]
    fn nullspace_pairs_are_split_planes() {
        let g = so4();
        let pairs = commuting_pairs_by_nullspace(&g, 500, 3);
        assert!(pairs.len() > 450);
        for p in &pairs {
            assert!(g.bracket(&p.x, &p.y).unwrap().norm() < 1e-9);
            assert!(is_split_plane(&g, &p.x, &p.y, 1e-8).unwrap());
        }
        let (x, y) = (g.basis_vector(0) + g.basis_vector(3), g.basis_vector(1));
        assert!(!is_split_plane(&g, &x, &y, 1e-8).unwrap());
    }
}
