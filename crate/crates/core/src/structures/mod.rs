//! Almost complex and almost Hermitian structures on flat `ℝⁿ`.
//!
//! A structure is a (1,1)-tensor field given by its coefficient matrix at each
//! ambient point. The ambient metric is a constant Gram matrix, so the
//! Levi-Civita connection is the coordinate directional derivative.

mod family;
mod fields;
pub mod presets;
mod tensors;

use std::sync::Arc;

pub use family::{build_family, build_family_k, FamilyStructure};
pub use fields::{AppliedField, LinearCombinationField};
pub use tensors::{decomposition_check, fn_bracket, nabla_j, nijenhuis, BracketForm};

use crate::error::{Error, Result};
use crate::numkit::maps::{eval_checked, ConstantMap, SharedMap};
use crate::numkit::{Mat, Real, Tolerances};

/// A smooth field of `n × n` coefficient matrices (row-major in the map's
/// output).
#[derive(Clone)]
pub struct TensorField11 {
    dim: usize,
    coeff: SharedMap,
}

impl std::fmt::Debug for TensorField11 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TensorField11")
            .field("dim", &self.dim)
            .finish_non_exhaustive()
    }
}

impl TensorField11 {
    pub fn new(dim: usize, coeff: SharedMap) -> Result<Self> {
        if coeff.in_dim() != dim {
            return Err(Error::DimensionMismatch {
                context: "tensor field input",
                expected: dim,
                found: coeff.in_dim(),
            });
        }
        if coeff.out_dim() != dim * dim {
            return Err(Error::DimensionMismatch {
                context: "tensor field coefficients",
                expected: dim * dim,
                found: coeff.out_dim(),
            });
        }
        Ok(Self { dim, coeff })
    }

    pub fn constant(m: Mat) -> Self {
        assert!(m.is_square(), "structure matrix must be square");
        let dim = m.rows();
        Self {
            dim,
            coeff: Arc::new(ConstantMap::new(dim, m.into_vec())),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coefficients(&self) -> &SharedMap {
        &self.coeff
    }

    /// Coefficient matrix at `x`.
    pub fn at(&self, x: &[f64]) -> Result<Mat> {
        let data = eval_checked(self.coeff.as_ref(), x)?;
        Ok(Mat::from_vec(self.dim, self.dim, data))
    }

    /// Coefficient matrix at a jet point.
    pub fn at_generic<T: Real>(&self, x: &[T]) -> Mat<T> {
        Mat::from_vec(self.dim, self.dim, T::apply(self.coeff.as_ref(), x))
    }
}

/// Constant ambient metric.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricSpec {
    gram: Mat,
}

impl MetricSpec {
    pub fn euclidean(n: usize) -> Self {
        Self {
            gram: Mat::identity(n),
        }
    }

    pub fn new(gram: Mat) -> Result<Self> {
        if !gram.is_square() {
            return Err(Error::DimensionMismatch {
                context: "metric",
                expected: gram.rows(),
                found: gram.cols(),
            });
        }
        let asym = gram.sub(&gram.transpose()).norm();
        if asym > 1e-12 * gram.norm().max(1.0) {
            return Err(Error::Invalid(format!(
                "metric is not symmetric (asymmetry {asym:e})"
            )));
        }
        gram.cholesky()?;
        Ok(Self { gram })
    }

    pub fn dim(&self) -> usize {
        self.gram.rows()
    }

    pub fn gram(&self) -> &Mat {
        &self.gram
    }
}

/// Coefficient functions `a₁, …, a_k` on the ambient space.
#[derive(Clone)]
pub struct CoefficientFunctions {
    funcs: Vec<SharedMap>,
}

impl CoefficientFunctions {
    pub fn new(funcs: Vec<SharedMap>) -> Result<Self> {
        if let Some(f) = funcs.iter().find(|f| f.out_dim() != 1) {
            return Err(Error::DimensionMismatch {
                context: "coefficient function output",
                expected: 1,
                found: f.out_dim(),
            });
        }
        Ok(Self { funcs })
    }

    pub fn constants(values: &[f64], ambient_dim: usize) -> Self {
        Self {
            funcs: values
                .iter()
                .map(|&v| Arc::new(ConstantMap::new(ambient_dim, vec![v])) as SharedMap)
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.funcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.funcs.is_empty()
    }

    pub fn functions(&self) -> &[SharedMap] {
        &self.funcs
    }

    pub fn values_at(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.funcs
            .iter()
            .map(|f| eval_checked(f.as_ref(), x).map(|v| v[0]))
            .collect()
    }

    /// `|Σ aᵢ(x)² − 1|`.
    pub fn normalization_residual(&self, x: &[f64]) -> Result<f64> {
        let v = self.values_at(x)?;
        Ok((v.iter().map(|a| a * a).sum::<f64>() - 1.0).abs())
    }

    /// Fails at the first point where the normalization residual exceeds
    /// `1e-12`.
    pub fn check_normalized(&self, pts: &[Vec<f64>]) -> Result<()> {
        for p in pts {
            let residual = self.normalization_residual(p)?;
            if residual > NORMALIZATION_TOL {
                return Err(Error::Normalization {
                    point: p.clone(),
                    residual,
                });
            }
        }
        Ok(())
    }
}

pub const NORMALIZATION_TOL: f64 = 1e-12;

/// Outcome of a pointwise algebraic check over a point set.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureCheck {
    pub passed: bool,
    pub tolerance: f64,
    pub points_checked: usize,
    /// Largest residual over all identities and points.
    pub max_residual: f64,
    pub worst_point: Option<Vec<f64>>,
    /// Per-identity maxima, in a fixed order documented by each check.
    pub components: Vec<(&'static str, f64)>,
}

fn check_dims(expected: usize, found: usize, context: &'static str) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        });
    }
    Ok(())
}

/// Checks `J² = −I` and `gram·J + Jᵀ·gram = 0` at every point.
pub fn verify_almost_hermitian(
    j: &TensorField11,
    g: &MetricSpec,
    pts: &[Vec<f64>],
    tol: &Tolerances,
) -> Result<StructureCheck> {
    check_dims(j.dim(), g.dim(), "verify_almost_hermitian")?;
    let n = j.dim();
    let identity = Mat::identity(n);
    let mut square_max: f64 = 0.0;
    let mut skew_max: f64 = 0.0;
    let mut worst = (0.0, None);
    for p in pts {
        check_dims(n, p.len(), "verify_almost_hermitian point")?;
        let m = j.at(p)?;
        let square = m.matmul(&m).add(&identity).norm();
        let skew = g
            .gram()
            .matmul(&m)
            .add(&m.transpose().matmul(g.gram()))
            .norm();
        square_max = square_max.max(square);
        skew_max = skew_max.max(skew);
        let r = square.max(skew);
        if worst.1.is_none() || r > worst.0 {
            worst = (r, Some(p.clone()));
        }
    }
    Ok(StructureCheck {
        passed: worst.0 <= tol.structural,
        tolerance: tol.structural,
        points_checked: pts.len(),
        max_residual: worst.0,
        worst_point: worst.1,
        components: vec![("square", square_max), ("skew", skew_max)],
    })
}

/// Checks `J₁·J₂ + J₂·J₁ = 0` at every point.
pub fn verify_anticommute(
    j1: &TensorField11,
    j2: &TensorField11,
    pts: &[Vec<f64>],
    tol: &Tolerances,
) -> Result<StructureCheck> {
    check_dims(j1.dim(), j2.dim(), "verify_anticommute")?;
    let mut worst = (0.0, None);
    for p in pts {
        let r = anticommutator(j1, j2, p)?;
        if worst.1.is_none() || r > worst.0 {
            worst = (r, Some(p.clone()));
        }
    }
    Ok(StructureCheck {
        passed: worst.0 <= tol.structural,
        tolerance: tol.structural,
        points_checked: pts.len(),
        max_residual: worst.0,
        worst_point: worst.1,
        components: vec![("anticommutator", worst.0)],
    })
}

/// `‖J₁J₂ + J₂J₁‖` at `p`.
pub fn anticommutator(j1: &TensorField11, j2: &TensorField11, p: &[f64]) -> Result<f64> {
    let a = j1.at(p)?;
    let b = j2.at(p)?;
    Ok(a.matmul(&b).add(&b.matmul(&a)).norm())
}

#[cfg(test)]
mod tests {
    use super::presets::{example1_pair, RotatedStructure};
    use super::*;

    fn grid_points(n: usize) -> Vec<Vec<f64>> {
        (0..5)
            .map(|i| {
                (0..n)
                    .map(|c| -1.0 + 0.5 * i as f64 + 0.1 * c as f64)
                    .collect()
            })
            .collect()
    }

    #[test]
    fn example_one_structures_are_almost_hermitian() {
        let (j1, j2) = example1_pair();
        let g = MetricSpec::euclidean(8);
        let tol = Tolerances::default();
        for j in [&j1, &j2] {
            let r = verify_almost_hermitian(j, &g, &grid_points(8), &tol).unwrap();
            assert!(r.passed);
            assert_eq!(r.max_residual, 0.0);
        }
    }

    #[test]
    fn identity_is_not_almost_complex() {
        let id = TensorField11::constant(Mat::identity(4));
        let r = verify_almost_hermitian(
            &id,
            &MetricSpec::euclidean(4),
            &grid_points(4),
            &Tolerances::default(),
        )
        .unwrap();
        assert!(!r.passed);
        // ‖I² + I‖ = ‖2I‖ = 2√n
        assert!((r.components[0].1 - 4.0).abs() < 1e-15);
    }

    #[test]
    fn conjugated_structure_is_almost_hermitian() {
        let (j1, _) = example1_pair();
        let rotated = RotatedStructure::field(j1.at(&[0.0; 8]).unwrap(), (0, 1), 0, 1.0);
        let r = verify_almost_hermitian(
            &rotated,
            &MetricSpec::euclidean(8),
            &grid_points(8),
            &Tolerances::default(),
        )
        .unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn example_one_pair_anticommutes_and_self_pair_does_not() {
        let (j1, j2) = example1_pair();
        let tol = Tolerances::default();
        let pts = grid_points(8);
        assert!(verify_anticommute(&j1, &j2, &pts, &tol).unwrap().passed);
        let same = verify_anticommute(&j1, &j1, &pts, &tol).unwrap();
        assert!(!same.passed);
        // J² + J² = −2I
        assert!((same.max_residual - 2.0 * 8f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn conjugated_pair_anticommutes() {
        let (j1, j2) = example1_pair();
        let origin = [0.0; 8];
        let r1 = RotatedStructure::field(j1.at(&origin).unwrap(), (0, 2), 1, 0.7);
        let r2 = RotatedStructure::field(j2.at(&origin).unwrap(), (0, 2), 1, 0.7);
        let r = verify_anticommute(&r1, &r2, &grid_points(8), &Tolerances::default()).unwrap();
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn metric_must_be_positive_definite() {
        let bad = Mat::from_vec(2, 2, vec![1.0, 2.0, 2.0, 1.0]);
        assert!(MetricSpec::new(bad).is_err());
        let asym = Mat::from_vec(2, 2, vec![1.0, 0.5, 0.0, 1.0]);
        assert!(MetricSpec::new(asym).is_err());
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let (j1, _) = example1_pair();
        let err = verify_almost_hermitian(
            &j1,
            &MetricSpec::euclidean(4),
            &grid_points(8),
            &Tolerances::default(),
        );
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }
}
