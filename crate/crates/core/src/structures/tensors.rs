//! Nijenhuis tensor, Frölicher–Nijenhuis bracket and the flat covariant
//! derivative of a (1,1)-tensor field, evaluated pointwise on vector fields.

use std::sync::Arc;

use super::{AppliedField, CoefficientFunctions, TensorField11, NORMALIZATION_TOL};
use crate::error::{Error, Result};
use crate::numkit::linalg::vec_norm;
use crate::numkit::maps::{directional_derivative, eval_checked, lie_bracket};
use crate::numkit::{SharedMap, VectorField};
use crate::structures::build_family;

fn apply(j: &TensorField11, field: &VectorField) -> VectorField {
    Arc::new(AppliedField::new(j.clone(), field.clone()))
}

fn axpy(acc: &mut [f64], w: f64, v: &[f64]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a += w * b;
    }
}

/// `N_J(X,Y) = [JX,JY] − J[JX,Y] − J[X,JY] + J²[X,Y]` at `x`.
pub fn nijenhuis(
    j: &TensorField11,
    xf: &VectorField,
    yf: &VectorField,
    x: &[f64],
) -> Result<Vec<f64>> {
    let m = j.at(x)?;
    let jx = apply(j, xf);
    let jy = apply(j, yf);
    let b_jx_jy = lie_bracket(jx.as_ref(), jy.as_ref(), x)?;
    let b_jx_y = lie_bracket(jx.as_ref(), yf.as_ref(), x)?;
    let b_x_jy = lie_bracket(xf.as_ref(), jy.as_ref(), x)?;
    let b_x_y = lie_bracket(xf.as_ref(), yf.as_ref(), x)?;

    let mut out = b_jx_jy;
    axpy(&mut out, -1.0, &m.mat_vec(&b_jx_y));
    axpy(&mut out, -1.0, &m.mat_vec(&b_x_jy));
    axpy(&mut out, 1.0, &m.mat_vec(&m.mat_vec(&b_x_y)));
    Ok(out)
}

/// Which expansion of `[J₁,J₂](X,Y)` to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BracketForm {
    /// The general eight-term expansion.
    Full,
    /// The six-term expansion, valid only when `J₁J₂ = −J₂J₁`.
    AntiCommuting,
}

/// Frölicher–Nijenhuis bracket `[J₁,J₂](X,Y)` at `x`:
///
/// ```text
/// [J₁X,J₂Y] + [J₂X,J₁Y] + J₁J₂[X,Y] + J₂J₁[X,Y]
///   − J₁[J₂X,Y] − J₁[X,J₂Y] − J₂[J₁X,Y] − J₂[X,J₁Y]
/// ```
///
/// [`BracketForm::AntiCommuting`] drops the two `[X,Y]` terms.
pub fn fn_bracket(
    j1: &TensorField11,
    j2: &TensorField11,
    xf: &VectorField,
    yf: &VectorField,
    x: &[f64],
    form: BracketForm,
) -> Result<Vec<f64>> {
    let m1 = j1.at(x)?;
    let m2 = j2.at(x)?;
    let (j1x, j1y) = (apply(j1, xf), apply(j1, yf));
    let (j2x, j2y) = (apply(j2, xf), apply(j2, yf));

    let mut out = lie_bracket(j1x.as_ref(), j2y.as_ref(), x)?;
    axpy(&mut out, 1.0, &lie_bracket(j2x.as_ref(), j1y.as_ref(), x)?);
    if form == BracketForm::Full {
        let b = lie_bracket(xf.as_ref(), yf.as_ref(), x)?;
        axpy(&mut out, 1.0, &m1.mat_vec(&m2.mat_vec(&b)));
        axpy(&mut out, 1.0, &m2.mat_vec(&m1.mat_vec(&b)));
    }
    let b = lie_bracket(j2x.as_ref(), yf.as_ref(), x)?;
    axpy(&mut out, -1.0, &m1.mat_vec(&b));
    let b = lie_bracket(xf.as_ref(), j2y.as_ref(), x)?;
    axpy(&mut out, -1.0, &m1.mat_vec(&b));
    let b = lie_bracket(j1x.as_ref(), yf.as_ref(), x)?;
    axpy(&mut out, -1.0, &m2.mat_vec(&b));
    let b = lie_bracket(xf.as_ref(), j1y.as_ref(), x)?;
    axpy(&mut out, -1.0, &m2.mat_vec(&b));
    Ok(out)
}

/// Largest `‖N_{J_{a,b}}(X,Y) − a²N_{J₁}(X,Y) − b²N_{J₂}(X,Y) − ab[J₁,J₂](X,Y)‖`
/// over the field pairs and points, for constants `a² + b² = 1`.
pub fn decomposition_check(
    j1: &TensorField11,
    j2: &TensorField11,
    a: f64,
    b: f64,
    field_pairs: &[(VectorField, VectorField)],
    pts: &[Vec<f64>],
) -> Result<f64> {
    let residual = (a * a + b * b - 1.0).abs();
    if residual > NORMALIZATION_TOL {
        return Err(Error::Normalization {
            point: Vec::new(),
            residual,
        });
    }
    let c = CoefficientFunctions::constants(&[a, b], j1.dim());
    let family = build_family(j1, j2, &c, pts)?;
    let mut worst: f64 = 0.0;
    for p in pts {
        for (xf, yf) in field_pairs {
            let lhs = nijenhuis(&family, xf, yf, p)?;
            let n1 = nijenhuis(j1, xf, yf, p)?;
            let n2 = nijenhuis(j2, xf, yf, p)?;
            let br = fn_bracket(j1, j2, xf, yf, p, BracketForm::Full)?;
            let mut diff = lhs;
            axpy(&mut diff, -a * a, &n1);
            axpy(&mut diff, -b * b, &n2);
            axpy(&mut diff, -a * b, &br);
            worst = worst.max(vec_norm(&diff));
        }
    }
    Ok(worst)
}

/// `(∇_X J)Y = D_X(J·Y) − J·(D_X Y)` at `x` on flat `ℝⁿ`.
pub fn nabla_j(j: &TensorField11, xf: &SharedMap, yf: &SharedMap, x: &[f64]) -> Result<Vec<f64>> {
    let xv = eval_checked(xf.as_ref(), x)?;
    let jy = apply(j, yf);
    let d_jy = directional_derivative(jy.as_ref(), x, &xv)?;
    let d_y = directional_derivative(yf.as_ref(), x, &xv)?;
    let m = j.at(x)?;
    let mut out = d_jy;
    axpy(&mut out, -1.0, &m.mat_vec(&d_y));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkit::maps::{coordinate_field, AffineMap};
    use crate::numkit::{MapFn, Mat, Real};
    use crate::structures::presets::{example1_pair, RotatedStructure};

    struct Quadratic {
        n: usize,
        seed: usize,
    }

    impl MapFn for Quadratic {
        fn dim_in(&self) -> usize {
            self.n
        }
        fn dim_out(&self) -> usize {
            self.n
        }
        fn call<T: Real>(&self, x: &[T]) -> Vec<T> {
            (0..self.n)
                .map(|i| {
                    let a = (i + self.seed) % self.n;
                    let b = (2 * i + 1 + self.seed) % self.n;
                    x[a].clone() * x[b].clone() * 0.3 + x[i].clone().sin() + (i as f64) * 0.1
                })
                .collect()
        }
    }

    fn rotated_pair() -> (TensorField11, TensorField11) {
        let (j1, j2) = example1_pair();
        let o = [0.0; 8];
        (
            RotatedStructure::field(j1.at(&o).unwrap(), (0, 3), 0, 1.0),
            RotatedStructure::field(j2.at(&o).unwrap(), (0, 3), 0, 1.0),
        )
    }

    fn point(seed: f64) -> Vec<f64> {
        (0..8).map(|i| (seed + i as f64 * 0.37).sin()).collect()
    }

    #[test]
    fn constant_structure_has_vanishing_nijenhuis_on_coordinate_fields() {
        let (j1, _) = example1_pair();
        let n = nijenhuis(
            &j1,
            &coordinate_field(8, 0),
            &coordinate_field(8, 5),
            &point(0.2),
        )
        .unwrap();
        assert_eq!(n, vec![0.0; 8]);
    }

    #[test]
    fn nijenhuis_is_antisymmetric_and_vanishes_on_the_diagonal() {
        let (r1, _) = rotated_pair();
        let x: VectorField = Arc::new(Quadratic { n: 8, seed: 1 });
        let y: VectorField = Arc::new(Quadratic { n: 8, seed: 4 });
        let p = point(0.9);
        let nxy = nijenhuis(&r1, &x, &y, &p).unwrap();
        let nyx = nijenhuis(&r1, &y, &x, &p).unwrap();
        for (a, b) in nxy.iter().zip(&nyx) {
            assert!((a + b).abs() < 1e-12);
        }
        let nxx = nijenhuis(&r1, &x, &x, &p).unwrap();
        assert!(vec_norm(&nxx) < 1e-12);
    }

    #[test]
    fn equal_structures_bracket_to_twice_nijenhuis() {
        let (r1, _) = rotated_pair();
        let x = coordinate_field(8, 0);
        let y: VectorField = Arc::new(Quadratic { n: 8, seed: 2 });
        let p = point(0.4);
        let br = fn_bracket(&r1, &r1, &x, &y, &p, BracketForm::Full).unwrap();
        let n = nijenhuis(&r1, &x, &y, &p).unwrap();
        assert!(
            vec_norm(&n) > 1e-3,
            "fixture should have non-trivial torsion"
        );
        for (a, b) in br.iter().zip(&n) {
            assert!((a - 2.0 * b).abs() < 1e-12);
        }
    }

    #[test]
    fn bracket_forms_agree_for_anticommuting_pairs_only() {
        let (r1, r2) = rotated_pair();
        let x: VectorField = Arc::new(Quadratic { n: 8, seed: 3 });
        let y: VectorField = Arc::new(Quadratic { n: 8, seed: 6 });
        let p = point(1.3);
        let full = fn_bracket(&r1, &r2, &x, &y, &p, BracketForm::Full).unwrap();
        let short = fn_bracket(&r1, &r2, &x, &y, &p, BracketForm::AntiCommuting).unwrap();
        for (a, b) in full.iter().zip(&short) {
            assert!((a - b).abs() < 1e-9);
        }
        let full = fn_bracket(&r1, &r1, &x, &y, &p, BracketForm::Full).unwrap();
        let short = fn_bracket(&r1, &r1, &x, &y, &p, BracketForm::AntiCommuting).unwrap();
        let gap: f64 = full
            .iter()
            .zip(&short)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(gap > 1e-3);
    }

    #[test]
    fn decomposition_holds_on_rotated_pair() {
        let (r1, r2) = rotated_pair();
        let pairs = vec![
            (coordinate_field(8, 0), coordinate_field(8, 1)),
            (
                Arc::new(Quadratic { n: 8, seed: 0 }) as VectorField,
                Arc::new(Quadratic { n: 8, seed: 5 }) as VectorField,
            ),
        ];
        let pts: Vec<_> = (0..4).map(|i| point(i as f64)).collect();
        let r = decomposition_check(&r1, &r2, 0.6, 0.8, &pairs, &pts).unwrap();
        assert!(r < 1e-9, "residual {r}");
        assert_eq!(
            decomposition_check(&r1, &r2, 1.0, 0.0, &pairs, &pts).unwrap(),
            0.0
        );
    }

    #[test]
    fn decomposition_rejects_unnormalized_constants() {
        let (j1, j2) = example1_pair();
        assert!(matches!(
            decomposition_check(&j1, &j2, 0.8, 0.7, &[], &[point(0.0)]),
            Err(Error::Normalization { .. })
        ));
    }

    #[test]
    fn constant_structure_is_parallel() {
        let (j1, _) = example1_pair();
        let x: SharedMap = Arc::new(Quadratic { n: 8, seed: 1 });
        let y: SharedMap = Arc::new(AffineMap::linear(Mat::from_fn(8, 8, |r, c| {
            (r * 8 + c) as f64 * 0.01
        })));
        let d = nabla_j(&j1, &x, &y, &point(0.5)).unwrap();
        assert!(vec_norm(&d) < 1e-14);
    }
}
