//! Smooth maps `ℝᵈ → ℝᵐ` evaluable on plain values and on jets.

use std::sync::Arc;

use super::jet::{Jet1, Jet2};
use super::linalg::Mat;
use super::real::Real;
use crate::error::{Error, Result};

/// A smooth map written once, generically over the scalar type.
///
/// Implementors get [`VectorMap`] for free.
pub trait MapFn: Send + Sync {
    fn dim_in(&self) -> usize;
    fn dim_out(&self) -> usize;
    fn call<T: Real>(&self, x: &[T]) -> Vec<T>;
}

/// Object-safe view of a smooth map.
pub trait VectorMap: Send + Sync {
    fn in_dim(&self) -> usize;
    fn out_dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> Vec<f64>;
    fn eval_jet1(&self, x: &[Jet1]) -> Vec<Jet1>;
    fn eval_jet2(&self, x: &[Jet2]) -> Vec<Jet2>;
}

impl<M: MapFn> VectorMap for M {
    fn in_dim(&self) -> usize {
        self.dim_in()
    }
    fn out_dim(&self) -> usize {
        self.dim_out()
    }
    fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.call(x)
    }
    fn eval_jet1(&self, x: &[Jet1]) -> Vec<Jet1> {
        self.call(x)
    }
    fn eval_jet2(&self, x: &[Jet2]) -> Vec<Jet2> {
        self.call(x)
    }
}

pub type SharedMap = Arc<dyn VectorMap>;

/// A vector field on `ℝⁿ` is a map `ℝⁿ → ℝⁿ`.
pub type VectorField = SharedMap;

fn check_finite<T: Real>(values: &[T], context: &str) -> Result<()> {
    if values.iter().all(Real::is_finite) {
        Ok(())
    } else {
        Err(Error::NonFinite {
            context: context.to_string(),
        })
    }
}

fn check_input(map: &dyn VectorMap, point: &[f64], context: &'static str) -> Result<()> {
    if map.in_dim() != point.len() {
        return Err(Error::DimensionMismatch {
            context,
            expected: map.in_dim(),
            found: point.len(),
        });
    }
    Ok(())
}

/// `m × d` Jacobian of `map` at `point`.
pub fn jacobian(map: &dyn VectorMap, point: &[f64]) -> Result<Mat> {
    check_input(map, point, "jacobian")?;
    let out = map.eval_jet1(&Jet1::seed(point));
    check_finite(&out, "jacobian")?;
    let d = point.len();
    Ok(Mat::from_fn(out.len(), d, |i, j| out[i].partial(j)))
}

/// Value, Jacobian and per-component Hessians of `map` at `point`.
pub fn second_jet(map: &dyn VectorMap, point: &[f64]) -> Result<Vec<Jet2>> {
    check_input(map, point, "second_jet")?;
    let out = map.eval_jet2(&Jet2::seed(point));
    check_finite(&out, "second_jet")?;
    Ok(out)
}

/// Evaluates `map` and checks the result is finite.
pub fn eval_checked(map: &dyn VectorMap, point: &[f64]) -> Result<Vec<f64>> {
    check_input(map, point, "eval")?;
    let out = map.eval(point);
    check_finite(&out, "eval")?;
    Ok(out)
}

/// Directional derivative `(D map)_x · v`.
pub fn directional_derivative(map: &dyn VectorMap, point: &[f64], v: &[f64]) -> Result<Vec<f64>> {
    check_input(map, point, "directional_derivative")?;
    let out = map.eval_jet1(&Jet1::seed_directions(point, &[v.to_vec()]));
    check_finite(&out, "directional_derivative")?;
    Ok(out.iter().map(|j| j.partial(0)).collect())
}

/// Lie bracket `[X, Y](x) = (DY)ₓ·X(x) − (DX)ₓ·Y(x)`.
pub fn lie_bracket(
    x_field: &dyn VectorMap,
    y_field: &dyn VectorMap,
    x: &[f64],
) -> Result<Vec<f64>> {
    let xv = eval_checked(x_field, x)?;
    let yv = eval_checked(y_field, x)?;
    let dy_x = directional_derivative(y_field, x, &xv)?;
    let dx_y = directional_derivative(x_field, x, &yv)?;
    Ok(dy_x.iter().zip(&dx_y).map(|(a, b)| a - b).collect())
}

/// Constant map.
#[derive(Clone, Debug)]
pub struct ConstantMap {
    in_dim: usize,
    value: Vec<f64>,
}

impl ConstantMap {
    pub fn new(in_dim: usize, value: Vec<f64>) -> Self {
        Self { in_dim, value }
    }
}

impl MapFn for ConstantMap {
    fn dim_in(&self) -> usize {
        self.in_dim
    }
    fn dim_out(&self) -> usize {
        self.value.len()
    }
    fn call<T: Real>(&self, _x: &[T]) -> Vec<T> {
        self.value.iter().map(|&v| T::constant(v)).collect()
    }
}

/// Affine map `x ↦ A·x + b`.
#[derive(Clone, Debug)]
pub struct AffineMap {
    linear: Mat,
    offset: Vec<f64>,
}

impl AffineMap {
    pub fn new(linear: Mat, offset: Vec<f64>) -> Self {
        assert_eq!(linear.rows(), offset.len());
        Self { linear, offset }
    }

    pub fn linear(linear: Mat) -> Self {
        let rows = linear.rows();
        Self::new(linear, vec![0.0; rows])
    }

    pub fn identity(n: usize) -> Self {
        Self::linear(Mat::identity(n))
    }
}

impl MapFn for AffineMap {
    fn dim_in(&self) -> usize {
        self.linear.cols()
    }
    fn dim_out(&self) -> usize {
        self.linear.rows()
    }
    fn call<T: Real>(&self, x: &[T]) -> Vec<T> {
        (0..self.linear.rows())
            .map(|r| {
                let mut acc = T::constant(self.offset[r]);
                for (c, xc) in x.iter().enumerate() {
                    let a = self.linear[(r, c)];
                    if a != 0.0 {
                        acc = acc + xc.clone() * a;
                    }
                }
                acc
            })
            .collect()
    }
}

/// Coordinate vector field `∂/∂xᵢ` on `ℝⁿ`.
pub fn coordinate_field(n: usize, i: usize) -> VectorField {
    let mut v = vec![0.0; n];
    v[i] = 1.0;
    Arc::new(ConstantMap::new(n, v))
}

/// `outer ∘ inner`.
#[derive(Clone)]
pub struct Composition {
    outer: SharedMap,
    inner: SharedMap,
}

impl Composition {
    pub fn new(outer: SharedMap, inner: SharedMap) -> Result<Self> {
        if outer.in_dim() != inner.out_dim() {
            return Err(Error::DimensionMismatch {
                context: "composition",
                expected: outer.in_dim(),
                found: inner.out_dim(),
            });
        }
        Ok(Self { outer, inner })
    }
}

impl MapFn for Composition {
    fn dim_in(&self) -> usize {
        self.inner.in_dim()
    }
    fn dim_out(&self) -> usize {
        self.outer.out_dim()
    }
    fn call<T: Real>(&self, x: &[T]) -> Vec<T> {
        let mid = T::apply(self.inner.as_ref(), x);
        T::apply(self.outer.as_ref(), &mid)
    }
}

/// Concatenation of maps acting on consecutive blocks of the input.
#[derive(Clone)]
pub struct BlockDiagonalMap {
    blocks: Vec<SharedMap>,
}

impl BlockDiagonalMap {
    pub fn new(blocks: Vec<SharedMap>) -> Self {
        Self { blocks }
    }
}

impl MapFn for BlockDiagonalMap {
    fn dim_in(&self) -> usize {
        self.blocks.iter().map(|b| b.in_dim()).sum()
    }
    fn dim_out(&self) -> usize {
        self.blocks.iter().map(|b| b.out_dim()).sum()
    }
    fn call<T: Real>(&self, x: &[T]) -> Vec<T> {
        let mut out = Vec::with_capacity(self.out_dim());
        let mut offset = 0;
        for b in &self.blocks {
            let k = b.in_dim();
            out.extend(T::apply(b.as_ref(), &x[offset..offset + k]));
            offset += k;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Square;

    impl MapFn for Square {
        fn dim_in(&self) -> usize {
            2
        }
        fn dim_out(&self) -> usize {
            2
        }
        fn call<T: Real>(&self, x: &[T]) -> Vec<T> {
            vec![x[0].clone() * x[0].clone(), x[0].clone() * x[1].clone()]
        }
    }

    struct Rotational;

    impl MapFn for Rotational {
        fn dim_in(&self) -> usize {
            2
        }
        fn dim_out(&self) -> usize {
            2
        }
        fn call<T: Real>(&self, x: &[T]) -> Vec<T> {
            vec![x[1].clone(), T::zero()]
        }
    }

    struct Shear;

    impl MapFn for Shear {
        fn dim_in(&self) -> usize {
            2
        }
        fn dim_out(&self) -> usize {
            2
        }
        fn call<T: Real>(&self, x: &[T]) -> Vec<T> {
            vec![T::zero(), x[0].clone()]
        }
    }

    #[test]
    fn identity_jacobian() {
        let j = jacobian(&AffineMap::identity(3), &[0.3, -1.0, 2.0]).unwrap();
        assert_eq!(j, Mat::identity(3));
    }

    #[test]
    fn polynomial_jacobian_is_exact() {
        let j = jacobian(&Square, &[2.0, 3.0]).unwrap();
        assert_eq!(j, Mat::from_vec(2, 2, vec![4.0, 0.0, 3.0, 2.0]));
    }

    #[test]
    fn bracket_of_shear_fields() {
        // X = (x2, 0), Y = (0, x1): [X,Y] = DY·X − DX·Y = (0, x2) − (x1, 0)
        let b = lie_bracket(&Rotational, &Shear, &[0.4, -1.1]).unwrap();
        assert_eq!(b, vec![-0.4, -1.1]);
        let r = lie_bracket(&Shear, &Rotational, &[0.4, -1.1]).unwrap();
        assert_eq!(r, vec![0.4, 1.1]);
    }

    #[test]
    fn constant_fields_commute() {
        let b = lie_bracket(
            coordinate_field(3, 0).as_ref(),
            &ConstantMap::new(3, vec![1.0, 2.0, 3.0]),
            &[1.0, 1.0, 1.0],
        )
        .unwrap();
        assert_eq!(b, vec![0.0; 3]);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        assert!(matches!(
            jacobian(&Square, &[1.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
