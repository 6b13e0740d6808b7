use crate::numkit::{MapFn, Real};

/// `(2x₁, x₁, x₁², x₁+x₂, x₁−x₂, 2x₂, x₂, x₂²)` in `ℝ⁸`.
pub struct Example1;

impl MapFn for Example1 {
    fn dim_in(&self) -> usize {
        2
    }
    fn dim_out(&self) -> usize {
        8
    }
    fn call<T: Real>(&self, x: &[T]) -> Vec<T> {
        let (a, b) = (x[0].clone(), x[1].clone());
        vec![
            a.clone() * 2.0,
            a.clone(),
            a.clone() * a.clone(),
            a.clone() + b.clone(),
            a - b.clone(),
            b.clone() * 2.0,
            b.clone(),
            b.clone() * b,
        ]
    }
}

/// `(x₁, x₂, x₁², x₂²)` in `ℝ⁴`.
pub struct Surface;

impl MapFn for Surface {
    fn dim_in(&self) -> usize {
        2
    }
    fn dim_out(&self) -> usize {
        4
    }
    fn call<T: Real>(&self, x: &[T]) -> Vec<T> {
        vec![
            x[0].clone(),
            x[1].clone(),
            x[0].clone() * x[0].clone(),
            x[1].clone() * x[1].clone(),
        ]
    }
}
