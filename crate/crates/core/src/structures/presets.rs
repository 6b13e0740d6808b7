//! Named structures used by the bundled examples and test fixtures.
//!
//! Coordinates on `ℝ²ᵐ` are ordered `(u₁, v₁, …, u_m, v_m)`.

use std::sync::Arc;

use super::TensorField11;
use crate::numkit::{MapFn, Mat, Real};

pub fn u(i: usize) -> usize {
    2 * (i - 1)
}

pub fn v(i: usize) -> usize {
    2 * (i - 1) + 1
}

/// Builds the constant endomorphism sending basis vector `from` to
/// `sign · (basis vector to)`.
pub fn from_images(n: usize, images: &[(usize, usize, f64)]) -> Mat {
    let mut m = Mat::zeros(n, n);
    for &(from, to, sign) in images {
        m[(to, from)] = sign;
    }
    m
}

/// The anti-commuting pair on `ℝ⁸` from the first worked example:
/// `J₁: ∂uᵢ ↦ −∂u_{i+2}, ∂u_{i+2} ↦ ∂uᵢ` (same on the `v` block) for `i = 1, 2`;
/// `J₂: ∂uᵢ ↦ ∓∂vᵢ, ∂vᵢ ↦ ±∂uᵢ` with the upper sign for `i = 1, 2`.
pub fn example1_matrices() -> (Mat, Mat) {
    let mut first = Vec::new();
    for i in 1..=2 {
        first.push((u(i), u(i + 2), -1.0));
        first.push((u(i + 2), u(i), 1.0));
        first.push((v(i), v(i + 2), -1.0));
        first.push((v(i + 2), v(i), 1.0));
    }
    let mut second = Vec::new();
    for i in 1..=4 {
        let s = if i <= 2 { 1.0 } else { -1.0 };
        second.push((u(i), v(i), -s));
        second.push((v(i), u(i), s));
    }
    (from_images(8, &first), from_images(8, &second))
}

pub fn example1_pair() -> (TensorField11, TensorField11) {
    let (a, b) = example1_matrices();
    (TensorField11::constant(a), TensorField11::constant(b))
}

/// `J₁·J₂` for the first example's pair; anti-commutes with both factors.
pub fn example1_product() -> TensorField11 {
    let (a, b) = example1_matrices();
    TensorField11::constant(a.matmul(&b))
}

/// Standard structure `∂uᵢ ↦ −∂vᵢ, ∂vᵢ ↦ ∂uᵢ` on `ℝ²ᵐ`.
pub fn standard_complex(m: usize) -> Mat {
    let mut images = Vec::new();
    for i in 1..=m {
        images.push((u(i), v(i), -1.0));
        images.push((v(i), u(i), 1.0));
    }
    from_images(2 * m, &images)
}

/// Conjugation `x ↦ Q(x)·J·Q(x)ᵀ` of a constant structure by the rotation
/// `Q(x)` through angle `rate·x[axis]` in the coordinate plane `plane`.
///
/// Conjugating by an orthogonal field preserves `J² = −I`, Euclidean
/// skewness and anticommutation of pairs rotated by the same `Q`, while
/// making the coefficients point-dependent.
#[derive(Clone, Debug)]
pub struct RotatedStructure {
    base: Mat,
    plane: (usize, usize),
    axis: usize,
    rate: f64,
}

impl RotatedStructure {
    pub fn new(base: Mat, plane: (usize, usize), axis: usize, rate: f64) -> Self {
        assert!(base.is_square());
        let n = base.rows();
        assert!(plane.0 < n && plane.1 < n && plane.0 != plane.1 && axis < n);
        Self {
            base,
            plane,
            axis,
            rate,
        }
    }

    pub fn field(base: Mat, plane: (usize, usize), axis: usize, rate: f64) -> TensorField11 {
        let n = base.rows();
        TensorField11::new(n, Arc::new(Self::new(base, plane, axis, rate)))
            .expect("rotated structure dimensions are consistent")
    }
}

impl MapFn for RotatedStructure {
    fn dim_in(&self) -> usize {
        self.base.rows()
    }
    fn dim_out(&self) -> usize {
        self.base.rows() * self.base.rows()
    }
    fn call<T: Real>(&self, x: &[T]) -> Vec<T> {
        let n = self.base.rows();
        let angle = x[self.axis].clone() * self.rate;
        let (c, s) = (angle.cos(), angle.sin());
        let (p, q) = self.plane;
        let mut rot = Mat::<T>::identity(n);
        rot[(p, p)] = c.clone();
        rot[(p, q)] = -s.clone();
        rot[(q, p)] = s;
        rot[(q, q)] = c;
        let base = Mat::<T>::from_values(&self.base);
        rot.matmul(&base).matmul(&rot.transpose()).into_vec()
    }
}
