use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::jet::{Jet1, Jet2};
use super::maps::VectorMap;

/// Scalar type that every geometric computation is generic over.
///
/// Implemented by `f64` (plain evaluation), [`Jet1`] (value and gradient) and
/// [`Jet2`] (value, gradient and Hessian). Maps stored behind
/// `dyn VectorMap` are dispatched to the matching evaluation method through
/// [`Real::apply`], which is what lets composite fields differentiate through
/// their children.
pub trait Real:
    Clone
    + Debug
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn constant(value: f64) -> Self;
    fn value(&self) -> f64;

    fn sin(&self) -> Self;
    fn cos(&self) -> Self;
    fn sqrt(&self) -> Self;
    fn abs(&self) -> Self;
    fn acos(&self) -> Self;
    fn recip(&self) -> Self;
    fn powi(&self, n: i32) -> Self;

    /// Evaluates a type-erased map at `x` using this scalar type.
    fn apply(map: &dyn VectorMap, x: &[Self]) -> Vec<Self>;

    fn zero() -> Self {
        Self::constant(0.0)
    }

    fn one() -> Self {
        Self::constant(1.0)
    }

    fn sec(&self) -> Self {
        self.cos().recip()
    }

    fn is_finite(&self) -> bool;
}

impl Real for f64 {
    fn constant(value: f64) -> Self {
        value
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(&self) -> Self {
        f64::sin(*self)
    }
    fn cos(&self) -> Self {
        f64::cos(*self)
    }
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn acos(&self) -> Self {
        f64::acos(*self)
    }
    fn recip(&self) -> Self {
        1.0 / *self
    }
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
    fn apply(map: &dyn VectorMap, x: &[Self]) -> Vec<Self> {
        map.eval(x)
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl Real for Jet1 {
    fn constant(value: f64) -> Self {
        Jet1::constant(value)
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn sin(&self) -> Self {
        self.chain(self.value.sin(), self.value.cos())
    }
    fn cos(&self) -> Self {
        self.chain(self.value.cos(), -self.value.sin())
    }
    fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s)
    }
    fn abs(&self) -> Self {
        self.chain(self.value.abs(), sign(self.value))
    }
    fn acos(&self) -> Self {
        let v = self.value;
        self.chain(v.acos(), -1.0 / (1.0 - v * v).sqrt())
    }
    fn recip(&self) -> Self {
        let v = self.value;
        self.chain(1.0 / v, -1.0 / (v * v))
    }
    fn powi(&self, n: i32) -> Self {
        let v = self.value;
        let d = if n == 0 {
            0.0
        } else {
            f64::from(n) * v.powi(n - 1)
        };
        self.chain(v.powi(n), d)
    }
    fn apply(map: &dyn VectorMap, x: &[Self]) -> Vec<Self> {
        map.eval_jet1(x)
    }
    fn is_finite(&self) -> bool {
        self.value.is_finite() && self.grad.iter().all(|g| g.is_finite())
    }
}

impl Real for Jet2 {
    fn constant(value: f64) -> Self {
        Jet2::constant(value)
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }
    fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }
    fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * s * s))
    }
    fn abs(&self) -> Self {
        self.chain(self.value.abs(), sign(self.value), 0.0)
    }
    fn acos(&self) -> Self {
        let v = self.value;
        let w = 1.0 - v * v;
        self.chain(v.acos(), -1.0 / w.sqrt(), -v / (w * w.sqrt()))
    }
    fn recip(&self) -> Self {
        let v = self.value;
        self.chain(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }
    fn powi(&self, n: i32) -> Self {
        let v = self.value;
        let nf = f64::from(n);
        let d1 = if n == 0 { 0.0 } else { nf * v.powi(n - 1) };
        let d2 = if n == 0 || n == 1 {
            0.0
        } else {
            nf * (nf - 1.0) * v.powi(n - 2)
        };
        self.chain(v.powi(n), d1, d2)
    }
    fn apply(map: &dyn VectorMap, x: &[Self]) -> Vec<Self> {
        map.eval_jet2(x)
    }
    fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.iter().all(|g| g.is_finite())
            && self.hess.iter().all(|h| h.is_finite())
    }
}

// Derivative of |x| taken as 0 at the kink.
fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}
