//! Forward-mode jets.
//!
//! A jet carries a value together with its partial derivatives against `d`
//! seed directions. Constants carry empty derivative vectors, which read as
//! zero and broadcast against any seed count.

#![allow(clippy::suspicious_arithmetic_impl)]

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Value plus gradient.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet1 {
    pub value: f64,
    pub grad: Vec<f64>,
}

/// Value, gradient and symmetric Hessian (row-major `d × d`).
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<f64>,
}

fn zip_with(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => Vec::new(),
        (true, false) => b.iter().map(|&y| f(0.0, y)).collect(),
        (false, true) => a.iter().map(|&x| f(x, 0.0)).collect(),
        (false, false) => {
            assert_eq!(a.len(), b.len(), "jet seed counts differ");
            a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
        }
    }
}

// Fills the upper triangle from `entry` and mirrors it, so the result is
// exactly symmetric regardless of summation order.
fn symmetric_from_upper(d: usize, entry: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    let mut hess = vec![0.0; d * d];
    for i in 0..d {
        for j in i..d {
            let h = entry(i, j);
            hess[i * d + j] = h;
            hess[j * d + i] = h;
        }
    }
    hess
}

impl Jet1 {
    pub fn constant(value: f64) -> Self {
        Self {
            value,
            grad: Vec::new(),
        }
    }

    /// The `index`-th of `dim` independent variables.
    pub fn variable(value: f64, index: usize, dim: usize) -> Self {
        let mut grad = vec![0.0; dim];
        grad[index] = 1.0;
        Self { value, grad }
    }

    /// Seeds every coordinate of `point` as an independent variable.
    pub fn seed(point: &[f64]) -> Vec<Self> {
        let d = point.len();
        point
            .iter()
            .enumerate()
            .map(|(i, &v)| Self::variable(v, i, d))
            .collect()
    }

    /// Seeds `point` so that `grad[j]` is the derivative along `directions[j]`.
    pub fn seed_directions(point: &[f64], directions: &[Vec<f64>]) -> Vec<Self> {
        point
            .iter()
            .enumerate()
            .map(|(i, &v)| Self {
                value: v,
                grad: directions.iter().map(|dir| dir[i]).collect(),
            })
            .collect()
    }

    pub fn partial(&self, j: usize) -> f64 {
        self.grad.get(j).copied().unwrap_or(0.0)
    }

    pub(crate) fn chain(&self, value: f64, d1: f64) -> Self {
        Self {
            value,
            grad: self.grad.iter().map(|g| d1 * g).collect(),
        }
    }
}

impl Jet2 {
    pub fn constant(value: f64) -> Self {
        Self {
            value,
            grad: Vec::new(),
            hess: Vec::new(),
        }
    }

    pub fn variable(value: f64, index: usize, dim: usize) -> Self {
        let mut grad = vec![0.0; dim];
        grad[index] = 1.0;
        Self {
            value,
            grad,
            hess: vec![0.0; dim * dim],
        }
    }

    pub fn seed(point: &[f64]) -> Vec<Self> {
        let d = point.len();
        point
            .iter()
            .enumerate()
            .map(|(i, &v)| Self::variable(v, i, d))
            .collect()
    }

    pub fn seed_directions(point: &[f64], directions: &[Vec<f64>]) -> Vec<Self> {
        let d = directions.len();
        point
            .iter()
            .enumerate()
            .map(|(i, &v)| Self {
                value: v,
                grad: directions.iter().map(|dir| dir[i]).collect(),
                hess: vec![0.0; d * d],
            })
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn partial(&self, j: usize) -> f64 {
        self.grad.get(j).copied().unwrap_or(0.0)
    }

    pub fn second(&self, i: usize, j: usize) -> f64 {
        let d = self.dim();
        if self.hess.is_empty() {
            0.0
        } else {
            self.hess[i * d + j]
        }
    }

    /// Drops the Hessian.
    pub fn first_order(&self) -> Jet1 {
        Jet1 {
            value: self.value,
            grad: self.grad.clone(),
        }
    }

    pub(crate) fn chain(&self, value: f64, d1: f64, d2: f64) -> Self {
        let d = self.dim();
        let hess = symmetric_from_upper(d, |i, j| {
            d1 * self.second(i, j) + d2 * self.grad[i] * self.grad[j]
        });
        Self {
            value,
            grad: self.grad.iter().map(|g| d1 * g).collect(),
            hess,
        }
    }
}

impl Add for Jet1 {
    type Output = Jet1;
    fn add(self, rhs: Jet1) -> Jet1 {
        Jet1 {
            value: self.value + rhs.value,
            grad: zip_with(&self.grad, &rhs.grad, |a, b| a + b),
        }
    }
}

impl Sub for Jet1 {
    type Output = Jet1;
    fn sub(self, rhs: Jet1) -> Jet1 {
        Jet1 {
            value: self.value - rhs.value,
            grad: zip_with(&self.grad, &rhs.grad, |a, b| a - b),
        }
    }
}

impl Mul for Jet1 {
    type Output = Jet1;
    fn mul(self, rhs: Jet1) -> Jet1 {
        let (u, v) = (self.value, rhs.value);
        Jet1 {
            value: u * v,
            grad: zip_with(&self.grad, &rhs.grad, |a, b| a * v + u * b),
        }
    }
}

impl Div for Jet1 {
    type Output = Jet1;
    fn div(self, rhs: Jet1) -> Jet1 {
        let (u, v) = (self.value, rhs.value);
        let q = u / v;
        Jet1 {
            value: q,
            grad: zip_with(&self.grad, &rhs.grad, |a, b| (a - q * b) / v),
        }
    }
}

impl Neg for Jet1 {
    type Output = Jet1;
    fn neg(self) -> Jet1 {
        Jet1 {
            value: -self.value,
            grad: self.grad.iter().map(|g| -g).collect(),
        }
    }
}

impl Add<f64> for Jet1 {
    type Output = Jet1;
    fn add(mut self, rhs: f64) -> Jet1 {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet1 {
    type Output = Jet1;
    fn sub(mut self, rhs: f64) -> Jet1 {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet1 {
    type Output = Jet1;
    fn mul(self, rhs: f64) -> Jet1 {
        Jet1 {
            value: self.value * rhs,
            grad: self.grad.iter().map(|g| g * rhs).collect(),
        }
    }
}

impl Div<f64> for Jet1 {
    type Output = Jet1;
    fn div(self, rhs: f64) -> Jet1 {
        Jet1 {
            value: self.value / rhs,
            grad: self.grad.iter().map(|g| g / rhs).collect(),
        }
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        Jet2 {
            value: self.value + rhs.value,
            grad: zip_with(&self.grad, &rhs.grad, |a, b| a + b),
            hess: zip_with(&self.hess, &rhs.hess, |a, b| a + b),
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        Jet2 {
            value: self.value - rhs.value,
            grad: zip_with(&self.grad, &rhs.grad, |a, b| a - b),
            hess: zip_with(&self.hess, &rhs.hess, |a, b| a - b),
        }
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        let (u, v) = (self.value, rhs.value);
        let d = self.dim().max(rhs.dim());
        let hess = symmetric_from_upper(d, |i, j| {
            self.second(i, j) * v
                + u * rhs.second(i, j)
                + self.partial(i) * rhs.partial(j)
                + rhs.partial(i) * self.partial(j)
        });
        Jet2 {
            value: u * v,
            grad: zip_with(&self.grad, &rhs.grad, |a, b| a * v + u * b),
            hess,
        }
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet2) -> Jet2 {
        use super::real::Real;
        self * rhs.recip()
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        Jet2 {
            value: -self.value,
            grad: self.grad.iter().map(|g| -g).collect(),
            hess: self.hess.iter().map(|h| -h).collect(),
        }
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: f64) -> Jet2 {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(mut self, rhs: f64) -> Jet2 {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: f64) -> Jet2 {
        Jet2 {
            value: self.value * rhs,
            grad: self.grad.iter().map(|g| g * rhs).collect(),
            hess: self.hess.iter().map(|h| h * rhs).collect(),
        }
    }
}

impl Div<f64> for Jet2 {
    type Output = Jet2;
    fn div(self, rhs: f64) -> Jet2 {
        Jet2 {
            value: self.value / rhs,
            grad: self.grad.iter().map(|g| g / rhs).collect(),
            hess: self.hess.iter().map(|h| h / rhs).collect(),
        }
    }
}
