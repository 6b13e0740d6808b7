use std::sync::Arc;

use super::{anticommutator, CoefficientFunctions, TensorField11};
use crate::error::{Error, Result};
use crate::numkit::tol::STRUCT_TOL;
use crate::numkit::{MapFn, Mat, Real};

/// `x ↦ Σ aᵢ(x)·Jᵢ(x)`.
#[derive(Clone)]
pub struct FamilyStructure {
    parts: Vec<TensorField11>,
    coefficients: CoefficientFunctions,
}

impl MapFn for FamilyStructure {
    fn dim_in(&self) -> usize {
        self.parts[0].dim()
    }
    fn dim_out(&self) -> usize {
        let n = self.parts[0].dim();
        n * n
    }
    fn call<T: Real>(&self, x: &[T]) -> Vec<T> {
        let n = self.parts[0].dim();
        let mut acc = Mat::<T>::zeros(n, n);
        for (part, a) in self.parts.iter().zip(self.coefficients.functions()) {
            let weight = T::apply(a.as_ref(), x).remove(0);
            acc = acc.add(&part.at_generic(x).scale(&weight));
        }
        acc.into_vec()
    }
}

/// `J_{a,b} = a·J₁ + b·J₂`, checking `a² + b² = 1` at the sample points.
pub fn build_family(
    j1: &TensorField11,
    j2: &TensorField11,
    c: &CoefficientFunctions,
    sample_points: &[Vec<f64>],
) -> Result<TensorField11> {
    if c.len() != 2 {
        return Err(Error::DimensionMismatch {
            context: "build_family coefficients",
            expected: 2,
            found: c.len(),
        });
    }
    assemble(vec![j1.clone(), j2.clone()], c, sample_points)
}

/// `J = Σ aᵢ·Jᵢ`, checking `Σ aᵢ² = 1` and pairwise anticommutation at the
/// sample points.
pub fn build_family_k(
    parts: &[TensorField11],
    c: &CoefficientFunctions,
    sample_points: &[Vec<f64>],
) -> Result<TensorField11> {
    if parts.len() != c.len() || parts.is_empty() {
        return Err(Error::DimensionMismatch {
            context: "build_family_k coefficients",
            expected: parts.len(),
            found: c.len(),
        });
    }
    for p in sample_points {
        for i in 0..parts.len() {
            for j in (i + 1)..parts.len() {
                let residual = anticommutator(&parts[i], &parts[j], p)?;
                if residual > STRUCT_TOL {
                    return Err(Error::NotAntiCommuting {
                        first: i,
                        second: j,
                        point: p.clone(),
                        residual,
                    });
                }
            }
        }
    }
    assemble(parts.to_vec(), c, sample_points)
}

fn assemble(
    parts: Vec<TensorField11>,
    c: &CoefficientFunctions,
    sample_points: &[Vec<f64>],
) -> Result<TensorField11> {
    let n = parts[0].dim();
    if let Some(p) = parts.iter().find(|p| p.dim() != n) {
        return Err(Error::DimensionMismatch {
            context: "family structures",
            expected: n,
            found: p.dim(),
        });
    }
    if let Some(f) = c.functions().iter().find(|f| f.in_dim() != n) {
        return Err(Error::DimensionMismatch {
            context: "family coefficient input",
            expected: n,
            found: f.in_dim(),
        });
    }
    c.check_normalized(sample_points)?;
    TensorField11::new(
        n,
        Arc::new(FamilyStructure {
            parts,
            coefficients: c.clone(),
        }),
    )
}
