use crate::numkit::{MapFn, Mat, Real, SharedMap, VectorMap};

use super::TensorField11;

/// The vector field `x ↦ J(x)·X(x)`.
#[derive(Clone)]
pub struct AppliedField {
    structure: TensorField11,
    field: SharedMap,
}

impl AppliedField {
    pub fn new(structure: TensorField11, field: SharedMap) -> Self {
        assert_eq!(structure.dim(), field.out_dim(), "applied field dimension");
        Self { structure, field }
    }
}

impl MapFn for AppliedField {
    fn dim_in(&self) -> usize {
        self.field.in_dim()
    }
    fn dim_out(&self) -> usize {
        self.structure.dim()
    }
    fn call<T: Real>(&self, x: &[T]) -> Vec<T> {
        let m: Mat<T> = self.structure.at_generic(x);
        m.mat_vec(&T::apply(self.field.as_ref(), x))
    }
}

/// `Σ cᵢ·Xᵢ` with constant weights.
#[derive(Clone)]
pub struct LinearCombinationField {
    terms: Vec<(f64, SharedMap)>,
}

impl LinearCombinationField {
    pub fn new(terms: Vec<(f64, SharedMap)>) -> Self {
        assert!(!terms.is_empty());
        let d = terms[0].1.out_dim();
        assert!(terms.iter().all(|(_, f)| f.out_dim() == d));
        Self { terms }
    }
}

impl MapFn for LinearCombinationField {
    fn dim_in(&self) -> usize {
        self.terms[0].1.in_dim()
    }
    fn dim_out(&self) -> usize {
        self.terms[0].1.out_dim()
    }
    fn call<T: Real>(&self, x: &[T]) -> Vec<T> {
        let mut acc = vec![T::zero(); self.out_dim()];
        for (w, f) in &self.terms {
            for (a, v) in acc.iter_mut().zip(T::apply(f.as_ref(), x)) {
                *a = a.clone() + v * *w;
            }
        }
        acc
    }
}
