//! Cyclic Jacobi eigensolver for small symmetric matrices and the Cholesky
//! reduction of the symmetric-definite pencil `A·v = λ·G·v`.

use super::linalg::{backward_substitute, forward_substitute, Mat};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 100;
const OFF_DIAGONAL_TOL: f64 = 1e-13;

/// Eigen-decomposition with eigenvalues ascending and eigenvectors stored as
/// the matching columns of `vectors`.
#[derive(Clone, Debug)]
pub struct SymEig {
    pub values: Vec<f64>,
    pub vectors: Mat,
}

impl SymEig {
    pub fn spread(&self) -> f64 {
        match (self.values.first(), self.values.last()) {
            (Some(lo), Some(hi)) => hi - lo,
            _ => 0.0,
        }
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

fn off_diagonal_norm(a: &Mat) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for r in 0..n {
        for c in 0..n {
            if r != c {
                s += a[(r, c)] * a[(r, c)];
            }
        }
    }
    s.sqrt()
}

/// Eigen-decomposition of a symmetric matrix. The input is symmetrized first.
pub fn sym_eig(a: &Mat) -> Result<SymEig> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            context: "sym_eig",
            expected: a.rows(),
            found: a.cols(),
        });
    }
    if !a.all_finite() {
        return Err(Error::NonFinite {
            context: "sym_eig input".into(),
        });
    }
    let n = a.rows();
    let mut m = a.symmetrized();
    let mut v = Mat::identity(n);
    let scale = m.norm();
    let threshold = OFF_DIAGONAL_TOL * scale;

    let mut sweeps = 0;
    while off_diagonal_norm(&m) > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NotConverged { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                // Rotation angle annihilating m[p][q].
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = Mat::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(SymEig { values, vectors })
}

/// Generalized eigenproblem `A·v = λ·G·v` with `G` symmetric positive
/// definite, reduced to `L⁻¹·A·L⁻ᵀ` with `G = L·Lᵀ`. The returned vectors are
/// `G`-orthonormal.
pub fn gen_sym_eig(a: &Mat, g: &Mat) -> Result<SymEig> {
    if a.rows() != g.rows() || !a.is_square() || !g.is_square() {
        return Err(Error::DimensionMismatch {
            context: "gen_sym_eig",
            expected: g.rows(),
            found: a.rows(),
        });
    }
    let l = g.symmetrized().cholesky()?;
    // L⁻¹·A, then (L⁻¹·(L⁻¹·A)ᵀ) = L⁻¹·A·L⁻ᵀ for symmetric A.
    let left = forward_substitute(&l, &a.symmetrized());
    let reduced = forward_substitute(&l, &left.transpose());
    let eig = sym_eig(&reduced)?;
    let vectors = backward_substitute(&l, &eig.vectors);
    Ok(SymEig {
        values: eig.values,
        vectors,
    })
}
