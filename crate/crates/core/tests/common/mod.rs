//! Fixtures and independent oracles shared by the integration tests.
//!
//! The oracles use finite differences, Gram–Schmidt projection and direction
//! sampling on plain `Vec` arithmetic, so they share no code path with the
//! jet and eigensolver machinery they check.
#![allow(dead_code)]

use std::sync::Arc;

use slant_core::immersion::Immersion;
use slant_core::numkit::{MapFn, Real, VectorMap};

macro_rules! fixture {
    ($(#[$m:meta])* $name:ident, $k:expr, $n:expr, |$x:ident| $body:expr) => {
        $(#[$m])*
        pub struct $name;

        impl MapFn for $name {
            fn dim_in(&self) -> usize {
                $k
            }
            fn dim_out(&self) -> usize {
                $n
            }
            fn call<T: Real>(&self, $x: &[T]) -> Vec<T> {
                $body
            }
        }
    };
}

fn c<T: Real>(x: &[T], i: usize) -> T {
    x[i].clone()
}

fn k<T: Real>(v: f64) -> T {
    T::constant(v)
}

fixture!(
    /// `(2x₁, x₁, x₁², x₁+x₂, x₁−x₂, 2x₂, x₂, x₂²)`.
    Example1, 2, 8, |x| vec![
        c(x, 0) * 2.0,
        c(x, 0),
        c(x, 0) * c(x, 0),
        c(x, 0) + c(x, 1),
        c(x, 0) - c(x, 1),
        c(x, 1) * 2.0,
        c(x, 1),
        c(x, 1) * c(x, 1),
    ]
);

fixture!(
    /// `(2x₁, x₁, x₁², 1, 2x₂, x₂, x₂², 1)`.
    Example2, 2, 8, |x| vec![
        c(x, 0) * 2.0,
        c(x, 0),
        c(x, 0) * c(x, 0),
        k(1.0),
        c(x, 1) * 2.0,
        c(x, 1),
        c(x, 1) * c(x, 1),
        k(1.0),
    ]
);

fixture!(
    /// `(x₁+x₂, x₁−x₂, x₃+x₄, x₃−x₄, x₁, x₂, x₃, x₄)`.
    Example3Outer, 4, 8, |x| vec![
        c(x, 0) + c(x, 1),
        c(x, 0) - c(x, 1),
        c(x, 2) + c(x, 3),
        c(x, 2) - c(x, 3),
        c(x, 0),
        c(x, 1),
        c(x, 2),
        c(x, 3),
    ]
);

fixture!(
    /// `(x₁, x₁+x₂, x₁−x₂, x₂)`.
    Example3Inner, 2, 4, |x| vec![c(x, 0), c(x, 0) + c(x, 1), c(x, 0) - c(x, 1), c(x, 1)]
);

fixture!(
    /// `(2x₁, x₂, 2x₂, x₁)`.
    Example4Inner, 2, 4, |x| vec![c(x, 0) * 2.0, c(x, 1), c(x, 1) * 2.0, c(x, 0)]
);

fixture!(
    /// `(x₁, x₂, x₁² + x₂², 0)`.
    Paraboloid, 2, 4, |x| vec![
        c(x, 0),
        c(x, 1),
        c(x, 0) * c(x, 0) + c(x, 1) * c(x, 1),
        k(0.0),
    ]
);

fixture!(
    /// `(x₁, x₂, x₁², x₂²)`; slant everywhere with a non-constant angle.
    Surface, 2, 4, |x| vec![c(x, 0), c(x, 1), c(x, 0) * c(x, 0), c(x, 1) * c(x, 1)]
);

fixture!(
    /// `(x₁, x₂, x₁x₂, x₁²)`; a surface, hence slant.
    PlanarNonSlantCandidate, 2, 4, |x| vec![c(x, 0), c(x, 1), c(x, 0) * c(x, 1), c(x, 0) * c(x, 0)]
);

fixture!(
    /// `(x₁, x₂, x₃, x₁x₂, x₁², x₂x₃)`; generically not slant.
    NonSlant3, 3, 6, |x| vec![
        c(x, 0),
        c(x, 1),
        c(x, 2),
        c(x, 0) * c(x, 1),
        c(x, 0) * c(x, 0),
        c(x, 1) * c(x, 2),
    ]
);

fixture!(
    /// Straight line `t ↦ (t, 2t)` in the parameter plane of the inner stage.
    ChainCurve, 1, 2, |x| vec![c(x, 0), c(x, 0) * 2.0]
);

pub fn immersion<M: MapFn + 'static>(m: M) -> Immersion {
    Immersion::new(Arc::new(m))
}

// ---------------------------------------------------------------- oracles

pub type VecMat = Vec<Vec<f64>>;

pub fn eval(map: &dyn VectorMap, u: &[f64]) -> Vec<f64> {
    map.eval(u)
}

/// Central-difference Jacobian columns.
pub fn fd_columns(f: &dyn Fn(&[f64]) -> Vec<f64>, u: &[f64], h: f64) -> VecMat {
    (0..u.len())
        .map(|j| {
            let mut up = u.to_vec();
            let mut dn = u.to_vec();
            up[j] += h;
            dn[j] -= h;
            f(&up)
                .iter()
                .zip(f(&dn))
                .map(|(a, b)| (a - b) / (2.0 * h))
                .collect()
        })
        .collect()
}

/// Central-difference directional derivative.
pub fn fd_directional(f: &dyn Fn(&[f64]) -> Vec<f64>, u: &[f64], v: &[f64], h: f64) -> Vec<f64> {
    let up: Vec<f64> = u.iter().zip(v).map(|(a, b)| a + h * b).collect();
    let dn: Vec<f64> = u.iter().zip(v).map(|(a, b)| a - h * b).collect();
    f(&up)
        .iter()
        .zip(f(&dn))
        .map(|(a, b)| (a - b) / (2.0 * h))
        .collect()
}

pub fn mat_vec(m: &VecMat, v: &[f64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

pub fn inner(g: &VecMat, a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(mat_vec(g, b)).map(|(x, y)| x * y).sum()
}

/// Row-major square matrix from a flat slice.
pub fn rows(n: usize, data: &[f64]) -> VecMat {
    data.chunks(n).map(<[f64]>::to_vec).collect()
}

/// `g`-orthonormal basis of the span of `cols` (modified Gram–Schmidt).
pub fn orthonormal_basis(cols: &VecMat, g: &VecMat) -> VecMat {
    let mut basis: VecMat = Vec::new();
    for col in cols {
        let mut v = col.clone();
        for b in &basis {
            let p = inner(g, &v, b);
            for (vi, bi) in v.iter_mut().zip(b) {
                *vi -= p * bi;
            }
        }
        let n = inner(g, &v, &v).sqrt();
        basis.push(v.into_iter().map(|x| x / n).collect());
    }
    basis
}

/// Tangential component of `v` against an orthonormal basis.
pub fn project(basis: &VecMat, g: &VecMat, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for b in basis {
        let p = inner(g, v, b);
        for (o, bi) in out.iter_mut().zip(b) {
            *o += p * bi;
        }
    }
    out
}

/// Deterministic unit directions in `ℝᵏ` from a Kronecker sequence.
pub fn kronecker_directions(count: usize, dim: usize) -> VecMat {
    let alphas: Vec<f64> = (0..dim)
        .map(|d| {
            let p = [2.0f64, 3.0, 5.0, 7.0, 11.0, 13.0, 17.0, 19.0][d % 8];
            p.sqrt().fract()
        })
        .collect();
    let mut out = Vec::new();
    let mut i = 1usize;
    while out.len() < count {
        let v: Vec<f64> = alphas
            .iter()
            .map(|a| 2.0 * (a * i as f64).fract() - 1.0)
            .collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 {
            out.push(v.into_iter().map(|x| x / n).collect());
        }
        i += 1;
    }
    out
}

/// Tangent frame and ambient data at a point, all by finite differences.
pub struct OracleFrame {
    pub cols: VecMat,
    pub g: VecMat,
    pub j: VecMat,
}

impl OracleFrame {
    pub fn new(f: &dyn VectorMap, u: &[f64], g: VecMat, j: VecMat) -> Self {
        let cols = fd_columns(&|p| f.eval(p), u, 1e-5);
        Self { cols, g, j }
    }

    /// `‖T X‖² / ‖X‖²` for `X = E·v`.
    pub fn ratio(&self, v: &[f64]) -> f64 {
        let n = self.g.len();
        let mut x = vec![0.0; n];
        for (vi, col) in v.iter().zip(&self.cols) {
            for (xr, cr) in x.iter_mut().zip(col) {
                *xr += vi * cr;
            }
        }
        let basis = orthonormal_basis(&self.cols, &self.g);
        let t = project(&basis, &self.g, &mat_vec(&self.j, &x));
        inner(&self.g, &t, &t) / inner(&self.g, &x, &x)
    }

    /// Minimum and maximum ratio over sampled directions.
    pub fn sampled_range(&self, count: usize) -> (f64, f64) {
        let k = self.cols.len();
        kronecker_directions(count, k)
            .iter()
            .map(|v| self.ratio(v))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                (lo.min(r), hi.max(r))
            })
    }

    /// Sampled extremes sharpened by Rayleigh-quotient iteration on the
    /// quadratic forms `v ↦ ‖T E v‖²` and `v ↦ ‖E v‖²`, each assembled from
    /// the oracle's own projection.
    pub fn refined_range(&self, count: usize) -> (f64, f64) {
        let k = self.cols.len();
        let basis = orthonormal_basis(&self.cols, &self.g);
        let tcols: VecMat = self
            .cols
            .iter()
            .map(|c| project(&basis, &self.g, &mat_vec(&self.j, c)))
            .collect();
        let a: VecMat = (0..k)
            .map(|r| {
                (0..k)
                    .map(|s| inner(&self.g, &tcols[r], &tcols[s]))
                    .collect()
            })
            .collect();
        let b: VecMat = (0..k)
            .map(|r| {
                (0..k)
                    .map(|s| inner(&self.g, &self.cols[r], &self.cols[s]))
                    .collect()
            })
            .collect();
        let rq = |v: &[f64]| inner(&a, v, v) / inner(&b, v, v);
        let dirs = kronecker_directions(count, k);
        let refine = |start: &Vec<f64>| -> f64 {
            let mut v = start.clone();
            let mut best = rq(&v);
            for _ in 0..20 {
                let rho = rq(&v);
                let shifted: VecMat = a
                    .iter()
                    .zip(&b)
                    .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - rho * y).collect())
                    .collect();
                let next = solve(&shifted, &mat_vec(&b, &v));
                let n = next.iter().map(|x| x * x).sum::<f64>().sqrt();
                if !n.is_finite() || n == 0.0 {
                    break;
                }
                v = next.into_iter().map(|x| x / n).collect();
                best = rq(&v);
            }
            best
        };
        let pick = |sign: f64| {
            dirs.iter()
                .max_by(|p, q| (sign * rq(p)).total_cmp(&(sign * rq(q))))
                .expect("directions")
                .clone()
        };
        (refine(&pick(-1.0)), refine(&pick(1.0)))
    }
}

/// Gaussian elimination with partial pivoting.
pub fn solve(a: &VecMat, b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: VecMat = a
        .iter()
        .zip(b)
        .map(|(r, &bi)| {
            let mut row = r.clone();
            row.push(bi);
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .expect("rows");
        m.swap(col, piv);
        for r in (col + 1)..n {
            let f = m[r][col] / m[col][col];
            for c in col..=n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = ((r + 1)..n).map(|c| m[r][c] * x[c]).sum();
        x[r] = (m[r][n] - s) / m[r][r];
    }
    x
}

/// Tangential projection of the ambient derivative of `E·Y` along `E·X`,
/// expressed in frame coordinates.
pub fn fd_gauss(
    f: &dyn VectorMap,
    u: &[f64],
    xv: &dyn Fn(&[f64]) -> Vec<f64>,
    yv: &dyn Fn(&[f64]) -> Vec<f64>,
    g: &VecMat,
) -> Vec<f64> {
    let push = |p: &[f64]| -> Vec<f64> {
        let cols = fd_columns(&|q| f.eval(q), p, 1e-5);
        let y = yv(p);
        let mut w = vec![0.0; cols[0].len()];
        for (yi, col) in y.iter().zip(&cols) {
            for (wr, cr) in w.iter_mut().zip(col) {
                *wr += yi * cr;
            }
        }
        w
    };
    let dw = fd_directional(&push, u, &xv(u), 1e-4);
    let cols = fd_columns(&|q| f.eval(q), u, 1e-5);
    let k = cols.len();
    let gram: VecMat = (0..k)
        .map(|r| (0..k).map(|s| inner(g, &cols[r], &cols[s])).collect())
        .collect();
    let rhs: Vec<f64> = cols.iter().map(|c| inner(g, c, &dw)).collect();
    solve(&gram, &rhs)
}

pub fn identity(n: usize) -> VecMat {
    (0..n)
        .map(|r| (0..n).map(|c| if r == c { 1.0 } else { 0.0 }).collect())
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub type Field<'a> = Box<dyn Fn(&[f64]) -> Vec<f64> + 'a>;
pub type Endo<'a> = &'a dyn Fn(&[f64]) -> VecMat;

/// `[X,Y] = D_X Y − D_Y X` by central differences.
pub fn fd_bracket(
    x: &dyn Fn(&[f64]) -> Vec<f64>,
    y: &dyn Fn(&[f64]) -> Vec<f64>,
    p: &[f64],
) -> Vec<f64> {
    let h = 1e-5;
    let dy = fd_directional(y, p, &x(p), h);
    let dx = fd_directional(x, p, &y(p), h);
    dy.iter().zip(dx).map(|(a, b)| a - b).collect()
}

pub fn applied<'a>(j: Endo<'a>, f: &'a dyn Fn(&[f64]) -> Vec<f64>) -> Field<'a> {
    Box::new(move |q: &[f64]| mat_vec(&j(q), &f(q)))
}

fn acc(out: &mut [f64], w: f64, v: &[f64]) {
    for (o, x) in out.iter_mut().zip(v) {
        *o += w * x;
    }
}

pub fn fd_nijenhuis(
    j: Endo<'_>,
    x: &dyn Fn(&[f64]) -> Vec<f64>,
    y: &dyn Fn(&[f64]) -> Vec<f64>,
    p: &[f64],
) -> Vec<f64> {
    let m = j(p);
    let jx = applied(j, x);
    let jy = applied(j, y);
    let mut out = fd_bracket(&jx, &jy, p);
    acc(&mut out, -1.0, &mat_vec(&m, &fd_bracket(&jx, y, p)));
    acc(&mut out, -1.0, &mat_vec(&m, &fd_bracket(x, &jy, p)));
    acc(
        &mut out,
        1.0,
        &mat_vec(&m, &mat_vec(&m, &fd_bracket(x, y, p))),
    );
    out
}

/// Full eight-term Frölicher–Nijenhuis bracket.
pub fn fd_fn_bracket(
    j1: Endo<'_>,
    j2: Endo<'_>,
    x: &dyn Fn(&[f64]) -> Vec<f64>,
    y: &dyn Fn(&[f64]) -> Vec<f64>,
    p: &[f64],
) -> Vec<f64> {
    let (m1, m2) = (j1(p), j2(p));
    let (j1x, j1y) = (applied(j1, x), applied(j1, y));
    let (j2x, j2y) = (applied(j2, x), applied(j2, y));
    let mut out = fd_bracket(&j1x, &j2y, p);
    acc(&mut out, 1.0, &fd_bracket(&j2x, &j1y, p));
    let b = fd_bracket(x, y, p);
    acc(&mut out, 1.0, &mat_vec(&m1, &mat_vec(&m2, &b)));
    acc(&mut out, 1.0, &mat_vec(&m2, &mat_vec(&m1, &b)));
    acc(&mut out, -1.0, &mat_vec(&m1, &fd_bracket(&j2x, y, p)));
    acc(&mut out, -1.0, &mat_vec(&m1, &fd_bracket(x, &j2y, p)));
    acc(&mut out, -1.0, &mat_vec(&m2, &fd_bracket(&j1x, y, p)));
    acc(&mut out, -1.0, &mat_vec(&m2, &fd_bracket(x, &j1y, p)));
    out
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Row-major `VecMat` of an engine matrix.
pub fn to_rows(m: &slant_core::numkit::Mat) -> VecMat {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| m[(r, c)]).collect())
        .collect()
}

fixture!(
    /// Vector field on ℝ⁸.
    FieldA, 8, 8, |x| vec![
        c(x, 1),
        -c(x, 0),
        k(0.0),
        c(x, 4),
        k(0.0),
        k(0.0),
        c(x, 0) * c(x, 2),
        k(1.0),
    ]
);

fixture!(
    /// Vector field on ℝ⁸.
    FieldB, 8, 8, |x| vec![
        c(x, 3).sin(),
        k(0.0),
        c(x, 0) * c(x, 1),
        k(0.0),
        c(x, 5).cos(),
        c(x, 6),
        k(0.0),
        -c(x, 2),
    ]
);

fixture!(
    /// Vector field on ℝ⁸.
    FieldD, 8, 8, |x| vec![
        c(x, 7) * c(x, 7),
        k(1.0),
        k(0.0),
        k(0.0),
        c(x, 1),
        k(0.0),
        c(x, 0).sin(),
        k(0.0),
    ]
);

fixture!(CosX1, 8, 1, |x| vec![c(x, 0).cos()]);

fixture!(SinX1, 8, 1, |x| vec![c(x, 0).sin()]);

fixture!(
    /// Non-constant vector field on ℝ².
    PlaneFieldA, 2, 2, |x| vec![c(x, 1) + 1.0, c(x, 0) * c(x, 1)]
);

fixture!(
    /// Non-constant vector field on ℝ².
    PlaneFieldB, 2, 2, |x| vec![c(x, 0).cos(), c(x, 0) - c(x, 1) * 2.0]
);

/// Seeded uniform points in `[lo, hi]^dim`.
pub fn random_points(seed: u64, count: usize, dim: usize, lo: f64, hi: f64) -> VecMat {
    use rand::{RngExt, SeedableRng};
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..dim).map(|_| rng.random_range(lo..hi)).collect())
        .collect()
}

fixture!(
    /// `(x₁, 0, x₂, 0, x₁², 0, x₂², 0)`; anti-invariant under both structures
    /// of the first example's pair.
    AntiBoth, 2, 8, |x| vec![
        c(x, 0),
        k(0.0),
        c(x, 1),
        k(0.0),
        c(x, 0) * c(x, 0),
        k(0.0),
        c(x, 1) * c(x, 1),
        k(0.0),
    ]
);
