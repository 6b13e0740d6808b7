//! Parametrized immersions `F: ℝᵏ → ℝⁿ`, their frames and induced geometry.
//!
//! Frames are the raw Jacobian columns `E`; all geometry goes through the Gram
//! matrix `G = Eᵀ·g·E`. The ambient metric may vary with the point, which is
//! what lets a submanifold act as the ambient of the next level of a chain.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numkit::linalg::{dot, solve_spd};
use crate::numkit::maps::{eval_checked, jacobian, second_jet, Composition};
use crate::numkit::{Jet1, Jet2, Mat, Real, SharedMap, VectorMap};
use crate::structures::{MetricSpec, TensorField11};

#[derive(Clone)]
pub struct Immersion {
    domain_dim: usize,
    ambient_dim: usize,
    map: SharedMap,
}

impl std::fmt::Debug for Immersion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Immersion")
            .field("domain_dim", &self.domain_dim)
            .field("ambient_dim", &self.ambient_dim)
            .finish_non_exhaustive()
    }
}

impl Immersion {
    pub fn new(map: SharedMap) -> Self {
        Self {
            domain_dim: map.in_dim(),
            ambient_dim: map.out_dim(),
            map,
        }
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn map(&self) -> &SharedMap {
        &self.map
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Immersion) -> Result<Immersion> {
        let c = Composition::new(self.map.clone(), inner.map.clone())?;
        Ok(Immersion::new(Arc::new(c)))
    }

    pub fn point(&self, u: &[f64]) -> Result<Vec<f64>> {
        eval_checked(self.map.as_ref(), u)
    }
}

/// Field of symmetric positive definite Gram matrices on a coordinate space.
#[derive(Clone, Debug)]
pub struct MetricField {
    coeff: TensorField11,
}

impl MetricField {
    pub fn constant(g: &MetricSpec) -> Self {
        Self {
            coeff: TensorField11::constant(g.gram().clone()),
        }
    }

    pub fn from_coefficients(coeff: TensorField11) -> Self {
        Self { coeff }
    }

    /// Metric induced on the parameter space of `f` by `parent`.
    pub fn induced(f: &Immersion, parent: &MetricField) -> Result<Self> {
        check_dim(parent.dim(), f.ambient_dim(), "induced metric")?;
        let k = f.domain_dim();
        let map = InducedMetricMap {
            immersion: f.clone(),
            parent: parent.clone(),
        };
        Ok(Self {
            coeff: TensorField11::new(k, Arc::new(map))?,
        })
    }

    pub fn dim(&self) -> usize {
        self.coeff.dim()
    }

    pub fn at(&self, x: &[f64]) -> Result<Mat> {
        self.coeff.at(x)
    }

    pub fn at_generic<T: Real>(&self, x: &[T]) -> Mat<T> {
        self.coeff.at_generic(x)
    }
}

fn check_dim(expected: usize, found: usize, context: &'static str) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        });
    }
    Ok(())
}

/// Geometry of an immersion at one parameter point.
#[derive(Clone, Debug)]
pub struct PointFrame {
    pub param: Vec<f64>,
    pub ambient_point: Vec<f64>,
    /// `n × k` Jacobian columns.
    pub frame: Mat,
    /// `G = Eᵀ·g·E`.
    pub gram: Mat,
    /// Ambient Gram matrix at `ambient_point`.
    pub ambient_gram: Mat,
}

impl PointFrame {
    pub fn dim(&self) -> usize {
        self.frame.cols()
    }

    /// `‖v‖²_G` for parameter-space coordinates `v`.
    pub fn norm2(&self, v: &[f64]) -> f64 {
        dot(v, &self.gram.mat_vec(v))
    }
}

pub fn frame_at(f: &Immersion, u: &[f64], g: &MetricSpec) -> Result<PointFrame> {
    frame_in(f, u, &MetricField::constant(g))
}

/// Frame of `f` at `u` against a point-dependent ambient metric.
pub fn frame_in(f: &Immersion, u: &[f64], metric: &MetricField) -> Result<PointFrame> {
    check_dim(f.domain_dim(), u.len(), "frame parameter")?;
    check_dim(metric.dim(), f.ambient_dim(), "frame metric")?;
    let ambient_point = f.point(u)?;
    let frame = jacobian(f.map().as_ref(), u)?;
    let ambient_gram = metric.at(&ambient_point)?;
    let gram = frame
        .transpose()
        .matmul(&ambient_gram)
        .matmul(&frame)
        .symmetrized();
    if gram.cholesky().is_err() {
        return Err(Error::DegeneratePoint { param: u.to_vec() });
    }
    Ok(PointFrame {
        param: u.to_vec(),
        ambient_point,
        frame,
        gram,
        ambient_gram,
    })
}

/// `G = Eᵀ·g·E` and `C = G⁻¹·Eᵀ·g·J·E`, generic over the scalar type.
pub fn tangent_geometry<T: Real>(
    e: &Mat<T>,
    ambient_gram: &Mat<T>,
    j: &Mat<T>,
) -> Result<(Mat<T>, Mat<T>)> {
    let et_g = e.transpose().matmul(ambient_gram);
    let gram = et_g.matmul(e).symmetrized();
    let c = solve_spd(&gram, &et_g.matmul(&j.matmul(e)))?;
    Ok((gram, c))
}

/// `tr(G⁻¹·CᵀGC)/k`, the mean of the slant pencil eigenvalues.
pub fn mean_cos2<T: Real>(gram: &Mat<T>, c: &Mat<T>) -> Result<T> {
    let k = gram.rows();
    let a = c.transpose().matmul(gram).matmul(c);
    Ok(solve_spd(gram, &a)?.trace() / k as f64)
}

/// Coordinates `C` of the tangential part of `J` in the frame `E`.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentOperator {
    pub c: Mat,
}

impl TangentOperator {
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.c.mat_vec(v)
    }
}

pub fn tangential_operator(fr: &PointFrame, j: &TensorField11) -> Result<TangentOperator> {
    check_dim(fr.ambient_point.len(), j.dim(), "tangential operator")?;
    let jm = j.at(&fr.ambient_point)?;
    let (_, c) =
        tangent_geometry(&fr.frame, &fr.ambient_gram, &jm).map_err(|_| Error::DegeneratePoint {
            param: fr.param.clone(),
        })?;
    Ok(TangentOperator { c })
}

/// `‖J·E·v‖²_g − (Cv)ᵀ·G·(Cv)`, the squared length of the normal part.
pub fn normal_residual(fr: &PointFrame, j: &TensorField11, v: &[f64]) -> Result<f64> {
    let t = tangential_operator(fr, j)?;
    let jm = j.at(&fr.ambient_point)?;
    let jev = jm.mat_vec(&fr.frame.mat_vec(v));
    let full = dot(&jev, &fr.ambient_gram.mat_vec(&jev));
    Ok(full - fr.norm2(&t.apply(v)))
}

/// Levi-Civita connection of the induced metric via the Gauss formula:
/// `∇_X Y = D_X Y + G⁻¹·Eᵀ·g·D²F(X,Y)` in parameter coordinates, for a
/// constant ambient metric.
pub fn induced_covariant_derivative(
    f: &Immersion,
    u: &[f64],
    xf: &dyn VectorMap,
    yf: &dyn VectorMap,
    g: &MetricSpec,
) -> Result<Vec<f64>> {
    let fr = frame_at(f, u, g)?;
    let xv = eval_checked(xf, u)?;
    let yv = eval_checked(yf, u)?;
    let dxy = crate::numkit::maps::directional_derivative(yf, u, &xv)?;
    let jets = second_jet(f.map().as_ref(), u)?;
    let k = f.domain_dim();
    let hess_xy: Vec<f64> = jets
        .iter()
        .map(|s| {
            let mut acc = 0.0;
            for a in 0..k {
                for b in 0..k {
                    acc += s.second(a, b) * xv[a] * yv[b];
                }
            }
            acc
        })
        .collect();
    let rhs = fr.frame.transpose().mat_vec(&g.gram().mat_vec(&hess_xy));
    let gamma = solve_spd(&fr.gram, &Mat::from_vec(k, 1, rhs))
        .map_err(|_| Error::DegeneratePoint { param: u.to_vec() })?;
    Ok(dxy
        .iter()
        .enumerate()
        .map(|(i, d)| d + gamma[(i, 0)])
        .collect())
}

/// Ambient point and frame of `f` at a jet point, with gradients following
/// the seeds carried by `x`.
pub(crate) fn lifted_frame(f: &Immersion, x: &[Jet1]) -> (Vec<Jet1>, Mat<Jet1>) {
    let u: Vec<f64> = x.iter().map(|j| j.value).collect();
    let s = f.map().eval_jet2(&Jet2::seed(&u));
    let seeds = x.iter().map(|j| j.grad.len()).max().unwrap_or(0);
    let k = u.len();
    let push = |coef: &dyn Fn(usize) -> f64| -> Vec<f64> {
        let mut g = vec![0.0; seeds];
        for (l, xl) in x.iter().enumerate() {
            let w = coef(l);
            if w != 0.0 {
                for (gm, xm) in g.iter_mut().zip(&xl.grad) {
                    *gm += w * xm;
                }
            }
        }
        g
    };
    let point = s
        .iter()
        .map(|si| Jet1 {
            value: si.value,
            grad: push(&|l| si.partial(l)),
        })
        .collect();
    let e = Mat::from_fn(s.len(), k, |i, j| Jet1 {
        value: s[i].partial(j),
        grad: push(&|l| s[i].second(j, l)),
    });
    (point, e)
}

/// Frame data for a scalar type: plain values or first-order jets. Second
/// order would need third derivatives of the immersion, so Hessians are
/// reported as NaN.
pub(crate) trait FrameScalar: Real {
    fn frame(f: &Immersion, x: &[Self]) -> (Vec<Self>, Mat<Self>);
}

impl FrameScalar for f64 {
    fn frame(f: &Immersion, x: &[f64]) -> (Vec<f64>, Mat<f64>) {
        let s = f.map().eval_jet1(&Jet1::seed(x));
        let point = s.iter().map(|j| j.value).collect();
        let e = Mat::from_fn(s.len(), x.len(), |i, j| s[i].partial(j));
        (point, e)
    }
}

impl FrameScalar for Jet1 {
    fn frame(f: &Immersion, x: &[Jet1]) -> (Vec<Jet1>, Mat<Jet1>) {
        lifted_frame(f, x)
    }
}

/// Evaluates a first-order-only field on `Jet2` inputs: value and gradient
/// are exact, the Hessian is NaN.
pub(crate) fn jet2_via_jet1(x: &[Jet2], eval1: impl Fn(&[Jet1]) -> Vec<Jet1>) -> Vec<Jet2> {
    let x1: Vec<Jet1> = x.iter().map(Jet2::first_order).collect();
    let d = x1.iter().map(|j| j.grad.len()).max().unwrap_or(0);
    eval1(&x1)
        .into_iter()
        .map(|j| Jet2 {
            value: j.value,
            grad: j.grad,
            hess: vec![f64::NAN; d * d],
        })
        .collect()
}

struct InducedMetricMap {
    immersion: Immersion,
    parent: MetricField,
}

impl InducedMetricMap {
    fn compute<T: FrameScalar>(&self, x: &[T]) -> Vec<T> {
        let (point, e) = T::frame(&self.immersion, x);
        let g = self.parent.at_generic(&point);
        e.transpose().matmul(&g).matmul(&e).symmetrized().into_vec()
    }
}

impl VectorMap for InducedMetricMap {
    fn in_dim(&self) -> usize {
        self.immersion.domain_dim()
    }
    fn out_dim(&self) -> usize {
        let k = self.immersion.domain_dim();
        k * k
    }
    fn eval(&self, x: &[f64]) -> Vec<f64> {
        self.compute(x)
    }
    fn eval_jet1(&self, x: &[Jet1]) -> Vec<Jet1> {
        self.compute(x)
    }
    fn eval_jet2(&self, x: &[Jet2]) -> Vec<Jet2> {
        jet2_via_jet1(x, |x1| self.compute(x1))
    }
}
