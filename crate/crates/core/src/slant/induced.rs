//! The structure `sec θ·T` induced on a proper pointwise slant submanifold,
//! and the parallelism criterion relating `∇J₂` to `∇T`.

use std::sync::Arc;

use super::{slant_at, Classification};
use crate::error::{Error, Result};
use crate::immersion::{
    frame_at, frame_in, induced_covariant_derivative, jet2_via_jet1, mean_cos2, tangent_geometry,
    FrameScalar, Immersion, MetricField,
};
use crate::numkit::linalg::dot;
use crate::numkit::maps::{directional_derivative, eval_checked};
use crate::numkit::{Jet1, Jet2, Mat, SharedMap, Tolerances, VectorMap};
use crate::structures::{AppliedField, MetricSpec, TensorField11};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Output {
    Tangent,
    Induced,
    Angle,
}

/// Parameter-space fields derived from the tangential operator.
struct SlantFieldMap {
    immersion: Immersion,
    metric: MetricField,
    structure: TensorField11,
    output: Output,
    cos_floor: f64,
}

impl SlantFieldMap {
    fn compute<T: FrameScalar>(&self, x: &[T]) -> Vec<T> {
        let k = self.immersion.domain_dim();
        let nan = || vec![T::constant(f64::NAN); self.out_dim()];
        let (point, e) = T::frame(&self.immersion, x);
        let g = self.metric.at_generic(&point);
        let j = self.structure.at_generic(&point);
        let Ok((gram, c)) = tangent_geometry(&e, &g, &j) else {
            return nan();
        };
        if self.output == Output::Tangent {
            return c.into_vec();
        }
        let Ok(cos2) = mean_cos2(&gram, &c) else {
            return nan();
        };
        match self.output {
            Output::Induced => {
                if cos2.value().max(0.0).sqrt() < self.cos_floor {
                    return nan();
                }
                c.scale(&cos2.sqrt().recip()).into_vec()
            }
            _ => {
                debug_assert_eq!(k, gram.rows());
                vec![cos2.sqrt().acos()]
            }
        }
    }
}

impl VectorMap for SlantFieldMap {
    fn in_dim(&self) -> usize {
        self.immersion.domain_dim()
    }
    fn out_dim(&self) -> usize {
        let k = self.immersion.domain_dim();
        match self.output {
            Output::Angle => 1,
            _ => k * k,
        }
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

fn field_map(
    f: &Immersion,
    j: &TensorField11,
    metric: &MetricField,
    output: Output,
    cos_floor: f64,
) -> Result<SlantFieldMap> {
    for (expected, found) in [(f.ambient_dim(), j.dim()), (f.ambient_dim(), metric.dim())] {
        if expected != found {
            return Err(Error::DimensionMismatch {
                context: "induced field",
                expected,
                found,
            });
        }
    }
    Ok(SlantFieldMap {
        immersion: f.clone(),
        metric: metric.clone(),
        structure: j.clone(),
        output,
        cos_floor,
    })
}

/// `u ↦ sec θ(u)·C(u)` on the parameter space. Evaluates to NaN where
/// `cos θ` falls below the spectral tolerance; use [`check_proper`] to get a
/// named error instead.
pub fn induced_structure(
    f: &Immersion,
    j: &TensorField11,
    g: &MetricSpec,
    tol: &Tolerances,
) -> Result<TensorField11> {
    induced_structure_in(f, j, &MetricField::constant(g), tol)
}

pub fn induced_structure_in(
    f: &Immersion,
    j: &TensorField11,
    metric: &MetricField,
    tol: &Tolerances,
) -> Result<TensorField11> {
    let map = field_map(f, j, metric, Output::Induced, tol.spectral)?;
    TensorField11::new(f.domain_dim(), Arc::new(map))
}

/// `u ↦ C(u)`.
pub fn tangent_operator_field(
    f: &Immersion,
    j: &TensorField11,
    metric: &MetricField,
) -> Result<TensorField11> {
    let map = field_map(f, j, metric, Output::Tangent, 0.0)?;
    TensorField11::new(f.domain_dim(), Arc::new(map))
}

/// `u ↦ θ(u)` computed from the eigenvalue mean; meaningful at slant points.
pub fn slant_angle_field(
    f: &Immersion,
    j: &TensorField11,
    metric: &MetricField,
) -> Result<SharedMap> {
    Ok(Arc::new(field_map(f, j, metric, Output::Angle, 0.0)?))
}

/// Which slant points may carry an induced structure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GuardPolicy {
    /// `θ ∈ [0, π/2)`: invariant points get `J₂ = C`.
    AllowInvariant,
    /// `θ ∈ (0, π/2)` only.
    Proper,
}

/// Fails with a named error unless the submanifold is slant at `u` with an
/// angle the policy accepts. Returns `cos θ`.
pub fn check_proper(
    f: &Immersion,
    j: &TensorField11,
    metric: &MetricField,
    u: &[f64],
    policy: GuardPolicy,
    tol: &Tolerances,
) -> Result<f64> {
    let fr = frame_in(f, u, metric)?;
    let r = slant_at(&fr, j, tol)?;
    let undefined = |reason: String| Error::UndefinedStructure {
        param: u.to_vec(),
        reason,
    };
    match r.classification {
        Classification::NotSlant => Err(undefined(format!(
            "not slant (eigenvalue spread {:e})",
            r.spread
        ))),
        Classification::AntiInvariant => Err(undefined("slant angle is π/2".into())),
        Classification::Invariant if policy == GuardPolicy::Proper => {
            Err(undefined("slant angle is 0 (invariant point)".into()))
        }
        _ => {
            let cos = r.cos_theta().unwrap_or(0.0);
            if cos < tol.spectral {
                Err(undefined("slant angle is π/2".into()))
            } else {
                Ok(cos)
            }
        }
    }
}

/// Residuals of the parallelism criterion at `u` along `X`, `Y`:
/// `r₁ = ‖(∇_X J₂)Y‖` and `r₂ = ‖(∇_X T)Y + tan θ·X(θ)·TY‖`, both in the
/// induced metric.
#[derive(Clone, Debug, PartialEq)]
pub struct KahlerResidual {
    pub r1: f64,
    pub r2: f64,
    pub theta: f64,
    /// `X(θ)`.
    pub x_theta: f64,
}

fn nabla_tensor(
    f: &Immersion,
    a: &TensorField11,
    u: &[f64],
    xf: &SharedMap,
    yf: &SharedMap,
    g: &MetricSpec,
) -> Result<Vec<f64>> {
    let ay: SharedMap = Arc::new(AppliedField::new(a.clone(), yf.clone()));
    let first = induced_covariant_derivative(f, u, xf.as_ref(), ay.as_ref(), g)?;
    let second = induced_covariant_derivative(f, u, xf.as_ref(), yf.as_ref(), g)?;
    let m = a.at(u)?;
    Ok(first
        .iter()
        .zip(m.mat_vec(&second))
        .map(|(p, q)| p - q)
        .collect())
}

fn g_norm(gram: &Mat, v: &[f64]) -> f64 {
    dot(v, &gram.mat_vec(v)).max(0.0).sqrt()
}

pub fn kahler_condition_check(
    f: &Immersion,
    j: &TensorField11,
    g: &MetricSpec,
    u: &[f64],
    xf: &SharedMap,
    yf: &SharedMap,
    tol: &Tolerances,
) -> Result<KahlerResidual> {
    let metric = MetricField::constant(g);
    let cos = check_proper(f, j, &metric, u, GuardPolicy::Proper, tol)?;
    let j2 = induced_structure(f, j, g, tol)?;
    let t = tangent_operator_field(f, j, &metric)?;
    let angle = slant_angle_field(f, j, &metric)?;
    let fr = frame_at(f, u, g)?;

    let theta = cos.acos();
    let xv = eval_checked(xf.as_ref(), u)?;
    let x_theta = directional_derivative(angle.as_ref(), u, &xv)?[0];

    let r1_vec = nabla_tensor(f, &j2, u, xf, yf, g)?;
    let nabla_t = nabla_tensor(f, &t, u, xf, yf, g)?;
    let ty = t.at(u)?.mat_vec(&eval_checked(yf.as_ref(), u)?);
    let w = theta.tan() * x_theta;
    let r2_vec: Vec<f64> = nabla_t.iter().zip(&ty).map(|(a, b)| a + w * b).collect();
    Ok(KahlerResidual {
        r1: g_norm(&fr.gram, &r1_vec),
        r2: g_norm(&fr.gram, &r2_vec),
        theta,
        x_theta,
    })
}
