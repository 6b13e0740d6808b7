//! Pointwise slant analysis.
//!
//! A submanifold is pointwise slant at `x` when `CᵀGC = cos²θ·G`, that is when
//! the pencil `(CᵀGC, G)` has a single eigenvalue. The test looks at the
//! eigenvalue spread, and `θ = arccos(√λ̄)` with `λ̄` the eigenvalue mean.

mod family;
mod induced;
mod product;
mod tower;

pub use family::{family_slant_check, family_slant_check_k, FamilyPoint, FamilyReport};
pub use induced::{
    check_proper, induced_structure, induced_structure_in, kahler_condition_check,
    slant_angle_field, tangent_operator_field, GuardPolicy, KahlerResidual,
};
pub use product::{product_check, ProductMode, ProductPart, ProductPoint, ProductReport};
pub use tower::{transitivity_chain_check, transitivity_check, ChainPoint, ChainReport};

use crate::error::{Error, Result};
use crate::immersion::{frame_at, tangential_operator, Immersion, PointFrame};
use crate::numkit::{gen_sym_eig, Mat, Tolerances};
use crate::structures::{MetricSpec, TensorField11};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classification {
    /// Slant with `θ ∈ (0, π/2)`.
    Proper,
    /// Slant with `θ = π/2`.
    AntiInvariant,
    /// `J` preserves the tangent space, `θ = 0`.
    Invariant,
    NotSlant,
}

impl Classification {
    pub fn is_slant(self) -> bool {
        self != Classification::NotSlant
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Proper => "pointwise-slant-proper",
            Classification::AntiInvariant => "anti-invariant",
            Classification::Invariant => "invariant",
            Classification::NotSlant => "not-slant",
        }
    }
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct SlantReport {
    pub param: Vec<f64>,
    /// Pencil eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    pub spread: f64,
    pub mean: f64,
    /// `arccos(√λ̄)`, only when the spread is within tolerance.
    pub theta: Option<f64>,
    pub classification: Classification,
    /// Tangential operator `C`.
    pub operator: Mat,
}

impl SlantReport {
    pub fn cos_theta(&self) -> Option<f64> {
        self.theta.map(|_| clamped_sqrt(self.mean))
    }
}

fn clamped_sqrt(x: f64) -> f64 {
    x.clamp(0.0, 1.0).sqrt()
}

/// Classifies a frame from the pencil spectrum.
pub fn slant_at(fr: &PointFrame, j: &TensorField11, tol: &Tolerances) -> Result<SlantReport> {
    let c = tangential_operator(fr, j)?.c;
    let a = c.transpose().matmul(&fr.gram).matmul(&c);
    let eig = gen_sym_eig(&a, &fr.gram).map_err(|e| match e {
        Error::NotPositiveDefinite { .. } => Error::DegeneratePoint {
            param: fr.param.clone(),
        },
        other => other,
    })?;
    let spread = eig.spread();
    let mean = eig.mean();
    let (theta, classification) = if spread > tol.spectral {
        (None, Classification::NotSlant)
    } else {
        let class = if mean <= tol.spectral {
            Classification::AntiInvariant
        } else if 1.0 - mean <= tol.spectral {
            Classification::Invariant
        } else {
            Classification::Proper
        };
        (Some(clamped_sqrt(mean).acos()), class)
    };
    Ok(SlantReport {
        param: fr.param.clone(),
        eigenvalues: eig.values,
        spread,
        mean,
        theta,
        classification,
        operator: c,
    })
}

/// A grid point left out of an analysis, with the reason.
#[derive(Clone, Debug, PartialEq)]
pub struct Exclusion {
    pub param: Vec<f64>,
    pub reason: String,
}

impl Exclusion {
    pub fn new(param: &[f64], reason: impl Into<String>) -> Self {
        Self {
            param: param.to_vec(),
            reason: reason.into(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SlantScan {
    pub reports: Vec<SlantReport>,
    pub exclusions: Vec<Exclusion>,
}

impl SlantScan {
    /// Smallest and largest `θ` over slant points.
    pub fn theta_range(&self) -> Option<(f64, f64)> {
        let mut thetas = self.reports.iter().filter_map(|r| r.theta);
        let first = thetas.next()?;
        Some(thetas.fold((first, first), |(lo, hi), t| (lo.min(t), hi.max(t))))
    }
}

/// Runs [`slant_at`] over `grid`; failing points are collected as exclusions.
pub fn slant_function_scan(
    f: &Immersion,
    j: &TensorField11,
    g: &MetricSpec,
    grid: &[Vec<f64>],
    tol: &Tolerances,
) -> SlantScan {
    let mut reports = Vec::new();
    let mut exclusions = Vec::new();
    for u in grid {
        match frame_at(f, u, g).and_then(|fr| slant_at(&fr, j, tol)) {
            Ok(r) => reports.push(r),
            Err(e) => exclusions.push(Exclusion::new(u, e.to_string())),
        }
    }
    SlantScan {
        reports,
        exclusions,
    }
}

#[derive(Clone, Debug)]
pub struct CrossTermReport {
    pub param: Vec<f64>,
    /// `S = ½(C₁ᵀGC₂ + C₂ᵀGC₁)`.
    pub form: Mat,
    /// `tr(G⁻¹S)/k`.
    pub scalar: f64,
    /// `‖S − c·G‖`.
    pub residual: f64,
    /// Whether `residual ≤ spectral·‖G‖`.
    pub proportional: bool,
}

pub(crate) fn cross_term_from(
    fr: &PointFrame,
    c1: &Mat,
    c2: &Mat,
    tol: &Tolerances,
) -> Result<CrossTermReport> {
    let g = &fr.gram;
    let k = g.rows();
    let s = c1
        .transpose()
        .matmul(g)
        .matmul(c2)
        .add(&c2.transpose().matmul(g).matmul(c1))
        .scale(&0.5);
    let scalar = crate::numkit::linalg::solve_spd(g, &s)?.trace() / k as f64;
    let residual = s.sub(&g.scale(&scalar)).norm();
    Ok(CrossTermReport {
        param: fr.param.clone(),
        form: s,
        scalar,
        residual,
        proportional: residual <= tol.spectral * g.norm(),
    })
}

/// The symmetric form `ḡ(T₁u, T₂u)` and its proportionality to `G`.
pub fn cross_term(
    fr: &PointFrame,
    j1: &TensorField11,
    j2: &TensorField11,
    tol: &Tolerances,
) -> Result<CrossTermReport> {
    let c1 = tangential_operator(fr, j1)?.c;
    let c2 = tangential_operator(fr, j2)?.c;
    cross_term_from(fr, &c1, &c2, tol)
}
