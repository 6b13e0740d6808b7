//! Chains `M_k ⊂ … ⊂ M₁ ⊂ M̄`. Each level carries the metric and the
//! structure `sec θ·T` induced from the level above; the angle of the whole
//! chain in `M̄` is compared with the product of the stage cosines.

use super::induced::{check_proper, induced_structure_in, GuardPolicy};
use super::{slant_at, Exclusion};
use crate::error::{Error, Result};
use crate::immersion::{frame_at, frame_in, Immersion, MetricField};
use crate::numkit::Tolerances;
use crate::structures::{MetricSpec, TensorField11};

#[derive(Clone, Debug)]
pub struct ChainPoint {
    pub param: Vec<f64>,
    /// `θᵢ` of stage `i` in the level above it.
    pub thetas: Vec<f64>,
    pub cos_thetas: Vec<f64>,
    pub cos_product: f64,
    /// Angle of the composite immersion in the ambient.
    pub theta_tilde: f64,
    pub cos_theta_tilde: f64,
    /// `|cos θ̃ − Π cos θᵢ|`.
    pub identity_residual: f64,
    /// `max(0, max θᵢ − θ̃)`.
    pub bound_violation: f64,
    pub classifications: Vec<super::Classification>,
    pub composite_classification: super::Classification,
}

#[derive(Clone, Debug)]
pub struct ChainReport {
    pub points: Vec<ChainPoint>,
    pub exclusions: Vec<Exclusion>,
    pub max_identity_residual: f64,
    pub max_bound_violation: f64,
}

impl ChainReport {
    /// The first hypothesis violation as an error naming the point.
    pub fn hypothesis_error(&self) -> Option<Error> {
        self.exclusions.first().map(|e| Error::UndefinedStructure {
            param: e.param.clone(),
            reason: e.reason.clone(),
        })
    }
}

struct Level {
    immersion: Immersion,
    metric: MetricField,
    structure: TensorField11,
}

/// Two-stage chain `F₁ ∘ F₂`.
pub fn transitivity_check(
    f1: &Immersion,
    f2: &Immersion,
    j1: &TensorField11,
    g: &MetricSpec,
    grid: &[Vec<f64>],
    tol: &Tolerances,
) -> Result<ChainReport> {
    transitivity_chain_check(&[f1.clone(), f2.clone()], j1, g, grid, tol)
}

/// `fs[0]: ℝ^{k₁} → ℝⁿ`, `fs[i]: ℝ^{k_{i+1}} → ℝ^{kᵢ}`; the grid lives in the
/// domain of the last immersion.
pub fn transitivity_chain_check(
    fs: &[Immersion],
    j1: &TensorField11,
    g: &MetricSpec,
    grid: &[Vec<f64>],
    tol: &Tolerances,
) -> Result<ChainReport> {
    let Some(first) = fs.first() else {
        return Err(Error::Invalid("empty immersion chain".into()));
    };
    let mut levels = vec![Level {
        immersion: first.clone(),
        metric: MetricField::constant(g),
        structure: j1.clone(),
    }];
    let mut composite = first.clone();
    for f in &fs[1..] {
        let above = levels.last().expect("non-empty");
        let metric = MetricField::induced(&above.immersion, &above.metric)?;
        let structure =
            induced_structure_in(&above.immersion, &above.structure, &above.metric, tol)?;
        composite = composite.compose(f)?;
        levels.push(Level {
            immersion: f.clone(),
            metric,
            structure,
        });
    }

    let mut points = Vec::new();
    let mut exclusions = Vec::new();
    for u in grid {
        match chain_point(&levels, &composite, j1, g, u, tol) {
            Ok(Ok(p)) => points.push(p),
            Ok(Err(reason)) => exclusions.push(Exclusion::new(u, reason)),
            Err(e) => exclusions.push(Exclusion::new(u, e.to_string())),
        }
    }
    Ok(ChainReport {
        max_identity_residual: points
            .iter()
            .map(|p| p.identity_residual)
            .fold(0.0, f64::max),
        max_bound_violation: points.iter().map(|p| p.bound_violation).fold(0.0, f64::max),
        points,
        exclusions,
    })
}

fn chain_point(
    levels: &[Level],
    composite: &Immersion,
    j1: &TensorField11,
    g: &MetricSpec,
    u: &[f64],
    tol: &Tolerances,
) -> Result<std::result::Result<ChainPoint, String>> {
    // Parameter point of each stage, innermost last.
    let mut stage_params = vec![u.to_vec()];
    for level in levels[1..].iter().rev() {
        let inner = stage_params.last().expect("non-empty");
        stage_params.push(level.immersion.point(inner)?);
    }
    stage_params.reverse();

    let mut thetas = Vec::new();
    let mut cos_thetas = Vec::new();
    let mut classifications = Vec::new();
    for (i, (level, p)) in levels.iter().zip(&stage_params).enumerate() {
        if i + 1 < levels.len() {
            if let Err(e) = check_proper(
                &level.immersion,
                &level.structure,
                &level.metric,
                p,
                GuardPolicy::Proper,
                tol,
            ) {
                return Ok(Err(format!("stage {} not proper slant: {e}", i + 1)));
            }
        }
        let fr = frame_in(&level.immersion, p, &level.metric)?;
        let r = slant_at(&fr, &level.structure, tol)?;
        let Some(theta) = r.theta else {
            return Ok(Err(format!(
                "stage {} not slant (spread {:e})",
                i + 1,
                r.spread
            )));
        };
        thetas.push(theta);
        cos_thetas.push(r.cos_theta().unwrap_or(0.0));
        classifications.push(r.classification);
    }

    let fr = frame_at(composite, u, g)?;
    let r = slant_at(&fr, j1, tol)?;
    let (Some(theta_tilde), Some(cos_tilde)) = (r.theta, r.cos_theta()) else {
        return Ok(Err(format!("composite not slant (spread {:e})", r.spread)));
    };
    let cos_product: f64 = cos_thetas.iter().product();
    let max_theta = thetas.iter().copied().fold(0.0, f64::max);
    Ok(Ok(ChainPoint {
        param: u.to_vec(),
        identity_residual: (cos_tilde - cos_product).abs(),
        bound_violation: (max_theta - theta_tilde).max(0.0),
        thetas,
        cos_thetas,
        cos_product,
        theta_tilde,
        cos_theta_tilde: cos_tilde,
        classifications,
        composite_classification: r.classification,
    }))
}
