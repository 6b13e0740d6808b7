//! Slant angle of a family `Σ aᵢJᵢ` compared against the closed form
//! `cos²θ = Σ aᵢ²cos²θᵢ + 2Σ_{i<j} aᵢaⱼ·ḡ(Tᵢu, Tⱼu)`.

use super::{cross_term_from, slant_at, Classification, Exclusion, SlantReport};
use crate::error::{Error, Result};
use crate::immersion::{frame_at, tangential_operator, Immersion};
use crate::numkit::Tolerances;
use crate::structures::{
    build_family, build_family_k, CoefficientFunctions, MetricSpec, TensorField11,
};

#[derive(Clone, Debug)]
pub struct FamilyPoint {
    pub param: Vec<f64>,
    pub coefficients: Vec<f64>,
    /// `cos θᵢ` for each part.
    pub cos_parts: Vec<f64>,
    pub theta_parts: Vec<f64>,
    /// Cross-term scalars `cᵢⱼ` for `i < j`, in lexicographic order.
    pub cross: Vec<f64>,
    /// Largest `‖Sᵢⱼ − cᵢⱼG‖` over pairs with `aᵢaⱼ ≠ 0`.
    pub cross_residual: f64,
    /// Whether every pair with `aᵢaⱼ ≠ 0` has a proportional cross form.
    pub cross_proportional: bool,
    pub direct: SlantReport,
    pub cos_formula: f64,
    /// `|cos θ_direct − cos θ_formula|` when the family is slant here.
    pub cos_diff: Option<f64>,
    /// Direct slantness agrees with proportionality of the cross forms.
    pub biconditional: bool,
    /// `θ` lies outside `[min θᵢ, max θᵢ]` by this much; only computed where
    /// all cross terms vanish.
    pub bound_violation: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct FamilyReport {
    pub points: Vec<FamilyPoint>,
    pub exclusions: Vec<Exclusion>,
    pub max_cos_diff: f64,
    pub biconditional_holds: bool,
    pub max_bound_violation: f64,
}

/// Binary family `a·J₁ + b·J₂`.
pub fn family_slant_check(
    f: &Immersion,
    j1: &TensorField11,
    j2: &TensorField11,
    c: &CoefficientFunctions,
    g: &MetricSpec,
    grid: &[Vec<f64>],
    tol: &Tolerances,
) -> Result<FamilyReport> {
    let images = images(f, grid);
    let family = build_family(j1, j2, c, &images)?;
    run(f, &[j1.clone(), j2.clone()], &family, c, g, grid, tol)
}

/// Family `Σ aᵢJᵢ` of pairwise anti-commuting structures.
pub fn family_slant_check_k(
    f: &Immersion,
    parts: &[TensorField11],
    c: &CoefficientFunctions,
    g: &MetricSpec,
    grid: &[Vec<f64>],
    tol: &Tolerances,
) -> Result<FamilyReport> {
    let images = images(f, grid);
    let family = build_family_k(parts, c, &images)?;
    run(f, parts, &family, c, g, grid, tol)
}

// Points whose image cannot be evaluated are reported as exclusions by `run`.
fn images(f: &Immersion, grid: &[Vec<f64>]) -> Vec<Vec<f64>> {
    grid.iter().filter_map(|u| f.point(u).ok()).collect()
}

fn run(
    f: &Immersion,
    parts: &[TensorField11],
    family: &TensorField11,
    c: &CoefficientFunctions,
    g: &MetricSpec,
    grid: &[Vec<f64>],
    tol: &Tolerances,
) -> Result<FamilyReport> {
    let mut points = Vec::new();
    let mut exclusions = Vec::new();
    for u in grid {
        match point(f, parts, family, c, g, u, tol) {
            Ok(Ok(p)) => points.push(p),
            Ok(Err(reason)) => exclusions.push(Exclusion::new(u, reason)),
            Err(e @ Error::Normalization { .. }) => return Err(e),
            Err(e) => exclusions.push(Exclusion::new(u, e.to_string())),
        }
    }
    let max_cos_diff = points.iter().filter_map(|p| p.cos_diff).fold(0.0, f64::max);
    let max_bound_violation = points
        .iter()
        .filter_map(|p| p.bound_violation)
        .fold(0.0, f64::max);
    Ok(FamilyReport {
        biconditional_holds: points.iter().all(|p| p.biconditional),
        points,
        exclusions,
        max_cos_diff,
        max_bound_violation,
    })
}

fn point(
    f: &Immersion,
    parts: &[TensorField11],
    family: &TensorField11,
    c: &CoefficientFunctions,
    g: &MetricSpec,
    u: &[f64],
    tol: &Tolerances,
) -> Result<std::result::Result<FamilyPoint, String>> {
    let fr = frame_at(f, u, g)?;
    let a = c.values_at(&fr.ambient_point)?;
    let residual = (a.iter().map(|x| x * x).sum::<f64>() - 1.0).abs();
    if residual > crate::structures::NORMALIZATION_TOL {
        return Err(Error::Normalization {
            point: fr.ambient_point.clone(),
            residual,
        });
    }
    let mut cos_parts = Vec::new();
    let mut theta_parts = Vec::new();
    let mut ops = Vec::new();
    for (i, j) in parts.iter().enumerate() {
        let r = slant_at(&fr, j, tol)?;
        let Some(theta) = r.theta else {
            return Ok(Err(format!(
                "part {} not slant (spread {:e})",
                i + 1,
                r.spread
            )));
        };
        cos_parts.push(r.cos_theta().unwrap_or(0.0));
        theta_parts.push(theta);
        ops.push(tangential_operator(&fr, j)?.c);
    }

    let mut cos2 = 0.0;
    for (ai, ci) in a.iter().zip(&cos_parts) {
        cos2 += ai * ai * ci * ci;
    }
    let mut cross = Vec::new();
    let mut cross_residual: f64 = 0.0;
    let mut cross_proportional = true;
    for i in 0..parts.len() {
        for j in (i + 1)..parts.len() {
            let ct = cross_term_from(&fr, &ops[i], &ops[j], tol)?;
            cos2 += 2.0 * a[i] * a[j] * ct.scalar;
            if a[i] * a[j] != 0.0 {
                cross_residual = cross_residual.max(ct.residual);
                cross_proportional &= ct.proportional;
            }
            cross.push(ct.scalar);
        }
    }
    let cos_formula = cos2.clamp(0.0, 1.0).sqrt();

    let direct = slant_at(&fr, family, tol)?;
    let cos_diff = direct.cos_theta().map(|cd| (cd - cos_formula).abs());
    let biconditional = direct.classification.is_slant() == cross_proportional;
    let bound_violation = match direct.theta {
        Some(theta) if cross.iter().all(|x| x.abs() <= tol.spectral) => {
            let lo = theta_parts.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = theta_parts
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            Some((lo - theta).max(theta - hi).max(0.0))
        }
        _ => None,
    };
    debug_assert!(direct.classification != Classification::NotSlant || cos_diff.is_none());
    Ok(Ok(FamilyPoint {
        param: u.to_vec(),
        coefficients: a,
        cos_parts,
        theta_parts,
        cross,
        cross_residual,
        cross_proportional,
        direct,
        cos_formula,
        cos_diff,
        biconditional,
        bound_violation,
    }))
}
