//! Products of submanifolds in the direct sum of their ambients.

use std::sync::Arc;

use super::{slant_at, Classification, Exclusion, SlantReport};
use crate::error::{Error, Result};
use crate::immersion::{frame_at, Immersion};
use crate::numkit::maps::BlockDiagonalMap;
use crate::numkit::{MapFn, Mat, Real, SharedMap, Tolerances};
use crate::structures::{MetricSpec, TensorField11};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProductMode {
    /// Every factor lives in the same ambient.
    SameAmbient,
    DistinctAmbients,
}

#[derive(Clone, Debug)]
pub struct ProductPart {
    pub immersion: Immersion,
    pub structure: TensorField11,
    pub metric: MetricSpec,
}

#[derive(Clone, Debug)]
pub struct ProductPoint {
    pub param: Vec<f64>,
    /// Per-factor angle, `None` where the factor is not slant.
    pub factor_thetas: Vec<Option<f64>>,
    pub product: SlantReport,
    /// All factors slant with `cos²θᵢ` equal within the spectral tolerance.
    pub equal_angles: bool,
    /// `product slant ⟺ equal_angles` holds here.
    pub consistent: bool,
}

#[derive(Clone, Debug)]
pub struct ProductReport {
    pub points: Vec<ProductPoint>,
    pub exclusions: Vec<Exclusion>,
    /// Pointwise biconditional at every point.
    pub consistent: bool,
    /// Every factor angle is the same constant over the grid.
    pub constant_and_equal: bool,
    /// The product is slant at every grid point.
    pub product_slant_everywhere: bool,
}

/// Block-diagonal structure `J̃(x₁,…,x_k) = diag(J₁(x₁),…,J_k(x_k))`.
struct BlockStructure {
    parts: Vec<TensorField11>,
}

impl MapFn for BlockStructure {
    fn dim_in(&self) -> usize {
        self.parts.iter().map(TensorField11::dim).sum()
    }
    fn dim_out(&self) -> usize {
        let n = self.dim_in();
        n * n
    }
    fn call<T: Real>(&self, x: &[T]) -> Vec<T> {
        let n = self.dim_in();
        let mut m = Mat::<T>::zeros(n, n);
        let mut offset = 0;
        for p in &self.parts {
            let d = p.dim();
            let block = p.at_generic(&x[offset..offset + d]);
            for r in 0..d {
                for c in 0..d {
                    m[(offset + r, offset + c)] = block[(r, c)].clone();
                }
            }
            offset += d;
        }
        m.into_vec()
    }
}

fn block_metric(parts: &[ProductPart]) -> Result<MetricSpec> {
    let n: usize = parts.iter().map(|p| p.metric.dim()).sum();
    let mut gram = Mat::zeros(n, n);
    let mut offset = 0;
    for p in parts {
        let d = p.metric.dim();
        for r in 0..d {
            for c in 0..d {
                gram[(offset + r, offset + c)] = p.metric.gram()[(r, c)];
            }
        }
        offset += d;
    }
    MetricSpec::new(gram)
}

fn validate(parts: &[ProductPart], mode: ProductMode) -> Result<()> {
    let Some(first) = parts.first() else {
        return Err(Error::Invalid("product needs at least one factor".into()));
    };
    for p in parts {
        for (expected, found, context) in [
            (
                p.immersion.ambient_dim(),
                p.structure.dim(),
                "product factor structure",
            ),
            (
                p.immersion.ambient_dim(),
                p.metric.dim(),
                "product factor metric",
            ),
        ] {
            if expected != found {
                return Err(Error::DimensionMismatch {
                    context,
                    expected,
                    found,
                });
            }
        }
        if mode == ProductMode::SameAmbient && p.metric != first.metric {
            return Err(Error::Invalid(
                "same-ambient product factors have different metrics".into(),
            ));
        }
    }
    Ok(())
}

/// Scans the product immersion over `grid` (points of the concatenated
/// parameter space) and checks that the product is slant exactly where all
/// factor angles agree.
pub fn product_check(
    parts: &[ProductPart],
    mode: ProductMode,
    grid: &[Vec<f64>],
    tol: &Tolerances,
) -> Result<ProductReport> {
    validate(parts, mode)?;
    let maps: Vec<SharedMap> = parts.iter().map(|p| p.immersion.map().clone()).collect();
    let product = Immersion::new(Arc::new(BlockDiagonalMap::new(maps)));
    let structure = TensorField11::new(
        product.ambient_dim(),
        Arc::new(BlockStructure {
            parts: parts.iter().map(|p| p.structure.clone()).collect(),
        }),
    )?;
    let metric = block_metric(parts)?;

    let mut points = Vec::new();
    let mut exclusions = Vec::new();
    for u in grid {
        match product_point(parts, &product, &structure, &metric, u, tol) {
            Ok(p) => points.push(p),
            Err(e) => exclusions.push(Exclusion::new(u, e.to_string())),
        }
    }

    let mut factor_values: Vec<f64> = Vec::new();
    let mut all_slant = true;
    for p in &points {
        for t in &p.factor_thetas {
            match t {
                Some(t) => factor_values.push(t.cos().powi(2)),
                None => all_slant = false,
            }
        }
    }
    let lo = factor_values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = factor_values
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(ProductReport {
        consistent: points.iter().all(|p| p.consistent),
        constant_and_equal: all_slant && !factor_values.is_empty() && hi - lo <= tol.spectral,
        product_slant_everywhere: points.iter().all(|p| p.product.classification.is_slant()),
        points,
        exclusions,
    })
}

fn product_point(
    parts: &[ProductPart],
    product: &Immersion,
    structure: &TensorField11,
    metric: &MetricSpec,
    u: &[f64],
    tol: &Tolerances,
) -> Result<ProductPoint> {
    if u.len() != product.domain_dim() {
        return Err(Error::DimensionMismatch {
            context: "product grid point",
            expected: product.domain_dim(),
            found: u.len(),
        });
    }
    let mut factor_thetas = Vec::new();
    let mut cos2 = Vec::new();
    let mut offset = 0;
    for p in parts {
        let k = p.immersion.domain_dim();
        let fr = frame_at(&p.immersion, &u[offset..offset + k], &p.metric)?;
        let r = slant_at(&fr, &p.structure, tol)?;
        factor_thetas.push(r.theta);
        if r.theta.is_some() {
            cos2.push(r.mean);
        }
        offset += k;
    }
    let fr = frame_at(product, u, metric)?;
    let product = slant_at(&fr, structure, tol)?;
    let lo = cos2.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = cos2.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let equal_angles = cos2.len() == parts.len() && hi - lo <= tol.spectral;
    let consistent = (product.classification != Classification::NotSlant) == equal_angles;
    Ok(ProductPoint {
        param: u.to_vec(),
        factor_thetas,
        product,
        equal_angles,
        consistent,
    })
}
