//! Scenario files.
//!
//! A scenario is a TOML document whose first line is the version header
//! `# slant-scenario v1`. See `docs/scenario-format.md` for the full format.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use serde::Deserialize;
use slant_core::immersion::Immersion;
use slant_core::numkit::{Mat, SharedMap, Tolerances};
use slant_core::structures::presets::{example1_matrices, standard_complex, RotatedStructure};
use slant_core::structures::{CoefficientFunctions, MetricSpec, TensorField11, NORMALIZATION_TOL};

use crate::expr::{parse_expr_in, Expr, ExprMap};

pub const HEADER: &str = "# slant-scenario v1";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("missing or unsupported header: the first line must be '{HEADER}'")]
    Header,
    #[error("{0}")]
    Syntax(String),
    #[error("invalid value for '{key}': {message}")]
    Invalid { key: String, message: String },
}

fn invalid(key: impl Into<String>, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        key: key.into(),
        message: message.into(),
    }
}

// ------------------------------------------------------------------ raw form

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    #[serde(default)]
    description: String,
    ambient_dim: usize,
    metric: Option<Vec<Vec<f64>>>,
    tolerances: Option<RawTolerances>,
    #[serde(default)]
    structures: BTreeMap<String, RawStructure>,
    #[serde(default)]
    coefficients: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    immersions: BTreeMap<String, RawImmersion>,
    #[serde(default)]
    chains: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    grids: BTreeMap<String, RawGrid>,
    #[serde(default)]
    fields: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    checks: Vec<RawCheck>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    structural: Option<f64>,
    spectral: Option<f64>,
    finite_difference: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStructure {
    preset: Option<String>,
    dim: Option<usize>,
    matrix: Option<Vec<Vec<f64>>>,
    /// Constant structures to multiply, left to right.
    product: Option<Vec<String>>,
    conjugate: Option<RawConjugate>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConjugate {
    base: String,
    /// One-based coordinate indices of the rotation plane.
    plane: [usize; 2],
    /// One-based coordinate whose value drives the rotation angle.
    axis: usize,
    rate: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawImmersion {
    domain_dim: usize,
    components: Vec<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    min: Option<Vec<f64>>,
    max: Option<Vec<f64>>,
    steps: Option<Vec<usize>>,
    points: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    SlantScan,
    CrossTerm,
    Family,
    InducedStructure,
    Transitivity,
    Pairing,
    Product,
    Parallelism,
    AlmostHermitian,
    Anticommute,
    NijenhuisDecomposition,
}

impl CheckKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CheckKind::SlantScan => "slant-scan",
            CheckKind::CrossTerm => "cross-term",
            CheckKind::Family => "family",
            CheckKind::InducedStructure => "induced-structure",
            CheckKind::Transitivity => "transitivity",
            CheckKind::Pairing => "pairing",
            CheckKind::Product => "product",
            CheckKind::Parallelism => "parallelism",
            CheckKind::AlmostHermitian => "almost-hermitian",
            CheckKind::Anticommute => "anticommute",
            CheckKind::NijenhuisDecomposition => "nijenhuis-decomposition",
        }
    }

    /// Checks on ambient structures alone, run by `check-structure`.
    pub fn is_structural(self) -> bool {
        matches!(
            self,
            CheckKind::AlmostHermitian | CheckKind::Anticommute | CheckKind::NijenhuisDecomposition
        )
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawPart {
    pub immersion: String,
    pub structure: String,
    pub metric: Option<Vec<Vec<f64>>>,
}

/// A check as written in the file. Expressions are kept as text here and
/// parsed into [`Check::exprs`].
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCheck {
    pub name: String,
    pub kind: CheckKind,
    pub tolerance: Option<f64>,
    pub immersion: Option<String>,
    pub structure: Option<String>,
    pub structures: Option<Vec<String>>,
    pub coefficients: Option<String>,
    pub chain: Option<String>,
    pub grid: Option<String>,
    pub fields: Option<Vec<[String; 2]>>,
    pub parts: Option<Vec<RawPart>>,
    pub mode: Option<String>,
    pub expect_cos: Option<String>,
    pub expect_scalar: Option<String>,
    pub expect_cos_parts: Option<Vec<String>>,
    pub expect_cos_tilde: Option<String>,
    pub expect_matrix: Option<Vec<Vec<String>>>,
    pub expect_class: Option<String>,
    pub expect_classes: Option<Vec<String>>,
    pub expect_composite_class: Option<String>,
    pub expect_slant: Option<bool>,
    pub expect_parallel: Option<bool>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    #[serde(default)]
    pub allow_exclusions: bool,
}

// ------------------------------------------------------------ validated form

#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Axis {
    fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.min];
        }
        let h = (self.max - self.min) / (self.steps - 1) as f64;
        (0..self.steps).map(|i| self.min + h * i as f64).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Grid {
    /// Rectangular lattice; the first axis varies slowest.
    Lattice(Vec<Axis>),
    Points(Vec<Vec<f64>>),
}

impl Grid {
    pub fn dim(&self) -> usize {
        match self {
            Grid::Lattice(axes) => axes.len(),
            Grid::Points(p) => p[0].len(),
        }
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        match self {
            Grid::Points(p) => p.clone(),
            Grid::Lattice(axes) => {
                let mut out = vec![Vec::new()];
                for axis in axes {
                    let vals = axis.values();
                    out = out
                        .into_iter()
                        .flat_map(|prefix| {
                            vals.iter().map(move |v| {
                                let mut p = prefix.clone();
                                p.push(*v);
                                p
                            })
                        })
                        .collect();
                }
                out
            }
        }
    }
}

#[derive(Clone)]
pub struct NamedImmersion {
    pub immersion: Immersion,
    pub components: Vec<Expr>,
}

#[derive(Clone)]
pub struct CoefficientSet {
    pub exprs: Vec<Expr>,
    pub functions: CoefficientFunctions,
}

#[derive(Clone)]
pub struct Check {
    pub raw: RawCheck,
    /// Parsed expectation expressions keyed by field name; list entries use
    /// `field[i]` and matrix entries `field[r][c]`.
    pub exprs: BTreeMap<String, Expr>,
}

impl Check {
    pub fn expr(&self, key: &str) -> Option<&Expr> {
        self.exprs.get(key)
    }
}

#[derive(Clone)]
pub struct ScenarioConfig {
    pub name: String,
    pub description: String,
    pub ambient_dim: usize,
    pub metric: MetricSpec,
    pub tolerances: Tolerances,
    pub structures: BTreeMap<String, TensorField11>,
    pub constant_structures: BTreeMap<String, Mat>,
    pub coefficients: BTreeMap<String, CoefficientSet>,
    pub immersions: BTreeMap<String, NamedImmersion>,
    pub chains: BTreeMap<String, Vec<String>>,
    pub grids: BTreeMap<String, Grid>,
    pub fields: BTreeMap<String, SharedMap>,
    pub checks: Vec<Check>,
}

fn square(rows: &[Vec<f64>], key: &str) -> Result<Mat, ConfigError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(invalid(key, "expected a non-empty square array"));
    }
    Ok(Mat::from_vec(n, n, rows.concat()))
}

fn metric_from(rows: &[Vec<f64>], key: &str) -> Result<MetricSpec, ConfigError> {
    MetricSpec::new(square(rows, key)?).map_err(|e| invalid(key, e.to_string()))
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<ScenarioConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_scenario(&text)
}

/// Parses and validates scenario text.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig, ConfigError> {
    if text.lines().next().map(str::trim_end) != Some(HEADER) {
        return Err(ConfigError::Header);
    }
    let raw: RawScenario = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    validate(raw)
}

fn validate(raw: RawScenario) -> Result<ScenarioConfig, ConfigError> {
    let n = raw.ambient_dim;
    if n == 0 {
        return Err(invalid("ambient_dim", "must be positive"));
    }
    let metric = match &raw.metric {
        Some(rows) => metric_from(rows, "metric")?,
        None => MetricSpec::euclidean(n),
    };
    if metric.dim() != n {
        return Err(invalid(
            "metric",
            format!("dimension {} differs from ambient_dim {n}", metric.dim()),
        ));
    }

    let mut tolerances = Tolerances::default();
    if let Some(t) = &raw.tolerances {
        for (key, slot, value) in [
            (
                "tolerances.structural",
                &mut tolerances.structural,
                t.structural,
            ),
            ("tolerances.spectral", &mut tolerances.spectral, t.spectral),
            (
                "tolerances.finite_difference",
                &mut tolerances.finite_difference,
                t.finite_difference,
            ),
        ] {
            if let Some(v) = value {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(invalid(key, "must be a positive number"));
                }
                *slot = v;
            }
        }
    }

    let (structures, constant_structures) = build_structures(&raw.structures, n)?;

    let mut immersions = BTreeMap::new();
    for (name, im) in &raw.immersions {
        let key = format!("immersions.{name}");
        if im.domain_dim == 0 || im.components.is_empty() {
            return Err(invalid(key, "needs a positive domain_dim and components"));
        }
        let components = im
            .components
            .iter()
            .enumerate()
            .map(|(i, s)| {
                parse_expr_in(s, im.domain_dim)
                    .map_err(|e| invalid(format!("{key}.components[{i}]"), e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let map = ExprMap::new(im.domain_dim, components.clone());
        immersions.insert(
            name.clone(),
            NamedImmersion {
                immersion: Immersion::new(Arc::new(map)),
                components,
            },
        );
    }

    let mut coefficients = BTreeMap::new();
    for (name, list) in &raw.coefficients {
        let key = format!("coefficients.{name}");
        if list.is_empty() {
            return Err(invalid(key, "empty coefficient list"));
        }
        let exprs = list
            .iter()
            .enumerate()
            .map(|(i, s)| {
                parse_expr_in(s, n).map_err(|e| invalid(format!("{key}[{i}]"), e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        // Constant sets are checked here; the rest at the points they are used.
        if exprs.iter().all(|e| e.arity() == 0) {
            let residual = (exprs
                .iter()
                .map(|e| e.eval::<f64>(&[]).powi(2))
                .sum::<f64>()
                - 1.0)
                .abs();
            if !(residual <= NORMALIZATION_TOL) {
                return Err(invalid(
                    key,
                    format!("coefficients violate Σaᵢ² = 1 (residual {residual:e})"),
                ));
            }
        }
        let funcs = exprs
            .iter()
            .map(|e| Arc::new(ExprMap::new(n, vec![e.clone()])) as SharedMap)
            .collect();
        coefficients.insert(
            name.clone(),
            CoefficientSet {
                exprs,
                functions: CoefficientFunctions::new(funcs)
                    .map_err(|e| invalid(&key, e.to_string()))?,
            },
        );
    }

    let mut chains = BTreeMap::new();
    for (name, list) in &raw.chains {
        let key = format!("chains.{name}");
        if list.is_empty() {
            return Err(invalid(key, "empty chain"));
        }
        for (i, im) in list.iter().enumerate() {
            let Some(found) = immersions.get(im) else {
                return Err(invalid(
                    format!("{key}[{i}]"),
                    format!("undefined immersion '{im}'"),
                ));
            };
            let expected = if i == 0 {
                n
            } else {
                immersions[&list[i - 1]].immersion.domain_dim()
            };
            if found.immersion.ambient_dim() != expected {
                return Err(invalid(
                    format!("{key}[{i}]"),
                    format!(
                        "immersion '{im}' has {} components, expected {expected}",
                        found.immersion.ambient_dim()
                    ),
                ));
            }
        }
        chains.insert(name.clone(), list.clone());
    }

    let mut grids = BTreeMap::new();
    for (name, g) in &raw.grids {
        grids.insert(name.clone(), build_grid(g, &format!("grids.{name}"))?);
    }

    let mut fields = BTreeMap::new();
    for (name, comps) in &raw.fields {
        let key = format!("fields.{name}");
        let d = comps.len();
        if d == 0 {
            return Err(invalid(key, "empty vector field"));
        }
        let exprs = comps
            .iter()
            .enumerate()
            .map(|(i, s)| {
                parse_expr_in(s, d).map_err(|e| invalid(format!("{key}[{i}]"), e.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        fields.insert(name.clone(), Arc::new(ExprMap::new(d, exprs)) as SharedMap);
    }

    let mut cfg = ScenarioConfig {
        name: raw.name.clone(),
        description: raw.description.clone(),
        ambient_dim: n,
        metric,
        tolerances,
        structures,
        constant_structures,
        coefficients,
        immersions,
        chains,
        grids,
        fields,
        checks: Vec::new(),
    };
    let mut seen = std::collections::BTreeSet::new();
    for (i, c) in raw.checks.iter().enumerate() {
        let key = format!("checks[{i}]");
        if !seen.insert(c.name.clone()) {
            return Err(invalid(
                format!("{key}.name"),
                format!("duplicate check name '{}'", c.name),
            ));
        }
        let check = validate_check(&cfg, c, &key)?;
        cfg.checks.push(check);
    }
    Ok(cfg)
}

fn build_structures(
    raw: &BTreeMap<String, RawStructure>,
    n: usize,
) -> Result<(BTreeMap<String, TensorField11>, BTreeMap<String, Mat>), ConfigError> {
    let mut fields = BTreeMap::new();
    let mut constants: BTreeMap<String, Mat> = BTreeMap::new();
    // Definitions may refer to each other; resolve in dependency order.
    let mut pending: Vec<&String> = raw.keys().collect();
    while !pending.is_empty() {
        let before = pending.len();
        let mut still = Vec::new();
        for name in pending {
            let s = &raw[name];
            let key = format!("structures.{name}");
            let deps: Vec<&String> = s
                .product
                .iter()
                .flatten()
                .chain(s.conjugate.as_ref().map(|c| &c.base))
                .collect();
            for d in &deps {
                if !raw.contains_key(*d) {
                    return Err(invalid(&key, format!("undefined structure '{d}'")));
                }
            }
            if deps.iter().any(|d| !constants.contains_key(*d)) {
                still.push(name);
                continue;
            }
            let sources = [
                s.preset.is_some(),
                s.matrix.is_some(),
                s.product.is_some(),
                s.conjugate.is_some(),
            ];
            if sources.iter().filter(|b| **b).count() != 1 {
                return Err(invalid(
                    key,
                    "exactly one of preset, matrix, product or conjugate is required",
                ));
            }
            if let Some(preset) = &s.preset {
                let dim = s.dim.unwrap_or(n);
                let m = match preset.as_str() {
                    "standard-complex" if dim % 2 == 0 => standard_complex(dim / 2),
                    "standard-complex" => {
                        return Err(invalid(format!("{key}.dim"), "must be even"))
                    }
                    "example1-first" | "example1-second" | "example1-product" => {
                        let (a, b) = example1_matrices();
                        match preset.as_str() {
                            "example1-first" => a,
                            "example1-second" => b,
                            _ => a.matmul(&b),
                        }
                    }
                    other => {
                        return Err(invalid(
                            format!("{key}.preset"),
                            format!(
                                "unknown preset '{other}' (expected standard-complex, \
                                 example1-first, example1-second or example1-product)"
                            ),
                        ))
                    }
                };
                constants.insert(name.clone(), m);
            } else if let Some(rows) = &s.matrix {
                constants.insert(name.clone(), square(rows, &format!("{key}.matrix"))?);
            } else if let Some(list) = &s.product {
                let mut acc = constants[list
                    .first()
                    .ok_or_else(|| invalid(format!("{key}.product"), "empty product"))?]
                .clone();
                for d in &list[1..] {
                    let m = &constants[d];
                    if m.rows() != acc.rows() {
                        return Err(invalid(format!("{key}.product"), "dimension mismatch"));
                    }
                    acc = acc.matmul(m);
                }
                constants.insert(name.clone(), acc);
            } else if let Some(c) = &s.conjugate {
                let base = constants[&c.base].clone();
                let d = base.rows();
                let [p, q] = c.plane;
                let ok = (1..=d).contains(&p)
                    && (1..=d).contains(&q)
                    && p != q
                    && (1..=d).contains(&c.axis);
                if !ok {
                    return Err(invalid(
                        format!("{key}.conjugate"),
                        format!("plane and axis must be distinct coordinates in 1..={d}"),
                    ));
                }
                fields.insert(
                    name.clone(),
                    RotatedStructure::field(base, (p - 1, q - 1), c.axis - 1, c.rate),
                );
            }
        }
        if still.len() == before {
            return Err(invalid(
                format!("structures.{}", still[0]),
                "structures must be built from constant structures without cycles",
            ));
        }
        pending = still;
    }
    for (name, m) in &constants {
        fields.insert(name.clone(), TensorField11::constant(m.clone()));
    }
    Ok((fields, constants))
}

fn build_grid(g: &RawGrid, key: &str) -> Result<Grid, ConfigError> {
    match (&g.points, &g.min, &g.max, &g.steps) {
        (Some(points), None, None, None) => {
            let d = points.first().map(Vec::len).unwrap_or(0);
            if d == 0 || points.iter().any(|p| p.len() != d) {
                return Err(invalid(
                    format!("{key}.points"),
                    "needs at least one point, all of the same positive dimension",
                ));
            }
            Ok(Grid::Points(points.clone()))
        }
        (None, Some(min), Some(max), Some(steps)) => {
            if min.is_empty() || min.len() != max.len() || min.len() != steps.len() {
                return Err(invalid(
                    key,
                    "min, max and steps need the same positive length",
                ));
            }
            if let Some(i) = steps.iter().position(|s| *s == 0) {
                return Err(invalid(format!("{key}.steps[{i}]"), "must be at least 1"));
            }
            Ok(Grid::Lattice(
                min.iter()
                    .zip(max)
                    .zip(steps)
                    .map(|((a, b), s)| Axis {
                        min: *a,
                        max: *b,
                        steps: *s,
                    })
                    .collect(),
            ))
        }
        _ => Err(invalid(key, "give either points, or min, max and steps")),
    }
}

const CLASSES: [&str; 4] = [
    "pointwise-slant-proper",
    "anti-invariant",
    "invariant",
    "not-slant",
];

fn require<'a, T>(v: &'a Option<T>, key: &str, field: &str) -> Result<&'a T, ConfigError> {
    v.as_ref()
        .ok_or_else(|| invalid(format!("{key}.{field}"), "required for this kind of check"))
}

fn validate_check(cfg: &ScenarioConfig, c: &RawCheck, key: &str) -> Result<Check, ConfigError> {
    let lookup_structure = |name: &str, field: &str| -> Result<usize, ConfigError> {
        cfg.structures
            .get(name)
            .map(TensorField11::dim)
            .ok_or_else(|| {
                invalid(
                    format!("{key}.{field}"),
                    format!("undefined structure '{name}'"),
                )
            })
    };
    let lookup_immersion = |name: &str, field: &str| -> Result<&NamedImmersion, ConfigError> {
        cfg.immersions.get(name).ok_or_else(|| {
            invalid(
                format!("{key}.{field}"),
                format!("undefined immersion '{name}'"),
            )
        })
    };
    if let Some(t) = c.tolerance {
        if !(t > 0.0 && t.is_finite()) {
            return Err(invalid(
                format!("{key}.tolerance"),
                "must be a positive number",
            ));
        }
    }
    for (field, class) in c
        .expect_class
        .iter()
        .map(|s| ("expect_class".to_string(), s))
        .chain(
            c.expect_composite_class
                .iter()
                .map(|s| ("expect_composite_class".to_string(), s)),
        )
        .chain(
            c.expect_classes
                .iter()
                .flatten()
                .enumerate()
                .map(|(i, s)| (format!("expect_classes[{i}]"), s)),
        )
    {
        if !CLASSES.contains(&class.as_str()) {
            return Err(invalid(
                format!("{key}.{field}"),
                format!(
                    "unknown classification '{class}' (expected one of {})",
                    CLASSES.join(", ")
                ),
            ));
        }
    }

    // Dimension of the parameter points the check is evaluated on.
    let grid_dim = match &c.grid {
        Some(g) => Some(
            cfg.grids
                .get(g)
                .ok_or_else(|| invalid(format!("{key}.grid"), format!("undefined grid '{g}'")))?
                .dim(),
        ),
        None => None,
    };
    let need_grid = || require(&c.grid, key, "grid").map(|_| grid_dim.expect("resolved"));
    let check_grid = |expected: usize| -> Result<(), ConfigError> {
        let found = need_grid()?;
        if found != expected {
            return Err(invalid(
                format!("{key}.grid"),
                format!("grid has dimension {found}, expected {expected}"),
            ));
        }
        Ok(())
    };
    let structure_dim = |expected: usize, name: &str, field: &str| -> Result<(), ConfigError> {
        let d = lookup_structure(name, field)?;
        if d != expected {
            return Err(invalid(
                format!("{key}.{field}"),
                format!("structure '{name}' has dimension {d}, expected {expected}"),
            ));
        }
        Ok(())
    };
    let resolve_fields = |dim: usize| -> Result<(), ConfigError> {
        let pairs = require(&c.fields, key, "fields")?;
        if pairs.is_empty() {
            return Err(invalid(format!("{key}.fields"), "needs at least one pair"));
        }
        for (i, pair) in pairs.iter().enumerate() {
            for (j, name) in pair.iter().enumerate() {
                let f = cfg.fields.get(name).ok_or_else(|| {
                    invalid(
                        format!("{key}.fields[{i}][{j}]"),
                        format!("undefined field '{name}'"),
                    )
                })?;
                if f.in_dim() != dim {
                    return Err(invalid(
                        format!("{key}.fields[{i}][{j}]"),
                        format!(
                            "field '{name}' has dimension {}, expected {dim}",
                            f.in_dim()
                        ),
                    ));
                }
            }
        }
        Ok(())
    };

    let mut param_dim = grid_dim.unwrap_or(0);
    match c.kind {
        CheckKind::SlantScan
        | CheckKind::CrossTerm
        | CheckKind::InducedStructure
        | CheckKind::Parallelism => {
            let im = lookup_immersion(require(&c.immersion, key, "immersion")?, "immersion")?;
            let n = im.immersion.ambient_dim();
            if c.kind == CheckKind::CrossTerm {
                let list = require(&c.structures, key, "structures")?;
                if list.len() != 2 {
                    return Err(invalid(
                        format!("{key}.structures"),
                        "needs exactly two structures",
                    ));
                }
                for (i, s) in list.iter().enumerate() {
                    structure_dim(n, s, &format!("structures[{i}]"))?;
                }
            } else {
                structure_dim(n, require(&c.structure, key, "structure")?, "structure")?;
            }
            if n != cfg.ambient_dim {
                return Err(invalid(
                    format!("{key}.immersion"),
                    format!(
                        "immersion maps into dimension {n}, ambient_dim is {}",
                        cfg.ambient_dim
                    ),
                ));
            }
            check_grid(im.immersion.domain_dim())?;
            if c.kind == CheckKind::Parallelism {
                resolve_fields(im.immersion.domain_dim())?;
            }
        }
        CheckKind::Family => {
            let im = lookup_immersion(require(&c.immersion, key, "immersion")?, "immersion")?;
            let list = require(&c.structures, key, "structures")?;
            if list.is_empty() {
                return Err(invalid(
                    format!("{key}.structures"),
                    "needs at least one structure",
                ));
            }
            for (i, s) in list.iter().enumerate() {
                structure_dim(cfg.ambient_dim, s, &format!("structures[{i}]"))?;
            }
            let coeff = require(&c.coefficients, key, "coefficients")?;
            let set = cfg.coefficients.get(coeff).ok_or_else(|| {
                invalid(
                    format!("{key}.coefficients"),
                    format!("undefined coefficient set '{coeff}'"),
                )
            })?;
            if set.exprs.len() != list.len() {
                return Err(invalid(
                    format!("{key}.coefficients"),
                    format!(
                        "{} coefficients for {} structures",
                        set.exprs.len(),
                        list.len()
                    ),
                ));
            }
            if im.immersion.ambient_dim() != cfg.ambient_dim {
                return Err(invalid(
                    format!("{key}.immersion"),
                    "must map into the ambient space",
                ));
            }
            check_grid(im.immersion.domain_dim())?;
        }
        CheckKind::Transitivity | CheckKind::Pairing => {
            let name = require(&c.chain, key, "chain")?;
            let chain = cfg.chains.get(name).ok_or_else(|| {
                invalid(format!("{key}.chain"), format!("undefined chain '{name}'"))
            })?;
            structure_dim(
                cfg.ambient_dim,
                require(&c.structure, key, "structure")?,
                "structure",
            )?;
            let last = &cfg.immersions[chain.last().expect("non-empty")];
            check_grid(last.immersion.domain_dim())?;
            if let Some(list) = &c.expect_cos_parts {
                if list.len() != chain.len() {
                    return Err(invalid(
                        format!("{key}.expect_cos_parts"),
                        format!(
                            "{} entries for a chain of length {}",
                            list.len(),
                            chain.len()
                        ),
                    ));
                }
            }
        }
        CheckKind::Product => {
            let parts = require(&c.parts, key, "parts")?;
            if parts.is_empty() {
                return Err(invalid(format!("{key}.parts"), "needs at least one factor"));
            }
            let mut total = 0;
            for (i, p) in parts.iter().enumerate() {
                let im = lookup_immersion(&p.immersion, &format!("parts[{i}].immersion"))?;
                structure_dim(
                    im.immersion.ambient_dim(),
                    &p.structure,
                    &format!("parts[{i}].structure"),
                )?;
                if let Some(m) = &p.metric {
                    let g = metric_from(m, &format!("{key}.parts[{i}].metric"))?;
                    if g.dim() != im.immersion.ambient_dim() {
                        return Err(invalid(
                            format!("{key}.parts[{i}].metric"),
                            "dimension mismatch",
                        ));
                    }
                }
                total += im.immersion.domain_dim();
            }
            match c.mode.as_deref() {
                None | Some("same-ambient") | Some("distinct-ambients") => {}
                Some(other) => {
                    return Err(invalid(
                        format!("{key}.mode"),
                        format!(
                            "unknown mode '{other}' (expected same-ambient or distinct-ambients)"
                        ),
                    ))
                }
            }
            check_grid(total)?;
        }
        CheckKind::AlmostHermitian => {
            structure_dim(
                cfg.ambient_dim,
                require(&c.structure, key, "structure")?,
                "structure",
            )?;
            check_grid(cfg.ambient_dim)?;
        }
        CheckKind::Anticommute | CheckKind::NijenhuisDecomposition => {
            let list = require(&c.structures, key, "structures")?;
            if list.len() != 2 {
                return Err(invalid(
                    format!("{key}.structures"),
                    "needs exactly two structures",
                ));
            }
            for (i, s) in list.iter().enumerate() {
                structure_dim(cfg.ambient_dim, s, &format!("structures[{i}]"))?;
            }
            check_grid(cfg.ambient_dim)?;
            if c.kind == CheckKind::NijenhuisDecomposition {
                let a = *require(&c.a, key, "a")?;
                let b = *require(&c.b, key, "b")?;
                let residual = (a * a + b * b - 1.0).abs();
                if !(residual <= NORMALIZATION_TOL) {
                    return Err(invalid(
                        format!("{key}.a"),
                        format!("a² + b² must equal 1 (residual {residual:e})"),
                    ));
                }
                resolve_fields(cfg.ambient_dim)?;
            }
            param_dim = cfg.ambient_dim;
        }
    }

    let mut exprs = BTreeMap::new();
    let mut add = |field: String, text: &str| -> Result<(), ConfigError> {
        let e = parse_expr_in(text, param_dim)
            .map_err(|e| invalid(format!("{key}.{field}"), e.to_string()))?;
        exprs.insert(field, e);
        Ok(())
    };
    for (field, text) in [
        ("expect_cos", &c.expect_cos),
        ("expect_scalar", &c.expect_scalar),
        ("expect_cos_tilde", &c.expect_cos_tilde),
    ] {
        if let Some(t) = text {
            add(field.to_string(), t)?;
        }
    }
    for (i, t) in c.expect_cos_parts.iter().flatten().enumerate() {
        add(format!("expect_cos_parts[{i}]"), t)?;
    }
    if let Some(rows) = &c.expect_matrix {
        for (r, row) in rows.iter().enumerate() {
            for (col, t) in row.iter().enumerate() {
                add(format!("expect_matrix[{r}][{col}]"), t)?;
            }
        }
    }
    Ok(Check {
        raw: c.clone(),
        exprs,
    })
}

impl ScenarioConfig {
    /// Replaces one lattice axis. `target` is `x{i}` for every lattice grid
    /// with that axis, or `grid.x{i}` for one grid.
    pub fn override_axis(&mut self, target: &str, axis: Axis) -> Result<(), ConfigError> {
        let key = format!("--grid {target}");
        let (grid, var) = match target.split_once('.') {
            Some((g, v)) => (Some(g), v),
            None => (None, target),
        };
        let index = var
            .strip_prefix('x')
            .and_then(|d| d.parse::<usize>().ok())
            .filter(|i| *i >= 1)
            .ok_or_else(|| invalid(&key, "axis must be written x1, x2, … or grid.x1"))?
            - 1;
        if axis.steps == 0 {
            return Err(invalid(&key, "steps must be at least 1"));
        }
        let mut touched = 0;
        for (name, g) in &mut self.grids {
            if grid.is_some_and(|want| want != name) {
                continue;
            }
            if let Grid::Lattice(axes) = g {
                if index < axes.len() {
                    axes[index] = axis.clone();
                    touched += 1;
                }
            }
        }
        if touched == 0 {
            return Err(invalid(key, "no lattice grid has this axis"));
        }
        Ok(())
    }

    /// Sets a named tolerance: `structural`, `spectral` or `finite_difference`.
    pub fn override_tolerance(&mut self, name: &str, value: f64) -> Result<(), ConfigError> {
        let key = format!("--tol {name}");
        if !(value > 0.0 && value.is_finite()) {
            return Err(invalid(key, "must be a positive number"));
        }
        match name {
            "structural" => self.tolerances.structural = value,
            "spectral" => self.tolerances.spectral = value,
            "finite_difference" | "finite-difference" | "fd" => {
                self.tolerances.finite_difference = value
            }
            _ => {
                return Err(invalid(
                    key,
                    "expected structural, spectral or finite_difference",
                ))
            }
        }
        Ok(())
    }
}
