//! Runs the checks of a validated scenario and assembles the report.

use std::collections::BTreeMap;

use serde_json::{json, Value};
use slant_core::immersion::{frame_at, frame_in, Immersion, MetricField};
use slant_core::numkit::{Mat, SharedMap, Tolerances};
use slant_core::slant::{
    check_proper, cross_term, family_slant_check, family_slant_check_k, induced_structure,
    induced_structure_in, kahler_condition_check, product_check, slant_function_scan,
    transitivity_chain_check, Classification, Exclusion, GuardPolicy, ProductMode, ProductPart,
    SlantReport,
};
use slant_core::structures::{
    decomposition_check, verify_almost_hermitian, verify_anticommute, MetricSpec, StructureCheck,
    TensorField11,
};

use crate::config::{Check, CheckKind, ScenarioConfig};
use crate::report::{num, nums, CheckRecord, ExclusionRecord, Report};

/// Runs every check in file order.
pub fn run_scenario(cfg: &ScenarioConfig) -> Report {
    run_filtered(cfg, |_| true)
}

/// Runs only the checks on ambient structures.
pub fn run_structure_checks(cfg: &ScenarioConfig) -> Report {
    run_filtered(cfg, CheckKind::is_structural)
}

fn run_filtered(cfg: &ScenarioConfig, keep: impl Fn(CheckKind) -> bool) -> Report {
    let checks = cfg
        .checks
        .iter()
        .filter(|c| keep(c.raw.kind))
        .map(|c| run_check(cfg, c))
        .collect();
    Report::new(&cfg.name, &cfg.tolerances, checks)
}

/// Accumulates one check's record.
struct Recorder<'a> {
    check: &'a Check,
    tol: f64,
    record: CheckRecord,
}

impl<'a> Recorder<'a> {
    fn new(check: &'a Check, tol: f64) -> Self {
        Self {
            check,
            tol,
            record: CheckRecord {
                name: check.raw.name.clone(),
                kind: check.raw.kind.as_str().to_string(),
                passed: true,
                tolerance: tol,
                summary: BTreeMap::new(),
                points: Vec::new(),
                exclusions: Vec::new(),
                failures: Vec::new(),
            },
        }
    }

    fn fail(&mut self, message: String) {
        self.record.failures.push(message);
    }

    fn summary(&mut self, key: &str, value: Value) {
        self.record.summary.insert(key.to_string(), value);
    }

    fn exclude(&mut self, e: &Exclusion) {
        self.record.exclusions.push(ExclusionRecord {
            param: e.param.clone(),
            reason: e.reason.clone(),
        });
    }

    fn expect(&self, key: &str, u: &[f64]) -> Option<f64> {
        self.check.expr(key).map(|e| e.eval::<f64>(u))
    }

    /// Compares an angle against the expectation `key`, given as a cosine.
    /// Returns the expected angle for the report.
    fn angle(&mut self, key: &str, u: &[f64], theta: Option<f64>, what: &str) -> Option<f64> {
        let cos = self.expect(key, u)?;
        let expected = cos.clamp(-1.0, 1.0).acos();
        match theta {
            Some(t) if (t - expected).abs() <= self.tol => {}
            Some(t) => self.fail(format!(
                "{what} at {u:?}: θ = {t} but expected {expected} (|Δ| = {:e})",
                (t - expected).abs()
            )),
            None => self.fail(format!(
                "{what} at {u:?}: not slant, expected θ = {expected}"
            )),
        }
        Some(expected)
    }

    fn class(&mut self, expected: Option<&String>, found: Classification, u: &[f64], what: &str) {
        if let Some(want) = expected {
            if want != found.as_str() {
                self.fail(format!(
                    "{what} at {u:?}: classified {found}, expected {want}"
                ));
            }
        }
    }

    fn bound(&mut self, value: f64, u: &[f64], what: &str) {
        if !(value <= self.tol) {
            self.fail(format!("{what} at {u:?}: {value:e} exceeds {:e}", self.tol));
        }
    }

    fn finish(mut self) -> CheckRecord {
        if !self.check.raw.allow_exclusions && !self.record.exclusions.is_empty() {
            let n = self.record.exclusions.len();
            self.fail(format!(
                "{n} grid point(s) excluded; set allow_exclusions to accept"
            ));
        }
        self.record
            .summary
            .insert("points_evaluated".into(), json!(self.record.points.len()));
        self.record.passed = self.record.failures.is_empty();
        self.record
    }
}

fn default_tolerance(kind: CheckKind, t: &Tolerances) -> f64 {
    match kind {
        CheckKind::CrossTerm
        | CheckKind::Pairing
        | CheckKind::AlmostHermitian
        | CheckKind::Anticommute
        | CheckKind::InducedStructure => t.structural,
        CheckKind::Parallelism | CheckKind::NijenhuisDecomposition => t.finite_difference,
        CheckKind::SlantScan | CheckKind::Family | CheckKind::Transitivity | CheckKind::Product => {
            t.spectral
        }
    }
}

fn run_check(cfg: &ScenarioConfig, check: &Check) -> CheckRecord {
    let tol = check
        .raw
        .tolerance
        .unwrap_or_else(|| default_tolerance(check.raw.kind, &cfg.tolerances));
    let mut rec = Recorder::new(check, tol);
    let grid = check
        .raw
        .grid
        .as_ref()
        .map(|g| cfg.grids[g].points())
        .unwrap_or_default();
    let outcome = match check.raw.kind {
        CheckKind::SlantScan => slant_scan(cfg, &mut rec, &grid),
        CheckKind::CrossTerm => cross(cfg, &mut rec, &grid),
        CheckKind::Family => family(cfg, &mut rec, &grid),
        CheckKind::InducedStructure => induced(cfg, &mut rec, &grid),
        CheckKind::Transitivity => transitivity(cfg, &mut rec, &grid),
        CheckKind::Pairing => pairing(cfg, &mut rec, &grid),
        CheckKind::Product => product(cfg, &mut rec, &grid),
        CheckKind::Parallelism => parallelism(cfg, &mut rec, &grid),
        CheckKind::AlmostHermitian => {
            let j = &cfg.structures[check.raw.structure.as_ref().expect("validated")];
            verify_almost_hermitian(j, &cfg.metric, &grid, &with_structural(cfg, tol))
                .map(|r| structure_record(&mut rec, r))
        }
        CheckKind::Anticommute => {
            let (j1, j2) = pair(cfg, check);
            verify_anticommute(j1, j2, &grid, &with_structural(cfg, tol))
                .map(|r| structure_record(&mut rec, r))
        }
        CheckKind::NijenhuisDecomposition => decomposition(cfg, &mut rec, &grid),
    };
    if let Err(e) = outcome {
        rec.fail(format!("analysis error: {e}"));
    }
    rec.finish()
}

fn with_structural(cfg: &ScenarioConfig, tol: f64) -> Tolerances {
    Tolerances {
        structural: tol,
        ..cfg.tolerances
    }
}

fn pair<'a>(cfg: &'a ScenarioConfig, check: &Check) -> (&'a TensorField11, &'a TensorField11) {
    let names = check.raw.structures.as_ref().expect("validated");
    (&cfg.structures[&names[0]], &cfg.structures[&names[1]])
}

fn immersion<'a>(cfg: &'a ScenarioConfig, check: &Check) -> &'a Immersion {
    &cfg.immersions[check.raw.immersion.as_ref().expect("validated")].immersion
}

fn structure<'a>(cfg: &'a ScenarioConfig, check: &Check) -> &'a TensorField11 {
    &cfg.structures[check.raw.structure.as_ref().expect("validated")]
}

fn classes(v: &[Classification]) -> Value {
    Value::Array(v.iter().map(|c| json!(c.as_str())).collect())
}

fn matrix(m: &Mat) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|r| nums(&(0..m.cols()).map(|c| m[(r, c)]).collect::<Vec<_>>()))
            .collect(),
    )
}

/// `‖C² + cos²θ·I‖` at a proper point.
fn operator_identity(r: &SlantReport) -> Option<f64> {
    if r.classification != Classification::Proper {
        return None;
    }
    let cos2 = r.cos_theta()?.powi(2);
    let k = r.operator.rows();
    Some(
        r.operator
            .matmul(&r.operator)
            .add(&Mat::identity(k).scale(&cos2))
            .norm(),
    )
}

fn slant_scan(
    cfg: &ScenarioConfig,
    rec: &mut Recorder,
    grid: &[Vec<f64>],
) -> slant_core::Result<()> {
    let check = rec.check;
    let scan = slant_function_scan(
        immersion(cfg, check),
        structure(cfg, check),
        &cfg.metric,
        grid,
        &cfg.tolerances,
    );
    let mut worst_identity: f64 = 0.0;
    let mut worst_error: f64 = 0.0;
    for r in &scan.reports {
        let u = &r.param;
        let expected = rec.angle("expect_cos", u, r.theta, "slant angle");
        rec.class(
            check.raw.expect_class.as_ref(),
            r.classification,
            u,
            "slant angle",
        );
        let identity = operator_identity(r);
        if let Some(v) = identity {
            worst_identity = worst_identity.max(v);
            if !(v <= cfg.tolerances.finite_difference) {
                rec.fail(format!("operator identity at {u:?}: residual {v:e}"));
            }
        }
        let mut p = BTreeMap::new();
        p.insert("param".into(), nums(u));
        p.insert("theta".into(), r.theta.map_or(Value::Null, num));
        p.insert("cos_theta".into(), r.cos_theta().map_or(Value::Null, num));
        p.insert("spread".into(), num(r.spread));
        p.insert("eigenvalues".into(), nums(&r.eigenvalues));
        p.insert("classification".into(), json!(r.classification.as_str()));
        if let Some(v) = identity {
            p.insert("operator_identity".into(), num(v));
        }
        if let (Some(e), Some(t)) = (expected, r.theta) {
            worst_error = worst_error.max((t - e).abs());
            p.insert("expected_theta".into(), num(e));
        }
        rec.record.points.push(p);
    }
    for e in &scan.exclusions {
        rec.exclude(e);
    }
    if let Some((lo, hi)) = scan.theta_range() {
        rec.summary("theta_min", num(lo));
        rec.summary("theta_max", num(hi));
    }
    rec.summary("max_operator_identity", num(worst_identity));
    if check.expr("expect_cos").is_some() {
        rec.summary("max_theta_error", num(worst_error));
    }
    Ok(())
}

fn cross(cfg: &ScenarioConfig, rec: &mut Recorder, grid: &[Vec<f64>]) -> slant_core::Result<()> {
    let check = rec.check;
    let (j1, j2) = pair(cfg, check);
    let f = immersion(cfg, check);
    let mut worst: f64 = 0.0;
    for u in grid {
        let r = match frame_at(f, u, &cfg.metric)
            .and_then(|fr| cross_term(&fr, j1, j2, &cfg.tolerances))
        {
            Ok(r) => r,
            Err(e) => {
                rec.exclude(&Exclusion::new(u, e.to_string()));
                continue;
            }
        };
        if !r.proportional {
            rec.fail(format!(
                "cross term at {u:?} is not proportional to the metric (residual {:e})",
                r.residual
            ));
        }
        let mut p = BTreeMap::new();
        p.insert("param".into(), nums(u));
        p.insert("scalar".into(), num(r.scalar));
        p.insert("residual".into(), num(r.residual));
        p.insert("proportional".into(), json!(r.proportional));
        if let Some(e) = rec.expect("expect_scalar", u) {
            let d = (r.scalar - e).abs();
            worst = worst.max(d);
            rec.bound(d, u, "cross-term scalar error");
            p.insert("expected_scalar".into(), num(e));
        }
        rec.record.points.push(p);
    }
    if check.expr("expect_scalar").is_some() {
        rec.summary("max_scalar_error", num(worst));
    }
    Ok(())
}

fn family(cfg: &ScenarioConfig, rec: &mut Recorder, grid: &[Vec<f64>]) -> slant_core::Result<()> {
    let check = rec.check;
    let f = immersion(cfg, check);
    let names = check.raw.structures.as_ref().expect("validated");
    let parts: Vec<TensorField11> = names.iter().map(|n| cfg.structures[n].clone()).collect();
    let coeff = &cfg.coefficients[check.raw.coefficients.as_ref().expect("validated")].functions;
    let report = if parts.len() == 2 {
        family_slant_check(
            f,
            &parts[0],
            &parts[1],
            coeff,
            &cfg.metric,
            grid,
            &cfg.tolerances,
        )?
    } else {
        family_slant_check_k(f, &parts, coeff, &cfg.metric, grid, &cfg.tolerances)?
    };
    let mut worst_error: f64 = 0.0;
    for p in &report.points {
        let u = &p.param;
        if !p.biconditional {
            rec.fail(format!(
                "at {u:?} the family is slant exactly when the cross terms are proportional, which fails here"
            ));
        }
        if let Some(d) = p.cos_diff {
            rec.bound(d, u, "|cos θ direct − cos θ formula|");
        }
        if let Some(v) = p.bound_violation {
            rec.bound(v, u, "angle bound violation");
        }
        let expected = rec.angle("expect_cos", u, p.direct.theta, "family angle");
        if let (Some(e), Some(t)) = (expected, p.direct.theta) {
            worst_error = worst_error.max((t - e).abs());
        }
        let mut parts_expected = Vec::new();
        for i in 0..p.theta_parts.len() {
            let key = format!("expect_cos_parts[{i}]");
            if let Some(e) = rec.angle(
                &key,
                u,
                Some(p.theta_parts[i]),
                &format!("structure {}", i + 1),
            ) {
                parts_expected.push(e);
            }
        }
        rec.class(
            check.raw.expect_class.as_ref(),
            p.direct.classification,
            u,
            "family",
        );

        let mut m = BTreeMap::new();
        m.insert("param".into(), nums(u));
        m.insert("coefficients".into(), nums(&p.coefficients));
        m.insert("cos_parts".into(), nums(&p.cos_parts));
        m.insert("theta_parts".into(), nums(&p.theta_parts));
        m.insert("cross".into(), nums(&p.cross));
        m.insert("cross_residual".into(), num(p.cross_residual));
        m.insert("cross_proportional".into(), json!(p.cross_proportional));
        m.insert("theta".into(), p.direct.theta.map_or(Value::Null, num));
        m.insert(
            "cos_theta".into(),
            p.direct.cos_theta().map_or(Value::Null, num),
        );
        m.insert("spread".into(), num(p.direct.spread));
        m.insert(
            "classification".into(),
            json!(p.direct.classification.as_str()),
        );
        m.insert("cos_formula".into(), num(p.cos_formula));
        m.insert("cos_diff".into(), p.cos_diff.map_or(Value::Null, num));
        m.insert("biconditional".into(), json!(p.biconditional));
        if let Some(e) = expected {
            m.insert("expected_theta".into(), num(e));
        }
        if !parts_expected.is_empty() {
            m.insert("expected_theta_parts".into(), nums(&parts_expected));
        }
        rec.record.points.push(m);
    }
    for e in &report.exclusions {
        rec.exclude(e);
    }
    rec.summary("max_cos_diff", num(report.max_cos_diff));
    rec.summary("max_bound_violation", num(report.max_bound_violation));
    rec.summary("biconditional_holds", json!(report.biconditional_holds));
    if check.expr("expect_cos").is_some() {
        rec.summary("max_theta_error", num(worst_error));
    }
    Ok(())
}

fn induced(cfg: &ScenarioConfig, rec: &mut Recorder, grid: &[Vec<f64>]) -> slant_core::Result<()> {
    let check = rec.check;
    let f = immersion(cfg, check);
    let j = structure(cfg, check);
    let metric = MetricField::constant(&cfg.metric);
    let j2 = induced_structure(f, j, &cfg.metric, &cfg.tolerances)?;
    let mut worst: f64 = 0.0;
    for u in grid {
        let result = check_proper(f, j, &metric, u, GuardPolicy::Proper, &cfg.tolerances)
            .and_then(|_| Ok((j2.at(u)?, frame_at(f, u, &cfg.metric)?)));
        let (m, fr) = match result {
            Ok(v) => v,
            Err(e) => {
                rec.exclude(&Exclusion::new(u, e.to_string()));
                continue;
            }
        };
        let k = m.rows();
        let square = m.matmul(&m).add(&Mat::identity(k)).norm();
        let skew = fr
            .gram
            .matmul(&m)
            .add(&m.transpose().matmul(&fr.gram))
            .norm();
        worst = worst.max(square).max(skew);
        rec.bound(square, u, "J₂² + I");
        rec.bound(skew, u, "skewness of J₂ in the induced metric");
        let mut p = BTreeMap::new();
        p.insert("param".into(), nums(u));
        p.insert("structure".into(), matrix(&m));
        p.insert("square_residual".into(), num(square));
        p.insert("skew_residual".into(), num(skew));
        if let Some(rows) = &check.raw.expect_matrix {
            let mut err: f64 = 0.0;
            for (r, row) in rows.iter().enumerate() {
                for c in 0..row.len() {
                    let e = rec
                        .expect(&format!("expect_matrix[{r}][{c}]"), u)
                        .expect("parsed");
                    let found = if r < k && c < k { m[(r, c)] } else { f64::NAN };
                    err = err.max((found - e).abs());
                }
            }
            if rows.len() != k || rows.iter().any(|row| row.len() != k) {
                err = f64::NAN;
            }
            rec.bound(err, u, "induced structure entry error");
            p.insert("matrix_error".into(), num(err));
        }
        rec.record.points.push(p);
    }
    rec.summary("max_residual", num(worst));
    Ok(())
}

fn chain_immersions(cfg: &ScenarioConfig, check: &Check) -> Vec<Immersion> {
    cfg.chains[check.raw.chain.as_ref().expect("validated")]
        .iter()
        .map(|n| cfg.immersions[n].immersion.clone())
        .collect()
}

fn transitivity(
    cfg: &ScenarioConfig,
    rec: &mut Recorder,
    grid: &[Vec<f64>],
) -> slant_core::Result<()> {
    let check = rec.check;
    let fs = chain_immersions(cfg, check);
    let report = transitivity_chain_check(
        &fs,
        structure(cfg, check),
        &cfg.metric,
        grid,
        &cfg.tolerances,
    )?;
    for p in &report.points {
        let u = &p.param;
        rec.bound(p.identity_residual, u, "|cos θ̃ − Π cos θᵢ|");
        rec.bound(p.bound_violation, u, "θ̃ ≥ max θᵢ violation");
        let mut expected_parts = Vec::new();
        for (i, t) in p.thetas.iter().enumerate() {
            let key = format!("expect_cos_parts[{i}]");
            if let Some(e) = rec.angle(&key, u, Some(*t), &format!("stage {}", i + 1)) {
                expected_parts.push(e);
            }
        }
        let expected = rec.angle(
            "expect_cos_tilde",
            u,
            Some(p.theta_tilde),
            "composite angle",
        );
        if let Some(list) = &check.raw.expect_classes {
            for (i, want) in list.iter().enumerate() {
                if let Some(found) = p.classifications.get(i) {
                    rec.class(Some(want), *found, u, &format!("stage {}", i + 1));
                }
            }
        }
        rec.class(
            check.raw.expect_composite_class.as_ref(),
            p.composite_classification,
            u,
            "composite",
        );
        let mut m = BTreeMap::new();
        m.insert("param".into(), nums(u));
        m.insert("thetas".into(), nums(&p.thetas));
        m.insert("cos_thetas".into(), nums(&p.cos_thetas));
        m.insert("cos_product".into(), num(p.cos_product));
        m.insert("theta_tilde".into(), num(p.theta_tilde));
        m.insert("cos_theta_tilde".into(), num(p.cos_theta_tilde));
        m.insert("identity_residual".into(), num(p.identity_residual));
        m.insert("bound_violation".into(), num(p.bound_violation));
        m.insert("classifications".into(), classes(&p.classifications));
        m.insert(
            "composite_classification".into(),
            json!(p.composite_classification.as_str()),
        );
        if !expected_parts.is_empty() {
            m.insert("expected_thetas".into(), nums(&expected_parts));
        }
        if let Some(e) = expected {
            m.insert("expected_theta_tilde".into(), num(e));
        }
        rec.record.points.push(m);
    }
    for e in &report.exclusions {
        rec.exclude(e);
    }
    rec.summary("max_identity_residual", num(report.max_identity_residual));
    rec.summary("max_bound_violation", num(report.max_bound_violation));
    Ok(())
}

/// `max |g(JZᵢ, Zⱼ)|` over tangent frame pairs, for the composite in the
/// ambient and for every stage in the one above it.
fn pairing(cfg: &ScenarioConfig, rec: &mut Recorder, grid: &[Vec<f64>]) -> slant_core::Result<()> {
    let check = rec.check;
    let fs = chain_immersions(cfg, check);
    let j1 = structure(cfg, check);
    let mut metrics = vec![MetricField::constant(&cfg.metric)];
    let mut structures = vec![j1.clone()];
    for i in 1..fs.len() {
        metrics.push(MetricField::induced(&fs[i - 1], &metrics[i - 1])?);
        structures.push(induced_structure_in(
            &fs[i - 1],
            &structures[i - 1],
            &metrics[i - 1],
            &cfg.tolerances,
        )?);
    }
    let mut composite = fs[0].clone();
    for f in &fs[1..] {
        composite = composite.compose(f)?;
    }
    let stage_pairing = |f: &Immersion, metric: &MetricField, j: &TensorField11, u: &[f64]| {
        let fr = frame_in(f, u, metric)?;
        let m = j.at(&fr.ambient_point)?;
        let s = fr
            .frame
            .transpose()
            .matmul(&fr.ambient_gram)
            .matmul(&m)
            .matmul(&fr.frame);
        Ok::<_, slant_core::Error>(s.into_vec().iter().fold(0.0f64, |a, x| a.max(x.abs())))
    };
    let mut worst: f64 = 0.0;
    'points: for u in grid {
        // Parameter points of every stage, innermost last.
        let mut params = vec![u.clone()];
        for f in fs[1..].iter().rev() {
            let next = f.point(params.last().expect("non-empty"))?;
            params.push(next);
        }
        params.reverse();
        let mut values = Vec::new();
        let ambient = stage_pairing(&composite, &metrics[0], j1, u);
        let mut results = vec![ambient];
        for i in 1..fs.len() {
            results.push(stage_pairing(
                &fs[i],
                &metrics[i],
                &structures[i],
                &params[i],
            ));
        }
        for r in results {
            match r {
                Ok(v) => values.push(v),
                Err(e) => {
                    rec.exclude(&Exclusion::new(u, e.to_string()));
                    continue 'points;
                }
            }
        }
        rec.bound(values[0], u, "pairing of the composite in the ambient");
        for (i, v) in values.iter().enumerate().skip(1) {
            rec.bound(*v, u, &format!("pairing of stage {} in stage {i}", i + 1));
        }
        worst = values.iter().copied().fold(worst, f64::max);
        let mut p = BTreeMap::new();
        p.insert("param".into(), nums(u));
        p.insert("ambient_pairing".into(), num(values[0]));
        p.insert("stage_pairings".into(), nums(&values[1..]));
        rec.record.points.push(p);
    }
    rec.summary("max_pairing", num(worst));
    Ok(())
}

fn product(cfg: &ScenarioConfig, rec: &mut Recorder, grid: &[Vec<f64>]) -> slant_core::Result<()> {
    let check = rec.check;
    let mut parts = Vec::new();
    for p in check.raw.parts.as_ref().expect("validated") {
        let metric = match &p.metric {
            Some(rows) => MetricSpec::new(Mat::from_vec(rows.len(), rows.len(), rows.concat()))?,
            None => MetricSpec::euclidean(cfg.immersions[&p.immersion].immersion.ambient_dim()),
        };
        parts.push(ProductPart {
            immersion: cfg.immersions[&p.immersion].immersion.clone(),
            structure: cfg.structures[&p.structure].clone(),
            metric,
        });
    }
    let mode = match check.raw.mode.as_deref() {
        Some("distinct-ambients") => ProductMode::DistinctAmbients,
        _ => ProductMode::SameAmbient,
    };
    let tol = Tolerances {
        spectral: rec.tol,
        ..cfg.tolerances
    };
    let report = product_check(&parts, mode, grid, &tol)?;
    for p in &report.points {
        let u = &p.param;
        if !p.consistent {
            rec.fail(format!(
                "at {u:?} the product is slant exactly when the factor angles agree, which fails here"
            ));
        }
        let expected = rec.angle("expect_cos", u, p.product.theta, "product angle");
        rec.class(
            check.raw.expect_class.as_ref(),
            p.product.classification,
            u,
            "product",
        );
        let mut m = BTreeMap::new();
        m.insert("param".into(), nums(u));
        m.insert(
            "factor_thetas".into(),
            Value::Array(
                p.factor_thetas
                    .iter()
                    .map(|t| t.map_or(Value::Null, num))
                    .collect(),
            ),
        );
        m.insert("theta".into(), p.product.theta.map_or(Value::Null, num));
        m.insert("spread".into(), num(p.product.spread));
        m.insert(
            "classification".into(),
            json!(p.product.classification.as_str()),
        );
        m.insert("equal_angles".into(), json!(p.equal_angles));
        m.insert("consistent".into(), json!(p.consistent));
        if let Some(e) = expected {
            m.insert("expected_theta".into(), num(e));
        }
        rec.record.points.push(m);
    }
    for e in &report.exclusions {
        rec.exclude(e);
    }
    match check.raw.expect_slant {
        Some(true) if !report.product_slant_everywhere => {
            rec.fail("expected the product to be slant at every point".into())
        }
        Some(false)
            if report
                .points
                .iter()
                .any(|p| p.product.classification.is_slant()) =>
        {
            rec.fail("expected the product to be non-slant at every point".into())
        }
        _ => {}
    }
    rec.summary("consistent", json!(report.consistent));
    rec.summary("constant_and_equal", json!(report.constant_and_equal));
    rec.summary(
        "product_slant_everywhere",
        json!(report.product_slant_everywhere),
    );
    Ok(())
}

fn field_pairs(cfg: &ScenarioConfig, check: &Check) -> Vec<(SharedMap, SharedMap)> {
    check
        .raw
        .fields
        .as_ref()
        .expect("validated")
        .iter()
        .map(|[x, y]| (cfg.fields[x].clone(), cfg.fields[y].clone()))
        .collect()
}

fn parallelism(
    cfg: &ScenarioConfig,
    rec: &mut Recorder,
    grid: &[Vec<f64>],
) -> slant_core::Result<()> {
    let check = rec.check;
    let f = immersion(cfg, check);
    let j = structure(cfg, check);
    let pairs = field_pairs(cfg, check);
    let (mut max_r1, mut max_r2): (f64, f64) = (0.0, 0.0);
    'points: for u in grid {
        let mut r1s = Vec::new();
        let mut r2s = Vec::new();
        for (x, y) in &pairs {
            match kahler_condition_check(f, j, &cfg.metric, u, x, y, &cfg.tolerances) {
                Ok(r) => {
                    r1s.push(r.r1);
                    r2s.push(r.r2);
                }
                Err(e) => {
                    rec.exclude(&Exclusion::new(u, e.to_string()));
                    continue 'points;
                }
            }
        }
        let r1 = r1s.iter().copied().fold(0.0, f64::max);
        let r2 = r2s.iter().copied().fold(0.0, f64::max);
        max_r1 = max_r1.max(r1);
        max_r2 = max_r2.max(r2);
        let (p1, p2) = (r1 <= rec.tol, r2 <= rec.tol);
        if p1 != p2 {
            rec.fail(format!(
                "at {u:?} ∇J₂ = 0 and the tangential criterion disagree (r₁ = {r1:e}, r₂ = {r2:e})"
            ));
        }
        if let Some(want) = check.raw.expect_parallel {
            if p1 != want {
                rec.fail(format!(
                    "at {u:?}: parallel = {p1}, expected {want} (r₁ = {r1:e})"
                ));
            }
        }
        let mut p = BTreeMap::new();
        p.insert("param".into(), nums(u));
        p.insert("r1".into(), nums(&r1s));
        p.insert("r2".into(), nums(&r2s));
        rec.record.points.push(p);
    }
    rec.summary("max_r1", num(max_r1));
    rec.summary("max_r2", num(max_r2));
    Ok(())
}

fn structure_record(rec: &mut Recorder, r: StructureCheck) {
    for (name, v) in &r.components {
        rec.summary(&format!("max_{name}"), num(*v));
    }
    rec.summary("max_residual", num(r.max_residual));
    rec.summary("points_checked", json!(r.points_checked));
    if !r.passed {
        rec.fail(format!(
            "residual {:e} at {:?} exceeds {:e}",
            r.max_residual,
            r.worst_point.unwrap_or_default(),
            r.tolerance
        ));
    }
}

fn decomposition(
    cfg: &ScenarioConfig,
    rec: &mut Recorder,
    grid: &[Vec<f64>],
) -> slant_core::Result<()> {
    let check = rec.check;
    let (j1, j2) = pair(cfg, check);
    let (a, b) = (
        check.raw.a.expect("validated"),
        check.raw.b.expect("validated"),
    );
    let pairs = field_pairs(cfg, check);
    let residual = decomposition_check(j1, j2, a, b, &pairs, grid)?;
    rec.summary("max_residual", num(residual));
    rec.summary("field_pairs", json!(pairs.len()));
    if !(residual <= rec.tol) {
        rec.fail(format!(
            "decomposition residual {residual:e} exceeds {:e}",
            rec.tol
        ));
    }
    Ok(())
}
