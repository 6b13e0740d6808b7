//! Reports and their two output formats.
//!
//! The machine format is pretty-printed JSON with sorted keys. Every float is
//! written with 17 significant digits, which round-trips any binary64 value;
//! non-finite values become `null`.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;
use slant_core::numkit::Tolerances;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Human,
    Machine,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ToleranceBlock {
    pub structural: f64,
    pub spectral: f64,
    pub finite_difference: f64,
}

impl From<&Tolerances> for ToleranceBlock {
    fn from(t: &Tolerances) -> Self {
        Self {
            structural: t.structural,
            spectral: t.spectral,
            finite_difference: t.finite_difference,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExclusionRecord {
    pub param: Vec<f64>,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub kind: String,
    pub passed: bool,
    pub tolerance: f64,
    /// Maxima and verdicts over the whole grid.
    pub summary: BTreeMap<String, Value>,
    /// Per-point data in grid order.
    pub points: Vec<BTreeMap<String, Value>>,
    pub exclusions: Vec<ExclusionRecord>,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub scenario: String,
    pub engine_version: String,
    pub tolerances: ToleranceBlock,
    pub passed: bool,
    pub checks: Vec<CheckRecord>,
}

impl Report {
    pub fn new(scenario: &str, tolerances: &Tolerances, checks: Vec<CheckRecord>) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            scenario: scenario.to_string(),
            engine_version: slant_core::VERSION.to_string(),
            tolerances: tolerances.into(),
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// A JSON number, or `null` when `x` is not finite.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().copied().map(num).collect())
}

/// `x` with 17 significant digits: positional for decimal exponents in
/// `-5..16`, scientific otherwise. Trailing zeros are trimmed.
pub fn format_f64(x: f64) -> String {
    if x == 0.0 {
        return if x.is_sign_negative() { "-0.0" } else { "0.0" }.to_string();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mantissa),
    };
    let digits: String = mantissa.chars().filter(|c| *c != '.').collect();
    if !(-5..16).contains(&exp) {
        let (head, tail) = digits.split_at(1);
        let tail = tail.trim_end_matches('0');
        let tail = if tail.is_empty() { "0" } else { tail };
        return format!("{sign}{head}.{tail}e{exp}");
    }
    let (int, frac) = if exp >= 0 {
        let split = exp as usize + 1;
        (digits[..split].to_string(), digits[split..].to_string())
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        ("0".to_string(), format!("{zeros}{digits}"))
    };
    let frac = frac.trim_end_matches('0');
    let frac = if frac.is_empty() { "0" } else { frac };
    format!("{sign}{int}.{frac}")
}

/// Pretty printing with the float rule of [`format_f64`].
struct ReportFormatter<'a>(PrettyFormatter<'a>);

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(
            fn $name<W: ?Sized + io::Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.0.$name(w $(, $arg)*)
            }
        )*
    };
}

impl Formatter for ReportFormatter<'_> {
    delegate!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        begin_object_value(),
        end_object_value(),
    );

    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(format_f64(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }
}

pub fn to_machine(report: &Report) -> String {
    let mut out = Vec::new();
    let mut ser =
        serde_json::Serializer::with_formatter(&mut out, ReportFormatter(PrettyFormatter::new()));
    report.serialize(&mut ser).expect("report serializes");
    out.push(b'\n');
    String::from_utf8(out).expect("JSON is UTF-8")
}

fn short(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() && x != 0.0 && !(1e-4..1e6).contains(&x.abs()) => {
                format!("{x:.3e}")
            }
            Some(x) if n.is_f64() => format!("{x:.9}"),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        Value::Array(items) => {
            let inner: Vec<String> = items.iter().map(short).collect();
            format!("[{}]", inner.join(", "))
        }
        Value::Object(_) => v.to_string(),
    }
}

fn table(out: &mut String, header: &[String], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| -> String {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        format!("    {}", padded.join("  ").trim_end())
    };
    let _ = writeln!(out, "{}", line(header));
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    let _ = writeln!(out, "{}", line(&rule));
    for row in rows {
        let _ = writeln!(out, "{}", line(row));
    }
}

pub fn to_human(report: &Report) -> String {
    let mut out = String::new();
    let t = &report.tolerances;
    let _ = writeln!(
        out,
        "scenario {}  (engine {}, structural {:e}, spectral {:e}, fd {:e})",
        report.scenario, report.engine_version, t.structural, t.spectral, t.finite_difference
    );
    for c in &report.checks {
        let _ = writeln!(out);
        let verdict = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(
            out,
            "{verdict}  {}  [{}]  tolerance {:e}",
            c.name, c.kind, c.tolerance
        );
        for (k, v) in &c.summary {
            let _ = writeln!(out, "    {k}: {}", short(v));
        }
        if !c.points.is_empty() {
            let mut columns: Vec<String> = Vec::new();
            for p in &c.points {
                for k in p.keys() {
                    if !columns.contains(k) {
                        columns.push(k.clone());
                    }
                }
            }
            // Parameters first, the rest alphabetically.
            columns.sort_by_key(|k| (k != "param", k.clone()));
            let rows: Vec<Vec<String>> = c
                .points
                .iter()
                .map(|p| {
                    columns
                        .iter()
                        .map(|k| p.get(k).map_or_else(|| "-".into(), short))
                        .collect()
                })
                .collect();
            table(&mut out, &columns, &rows);
        }
        for e in &c.exclusions {
            let _ = writeln!(out, "    excluded {}: {}", short(&nums(&e.param)), e.reason);
        }
        for f in &c.failures {
            let _ = writeln!(out, "    failure: {f}");
        }
    }
    let passed = report.checks.iter().filter(|c| c.passed).count();
    let _ = writeln!(out);
    let _ = writeln!(out, "{passed}/{} checks passed", report.checks.len());
    out
}

pub fn emit(report: &Report, format: Format) -> String {
    match format {
        Format::Human => to_human(report),
        Format::Machine => to_machine(report),
    }
}
