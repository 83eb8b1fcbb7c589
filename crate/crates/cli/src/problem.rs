//! Problem files: a JSON document naming a frame, a model and the sources.

use std::path::Path;

use dsmt_core::intervals::{decimal, from_f64, ImpreciseBba, Interval, Scalar, SubunitarySet};
use dsmt_core::qualitative::{LabelScale, QBba};
use dsmt_core::{Bba, Frame, Model, Violation};
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Precise,
    Imprecise,
    Qualitative,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Precise => "precise",
            Mode::Imprecise => "imprecise",
            Mode::Qualitative => "qualitative",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    #[default]
    Free,
    Shafer,
    Hybrid,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    #[serde(rename = "type", default)]
    pub kind: ModelKind,
    #[serde(default)]
    pub empty: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct ScaleSpec {
    pub m: u32,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SourceSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub masses: Map<String, Value>,
    /// Allows mass on `∅` (results of Smets' rule fed back in).
    #[serde(default)]
    pub open_world: bool,
}

/// The file as written.
#[derive(Debug, Clone, Deserialize)]
pub struct ProblemFile {
    pub frame: Vec<String>,
    #[serde(default)]
    pub model: ModelSpec,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub scale: Option<ScaleSpec>,
    #[serde(default)]
    pub sources: Vec<SourceSpec>,
}

#[derive(Debug, Clone)]
pub enum Sources {
    Precise(Vec<Bba>),
    Imprecise(Vec<ImpreciseBba>),
    Qualitative(LabelScale, Vec<QBba>),
}

/// A validated problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub frame: Frame,
    pub model: Model,
    pub model_spec: ModelSpec,
    pub names: Vec<String>,
    pub sources: Sources,
}

impl Problem {
    pub fn mode(&self) -> Mode {
        match self.sources {
            Sources::Precise(_) => Mode::Precise,
            Sources::Imprecise(_) => Mode::Imprecise,
            Sources::Qualitative(..) => Mode::Qualitative,
        }
    }

    pub fn source_count(&self) -> usize {
        self.names.len()
    }
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

pub fn load(path: &Path, renormalize: bool) -> Result<Problem, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let file: ProblemFile =
        serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    from_file(file, renormalize)
}

pub fn from_file(file: ProblemFile, renormalize: bool) -> Result<Problem, CliError> {
    let frame = Frame::new(file.frame.iter().map(String::as_str))
        .map_err(|e| invalid(format!("frame: {e}")))?;
    let n = frame.len();
    let parse = |text: &str, context: &str| {
        frame
            .parse(text)
            .map_err(|e| invalid(format!("{context}: cannot parse `{text}`: {e}")))
    };
    let model = match file.model.kind {
        ModelKind::Free => Model::free(n),
        ModelKind::Shafer => Model::shafer(n),
        ModelKind::Hybrid => {
            let constraints = file
                .model
                .empty
                .iter()
                .map(|e| parse(e, "model"))
                .collect::<Result<Vec<_>, _>>()?;
            Model::hybrid(n, constraints)
        }
    }
    .map_err(|e| invalid(format!("model: {e}")))?;
    if file.model.kind != ModelKind::Hybrid && !file.model.empty.is_empty() {
        return Err(invalid(
            "model: `empty` is only allowed with type \"hybrid\"",
        ));
    }

    let names: Vec<String> = file
        .sources
        .iter()
        .enumerate()
        .map(|(i, s)| s.name.clone().unwrap_or_else(|| format!("m{}", i + 1)))
        .collect();
    let mut entries = Vec::with_capacity(file.sources.len());
    for (source, name) in file.sources.iter().zip(&names) {
        let mut parsed = Vec::with_capacity(source.masses.len());
        for (key, value) in &source.masses {
            parsed.push((parse(key, name)?, key.as_str(), value));
        }
        entries.push(parsed);
    }

    let sources = match file.mode {
        Mode::Precise => {
            let free = Model::free(n).map_err(|e| invalid(format!("model: {e}")))?;
            let mut out = Vec::with_capacity(entries.len());
            for ((parsed, source), name) in entries.iter().zip(&file.sources).zip(&names) {
                let mut b = Bba::new(n).with_open_world(source.open_world);
                for (p, key, value) in parsed {
                    let m = value.as_f64().ok_or_else(|| {
                        invalid(format!("{name}: mass of `{key}` must be a number"))
                    })?;
                    b.add(p.clone(), m);
                }
                let (b, moves) = checked(b, &free, &frame, name, renormalize)?.rekeyed(&model);
                for mv in moves {
                    eprintln!(
                        "warning: {name}: mass on `{}` moved to `{}`",
                        frame.format(&mv.from),
                        frame.format(&mv.to)
                    );
                }
                out.push(b);
            }
            Sources::Precise(out)
        }
        Mode::Imprecise => {
            let mut out = Vec::with_capacity(entries.len());
            for (parsed, name) in entries.iter().zip(&names) {
                let mut masses = Vec::with_capacity(parsed.len());
                for (p, key, value) in parsed {
                    let set = subunitary(value)
                        .map_err(|e| invalid(format!("{name}: mass of `{key}`: {e}")))?;
                    let inside = set
                        .inf()
                        .is_none_or(|lo| *lo >= Scalar::from_integer(0.into()))
                        && set
                            .sup()
                            .is_none_or(|hi| *hi <= Scalar::from_integer(1.into()));
                    if !inside {
                        return Err(invalid(format!("{name}: mass of `{key}` leaves [0, 1]")));
                    }
                    masses.push((p.clone(), set));
                }
                out.push(ImpreciseBba::from_masses(n, masses));
            }
            Sources::Imprecise(out)
        }
        Mode::Qualitative => {
            let spec = file
                .scale
                .as_ref()
                .ok_or_else(|| invalid("qualitative mode needs `scale: {\"m\": <int>}`"))?;
            let scale = LabelScale::new(spec.m).map_err(|e| invalid(format!("scale: {e}")))?;
            let mut out = Vec::with_capacity(entries.len());
            for (parsed, name) in entries.iter().zip(&names) {
                let mut masses = Vec::with_capacity(parsed.len());
                for (p, key, value) in parsed {
                    let text = value.as_str().ok_or_else(|| {
                        invalid(format!(
                            "{name}: mass of `{key}` must be a label like \"L2\""
                        ))
                    })?;
                    let label = scale
                        .parse(text)
                        .map_err(|e| invalid(format!("{name}: {e}")))?;
                    masses.push((p.clone(), label));
                }
                out.push(QBba::from_masses(n, scale, masses));
            }
            Sources::Qualitative(scale, out)
        }
    };
    Ok(Problem {
        frame,
        model,
        model_spec: file.model,
        names,
        sources,
    })
}

/// Checks a precise source against the free model (mass on propositions the
/// chosen model empties is allowed: that is dynamic fusion).
fn checked(
    b: Bba,
    free: &Model,
    frame: &Frame,
    name: &str,
    renormalize: bool,
) -> Result<Bba, CliError> {
    let Err(violations) = b.validate(free) else {
        return Ok(b);
    };
    let only_sum = violations.iter().all(|v| matches!(v, Violation::Sum(_)));
    if renormalize && only_sum {
        return b
            .renormalized()
            .ok_or_else(|| invalid(format!("{name}: cannot renormalize a zero assignment")));
    }
    let described: Vec<String> = violations.iter().map(|v| describe(v, frame)).collect();
    let mut msg = format!("{name}: {}", described.join("; "));
    if only_sum {
        msg.push_str(" (pass --renormalize to rescale)");
    }
    Err(invalid(msg))
}

fn describe(v: &Violation, frame: &Frame) -> String {
    match v {
        Violation::OutOfRange(p, m) => {
            format!("mass {m} on `{}` is outside [0, 1]", frame.format(p))
        }
        Violation::MassOnEmptyProposition(p, m) => {
            format!("mass {m} on empty `{}`", frame.format(p))
        }
        Violation::OutOfFrame(p) => format!("`{}` is outside the frame", frame.format(p)),
        Violation::Sum(s) => format!("masses sum to {s}, not 1"),
        other => other.to_string(),
    }
}

fn scalar(v: &Value) -> Result<Scalar, String> {
    match v {
        Value::Number(n) => n
            .as_f64()
            .and_then(from_f64)
            .ok_or_else(|| format!("`{n}` is not a finite number")),
        Value::String(s) => decimal(s).map_err(|e| e.to_string()),
        other => Err(format!("expected a number, got {other}")),
    }
}

fn piece(v: &Value) -> Result<Interval, String> {
    let obj = v
        .as_object()
        .ok_or_else(|| format!("expected an interval object, got {v}"))?;
    if let Some(point) = obj.get("point") {
        if obj.len() != 1 {
            return Err("a point takes no other fields".into());
        }
        return Ok(Interval::point(scalar(point)?));
    }
    let flag = |key: &str| match obj.get(key) {
        None => Ok(false),
        Some(Value::Bool(b)) => Ok(*b),
        Some(other) => Err(format!("`{key}` must be true or false, got {other}")),
    };
    for key in obj.keys() {
        if !["lo", "hi", "lo_open", "hi_open"].contains(&key.as_str()) {
            return Err(format!("unknown interval field `{key}`"));
        }
    }
    let lo = scalar(obj.get("lo").ok_or("interval needs `lo`")?)?;
    let hi = scalar(obj.get("hi").ok_or("interval needs `hi`")?)?;
    Interval::new(lo, hi, !flag("lo_open")?, !flag("hi_open")?).map_err(|e| e.to_string())
}

fn subunitary(v: &Value) -> Result<SubunitarySet, String> {
    match v {
        Value::Array(items) => Ok(SubunitarySet::normalize(
            items.iter().map(piece).collect::<Result<Vec<_>, _>>()?,
        )),
        Value::Number(_) | Value::String(_) => Ok(SubunitarySet::point(scalar(v)?)),
        Value::Object(_) => Ok(SubunitarySet::interval(piece(v)?)),
        other => Err(format!("expected a list of intervals, got {other}")),
    }
}
