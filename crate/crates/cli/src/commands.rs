//! The five verbs. Each returns the text for standard output.

use dsmt_core::fusion::{self, FusionError, FusionReport, Rule};
use dsmt_core::intervals::{imprecise_classic, imprecise_hybrid, ImpreciseBba, IntervalError};
use dsmt_core::pignistic::generalized_pignistic;
use dsmt_core::qualitative::{
    qcr, qdsmh, qpcr5_two, quasi_normalize, Label, QBba, QualitativeError,
};
use dsmt_core::{Frame, Proposition};
use serde_json::{json, Map, Value};

use crate::problem::{Problem, Sources};
use crate::render::{self, number, table};
use crate::{CliError, Format, Options};

/// Largest frame `lattice` will enumerate.
pub const MAX_LATTICE_FRAME: usize = 5;

enum Fused {
    Precise(FusionReport),
    Imprecise(ImpreciseBba),
    Qualitative {
        result: QBba,
        conflict: Option<Label>,
    },
}

fn fusion_error(rule: Rule, e: FusionError, frame: &Frame) -> CliError {
    match e {
        FusionError::Undefined => CliError::Undefined {
            message: format!("{rule}: {e}"),
            partial: String::new(),
        },
        FusionError::EmptyFocalElement(p) => CliError::Invalid(format!(
            "{rule}: focal element `{}` is empty under the model",
            frame.format(&p)
        )),
        other => CliError::Invalid(format!("{rule}: {other}")),
    }
}

fn qualitative_error(rule: Rule, e: QualitativeError, frame: &Frame) -> CliError {
    match e {
        QualitativeError::EmptyFocalElement(p) => CliError::Invalid(format!(
            "{rule}: focal element `{}` is empty under the model",
            frame.format(&p)
        )),
        other => CliError::Invalid(format!("{rule}: {other}")),
    }
}

fn interval_error(rule: Rule, e: IntervalError) -> CliError {
    CliError::Invalid(format!("{rule}: {e}"))
}

fn quasi_label(problem: &Problem, opts: &Options) -> Result<Option<Label>, CliError> {
    let Some(text) = &opts.quasi_normalize else {
        return Ok(None);
    };
    match &problem.sources {
        Sources::Qualitative(scale, _) => scale
            .parse(text)
            .map(Some)
            .map_err(|e| CliError::Invalid(format!("--quasi-normalize: {e}"))),
        _ => Err(CliError::Invalid(
            "--quasi-normalize applies only to qualitative problems".into(),
        )),
    }
}

fn fuse_with(problem: &Problem, rule: Rule, quasi: Option<Label>) -> Result<Fused, CliError> {
    let frame = &problem.frame;
    let model = &problem.model;
    match &problem.sources {
        Sources::Precise(bbas) => fusion::combine(rule, bbas, model)
            .map(Fused::Precise)
            .map_err(|e| fusion_error(rule, e, frame)),
        Sources::Imprecise(sources) => match rule {
            Rule::Conjunctive if model.is_free() => imprecise_classic(sources)
                .map(Fused::Imprecise)
                .map_err(|e| interval_error(rule, e)),
            Rule::Conjunctive => Err(CliError::Invalid(format!(
                "{rule}: imprecise masses use the conjunctive rule on the free model only (use dsmh)"
            ))),
            Rule::Dsmh => imprecise_hybrid(sources, model)
                .map(Fused::Imprecise)
                .map_err(|e| interval_error(rule, e)),
            _ => Err(CliError::Invalid(format!(
                "{rule}: not available for imprecise masses (use conjunctive or dsmh)"
            ))),
        },
        Sources::Qualitative(_, sources) => {
            let (result, conflict) = match rule {
                Rule::Conjunctive => qcr(sources, model).map(|f| (f.result, Some(f.conflict))),
                Rule::Dsmh => qdsmh(sources, model).map(|r| (r, None)),
                Rule::Pcr5 if sources.len() == 2 => {
                    qpcr5_two(&sources[0], &sources[1], model).map(|f| (f.result, Some(f.conflict)))
                }
                Rule::Pcr5 => Err(QualitativeError::Arity(sources.len())),
                _ => {
                    return Err(CliError::Invalid(format!(
                        "{rule}: not available for qualitative masses (use conjunctive, dsmh or pcr5)"
                    )))
                }
            }
            .map_err(|e| qualitative_error(rule, e, frame))?;
            let result = match quasi {
                Some(c) => quasi_normalize(&result, c),
                None => result,
            };
            Ok(Fused::Qualitative { result, conflict })
        }
    }
}

fn block(frame: &Frame, rule: Rule, fused: &Fused) -> String {
    let mut out = format!("rule: {rule}\n");
    match fused {
        Fused::Precise(report) => {
            let rows: Vec<Vec<String>> = report
                .result
                .iter()
                .filter(|(_, m)| *m != 0.0)
                .map(|(p, m)| vec![frame.format(p), number(m)])
                .collect();
            out.push_str(&table(&["proposition", "mass"], &rows));
            out.push_str(&format!(
                "total conflict: {}\n",
                number(report.total_conflict)
            ));
            out.push_str(&format!("mass deficit: {}\n", number(report.mass_deficit)));
        }
        Fused::Imprecise(result) => {
            let rows: Vec<Vec<String>> = result
                .iter()
                .map(|(p, s)| vec![frame.format(p), s.to_string()])
                .collect();
            out.push_str(&table(&["proposition", "mass"], &rows));
            let admissible = if result.is_admissible() { "yes" } else { "no" };
            out.push_str(&format!("admissible: {admissible}\n"));
        }
        Fused::Qualitative { result, conflict } => {
            let rows: Vec<Vec<String>> = result
                .iter()
                .map(|(p, l)| vec![frame.format(p), l.to_string()])
                .collect();
            out.push_str(&table(&["proposition", "mass"], &rows));
            if let Some(c) = conflict {
                out.push_str(&format!("conflict: {c}\n"));
            }
        }
    }
    out
}

fn source_json(frame: &Frame, name: &str, fused: &Fused) -> Value {
    let mut obj = Map::new();
    obj.insert("name".into(), json!(name));
    match fused {
        Fused::Precise(report) => {
            obj.insert(
                "masses".into(),
                Value::Object(render::bba_masses(frame, &report.result)),
            );
            if report.result.is_open_world() {
                obj.insert("open_world".into(), json!(true));
            }
            obj.insert("total_conflict".into(), json!(report.total_conflict));
            obj.insert("mass_deficit".into(), json!(report.mass_deficit));
            let partial: Vec<Value> = report
                .partial_conflicts
                .iter()
                .map(|c| {
                    json!({
                        "focal_elements": c.focal_elements.iter().map(|p| frame.format(p)).collect::<Vec<_>>(),
                        "mass": c.mass,
                    })
                })
                .collect();
            obj.insert("partial_conflicts".into(), Value::Array(partial));
        }
        Fused::Imprecise(result) => {
            let masses: Map<String, Value> = result
                .iter()
                .map(|(p, s)| (frame.format(p), render::set_json(s)))
                .collect();
            obj.insert("masses".into(), Value::Object(masses));
            obj.insert("admissible".into(), json!(result.is_admissible()));
        }
        Fused::Qualitative { result, conflict } => {
            obj.insert(
                "masses".into(),
                Value::Object(render::qbba_masses(frame, result)),
            );
            if let Some(c) = conflict {
                obj.insert("conflict".into(), json!(c.to_string()));
            }
        }
    }
    Value::Object(obj)
}

pub fn lattice(problem: &Problem, opts: &Options) -> Result<String, CliError> {
    let n = problem.frame.len();
    if n > MAX_LATTICE_FRAME {
        return Err(CliError::Invalid(format!(
            "lattice listing supports at most {MAX_LATTICE_FRAME} hypotheses, the frame has {n}"
        )));
    }
    let elements = problem.model.lattice();
    let frame = &problem.frame;
    match opts.format {
        Format::Table => {
            let rows: Vec<Vec<String>> = elements
                .iter()
                .map(|p| vec![frame.format(p), problem.model.cardinality(p).to_string()])
                .collect();
            Ok(table(&["proposition", "cardinality"], &rows))
        }
        Format::Json => {
            let mut doc = render::document(problem);
            let list: Vec<Value> = elements
                .iter()
                .map(|p| json!({ "proposition": frame.format(p), "cardinality": problem.model.cardinality(p) }))
                .collect();
            doc.insert("lattice".into(), Value::Array(list));
            Ok(render::pretty(&Value::Object(doc)))
        }
    }
}

pub fn fuse(problem: &Problem, opts: &Options) -> Result<String, CliError> {
    let quasi = quasi_label(problem, opts)?;
    let fused = fuse_with(problem, opts.rule, quasi)?;
    Ok(match opts.format {
        Format::Table => block(&problem.frame, opts.rule, &fused),
        Format::Json => {
            let mut doc = render::document(problem);
            doc.insert("rule".into(), json!(opts.rule.name()));
            doc.insert(
                "sources".into(),
                json!([source_json(&problem.frame, opts.rule.name(), &fused)]),
            );
            render::pretty(&Value::Object(doc))
        }
    })
}

fn applicable(problem: &Problem) -> Vec<Rule> {
    match problem.sources {
        Sources::Precise(_) => Rule::ALL.to_vec(),
        Sources::Imprecise(_) => vec![Rule::Conjunctive, Rule::Dsmh],
        Sources::Qualitative(..) => vec![Rule::Conjunctive, Rule::Dsmh, Rule::Pcr5],
    }
}

fn cell(fused: &Fused, p: &Proposition) -> String {
    match fused {
        Fused::Precise(r) => number(r.result.mass(p)),
        Fused::Imprecise(r) => r
            .mass(p)
            .map_or_else(|| "{0}".to_string(), |s| s.to_string()),
        Fused::Qualitative { result, .. } => result.mass(p).to_string(),
    }
}

fn keys(fused: &Fused) -> Vec<Proposition> {
    match fused {
        Fused::Precise(r) => r.result.focal_elements().map(|(p, _)| p.clone()).collect(),
        Fused::Imprecise(r) => r
            .iter()
            .filter(|(_, s)| !s.is_zero())
            .map(|(p, _)| p.clone())
            .collect(),
        Fused::Qualitative { result, .. } => result
            .iter()
            .filter(|(_, l)| l.index() > 0)
            .map(|(p, _)| p.clone())
            .collect(),
    }
}

pub fn compare(problem: &Problem, opts: &Options) -> Result<String, CliError> {
    if problem.source_count() < 2 {
        return Err(CliError::Invalid(format!(
            "at least two sources are required, got {}",
            problem.source_count()
        )));
    }
    let quasi = quasi_label(problem, opts)?;
    let frame = &problem.frame;
    let results: Vec<(Rule, Result<Fused, CliError>)> = applicable(problem)
        .into_iter()
        .map(|rule| (rule, fuse_with(problem, rule, quasi)))
        .collect();
    let mut rows: Vec<Proposition> = results
        .iter()
        .filter_map(|(_, r)| r.as_ref().ok())
        .flat_map(keys)
        .collect();
    rows.sort();
    rows.dedup();

    match opts.format {
        Format::Table => {
            let header: Vec<&str> = std::iter::once("proposition")
                .chain(results.iter().map(|(rule, _)| rule.name()))
                .collect();
            let mut body: Vec<Vec<String>> = rows
                .iter()
                .map(|p| {
                    std::iter::once(frame.format(p))
                        .chain(results.iter().map(|(_, r)| match r {
                            Ok(f) => cell(f, p),
                            Err(_) => "-".to_string(),
                        }))
                        .collect()
                })
                .collect();
            let conflicts: Vec<String> = results
                .iter()
                .map(|(_, r)| match r {
                    Ok(Fused::Precise(report)) => number(report.total_conflict),
                    Ok(Fused::Qualitative {
                        conflict: Some(c), ..
                    }) => c.to_string(),
                    _ => "-".to_string(),
                })
                .collect();
            if conflicts.iter().any(|c| c != "-") {
                body.push(
                    std::iter::once("(conflict)".to_string())
                        .chain(conflicts)
                        .collect(),
                );
            }
            let mut out = table(&header, &body);
            let mut notes = Vec::new();
            for (rule, r) in &results {
                match r {
                    Ok(Fused::Precise(report)) if report.mass_deficit > 0.0 => {
                        notes.push(format!(
                            "{rule}: mass deficit {}",
                            number(report.mass_deficit)
                        ));
                    }
                    Ok(_) => {}
                    Err(e) => notes.push(e.to_string()),
                }
            }
            if !notes.is_empty() {
                out.push_str("notes:\n");
                for n in notes {
                    out.push_str(&format!("  {n}\n"));
                }
            }
            Ok(out)
        }
        Format::Json => {
            let mut doc = render::document(problem);
            let sources: Vec<Value> = results
                .iter()
                .filter_map(|(rule, r)| r.as_ref().ok().map(|f| source_json(frame, rule.name(), f)))
                .collect();
            let failures: Map<String, Value> = results
                .iter()
                .filter_map(|(rule, r)| {
                    r.as_ref()
                        .err()
                        .map(|e| (rule.name().to_string(), json!(e.to_string())))
                })
                .collect();
            doc.insert("sources".into(), Value::Array(sources));
            doc.insert("failures".into(), Value::Object(failures));
            Ok(render::pretty(&Value::Object(doc)))
        }
    }
}

pub fn pignistic(problem: &Problem, opts: &Options) -> Result<String, CliError> {
    let Sources::Precise(bbas) = &problem.sources else {
        return Err(CliError::Invalid("pignistic needs precise masses".into()));
    };
    let (rule, fused) = match bbas.len() {
        0 => return Err(CliError::Invalid("the problem has no sources".into())),
        1 => (None, bbas[0].clone()),
        _ => match fuse_with(problem, opts.rule, None)? {
            Fused::Precise(report) => (Some(opts.rule), report.result),
            _ => unreachable!("precise sources fuse to a precise result"),
        },
    };
    let result = generalized_pignistic(&fused, &problem.model);
    let frame = &problem.frame;
    let argmax: Vec<String> = result.argmax.iter().map(|p| frame.format(p)).collect();
    Ok(match opts.format {
        Format::Table => {
            let rows: Vec<Vec<String>> = result
                .values
                .iter()
                .map(|(p, v)| vec![frame.format(p), number(*v)])
                .collect();
            let mut out = format!(
                "rule: {}\n",
                rule.map_or("none (single source)", Rule::name)
            );
            out.push_str(&table(&["hypothesis", "probability"], &rows));
            out.push_str(&format!("argmax: {}\n", argmax.join(", ")));
            out
        }
        Format::Json => {
            let mut doc = render::document(problem);
            doc.insert("rule".into(), rule.map_or(Value::Null, |r| json!(r.name())));
            let probabilities: Map<String, Value> = result
                .values
                .iter()
                .map(|(p, v)| (frame.format(p), json!(v)))
                .collect();
            doc.insert("probabilities".into(), Value::Object(probabilities));
            doc.insert("argmax".into(), json!(argmax));
            render::pretty(&Value::Object(doc))
        }
    })
}

pub fn sequential(problem: &Problem, opts: &Options) -> Result<String, CliError> {
    let Sources::Precise(bbas) = &problem.sources else {
        return Err(CliError::Invalid(
            "sequential fusion needs precise masses".into(),
        ));
    };
    let frame = &problem.frame;
    let (reports, failure) = match fusion::sequential(opts.rule, bbas, &problem.model) {
        Ok(reports) => (reports, None),
        Err(e) => (e.completed.clone(), Some(e)),
    };
    let label = |step: usize| problem.names[..step].join(" + ");
    let text = match opts.format {
        Format::Table => {
            let mut out = String::new();
            for (i, report) in reports.into_iter().enumerate() {
                if i > 0 {
                    out.push('\n');
                }
                out.push_str(&format!("step {}: {}\n", i + 2, label(i + 2)));
                out.push_str(&block(frame, opts.rule, &Fused::Precise(report)));
            }
            out
        }
        Format::Json => {
            let mut doc = render::document(problem);
            doc.insert("rule".into(), json!(opts.rule.name()));
            let steps: Vec<Value> = reports
                .into_iter()
                .enumerate()
                .map(|(i, r)| {
                    source_json(
                        frame,
                        &format!("step {}: {}", i + 2, label(i + 2)),
                        &Fused::Precise(r),
                    )
                })
                .collect();
            doc.insert("sources".into(), Value::Array(steps));
            if let Some(e) = &failure {
                doc.insert(
                    "error".into(),
                    json!({ "step": e.step, "message": e.error.to_string() }),
                );
            }
            render::pretty(&Value::Object(doc))
        }
    };
    match failure {
        None => Ok(text),
        Some(e) => match fusion_error(opts.rule, e.error, frame) {
            CliError::Undefined { message, .. } => Err(CliError::Undefined {
                message: format!("step {}: {message}", e.step),
                partial: text,
            }),
            other => Err(other),
        },
    }
}
