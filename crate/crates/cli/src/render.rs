//! Plain-text tables and JSON documents.

use dsmt_core::intervals::{format_scalar, Interval, SubunitarySet};
use dsmt_core::qualitative::QBba;
use dsmt_core::{Bba, Frame};
use serde_json::{json, Map, Value};

use crate::problem::{ModelKind, Problem, Sources};

/// Fixed six-decimal display; never prints `-0.000000`.
pub fn number(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.6}")
}

/// Aligns rows into columns: the first column left-aligned, the rest right-aligned.
pub fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let cols = header.len();
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let mut out = String::new();
        for (i, cell) in cells.iter().enumerate() {
            let pad = widths[i] - cell.chars().count();
            if i > 0 {
                out.push_str("  ");
                out.push_str(&" ".repeat(pad));
                out.push_str(cell);
            } else {
                out.push_str(cell);
                if cols > 1 {
                    out.push_str(&" ".repeat(pad));
                }
            }
        }
        out.push('\n');
        out
    };
    let mut out = line(header.to_vec());
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
    out
}

pub fn interval_json(i: &Interval) -> Value {
    if i.is_point() {
        return json!({ "point": format_scalar(i.lo()) });
    }
    json!({
        "lo": format_scalar(i.lo()),
        "hi": format_scalar(i.hi()),
        "lo_open": !i.lo_closed(),
        "hi_open": !i.hi_closed(),
    })
}

pub fn set_json(s: &SubunitarySet) -> Value {
    Value::Array(s.pieces().iter().map(interval_json).collect())
}

pub fn bba_masses(frame: &Frame, b: &Bba) -> Map<String, Value> {
    b.iter()
        .filter(|(_, m)| *m != 0.0)
        .map(|(p, m)| (frame.format(p), json!(m)))
        .collect()
}

pub fn qbba_masses(frame: &Frame, q: &QBba) -> Map<String, Value> {
    q.iter()
        .map(|(p, l)| (frame.format(p), json!(l.to_string())))
        .collect()
}

/// The header every JSON document shares, so a result can be read back as a problem.
pub fn document(problem: &Problem) -> Map<String, Value> {
    let mut doc = Map::new();
    doc.insert("frame".into(), json!(problem.frame.names()));
    let kind = match problem.model_spec.kind {
        ModelKind::Free => "free",
        ModelKind::Shafer => "shafer",
        ModelKind::Hybrid => "hybrid",
    };
    let mut model = Map::new();
    model.insert("type".into(), json!(kind));
    if !problem.model_spec.empty.is_empty() {
        model.insert("empty".into(), json!(problem.model_spec.empty));
    }
    doc.insert("model".into(), Value::Object(model));
    doc.insert("mode".into(), json!(problem.mode().name()));
    if let Sources::Qualitative(scale, _) = &problem.sources {
        doc.insert("scale".into(), json!({ "m": scale.m() }));
    }
    doc
}

pub fn pretty(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}
