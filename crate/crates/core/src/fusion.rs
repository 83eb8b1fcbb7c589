//! Precise combination rules.
//!
//! Every rule enumerates the tuples of focal elements (one per source),
//! multiplies their masses and intersects them in the free lattice; the
//! intersection is then reduced under the model. Rules differ only in what
//! happens to the product of a tuple whose intersection is empty (a partial
//! conflict).

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::bba::Bba;
use crate::engine::{self, accumulate, for_each_tuple, meet_all};
use crate::model::Model;
use crate::proposition::Proposition;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    /// Conjunctive consensus; the classic DSm rule under the free model.
    Conjunctive,
    /// Hybrid DSm rule.
    Dsmh,
    Pcr5,
    Dempster,
    Smets,
    Yager,
    DuboisPrade,
}

impl Rule {
    pub const ALL: [Rule; 7] = [
        Rule::Conjunctive,
        Rule::Dsmh,
        Rule::Pcr5,
        Rule::Dempster,
        Rule::Smets,
        Rule::Yager,
        Rule::DuboisPrade,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Rule::Conjunctive => "conjunctive",
            Rule::Dsmh => "dsmh",
            Rule::Pcr5 => "pcr5",
            Rule::Dempster => "dempster",
            Rule::Smets => "smets",
            Rule::Yager => "yager",
            Rule::DuboisPrade => "dubois-prade",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown rule `{0}`")]
pub struct UnknownRule(pub alloc::string::String);

impl FromStr for Rule {
    type Err = UnknownRule;

    fn from_str(s: &str) -> Result<Rule, UnknownRule> {
        Rule::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| UnknownRule(s.into()))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FusionError {
    #[error("at least two sources are required, got {0}")]
    TooFewSources(usize),
    #[error("{rule} combines exactly two sources, got {got}")]
    Arity { rule: Rule, got: usize },
    #[error("source {source_index} has {found} hypotheses, the model has {expected}")]
    FrameMismatch {
        source_index: usize,
        expected: usize,
        found: usize,
    },
    #[error("rule undefined: total conflict (0/0)")]
    Undefined,
    #[error("focal element {0:?} is empty under the model")]
    EmptyFocalElement(Proposition),
}

/// A tuple of focal elements whose intersection is empty under the model.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialConflict {
    pub focal_elements: Vec<Proposition>,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FusionReport {
    pub rule: Rule,
    pub result: Bba,
    /// Sum of the partial conflict masses.
    pub total_conflict: f64,
    pub partial_conflicts: Vec<PartialConflict>,
    /// Mass the rule could not place anywhere (Dubois–Prade only).
    pub mass_deficit: f64,
}

/// Result of one pass over all tuples: surviving intersections and conflicts.
struct Conjunction {
    n: usize,
    masses: BTreeMap<Proposition, f64>,
    conflicts: Vec<PartialConflict>,
}

impl Conjunction {
    fn conflict(&self) -> f64 {
        self.conflicts.iter().map(|c| c.mass).sum()
    }

    fn report(self, rule: Rule, mut result: Bba) -> FusionReport {
        result.set_open_world(result.mass(&Proposition::empty()) > 0.0);
        FusionReport {
            rule,
            total_conflict: self.conflict(),
            partial_conflicts: self.conflicts,
            mass_deficit: 0.0,
            result,
        }
    }
}

fn check_sources(sources: &[Bba], model: &Model) -> Result<(), FusionError> {
    if sources.len() < 2 {
        return Err(FusionError::TooFewSources(sources.len()));
    }
    for (i, s) in sources.iter().enumerate() {
        if s.frame_size() != model.frame_size() {
            return Err(FusionError::FrameMismatch {
                source_index: i,
                expected: model.frame_size(),
                found: s.frame_size(),
            });
        }
    }
    Ok(())
}

fn focal_lists(sources: &[Bba]) -> Vec<Vec<(Proposition, f64)>> {
    sources
        .iter()
        .map(|s| s.focal_elements().map(|(p, m)| (p.clone(), m)).collect())
        .collect()
}

fn conjunction(sources: &[Bba], model: &Model) -> Result<Conjunction, FusionError> {
    check_sources(sources, model)?;
    let mut masses = BTreeMap::new();
    let mut conflicts = Vec::new();
    for_each_tuple(&focal_lists(sources), |props, _, product| {
        let meet = model.reduce(&meet_all(props.iter().copied()));
        if meet.is_empty() {
            conflicts.push(PartialConflict {
                focal_elements: props.iter().map(|p| (*p).clone()).collect(),
                mass: product,
            });
        } else {
            accumulate(&mut masses, meet, product);
        }
    });
    Ok(Conjunction {
        n: model.frame_size(),
        masses,
        conflicts,
    })
}

/// Conjunctive consensus. Conflicting products are dropped from the result
/// and listed in the report, so `Σ result + total_conflict = 1`.
pub fn conjunctive(sources: &[Bba], model: &Model) -> Result<FusionReport, FusionError> {
    let c = conjunction(sources, model)?;
    let result = Bba::from_masses(c.n, c.masses.clone());
    Ok(c.report(Rule::Conjunctive, result))
}

/// Unnormalized Dempster rule: the conflict stays on `∅`.
pub fn smets(sources: &[Bba], model: &Model) -> Result<FusionReport, FusionError> {
    let c = conjunction(sources, model)?;
    let k = c.conflict();
    let mut result = Bba::from_masses(c.n, c.masses.clone());
    if k > 0.0 {
        result.add(Proposition::empty(), k);
    }
    Ok(c.report(Rule::Smets, result))
}

/// Conflict moved to total ignorance.
pub fn yager(sources: &[Bba], model: &Model) -> Result<FusionReport, FusionError> {
    let c = conjunction(sources, model)?;
    let k = c.conflict();
    let mut result = Bba::from_masses(c.n, c.masses.clone());
    if k > 0.0 {
        result.add(model.total_ignorance(), k);
    }
    Ok(c.report(Rule::Yager, result))
}

/// Conjunctive consensus normalized by `1 - k`.
pub fn dempster(sources: &[Bba], model: &Model) -> Result<FusionReport, FusionError> {
    let c = conjunction(sources, model)?;
    let kept: f64 = c.masses.values().sum();
    if kept <= 0.0 {
        return Err(FusionError::Undefined);
    }
    let result = Bba::from_masses(c.n, c.masses.iter().map(|(p, m)| (p.clone(), m / kept)));
    Ok(c.report(Rule::Dempster, result))
}

/// Each conflicting product `m1(X) m2(Y)` goes to `X ∪ Y`. When `X ∪ Y` is
/// itself empty the product is lost and reported as `mass_deficit`.
pub fn dubois_prade(sources: &[Bba], model: &Model) -> Result<FusionReport, FusionError> {
    if sources.len() != 2 {
        check_sources(sources, model)?;
        return Err(FusionError::Arity {
            rule: Rule::DuboisPrade,
            got: sources.len(),
        });
    }
    let c = conjunction(sources, model)?;
    let mut masses = c.masses.clone();
    let mut deficit = 0.0;
    for conflict in &c.conflicts {
        let union = model.reduce(&engine::join_all(&conflict.focal_elements));
        if union.is_empty() {
            deficit += conflict.mass;
        } else {
            accumulate(&mut masses, union, conflict.mass);
        }
    }
    let result = Bba::from_masses(c.n, masses);
    let mut report = c.report(Rule::DuboisPrade, result);
    report.mass_deficit = deficit;
    Ok(report)
}

/// Hybrid DSm rule. Conflicting products go to the union of the tuple, or to
/// a partial/total ignorance when every member is itself empty.
pub fn dsm_hybrid(sources: &[Bba], model: &Model) -> Result<FusionReport, FusionError> {
    let c = conjunction(sources, model)?;
    let mut masses = c.masses.clone();
    for conflict in &c.conflicts {
        let props: Vec<&Proposition> = conflict.focal_elements.iter().collect();
        accumulate(
            &mut masses,
            engine::route(&props, model).target().clone(),
            conflict.mass,
        );
    }
    let result = Bba::from_masses(c.n, masses);
    Ok(c.report(Rule::Dsmh, result))
}

fn reject_empty_focals(sources: &[Bba], model: &Model) -> Result<(), FusionError> {
    for s in sources {
        if let Some((p, _)) = s.focal_elements().find(|(p, _)| model.is_empty(p)) {
            return Err(FusionError::EmptyFocalElement(p.clone()));
        }
    }
    Ok(())
}

/// PCR5 for any number of sources.
///
/// In a conflicting tuple the sources are grouped by the (reduced)
/// proposition they committed to. Each group receives a share of the tuple
/// product proportional to the product of its own masses.
pub fn pcr5_general(sources: &[Bba], model: &Model) -> Result<FusionReport, FusionError> {
    check_sources(sources, model)?;
    reject_empty_focals(sources, model)?;
    let c = conjunction(sources, model)?;
    let mut masses = c.masses.clone();
    for conflict in &c.conflicts {
        let mut groups: Vec<(Proposition, f64)> = Vec::new();
        for (x, src) in conflict.focal_elements.iter().zip(sources) {
            let m = src.mass(x);
            let key = model.reduce(x);
            match groups.iter_mut().find(|(p, _)| *p == key) {
                Some((_, w)) => *w *= m,
                None => groups.push((key, m)),
            }
        }
        let total: f64 = groups.iter().map(|(_, w)| w).sum();
        if total <= 0.0 {
            continue;
        }
        for (p, w) in groups {
            accumulate(&mut masses, p, conflict.mass * w / total);
        }
    }
    let result = Bba::from_masses(c.n, masses);
    Ok(c.report(Rule::Pcr5, result))
}

/// PCR5 for two sources, written directly from the pairwise formula
/// `m1(X)² m2(Y) / (m1(X) + m2(Y)) + m2(X)² m1(Y) / (m2(X) + m1(Y))`.
pub fn pcr5_two(b1: &Bba, b2: &Bba, model: &Model) -> Result<FusionReport, FusionError> {
    let sources = [b1.clone(), b2.clone()];
    check_sources(&sources, model)?;
    reject_empty_focals(&sources, model)?;
    let c = conjunction(&sources, model)?;
    let mut masses = c.masses.clone();

    let mut props: Vec<Proposition> = b1.iter().chain(b2.iter()).map(|(p, _)| p.clone()).collect();
    props.sort();
    props.dedup();
    for x in &props {
        let mut gain = 0.0;
        for y in &props {
            if !model.reduce(&x.meet(y)).is_empty() {
                continue;
            }
            let (m1x, m2y) = (b1.mass(x), b2.mass(y));
            if m1x + m2y != 0.0 {
                gain += m1x * m1x * m2y / (m1x + m2y);
            }
            let (m2x, m1y) = (b2.mass(x), b1.mass(y));
            if m2x + m1y != 0.0 {
                gain += m2x * m2x * m1y / (m2x + m1y);
            }
        }
        if gain != 0.0 {
            accumulate(&mut masses, model.reduce(x), gain);
        }
    }
    let result = Bba::from_masses(c.n, masses);
    Ok(c.report(Rule::Pcr5, result))
}

/// Same as [`pcr5_general`].
pub fn pcr5(sources: &[Bba], model: &Model) -> Result<FusionReport, FusionError> {
    pcr5_general(sources, model)
}

/// Fuses all sources at once with `rule`.
pub fn combine(rule: Rule, sources: &[Bba], model: &Model) -> Result<FusionReport, FusionError> {
    match rule {
        Rule::Conjunctive => conjunctive(sources, model),
        Rule::Dsmh => dsm_hybrid(sources, model),
        Rule::Pcr5 => pcr5_general(sources, model),
        Rule::Dempster => dempster(sources, model),
        Rule::Smets => smets(sources, model),
        Rule::Yager => yager(sources, model),
        Rule::DuboisPrade => dubois_prade(sources, model),
    }
}

/// A failed step of [`sequential`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("step {step}: {error}")]
pub struct SequentialError {
    /// Number of sources involved in the failing fusion (2 for the first step).
    pub step: usize,
    pub error: FusionError,
    /// Reports of the steps that succeeded.
    pub completed: Vec<FusionReport>,
}

/// Left fold `((m1 ⊕ m2) ⊕ m3) ⊕ ...`; returns one report per step.
pub fn sequential(
    rule: Rule,
    sources: &[Bba],
    model: &Model,
) -> Result<Vec<FusionReport>, SequentialError> {
    if sources.len() < 2 {
        return Err(SequentialError {
            step: sources.len(),
            error: FusionError::TooFewSources(sources.len()),
            completed: Vec::new(),
        });
    }
    let mut reports: Vec<FusionReport> = Vec::with_capacity(sources.len() - 1);
    let mut acc = sources[0].clone();
    for (i, next) in sources.iter().enumerate().skip(1) {
        match combine(rule, &[acc, next.clone()], model) {
            Ok(report) => {
                acc = report.result.clone();
                reports.push(report);
            }
            Err(error) => {
                return Err(SequentialError {
                    step: i + 1,
                    error,
                    completed: reports,
                })
            }
        }
    }
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proposition::Frame;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn rule_names_round_trip() {
        for r in Rule::ALL {
            assert_eq!(r.name().parse::<Rule>().unwrap(), r);
        }
        assert!("pcr6".parse::<Rule>().is_err());
    }

    #[test]
    fn example_one_pcr5() {
        let f = Frame::new(["A", "B"]).unwrap();
        let p = |s: &str| f.parse(s).unwrap();
        let m = Model::shafer(2).unwrap();
        let b1 = Bba::from_masses(2, [(p("A"), 0.6), (p("A | B"), 0.4)]);
        let b2 = Bba::from_masses(2, [(p("B"), 0.3), (p("A | B"), 0.7)]);
        let g = pcr5_general(&[b1.clone(), b2.clone()], &m).unwrap();
        let t = pcr5_two(&b1, &b2, &m).unwrap();
        assert!(close(g.result.mass(&p("A")), 0.54));
        assert!(close(g.result.mass(&p("B")), 0.18));
        assert!(close(g.result.mass(&p("A | B")), 0.28));
        assert!(g.result.approx_eq(&t.result, 1e-15));
        assert!(close(g.total_conflict, 0.18));
    }

    #[test]
    fn dempster_total_conflict_is_undefined() {
        let m = Model::shafer(2).unwrap();
        let b1 = Bba::from_masses(2, [(Proposition::singleton(0), 1.0)]);
        let b2 = Bba::from_masses(2, [(Proposition::singleton(1), 1.0)]);
        assert_eq!(
            dempster(&[b1.clone(), b2.clone()], &m),
            Err(FusionError::Undefined)
        );
        let s = smets(&[b1, b2], &m).unwrap();
        assert!(s.result.is_open_world());
        assert_eq!(s.result.mass(&Proposition::empty()), 1.0);
    }

    #[test]
    fn arity_and_frame_checks() {
        let m = Model::shafer(2).unwrap();
        let b = Bba::vacuous(&m);
        assert_eq!(
            conjunctive(core::slice::from_ref(&b), &m),
            Err(FusionError::TooFewSources(1))
        );
        assert!(matches!(
            dubois_prade(&[b.clone(), b.clone(), b.clone()], &m),
            Err(FusionError::Arity { got: 3, .. })
        ));
        let other = Bba::vacuous(&Model::shafer(3).unwrap());
        assert!(matches!(
            yager(&[b, other], &m),
            Err(FusionError::FrameMismatch {
                source_index: 1,
                ..
            })
        ));
    }

    #[test]
    fn sequential_reports_failing_step() {
        let m = Model::shafer(2).unwrap();
        let a = Bba::from_masses(2, [(Proposition::singleton(0), 1.0)]);
        let b = Bba::from_masses(2, [(Proposition::singleton(1), 1.0)]);
        let err = sequential(Rule::Dempster, &[a.clone(), a.clone(), b], &m).unwrap_err();
        assert_eq!(err.step, 3);
        assert_eq!(err.error, FusionError::Undefined);
        assert_eq!(err.completed.len(), 1);
    }
}
