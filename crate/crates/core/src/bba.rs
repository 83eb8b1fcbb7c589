//! Precise generalized basic belief assignments.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::model::Model;
use crate::proposition::Proposition;

/// Tolerance used by [`Bba::validate`] for `Σ m = 1`.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// A sparse mass function over the hyper-power set of a frame of size `n`.
///
/// The model is not stored: every model-dependent query takes it explicitly,
/// so the same assignment can be read under different models (dynamic
/// fusion). `open_world` marks assignments that may legitimately carry mass on
/// `∅`, such as the output of Smets' rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Bba {
    n: usize,
    masses: BTreeMap<Proposition, f64>,
    open_world: bool,
}

/// One broken invariant reported by [`Bba::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    FrameMismatch { bba: usize, model: usize },
    OutOfFrame(Proposition),
    OutOfRange(Proposition, f64),
    Sum(f64),
    MassOnEmptySet(f64),
    MassOnEmptyProposition(Proposition, f64),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::FrameMismatch { bba, model } => {
                write!(
                    f,
                    "assignment has {bba} hypotheses but the model has {model}"
                )
            }
            Violation::OutOfFrame(p) => write!(f, "{p:?} uses hypotheses outside the frame"),
            Violation::OutOfRange(p, m) => write!(f, "mass {m} on {p:?} is outside [0, 1]"),
            Violation::Sum(s) => write!(f, "sum={s}"),
            Violation::MassOnEmptySet(m) => write!(f, "mass {m} on the empty set"),
            Violation::MassOnEmptyProposition(p, m) => {
                write!(f, "mass {m} on empty proposition {p:?}")
            }
        }
    }
}

/// A key that [`Bba::rekeyed`] replaced by its reduced form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rekey {
    pub from: Proposition,
    pub to: Proposition,
}

impl Bba {
    /// An assignment with no focal elements (sums to 0).
    pub fn new(n: usize) -> Bba {
        Bba {
            n,
            masses: BTreeMap::new(),
            open_world: false,
        }
    }

    /// Builds an assignment; masses given twice for the same proposition add up.
    pub fn from_masses<I: IntoIterator<Item = (Proposition, f64)>>(n: usize, masses: I) -> Bba {
        let mut b = Bba::new(n);
        for (p, m) in masses {
            b.add(p, m);
        }
        b
    }

    /// All mass on the model's total ignorance.
    pub fn vacuous(model: &Model) -> Bba {
        Bba::from_masses(model.frame_size(), [(model.total_ignorance(), 1.0)])
    }

    pub fn add(&mut self, p: Proposition, m: f64) {
        *self.masses.entry(p).or_insert(0.0) += m;
    }

    pub fn set_open_world(&mut self, open: bool) {
        self.open_world = open;
    }

    pub fn with_open_world(mut self, open: bool) -> Bba {
        self.open_world = open;
        self
    }

    pub fn is_open_world(&self) -> bool {
        self.open_world
    }

    pub fn frame_size(&self) -> usize {
        self.n
    }

    pub fn mass(&self, p: &Proposition) -> f64 {
        self.masses.get(p).copied().unwrap_or(0.0)
    }

    /// Entries in canonical proposition order, zeros included.
    pub fn iter(&self) -> impl Iterator<Item = (&Proposition, f64)> {
        self.masses.iter().map(|(p, m)| (p, *m))
    }

    /// Entries with strictly positive mass.
    pub fn focal_elements(&self) -> impl Iterator<Item = (&Proposition, f64)> {
        self.iter().filter(|(_, m)| *m > 0.0)
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.masses.values().sum()
    }

    pub fn validate(&self, model: &Model) -> Result<(), Vec<Violation>> {
        let mut violations = Vec::new();
        if self.n != model.frame_size() {
            violations.push(Violation::FrameMismatch {
                bba: self.n,
                model: model.frame_size(),
            });
        }
        for (p, m) in self.iter() {
            if p.width() > self.n {
                violations.push(Violation::OutOfFrame(p.clone()));
                continue;
            }
            if !(0.0..=1.0).contains(&m) {
                violations.push(Violation::OutOfRange(p.clone(), m));
            }
            if m == 0.0 {
                continue;
            }
            if p.is_empty() {
                if !self.open_world {
                    violations.push(Violation::MassOnEmptySet(m));
                }
            } else if p.width() <= model.frame_size() && model.is_empty(p) {
                violations.push(Violation::MassOnEmptyProposition(p.clone(), m));
            }
        }
        let sum = self.total();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            violations.push(Violation::Sum(sum));
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    /// Moves mass from non-empty reducible keys to their reduced form, e.g.
    /// `t1 | t3` becomes `t1` when `t3` is forced empty. Keys that reduce to
    /// `∅` are kept as they are.
    pub fn rekeyed(&self, model: &Model) -> (Bba, Vec<Rekey>) {
        let mut out = Bba::new(self.n).with_open_world(self.open_world);
        let mut changes = Vec::new();
        for (p, m) in self.iter() {
            let r = model.reduce(p);
            if r.is_empty() || r == *p {
                out.add(p.clone(), m);
            } else {
                changes.push(Rekey {
                    from: p.clone(),
                    to: r.clone(),
                });
                out.add(r, m);
            }
        }
        (out, changes)
    }

    /// Divides every mass by the total. `None` if the total is not positive.
    pub fn renormalized(&self) -> Option<Bba> {
        let total = self.total();
        if total <= 0.0 || !total.is_finite() {
            return None;
        }
        let mut out = self.clone();
        for m in out.masses.values_mut() {
            *m /= total;
        }
        Some(out)
    }

    /// Generalized belief: total mass of the non-empty propositions included in `a`.
    pub fn belief(&self, a: &Proposition, model: &Model) -> f64 {
        self.iter()
            .filter(|(b, _)| !model.is_empty(b) && model.subset(b, a))
            .map(|(_, m)| m)
            .sum()
    }

    /// Generalized plausibility: total mass of the propositions meeting `a`.
    pub fn plausibility(&self, a: &Proposition, model: &Model) -> f64 {
        self.iter()
            .filter(|(b, _)| model.intersects(b, a))
            .map(|(_, m)| m)
            .sum()
    }

    /// True if both assignments give every proposition masses within `tol`.
    pub fn approx_eq(&self, other: &Bba, tol: f64) -> bool {
        self.masses
            .keys()
            .chain(other.masses.keys())
            .all(|p| (self.mass(p) - other.mass(p)).abs() <= tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proposition::Frame;

    #[test]
    fn validate_examples() {
        let f = Frame::numbered(2);
        let shafer = Model::shafer(2).unwrap();
        let p = |s: &str| f.parse(s).unwrap();

        let ok = Bba::from_masses(2, [(p("t1"), 0.6), (p("t1 | t2"), 0.4)]);
        assert_eq!(ok.validate(&shafer), Ok(()));

        let short = Bba::from_masses(2, [(p("t1"), 0.5)]);
        assert_eq!(
            short.validate(&shafer),
            Err(alloc::vec![Violation::Sum(0.5)])
        );
        assert_eq!(alloc::format!("{}", Violation::Sum(0.5)), "sum=0.5");

        let empty = Bba::from_masses(2, [(p("t1 & t2"), 0.1), (p("t1"), 0.9)]);
        let errs = empty.validate(&shafer).unwrap_err();
        assert_eq!(
            errs,
            alloc::vec![Violation::MassOnEmptyProposition(p("t1 & t2"), 0.1)]
        );

        let on_empty = Bba::from_masses(2, [(p("∅"), 0.1), (p("t1"), 0.9)]);
        assert_eq!(
            on_empty.validate(&shafer),
            Err(alloc::vec![Violation::MassOnEmptySet(0.1)])
        );
        assert_eq!(on_empty.with_open_world(true).validate(&shafer), Ok(()));
    }

    #[test]
    fn vacuous_examples() {
        let f = Frame::numbered(3);
        assert_eq!(
            Bba::vacuous(&Model::shafer(2).unwrap()),
            Bba::from_masses(2, [(Proposition::union_of([0, 1]), 1.0)])
        );
        assert_eq!(
            Bba::vacuous(&Model::free(3).unwrap()),
            Bba::from_masses(3, [(Proposition::total_ignorance(3), 1.0)])
        );
        let m = Model::hybrid(3, [f.parse("t3").unwrap()]).unwrap();
        assert_eq!(
            Bba::vacuous(&m),
            Bba::from_masses(3, [(f.parse("t1 | t2").unwrap(), 1.0)])
        );
    }

    #[test]
    fn belief_plausibility_examples() {
        let f = Frame::numbered(2);
        let p = |s: &str| f.parse(s).unwrap();
        let shafer = Model::shafer(2).unwrap();
        let b = Bba::from_masses(2, [(p("t1"), 0.6), (p("t1 | t2"), 0.4)]);
        assert!((b.belief(&p("t1"), &shafer) - 0.6).abs() < 1e-15);
        assert!((b.plausibility(&p("t1"), &shafer) - 1.0).abs() < 1e-15);
        assert!((b.belief(&p("t1 | t2"), &shafer) - 1.0).abs() < 1e-15);

        let free = Model::free(2).unwrap();
        let c = Bba::from_masses(2, [(p("t1"), 0.3), (p("t2"), 0.7)]);
        for a in ["t1", "t2", "t1 & t2", "t1 | t2"] {
            assert!((c.plausibility(&p(a), &free) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rekeying_reports_changes() {
        let f = Frame::numbered(3);
        let p = |s: &str| f.parse(s).unwrap();
        let m = Model::hybrid(3, [p("t3")]).unwrap();
        let b = Bba::from_masses(3, [(p("t1 | t3"), 0.5), (p("t3"), 0.2), (p("t1"), 0.3)]);
        let (r, changes) = b.rekeyed(&m);
        assert_eq!(
            changes,
            alloc::vec![Rekey {
                from: p("t1 | t3"),
                to: p("t1")
            }]
        );
        assert!((r.mass(&p("t1")) - 0.8).abs() < 1e-15);
        assert_eq!(r.mass(&p("t3")), 0.2);
    }
}
