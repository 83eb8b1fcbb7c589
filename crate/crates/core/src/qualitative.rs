//! Linguistic labels and qualitative fusion.
//!
//! A scale with `m` interior labels has `L0 ≺ L1 ≺ ... ≺ L(m+1)`. Addition
//! saturates at `L(m+1)`, multiplication is the minimum and subtraction
//! floors at `L0`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};

use crate::engine::{self, accumulate, for_each_tuple, meet_all, MassValue};
use crate::model::Model;
use crate::proposition::Proposition;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QualitativeError {
    #[error("a label scale needs at least 2 interior labels, got {0}")]
    ScaleTooSmall(u32),
    #[error("label index {index} is outside L0..L{top}")]
    LabelOutOfRange { index: u32, top: u32 },
    #[error("`{0}` is not a label (expected L<k>)")]
    BadLabel(alloc::string::String),
    #[error("at least two sources are required, got {0}")]
    TooFewSources(usize),
    #[error("this rule combines exactly two sources, got {0}")]
    Arity(usize),
    #[error("source {source_index} has {found} hypotheses, expected {expected}")]
    FrameMismatch {
        source_index: usize,
        expected: usize,
        found: usize,
    },
    #[error("sources use different label scales")]
    ScaleMismatch,
    #[error("focal element {0:?} is empty under the model")]
    EmptyFocalElement(Proposition),
}

/// The number `m ≥ 2` of interior labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelScale {
    m: u32,
}

impl LabelScale {
    pub fn new(m: u32) -> Result<LabelScale, QualitativeError> {
        if m < 2 {
            return Err(QualitativeError::ScaleTooSmall(m));
        }
        Ok(LabelScale { m })
    }

    pub fn m(self) -> u32 {
        self.m
    }

    /// Index of the largest label, `m + 1`.
    pub fn top(self) -> u32 {
        self.m + 1
    }

    pub fn label(self, index: u32) -> Result<Label, QualitativeError> {
        if index > self.top() {
            return Err(QualitativeError::LabelOutOfRange {
                index,
                top: self.top(),
            });
        }
        Ok(Label { index, scale: self })
    }

    pub fn min(self) -> Label {
        Label {
            index: 0,
            scale: self,
        }
    }

    pub fn max(self) -> Label {
        Label {
            index: self.top(),
            scale: self,
        }
    }

    /// All labels in increasing order.
    pub fn labels(self) -> impl Iterator<Item = Label> {
        (0..=self.top()).map(move |index| Label { index, scale: self })
    }

    /// Parses `L<k>`.
    pub fn parse(self, text: &str) -> Result<Label, QualitativeError> {
        let index = text
            .trim()
            .strip_prefix('L')
            .and_then(|k| k.parse::<u32>().ok())
            .ok_or_else(|| QualitativeError::BadLabel(text.into()))?;
        self.label(index)
    }
}

/// A label of a given scale. Operations between different scales panic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Label {
    index: u32,
    scale: LabelScale,
}

impl Label {
    pub fn index(self) -> u32 {
        self.index
    }

    pub fn scale(self) -> LabelScale {
        self.scale
    }

    fn same_scale(self, other: Label) {
        assert_eq!(self.scale, other.scale, "labels from different scales");
    }

    /// `L_i + L_j = L_min(i+j, m+1)`.
    pub fn qadd(self, other: Label) -> Label {
        self.same_scale(other);
        self.saturating(self.index + other.index)
    }

    /// `L_i × L_j = L_min(i,j)`.
    pub fn qmul(self, other: Label) -> Label {
        self.same_scale(other);
        Label {
            index: self.index.min(other.index),
            scale: self.scale,
        }
    }

    /// `L_i - L_j = L_(i-j)` if `i ≥ j`, `L0` otherwise.
    pub fn qsub(self, other: Label) -> Label {
        self.same_scale(other);
        Label {
            index: self.index.saturating_sub(other.index),
            scale: self.scale,
        }
    }

    fn saturating(self, index: u32) -> Label {
        Label {
            index: index.min(self.scale.top()),
            scale: self.scale,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "L{}", self.index)
    }
}

impl MassValue for Label {
    fn is_null(&self) -> bool {
        self.index == 0
    }

    fn plus(&self, other: &Self) -> Self {
        self.qadd(*other)
    }

    fn times(&self, other: &Self) -> Self {
        self.qmul(*other)
    }
}

/// A qualitative mass function. There is no normalization constraint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QBba {
    n: usize,
    scale: LabelScale,
    masses: BTreeMap<Proposition, Label>,
}

impl QBba {
    pub fn new(n: usize, scale: LabelScale) -> QBba {
        QBba {
            n,
            scale,
            masses: BTreeMap::new(),
        }
    }

    /// Labels given twice for the same proposition are added.
    ///
    /// # Panics
    ///
    /// Panics if a label belongs to another scale.
    pub fn from_masses<I: IntoIterator<Item = (Proposition, Label)>>(
        n: usize,
        scale: LabelScale,
        masses: I,
    ) -> QBba {
        let mut q = QBba::new(n, scale);
        for (p, l) in masses {
            assert_eq!(l.scale, scale, "label from a different scale");
            accumulate(&mut q.masses, p, l);
        }
        q
    }

    pub fn frame_size(&self) -> usize {
        self.n
    }

    pub fn scale(&self) -> LabelScale {
        self.scale
    }

    /// The label of `p`, `L0` when absent.
    pub fn mass(&self, p: &Proposition) -> Label {
        self.masses.get(p).copied().unwrap_or(self.scale.min())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Proposition, Label)> {
        self.masses.iter().map(|(p, l)| (p, *l))
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }
}

/// Output of [`qcr`] and [`qpcr5_two`]: the fused masses and the conflict label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QFusion {
    pub result: QBba,
    /// Sum of the products of tuples whose intersection is empty.
    pub conflict: Label,
}

fn check_sources(sources: &[QBba], n: usize) -> Result<LabelScale, QualitativeError> {
    if sources.len() < 2 {
        return Err(QualitativeError::TooFewSources(sources.len()));
    }
    let scale = sources[0].scale;
    for (i, s) in sources.iter().enumerate() {
        if s.n != n {
            return Err(QualitativeError::FrameMismatch {
                source_index: i,
                expected: n,
                found: s.n,
            });
        }
        if s.scale != scale {
            return Err(QualitativeError::ScaleMismatch);
        }
    }
    Ok(scale)
}

fn focal_lists(sources: &[QBba]) -> Vec<Vec<(Proposition, Label)>> {
    sources
        .iter()
        .map(|s| engine::focal(s.masses.iter()))
        .collect()
}

/// Qualitative conjunctive rule. Products of tuples whose intersection is
/// empty under the model are summed into the conflict label.
pub fn qcr(sources: &[QBba], model: &Model) -> Result<QFusion, QualitativeError> {
    let n = model.frame_size();
    let scale = check_sources(sources, n)?;
    let mut masses = BTreeMap::new();
    let mut conflict = scale.min();
    for_each_tuple(&focal_lists(sources), |props, _, product| {
        let meet = model.reduce(&meet_all(props.iter().copied()));
        if meet.is_empty() {
            conflict = conflict.qadd(product);
        } else {
            accumulate(&mut masses, meet, product);
        }
    });
    Ok(QFusion {
        result: QBba { n, scale, masses },
        conflict,
    })
}

/// Qualitative DSm classic rule: the conjunctive rule on the free lattice.
pub fn qdsmc(sources: &[QBba]) -> Result<QBba, QualitativeError> {
    let n = sources.first().map_or(0, |s| s.n);
    check_sources(sources, n)?;
    let scale = sources[0].scale;
    let mut masses = BTreeMap::new();
    for_each_tuple(&focal_lists(sources), |props, _, product| {
        let meet = meet_all(props.iter().copied());
        if !meet.is_empty() {
            accumulate(&mut masses, meet, product);
        }
    });
    Ok(QBba { n, scale, masses })
}

/// Qualitative hybrid DSm rule, with the same routing as the precise one.
pub fn qdsmh(sources: &[QBba], model: &Model) -> Result<QBba, QualitativeError> {
    let n = model.frame_size();
    let scale = check_sources(sources, n)?;
    let masses = engine::hybrid(&focal_lists(sources), model);
    Ok(QBba { n, scale, masses })
}

/// Approximate qualitative PCR5 for two sources.
///
/// For each conflicting pair with labels `L_a` (on `X`) and `L_b` (on `Y`)
/// and product `L_p`, `X` is owed the fractional index `a/(a+b)·p` and `Y`
/// the index `b/(a+b)·p`. Owed indices are summed exactly per proposition,
/// rounded once (half away from zero) and added to the conjunctive result.
pub fn qpcr5_two(q1: &QBba, q2: &QBba, model: &Model) -> Result<QFusion, QualitativeError> {
    let sources = [q1.clone(), q2.clone()];
    check_sources(&sources, model.frame_size())?;
    for q in &sources {
        if let Some((p, _)) = q.iter().find(|(p, l)| !l.is_null() && model.is_empty(p)) {
            return Err(QualitativeError::EmptyFocalElement(p.clone()));
        }
    }
    let mut fused = qcr(&sources, model)?;
    let mut owed: BTreeMap<Proposition, Ratio<i64>> = BTreeMap::new();
    for_each_tuple(&focal_lists(&sources), |props, labels, product| {
        if !model.reduce(&props[0].meet(props[1])).is_empty() {
            return;
        }
        let (a, b) = (i64::from(labels[0].index), i64::from(labels[1].index));
        if a + b == 0 {
            return;
        }
        let p = i64::from(product.index);
        for (x, w) in [(props[0], a), (props[1], b)] {
            *owed.entry(model.reduce(x)).or_insert_with(Ratio::zero) += Ratio::new(w * p, a + b);
        }
    });
    for (x, share) in owed {
        let steps = share.round().to_integer().to_u32().unwrap_or(u32::MAX);
        let current = fused.result.mass(&x);
        let updated = current.saturating(current.index.saturating_add(steps));
        if !updated.is_null() {
            fused.result.masses.insert(x, updated);
        }
    }
    Ok(fused)
}

/// Subtracts `c` from every mass.
pub fn quasi_normalize(q: &QBba, c: Label) -> QBba {
    QBba {
        n: q.n,
        scale: q.scale,
        masses: q
            .masses
            .iter()
            .map(|(p, l)| (p.clone(), l.qsub(c)))
            .collect(),
    }
}
