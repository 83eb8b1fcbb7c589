//! DSm models: which propositions are forced empty.
//!
//! The Venn diagram of a frame of size `n` has one part per non-empty index
//! set `P`, namely the points lying in exactly the hypotheses of `P`. An
//! intersection term `S` covers every part `P ⊇ S`. A constraint removes all
//! parts its proposition covers; since removal is upward closed, the surviving
//! parts form a down-closed family and a term survives iff the part with the
//! same index set survives.

use alloc::vec::Vec;

use crate::proposition::{closure, Proposition, Term, MAX_FRAME_SIZE};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("frame has {0} hypotheses, at most {MAX_FRAME_SIZE} are supported")]
    TooLarge(usize),
    #[error("constraint uses hypotheses outside a frame of size {n}")]
    OutOfFrame { n: usize },
    #[error("constraints leave no Venn part: even total ignorance is empty")]
    Degenerate,
}

/// A frame size plus a set of forced-empty propositions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    n: usize,
    constraints: Vec<Proposition>,
    alive: Vec<bool>,
    parts: Vec<Term>,
}

impl Model {
    /// No constraints: only `∅` is empty.
    pub fn free(n: usize) -> Result<Model, ModelError> {
        Model::hybrid(n, [])
    }

    /// All pairwise intersections forced empty.
    pub fn shafer(n: usize) -> Result<Model, ModelError> {
        let mut constraints = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                constraints.push(Proposition::intersection([i, j]));
            }
        }
        Model::hybrid(n, constraints)
    }

    /// Forces every given proposition empty.
    pub fn hybrid<I: IntoIterator<Item = Proposition>>(
        n: usize,
        constraints: I,
    ) -> Result<Model, ModelError> {
        if n > MAX_FRAME_SIZE {
            return Err(ModelError::TooLarge(n));
        }
        let constraints: Vec<Proposition> = constraints.into_iter().collect();
        let size = 1usize << n;
        let mut alive = alloc::vec![true; size];
        alive[0] = false;
        for c in &constraints {
            if c.width() > n {
                return Err(ModelError::OutOfFrame { n });
            }
            for t in c.terms() {
                let t = t.bits() as usize;
                for (part, a) in alive.iter_mut().enumerate() {
                    if part & t == t {
                        *a = false;
                    }
                }
            }
        }
        let mut parts: Vec<Term> = (1..size)
            .filter(|&p| alive[p])
            .filter_map(|p| Term::from_bits(p as u32))
            .collect();
        parts.sort();
        if parts.is_empty() {
            return Err(ModelError::Degenerate);
        }
        Ok(Model {
            n,
            constraints,
            alive,
            parts,
        })
    }

    pub fn frame_size(&self) -> usize {
        self.n
    }

    /// The constraints as given.
    pub fn constraints(&self) -> &[Proposition] {
        &self.constraints
    }

    /// Surviving Venn parts in term order.
    pub fn parts(&self) -> &[Term] {
        &self.parts
    }

    pub fn is_free(&self) -> bool {
        self.parts.len() + 1 == 1 << self.n
    }

    /// True iff no two hypotheses may overlap.
    pub fn is_shafer_like(&self) -> bool {
        self.parts.iter().all(|p| p.len() == 1)
    }

    pub fn term_survives(&self, t: Term) -> bool {
        self.alive.get(t.bits() as usize).copied().unwrap_or(false)
    }

    /// Surviving parts covered by `p`.
    pub fn regions(&self, p: &Proposition) -> Vec<Term> {
        let terms = self.reduce(p);
        self.parts
            .iter()
            .copied()
            .filter(|part| terms.terms().iter().any(|t| t.is_subset_of(*part)))
            .collect()
    }

    /// DSm cardinality: the number of surviving parts covered by `p`.
    pub fn cardinality(&self, p: &Proposition) -> u64 {
        let terms = self.reduce(p);
        self.parts
            .iter()
            .filter(|part| terms.terms().iter().any(|t| t.is_subset_of(**part)))
            .count() as u64
    }

    pub fn is_empty(&self, p: &Proposition) -> bool {
        !p.terms().iter().any(|t| self.term_survives(*t))
    }

    /// Canonical representative of `p` modulo the constraints: its surviving
    /// terms. Two propositions cover the same parts iff they reduce equal.
    pub fn reduce(&self, p: &Proposition) -> Proposition {
        if p.terms().iter().all(|t| self.term_survives(*t)) {
            return p.clone();
        }
        Proposition::from_terms(p.terms().iter().copied().filter(|t| self.term_survives(*t)))
    }

    /// Total ignorance under the model.
    pub fn total_ignorance(&self) -> Proposition {
        self.reduce(&Proposition::total_ignorance(self.n))
    }

    /// Region inclusion.
    pub fn subset(&self, a: &Proposition, b: &Proposition) -> bool {
        a.terms()
            .iter()
            .filter(|t| self.term_survives(**t))
            .all(|t| b.terms().iter().any(|u| u.is_subset_of(*t)))
    }

    pub fn intersects(&self, a: &Proposition, b: &Proposition) -> bool {
        a.terms()
            .iter()
            .any(|t| b.terms().iter().any(|u| self.term_survives(t.union(*u))))
    }

    /// Every distinct proposition under the model (`∅` included), sorted by
    /// DSm cardinality and then canonically.
    ///
    /// # Panics
    ///
    /// Panics if the model has more than 128 surviving parts.
    pub fn lattice(&self) -> Vec<Proposition> {
        let mut all = closure(&self.parts);
        all.sort_by_cached_key(|p| (self.cardinality(p), p.clone()));
        all
    }
}
