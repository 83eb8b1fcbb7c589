//! Pignistic probabilities for decision making.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::bba::Bba;
use crate::model::Model;
use crate::proposition::Proposition;

#[derive(Debug, Clone, PartialEq)]
pub struct PignisticResult {
    /// Probability of every surviving singleton.
    pub values: BTreeMap<Proposition, f64>,
    /// All singletons reaching the maximum, in canonical order.
    pub argmax: Vec<Proposition>,
}

impl PignisticResult {
    fn from_values(values: BTreeMap<Proposition, f64>) -> PignisticResult {
        let best = values.values().copied().fold(f64::NEG_INFINITY, f64::max);
        let argmax = values
            .iter()
            .filter(|(_, v)| **v == best)
            .map(|(p, _)| p.clone())
            .collect();
        PignisticResult { values, argmax }
    }

    pub fn probability(&self, p: &Proposition) -> Option<f64> {
        self.values.get(p).copied()
    }
}

/// Generalized pignistic probability of `a`:
/// `Σ_X C(X ∩ A) / C(X) · m(X)` with DSm cardinalities under `model`.
/// Focal elements that are empty under the model are skipped, and `P{∅} = 0`.
pub fn gpt_probability(a: &Proposition, b: &Bba, model: &Model) -> f64 {
    if model.is_empty(a) {
        return 0.0;
    }
    b.focal_elements()
        .filter_map(|(x, m)| {
            let cx = model.cardinality(x);
            (cx > 0).then(|| model.cardinality(&x.meet(a)) as f64 / cx as f64 * m)
        })
        .sum()
}

/// Generalized pignistic transformation evaluated on the singletons.
pub fn generalized_pignistic(b: &Bba, model: &Model) -> PignisticResult {
    let values = (0..model.frame_size())
        .map(Proposition::singleton)
        .filter(|s| !model.is_empty(s))
        .map(|s| {
            let p = gpt_probability(&s, b, model);
            (s, p)
        })
        .collect();
    PignisticResult::from_values(values)
}

/// Classical pignistic transformation over the power set.
///
/// Each focal element is read as the set of hypotheses appearing as
/// singleton terms of its canonical form (intersections vanish under
/// exclusivity). Elements with no such hypothesis are skipped.
pub fn classic_pignistic(b: &Bba) -> PignisticResult {
    let mut shares = alloc::vec![0.0; b.frame_size()];
    for (x, m) in b.focal_elements() {
        let set = x
            .terms()
            .iter()
            .filter(|t| t.len() == 1)
            .fold(0u32, |acc, t| acc | t.bits());
        let size = set.count_ones();
        if size == 0 {
            continue;
        }
        for (i, share) in shares.iter_mut().enumerate() {
            if set & (1 << i) != 0 {
                *share += m / f64::from(size);
            }
        }
    }
    let values = shares
        .into_iter()
        .enumerate()
        .map(|(i, v)| (Proposition::singleton(i), v))
        .collect();
    PignisticResult::from_values(values)
}
