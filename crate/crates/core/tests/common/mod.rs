#![allow(dead_code)]

use std::collections::BTreeMap;

use dsmt_core::{Bba, Frame, Model, Proposition};
use rand::Rng;

pub fn frame(n: usize) -> Frame {
    Frame::numbered(n)
}

/// Free, Shafer and one genuinely hybrid model for `n` in 1..=3.
pub fn models(n: usize) -> Vec<(&'static str, Model)> {
    let f = frame(n);
    let mut out = vec![
        ("free", Model::free(n).unwrap()),
        ("shafer", Model::shafer(n).unwrap()),
    ];
    match n {
        2 => out.push((
            "hybrid",
            Model::hybrid(2, [f.parse("t2").unwrap()]).unwrap(),
        )),
        3 => out.push((
            "hybrid",
            Model::hybrid(
                3,
                [f.parse("t1 & t3").unwrap(), f.parse("t2 & t3").unwrap()],
            )
            .unwrap(),
        )),
        _ => {}
    }
    out
}

/// Non-empty propositions that survive the model.
pub fn surviving(model: &Model) -> Vec<Proposition> {
    model
        .lattice()
        .into_iter()
        .filter(|p| !p.is_empty())
        .collect()
}

/// A random assignment on up to `max_focal` surviving propositions, summing to 1.
pub fn random_bba<R: Rng>(rng: &mut R, model: &Model, max_focal: usize) -> Bba {
    let pool = surviving(model);
    let k = rng.gen_range(1..=max_focal.min(pool.len()));
    let mut weights: Vec<(Proposition, f64)> = (0..k)
        .map(|_| {
            (
                pool[rng.gen_range(0..pool.len())].clone(),
                rng.gen_range(0.05..1.0),
            )
        })
        .collect();
    let total: f64 = weights.iter().map(|(_, w)| w).sum();
    for (_, w) in &mut weights {
        *w /= total;
    }
    Bba::from_masses(model.frame_size(), weights)
}

/// The set of hypotheses of a proposition read under exclusivity.
pub fn shafer_mask(p: &Proposition) -> u32 {
    p.terms()
        .iter()
        .filter(|t| t.len() == 1)
        .fold(0, |acc, t| acc | t.bits())
}

pub fn as_masks(b: &Bba) -> BTreeMap<u32, f64> {
    let mut out = BTreeMap::new();
    for (p, m) in b.focal_elements() {
        *out.entry(shafer_mask(p)).or_insert(0.0) += m;
    }
    out
}

/// Textbook Dempster combination over subsets of the frame; `None` on total conflict.
pub fn dst_dempster(a: &BTreeMap<u32, f64>, b: &BTreeMap<u32, f64>) -> Option<BTreeMap<u32, f64>> {
    let mut out: BTreeMap<u32, f64> = BTreeMap::new();
    let mut conflict = 0.0;
    for (x, mx) in a {
        for (y, my) in b {
            if x & y == 0 {
                conflict += mx * my;
            } else {
                *out.entry(x & y).or_insert(0.0) += mx * my;
            }
        }
    }
    if out.is_empty() {
        return None;
    }
    let norm = 1.0 - conflict;
    Some(out.into_iter().map(|(k, v)| (k, v / norm)).collect())
}

pub fn dst_belief(m: &BTreeMap<u32, f64>, a: u32) -> f64 {
    m.iter()
        .filter(|(b, _)| **b != 0 && *b & a == **b)
        .map(|(_, v)| v)
        .sum()
}

pub fn dst_plausibility(m: &BTreeMap<u32, f64>, a: u32) -> f64 {
    m.iter().filter(|(b, _)| *b & a != 0).map(|(_, v)| v).sum()
}
