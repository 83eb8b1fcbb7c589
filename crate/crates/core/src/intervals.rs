//! Subunitary sets and imprecise (set-valued) belief assignments.
//!
//! A [`SubunitarySet`] is a finite union of intervals and points. Arithmetic
//! is exact over rationals. Operations distribute over pairs of pieces and an
//! endpoint of a result is closed only if both endpoints it was computed from
//! are closed, so `(0.4, 0.6) ⊡ [0, 0.4] = (0, 0.24)`.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::engine::{self, for_each_tuple, meet_all, MassValue};
use crate::model::Model;
use crate::proposition::Proposition;

pub type Scalar = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IntervalError {
    #[error("malformed interval: lower bound exceeds upper bound")]
    Reversed,
    #[error("malformed interval: equal bounds need both endpoints closed")]
    EmptyDegenerate,
    #[error("`{0}` is not a decimal number")]
    BadNumber(String),
    #[error("at least two sources are required, got {0}")]
    TooFewSources(usize),
    #[error("source {source_index} has {found} hypotheses, expected {expected}")]
    FrameMismatch {
        source_index: usize,
        expected: usize,
        found: usize,
    },
}

/// Parses `0.15`, `-2`, `1.5e-3` or `3/20` exactly.
pub fn decimal(text: &str) -> Result<Scalar, IntervalError> {
    let bad = || IntervalError::BadNumber(text.into());
    let s = text.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Scalar::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty()
        || !int_part
            .bytes()
            .chain(frac_part.bytes())
            .all(|b| b.is_ascii_digit())
    {
        return Err(bad());
    }
    let mut all = String::with_capacity(int_part.len() + frac_part.len());
    all.push_str(int_part);
    all.push_str(frac_part);
    let mut value = Scalar::from_integer(all.parse::<BigInt>().map_err(|_| bad())?);
    let shift = exponent - frac_part.len() as i32;
    let ten = Scalar::from_integer(BigInt::from(10));
    if shift >= 0 {
        value *= num_traits::pow(ten, shift as usize);
    } else {
        value /= num_traits::pow(ten, shift.unsigned_abs() as usize);
    }
    Ok(if negative { -value } else { value })
}

/// The exact value of the shortest decimal that prints as `x`.
pub fn from_f64(x: f64) -> Option<Scalar> {
    if !x.is_finite() {
        return None;
    }
    decimal(&alloc::format!("{x}")).ok()
}

pub fn to_f64(x: &Scalar) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Decimal rendering when the expansion terminates, `p/q` otherwise.
pub fn format_scalar(x: &Scalar) -> String {
    let mut den = x.denom().clone();
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return alloc::format!("{}/{}", x.numer(), x.denom());
    }
    let places = twos.max(fives);
    let scaled =
        (x.abs() * Scalar::from_integer(num_traits::pow(BigInt::from(10), places))).to_integer();
    let mut digits = scaled.to_string();
    if places > 0 {
        while digits.len() <= places {
            digits.insert(0, '0');
        }
        digits.insert(digits.len() - places, '.');
    }
    if x.is_negative() {
        digits.insert(0, '-');
    }
    digits
}

/// One interval or point. `lo == hi` only with both endpoints closed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Scalar,
    hi: Scalar,
    lo_closed: bool,
    hi_closed: bool,
}

impl Interval {
    pub fn new(
        lo: Scalar,
        hi: Scalar,
        lo_closed: bool,
        hi_closed: bool,
    ) -> Result<Interval, IntervalError> {
        match lo.cmp(&hi) {
            Ordering::Greater => Err(IntervalError::Reversed),
            Ordering::Equal if !(lo_closed && hi_closed) => Err(IntervalError::EmptyDegenerate),
            _ => Ok(Interval {
                lo,
                hi,
                lo_closed,
                hi_closed,
            }),
        }
    }

    pub fn point(x: Scalar) -> Interval {
        Interval {
            lo: x.clone(),
            hi: x,
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn closed(lo: Scalar, hi: Scalar) -> Result<Interval, IntervalError> {
        Interval::new(lo, hi, true, true)
    }

    pub fn open(lo: Scalar, hi: Scalar) -> Result<Interval, IntervalError> {
        Interval::new(lo, hi, false, false)
    }

    pub fn lo(&self) -> &Scalar {
        &self.lo
    }

    pub fn hi(&self) -> &Scalar {
        &self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        let above = match self.lo.cmp(x) {
            Ordering::Less => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Greater => false,
        };
        let below = match x.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_closed,
            Ordering::Greater => false,
        };
        above && below
    }

    /// Builds a result piece; a collapsed range of non-empty operands is the point.
    fn raw(lo: (Scalar, bool), hi: (Scalar, bool)) -> Interval {
        if lo.0 == hi.0 {
            Interval::point(lo.0)
        } else {
            Interval {
                lo: lo.0,
                hi: hi.0,
                lo_closed: lo.1,
                hi_closed: hi.1,
            }
        }
    }

    fn mul(&self, other: &Interval) -> Interval {
        if !self.lo.is_negative() && !other.lo.is_negative() {
            return Interval::raw(
                (&self.lo * &other.lo, self.lo_closed && other.lo_closed),
                (&self.hi * &other.hi, self.hi_closed && other.hi_closed),
            );
        }
        let ends = |i: &Interval| [(i.lo.clone(), i.lo_closed), (i.hi.clone(), i.hi_closed)];
        let mut candidates: Vec<(Scalar, bool)> = Vec::with_capacity(4);
        for (a, ac) in ends(self) {
            for (b, bc) in ends(other) {
                candidates.push((&a * &b, ac && bc));
            }
        }
        let pick = |best: &mut (Scalar, bool), c: &(Scalar, bool), want: Ordering| match c
            .0
            .cmp(&best.0)
        {
            o if o == want => *best = c.clone(),
            Ordering::Equal => best.1 |= c.1,
            _ => {}
        };
        let mut lo = candidates[0].clone();
        let mut hi = candidates[0].clone();
        for c in &candidates[1..] {
            pick(&mut lo, c, Ordering::Less);
            pick(&mut hi, c, Ordering::Greater);
        }
        Interval::raw(lo, hi)
    }

    fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = match self.lo.cmp(&other.lo) {
            Ordering::Less => (other.lo.clone(), other.lo_closed),
            Ordering::Greater => (self.lo.clone(), self.lo_closed),
            Ordering::Equal => (self.lo.clone(), self.lo_closed && other.lo_closed),
        };
        let hi = match self.hi.cmp(&other.hi) {
            Ordering::Less => (self.hi.clone(), self.hi_closed),
            Ordering::Greater => (other.hi.clone(), other.hi_closed),
            Ordering::Equal => (self.hi.clone(), self.hi_closed && other.hi_closed),
        };
        Interval::new(lo.0, hi.0, lo.1, hi.1).ok()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_point() {
            return write!(f, "{{{}}}", format_scalar(&self.lo));
        }
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            format_scalar(&self.lo),
            format_scalar(&self.hi),
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// A finite union of disjoint, non-abutting intervals sorted by lower bound.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SubunitarySet {
    pieces: Vec<Interval>,
}

impl SubunitarySet {
    /// The empty set.
    pub fn empty() -> SubunitarySet {
        SubunitarySet { pieces: Vec::new() }
    }

    pub fn point(x: Scalar) -> SubunitarySet {
        SubunitarySet {
            pieces: alloc::vec![Interval::point(x)],
        }
    }

    pub fn zero() -> SubunitarySet {
        SubunitarySet::point(Scalar::zero())
    }

    pub fn one() -> SubunitarySet {
        SubunitarySet::point(Scalar::one())
    }

    pub fn interval(i: Interval) -> SubunitarySet {
        SubunitarySet {
            pieces: alloc::vec![i],
        }
    }

    /// Sorts and merges overlapping pieces, and pieces that touch at an
    /// endpoint one of them includes.
    pub fn normalize<I: IntoIterator<Item = Interval>>(pieces: I) -> SubunitarySet {
        let mut pieces: Vec<Interval> = pieces.into_iter().collect();
        pieces.sort_by(|a, b| a.lo.cmp(&b.lo).then(b.lo_closed.cmp(&a.lo_closed)));
        let mut out: Vec<Interval> = Vec::with_capacity(pieces.len());
        for nx in pieces {
            if let Some(cur) = out.last_mut() {
                let joins = match nx.lo.cmp(&cur.hi) {
                    Ordering::Less => true,
                    Ordering::Equal => cur.hi_closed || nx.lo_closed,
                    Ordering::Greater => false,
                };
                if joins {
                    match nx.hi.cmp(&cur.hi) {
                        Ordering::Greater => {
                            cur.hi = nx.hi;
                            cur.hi_closed = nx.hi_closed;
                        }
                        Ordering::Equal => cur.hi_closed |= nx.hi_closed,
                        Ordering::Less => {}
                    }
                    continue;
                }
            }
            out.push(nx);
        }
        SubunitarySet { pieces: out }
    }

    pub fn pieces(&self) -> &[Interval] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// True for `{0}`, the mass of a non-focal proposition.
    pub fn is_zero(&self) -> bool {
        self.pieces.len() == 1 && self.pieces[0].is_point() && self.pieces[0].lo.is_zero()
    }

    pub fn inf(&self) -> Option<&Scalar> {
        self.pieces.first().map(|p| &p.lo)
    }

    pub fn sup(&self) -> Option<&Scalar> {
        self.pieces.last().map(|p| &p.hi)
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        self.pieces.iter().any(|p| p.contains(x))
    }

    fn pairwise<F: Fn(&Interval, &Interval) -> Interval>(
        &self,
        other: &SubunitarySet,
        op: F,
    ) -> SubunitarySet {
        let mut out = Vec::with_capacity(self.pieces.len() * other.pieces.len());
        for a in &self.pieces {
            for b in &other.pieces {
                out.push(op(a, b));
            }
        }
        SubunitarySet::normalize(out)
    }

    /// `⊞`: all sums `x + y`.
    pub fn add(&self, other: &SubunitarySet) -> SubunitarySet {
        self.pairwise(other, |a, b| {
            Interval::raw(
                (&a.lo + &b.lo, a.lo_closed && b.lo_closed),
                (&a.hi + &b.hi, a.hi_closed && b.hi_closed),
            )
        })
    }

    /// `⊟`: all differences `x - y`. Not clipped.
    pub fn sub(&self, other: &SubunitarySet) -> SubunitarySet {
        self.pairwise(other, |a, b| {
            Interval::raw(
                (&a.lo - &b.hi, a.lo_closed && b.hi_closed),
                (&a.hi - &b.lo, a.hi_closed && b.lo_closed),
            )
        })
    }

    /// `⊡`: all products `x · y`.
    pub fn mul(&self, other: &SubunitarySet) -> SubunitarySet {
        self.pairwise(other, Interval::mul)
    }

    pub fn intersection(&self, other: &SubunitarySet) -> SubunitarySet {
        let mut out = Vec::new();
        for a in &self.pieces {
            for b in &other.pieces {
                out.extend(a.intersect(b));
            }
        }
        SubunitarySet::normalize(out)
    }

    /// Intersection with `[0, 1]`.
    pub fn clip(&self) -> SubunitarySet {
        let unit = Interval::closed(Scalar::zero(), Scalar::one()).expect("0 <= 1");
        self.intersection(&SubunitarySet::interval(unit))
    }
}

impl fmt::Display for SubunitarySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return f.write_str("∅");
        }
        for (k, p) in self.pieces.iter().enumerate() {
            if k > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

impl MassValue for SubunitarySet {
    fn is_null(&self) -> bool {
        self.is_empty() || self.is_zero()
    }

    fn plus(&self, other: &Self) -> Self {
        self.add(other)
    }

    fn times(&self, other: &Self) -> Self {
        self.mul(other)
    }
}

/// Set-valued masses over the hyper-power set of a frame of size `n`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ImpreciseBba {
    n: usize,
    masses: BTreeMap<Proposition, SubunitarySet>,
}

impl ImpreciseBba {
    pub fn new(n: usize) -> ImpreciseBba {
        ImpreciseBba {
            n,
            masses: BTreeMap::new(),
        }
    }

    /// Masses given twice for the same proposition are combined with `⊞`.
    pub fn from_masses<I: IntoIterator<Item = (Proposition, SubunitarySet)>>(
        n: usize,
        masses: I,
    ) -> ImpreciseBba {
        let mut b = ImpreciseBba::new(n);
        for (p, m) in masses {
            engine::accumulate(&mut b.masses, p, m);
        }
        b
    }

    /// The point-valued assignment equal to a precise one.
    pub fn from_precise(b: &crate::bba::Bba) -> Option<ImpreciseBba> {
        let mut out = ImpreciseBba::new(b.frame_size());
        for (p, m) in b.iter() {
            out.masses
                .insert(p.clone(), SubunitarySet::point(from_f64(m)?));
        }
        Some(out)
    }

    pub fn frame_size(&self) -> usize {
        self.n
    }

    pub fn mass(&self, p: &Proposition) -> Option<&SubunitarySet> {
        self.masses.get(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Proposition, &SubunitarySet)> {
        self.masses.iter()
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }

    /// A selection of one value per entry summing to exactly 1, if any.
    ///
    /// Suffix sums `R_i = S_i ⊞ ... ⊞ S_k` are built first; then each value is
    /// picked from `S_i ∩ ({t} ⊟ R_{i+1})`, preferring the smallest attained
    /// value, where `t` is what is left to reach 1.
    pub fn admissibility_witness(&self) -> Option<Vec<(Proposition, Scalar)>> {
        let entries: Vec<(&Proposition, &SubunitarySet)> = self.masses.iter().collect();
        if entries.is_empty() {
            return None;
        }
        let mut suffix: Vec<SubunitarySet> = alloc::vec![SubunitarySet::zero(); entries.len() + 1];
        for i in (0..entries.len()).rev() {
            suffix[i] = entries[i].1.add(&suffix[i + 1]);
        }
        let mut rest = Scalar::one();
        if !suffix[0].contains(&rest) {
            return None;
        }
        let mut witness = Vec::with_capacity(entries.len());
        for (i, (p, s)) in entries.iter().enumerate() {
            let allowed = s.intersection(&SubunitarySet::point(rest.clone()).sub(&suffix[i + 1]));
            let first = allowed.pieces.first()?;
            let x = if first.lo_closed {
                first.lo.clone()
            } else {
                (&first.lo + &first.hi) / Scalar::from_integer(BigInt::from(2))
            };
            rest -= &x;
            witness.push(((*p).clone(), x));
        }
        debug_assert!(rest.is_zero());
        Some(witness)
    }

    pub fn is_admissible(&self) -> bool {
        self.admissibility_witness().is_some()
    }
}

fn check_sources(sources: &[ImpreciseBba], n: usize) -> Result<(), IntervalError> {
    if sources.len() < 2 {
        return Err(IntervalError::TooFewSources(sources.len()));
    }
    for (i, s) in sources.iter().enumerate() {
        if s.n != n {
            return Err(IntervalError::FrameMismatch {
                source_index: i,
                expected: n,
                found: s.n,
            });
        }
    }
    Ok(())
}

fn focal_lists(sources: &[ImpreciseBba]) -> Vec<Vec<(Proposition, SubunitarySet)>> {
    sources
        .iter()
        .map(|s| engine::focal(s.masses.iter()))
        .collect()
}

fn clipped(n: usize, masses: BTreeMap<Proposition, SubunitarySet>) -> ImpreciseBba {
    ImpreciseBba {
        n,
        masses: masses.into_iter().map(|(p, m)| (p, m.clip())).collect(),
    }
}

/// Classic DSm rule with `⊞`/`⊡`; intersections stay in the free lattice.
pub fn imprecise_classic(sources: &[ImpreciseBba]) -> Result<ImpreciseBba, IntervalError> {
    let n = sources.first().map_or(0, |s| s.n);
    check_sources(sources, n)?;
    let mut out = BTreeMap::new();
    for_each_tuple(&focal_lists(sources), |props, _, product| {
        engine::accumulate(&mut out, meet_all(props.iter().copied()), product);
    });
    Ok(clipped(n, out))
}

/// Hybrid DSm rule with `⊞`/`⊡`.
pub fn imprecise_hybrid(
    sources: &[ImpreciseBba],
    model: &Model,
) -> Result<ImpreciseBba, IntervalError> {
    check_sources(sources, model.frame_size())?;
    Ok(clipped(
        model.frame_size(),
        engine::hybrid(&focal_lists(sources), model),
    ))
}
