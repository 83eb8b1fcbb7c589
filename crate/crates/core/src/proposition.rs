//! Elements of the hyper-power set (free distributive lattice) over a finite frame.
//!
//! A [`Proposition`] is stored in disjunctive canonical form: a union of
//! intersection terms, where each [`Term`] is a set of hypothesis indices and
//! denotes the intersection of those hypotheses. The term list is an antichain
//! (no term contains another, so `t1 | (t1 & t2)` collapses to `t1`) and is
//! sorted, which makes structural equality coincide with lattice equality.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

/// Largest frame the crate accepts. Venn regions are enumerated over all
/// `2^n - 1` non-empty index sets, so this also bounds memory.
pub const MAX_FRAME_SIZE: usize = 16;

/// A non-empty set of hypothesis indices, read as the intersection of those
/// hypotheses. Index `i` is bit `i`.
///
/// Terms are ordered by size, then lexicographically on their sorted index
/// lists, so `{0} < {1} < {0,1} < {0,2} < {1,2}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Term(u32);

impl Term {
    /// Builds a term from a raw bit mask. Returns `None` for the empty mask.
    pub fn from_bits(bits: u32) -> Option<Term> {
        (bits != 0).then_some(Term(bits))
    }

    /// Builds a term from hypothesis indices. Returns `None` if no index is
    /// given or an index is `>= 32`.
    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Option<Term> {
        let mut bits = 0u32;
        for i in indices {
            if i >= 32 {
                return None;
            }
            bits |= 1 << i;
        }
        Term::from_bits(bits)
    }

    pub fn singleton(index: usize) -> Term {
        assert!(index < 32, "hypothesis index {index} out of range");
        Term(1 << index)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Number of hypotheses in the intersection.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(self) -> u32 {
        self.0.count_ones()
    }

    /// Ascending hypothesis indices.
    pub fn indices(self) -> impl Iterator<Item = usize> {
        let bits = self.0;
        (0..32).filter(move |i| bits & (1 << i) != 0)
    }

    /// Index-set inclusion. Note the lattice order is reversed: a larger index
    /// set is a smaller proposition.
    pub fn is_subset_of(self, other: Term) -> bool {
        self.0 & other.0 == self.0
    }

    pub fn union(self, other: Term) -> Term {
        Term(self.0 | other.0)
    }

    fn highest_index(self) -> usize {
        31 - self.0.leading_zeros() as usize
    }
}

impl Ord for Term {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            let diff = self.0 ^ other.0;
            if diff == 0 {
                Ordering::Equal
            } else if self.0 & diff & diff.wrapping_neg() != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for Term {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.indices().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", i + 1)?;
        }
        f.write_str("}")
    }
}

/// An element of the hyper-power set in canonical antichain form.
///
/// The empty term list is the empty proposition. Ordering is the global
/// canonical order: free-model DSm cardinality first, then the term lists
/// lexicographically. The cardinality comparison does not depend on the frame
/// size (it compares the fraction of Venn parts covered), so propositions can
/// be ordered without knowing `n`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Proposition {
    terms: Vec<Term>,
}

impl Proposition {
    pub fn empty() -> Proposition {
        Proposition { terms: Vec::new() }
    }

    pub fn singleton(index: usize) -> Proposition {
        Proposition {
            terms: alloc::vec![Term::singleton(index)],
        }
    }

    /// The intersection of the given hypotheses.
    pub fn intersection<I: IntoIterator<Item = usize>>(indices: I) -> Proposition {
        Proposition::from_terms(Term::from_indices(indices))
    }

    /// The union of the given hypotheses.
    pub fn union_of<I: IntoIterator<Item = usize>>(indices: I) -> Proposition {
        Proposition::from_terms(indices.into_iter().map(Term::singleton))
    }

    /// Total ignorance `t1 | t2 | ... | tn` (the empty proposition for `n = 0`).
    pub fn total_ignorance(n: usize) -> Proposition {
        Proposition::union_of(0..n)
    }

    /// Canonicalizes an arbitrary collection of intersection terms.
    pub fn from_terms<I: IntoIterator<Item = Term>>(terms: I) -> Proposition {
        let mut terms: Vec<Term> = terms.into_iter().collect();
        terms.sort();
        terms.dedup();
        let mut kept: Vec<Term> = Vec::with_capacity(terms.len());
        // sorted by size, so any absorbing term comes earlier
        for t in terms {
            if !kept.iter().any(|k| k.is_subset_of(t)) {
                kept.push(t);
            }
        }
        Proposition { terms: kept }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lattice meet (intersection).
    pub fn meet(&self, other: &Proposition) -> Proposition {
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                terms.push(a.union(*b));
            }
        }
        Proposition::from_terms(terms)
    }

    /// Lattice join (union).
    pub fn join(&self, other: &Proposition) -> Proposition {
        Proposition::from_terms(self.terms.iter().chain(other.terms.iter()).copied())
    }

    /// Swaps meet and join: the dual element.
    ///
    /// The disjunctive form is converted to the conjunctive one by picking
    /// one index from every term (minimal transversals); each transversal
    /// becomes a term of the dual. `∅` maps to itself.
    pub fn dual(&self) -> Proposition {
        if self.terms.is_empty() {
            return Proposition::empty();
        }
        let mut partial: Vec<u32> = alloc::vec![0];
        for t in &self.terms {
            let mut next = Vec::new();
            for &p in &partial {
                if p & t.bits() != 0 {
                    next.push(p);
                } else {
                    for i in t.indices() {
                        next.push(p | (1 << i));
                    }
                }
            }
            next.sort_unstable();
            next.dedup();
            partial = next;
        }
        Proposition::from_terms(partial.into_iter().filter_map(Term::from_bits))
    }

    /// Union of every hypothesis that appears anywhere in the canonical form.
    pub fn hypotheses(&self) -> Proposition {
        let support = self.support();
        Proposition::union_of((0..32).filter(|i| support & (1 << i) != 0))
    }

    /// Number of hypotheses needed to express the proposition.
    pub fn width(&self) -> usize {
        self.terms
            .iter()
            .map(|t| t.highest_index() + 1)
            .max()
            .unwrap_or(0)
    }

    /// Free-model DSm cardinality over a frame of size `n`.
    pub fn free_cardinality(&self, n: usize) -> u64 {
        assert!(
            n >= self.width(),
            "proposition uses hypotheses outside the frame"
        );
        assert!(n <= MAX_FRAME_SIZE);
        let support = self.support();
        let free = n - support.count_ones() as usize;
        covered_parts(&self.terms, support) << free
    }

    fn support(&self) -> u32 {
        self.terms.iter().fold(0u32, |acc, t| acc | t.bits())
    }
}

/// Counts subsets of `support` (including those not in the proposition's
/// terms) that contain at least one term.
fn covered_parts(terms: &[Term], support: u32) -> u64 {
    if terms.is_empty() {
        return 0;
    }
    let mut count = 0;
    // iterate all submasks of support
    let mut sub = support;
    loop {
        if terms.iter().any(|t| t.bits() & sub == t.bits()) {
            count += 1;
        }
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & support;
    }
    count
}

impl Ord for Proposition {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.terms == other.terms {
            return Ordering::Equal;
        }
        let support = self.support() | other.support();
        let a = covered_parts(&self.terms, support);
        let b = covered_parts(&other.terms, support);
        a.cmp(&b).then_with(|| self.terms.cmp(&other.terms))
    }
}

impl PartialOrd for Proposition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Proposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.terms.iter()).finish()
    }
}

/// Enumerates every element of the hyper-power set for a frame of size `n`,
/// `∅` included, in canonical order.
///
/// # Panics
///
/// Panics if `n > 7`; beyond that the lattice has trillions of elements.
pub fn generate(n: usize) -> Vec<Proposition> {
    assert!(n <= 7, "hyper-power set enumeration is limited to n <= 7");
    let parts: Vec<Term> = (1u32..(1u32 << n)).map(Term).collect();
    let mut elements = closure(&parts);
    elements.sort();
    elements
}

/// All distinct unions of intersection terms drawn from `generators`.
///
/// `generators` must be closed under taking non-empty subsets (a down-closed
/// family of index sets), which holds for the free model and for every model
/// obtained by forcing propositions empty. Elements are tracked as up-sets
/// (bit `i` set when generator `i` is covered) and closed under join with the
/// principal up-set of each generator; meets of principal up-sets are again
/// principal, so the result is closed under both operations.
pub(crate) fn closure(generators: &[Term]) -> Vec<Proposition> {
    assert!(generators.len() <= 128, "lattice too large to enumerate");
    let principal: Vec<u128> = generators
        .iter()
        .map(|g| {
            generators
                .iter()
                .enumerate()
                .filter(|(_, p)| g.is_subset_of(**p))
                .fold(0u128, |acc, (j, _)| acc | (1u128 << j))
        })
        .collect();

    let mut seen: BTreeSet<u128> = BTreeSet::new();
    seen.insert(0);
    let mut frontier = alloc::vec![0u128];
    while let Some(x) = frontier.pop() {
        for &g in &principal {
            let y = x | g;
            if seen.insert(y) {
                frontier.push(y);
            }
        }
    }

    seen.into_iter()
        .map(|upset| {
            Proposition::from_terms(
                generators
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| upset & (1u128 << j) != 0)
                    .map(|(_, t)| *t),
            )
        })
        .collect()
}

/// Errors raised when building a [`Frame`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FrameError {
    #[error("frame has {0} hypotheses, at most {MAX_FRAME_SIZE} are supported")]
    TooLarge(usize),
    #[error("duplicate hypothesis name `{0}`")]
    Duplicate(String),
    #[error("`{0}` is not a valid hypothesis name")]
    InvalidName(String),
}

/// Ordered, named hypotheses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    names: Vec<String>,
}

impl Frame {
    pub fn new<I, S>(names: I) -> Result<Frame, FrameError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.len() > MAX_FRAME_SIZE {
            return Err(FrameError::TooLarge(names.len()));
        }
        for (i, name) in names.iter().enumerate() {
            if !is_identifier(name) || name == "empty" {
                return Err(FrameError::InvalidName(name.clone()));
            }
            if names[..i].contains(name) {
                return Err(FrameError::Duplicate(name.clone()));
            }
        }
        Ok(Frame { names })
    }

    /// Frame `t1, ..., tn`.
    pub fn numbered(n: usize) -> Frame {
        Frame::new((1..=n).map(|i| alloc::format!("t{i}"))).expect("numbered frame is valid")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Parses `expr := term ('|' term)*; term := factor ('&' factor)*;
    /// factor := IDENT | '∅' | 'empty' | '(' expr ')'`. `∩`/`∪` are accepted as
    /// aliases of `&`/`|`.
    pub fn parse(&self, text: &str) -> Result<Proposition, ParseError> {
        let mut parser = Parser {
            frame: self,
            text,
            pos: 0,
        };
        let p = parser.expr()?;
        parser.skip_ws();
        match parser.peek() {
            None => Ok(p),
            Some(c) => Err(parser.error(ParseErrorKind::Unexpected(c))),
        }
    }

    /// Renders `p` with this frame's names, e.g. `(t1 & t2) | t3`.
    pub fn format(&self, p: &Proposition) -> String {
        self.display(p).to_string()
    }

    /// Display adapter; the alternate flag (`{:#}`) prints `empty` instead of `∅`.
    pub fn display<'a>(&'a self, p: &'a Proposition) -> PropositionDisplay<'a> {
        PropositionDisplay {
            frame: self,
            proposition: p,
        }
    }
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_alphabetic() || c == '_' => chars.all(|c| c.is_alphanumeric() || c == '_'),
        _ => false,
    }
}

pub struct PropositionDisplay<'a> {
    frame: &'a Frame,
    proposition: &'a Proposition,
}

impl PropositionDisplay<'_> {
    fn write_term(&self, f: &mut fmt::Formatter<'_>, t: Term) -> fmt::Result {
        for (k, i) in t.indices().enumerate() {
            if k > 0 {
                f.write_str(" & ")?;
            }
            match self.frame.names.get(i) {
                Some(name) => f.write_str(name)?,
                None => write!(f, "?{}", i + 1)?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for PropositionDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.proposition.terms();
        if terms.is_empty() {
            return f.write_str(if f.alternate() { "empty" } else { "∅" });
        }
        let parenthesize = terms.len() > 1;
        // written in plain lexicographic order of the index lists
        let mut ordered: Vec<Term> = terms.to_vec();
        ordered.sort_by(|a, b| a.indices().cmp(b.indices()));
        for (k, t) in ordered.iter().enumerate() {
            if k > 0 {
                f.write_str(" | ")?;
            }
            if parenthesize && t.len() > 1 {
                f.write_str("(")?;
                self.write_term(f, *t)?;
                f.write_str(")")?;
            } else {
                self.write_term(f, *t)?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    Unexpected(char),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unknown hypothesis `{0}`")]
    UnknownIdentifier(String),
}

/// A parse failure and the byte offset where it occurred.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{kind} at offset {position}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub position: usize,
}

struct Parser<'a> {
    frame: &'a Frame,
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn bump(&mut self) {
        if let Some(c) = self.peek() {
            self.pos += c.len_utf8();
        }
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.bump();
        }
    }

    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            kind,
            position: self.pos,
        }
    }

    fn eat(&mut self, ops: &[char]) -> bool {
        self.skip_ws();
        match self.peek() {
            Some(c) if ops.contains(&c) => {
                self.bump();
                true
            }
            _ => false,
        }
    }

    fn expr(&mut self) -> Result<Proposition, ParseError> {
        let mut acc = self.term()?;
        while self.eat(&['|', '∪']) {
            acc = acc.join(&self.term()?);
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Proposition, ParseError> {
        let mut acc = self.factor()?;
        while self.eat(&['&', '∩']) {
            acc = acc.meet(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Proposition, ParseError> {
        self.skip_ws();
        match self.peek() {
            None => Err(self.error(ParseErrorKind::UnexpectedEnd)),
            Some('(') => {
                self.bump();
                let inner = self.expr()?;
                self.skip_ws();
                match self.peek() {
                    Some(')') => {
                        self.bump();
                        Ok(inner)
                    }
                    Some(c) => Err(self.error(ParseErrorKind::Unexpected(c))),
                    None => Err(self.error(ParseErrorKind::UnexpectedEnd)),
                }
            }
            Some('∅') => {
                self.bump();
                Ok(Proposition::empty())
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                    self.bump();
                }
                let ident = &self.text[start..self.pos];
                if ident == "empty" {
                    return Ok(Proposition::empty());
                }
                match self.frame.index_of(ident) {
                    Some(i) => Ok(Proposition::singleton(i)),
                    None => Err(ParseError {
                        kind: ParseErrorKind::UnknownIdentifier(ident.into()),
                        position: start,
                    }),
                }
            }
            Some(c) => Err(self.error(ParseErrorKind::Unexpected(c))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn p(terms: &[&[usize]]) -> Proposition {
        Proposition::from_terms(
            terms
                .iter()
                .map(|t| Term::from_indices(t.iter().map(|i| i - 1)).unwrap()),
        )
    }

    #[test]
    fn parse_examples() {
        let f = Frame::numbered(3);
        assert_eq!(f.parse("t1 & t2").unwrap(), p(&[&[1, 2]]));
        assert_eq!(f.parse("(t1 & t2) | t3").unwrap(), p(&[&[1, 2], &[3]]));
        assert_eq!(f.parse("t1 | (t1 & t2)").unwrap(), p(&[&[1]]));
        assert_eq!(f.parse("  t1∩t2 ∪ t3 ").unwrap(), p(&[&[1, 2], &[3]]));
        assert_eq!(f.parse("∅").unwrap(), Proposition::empty());
        assert_eq!(f.parse("empty | t2").unwrap(), p(&[&[2]]));
        assert_eq!(f.parse("t1 & empty").unwrap(), Proposition::empty());
    }

    #[test]
    fn parse_errors_carry_position() {
        let f = Frame::numbered(2);
        let e = f.parse("t1 & t9").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnknownIdentifier("t9".into()));
        assert_eq!(e.position, 5);

        let e = f.parse("t1 &").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnexpectedEnd);

        let e = f.parse("(t1 | t2").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnexpectedEnd);

        let e = f.parse("t1 t2").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Unexpected('t'));
        assert_eq!(e.position, 3);

        assert_eq!(
            f.parse("!t1").unwrap_err().kind,
            ParseErrorKind::Unexpected('!')
        );
    }

    #[test]
    fn meet_examples() {
        assert_eq!(p(&[&[1]]).meet(&p(&[&[2]])), p(&[&[1, 2]]));
        assert_eq!(
            p(&[&[1], &[2]]).meet(&Proposition::empty()),
            Proposition::empty()
        );
        assert_eq!(p(&[&[1], &[2]]).meet(&p(&[&[3]])), p(&[&[1, 3], &[2, 3]]));
    }

    #[test]
    fn join_examples() {
        assert_eq!(p(&[&[1]]).join(&p(&[&[2]])), p(&[&[1], &[2]]));
        assert_eq!(p(&[&[1, 2]]).join(&p(&[&[1]])), p(&[&[1]]));
        let (a, b, c) = (p(&[&[1]]), p(&[&[2]]), p(&[&[3]]));
        let alpha8 = a.meet(&b).join(&a.meet(&c)).join(&b.meet(&c));
        assert_eq!(alpha8, p(&[&[1, 2], &[1, 3], &[2, 3]]));
        assert_eq!(alpha8.dual(), alpha8);
    }

    #[test]
    fn format_examples() {
        let f = Frame::numbered(3);
        assert_eq!(f.format(&p(&[&[1, 2], &[3]])), "(t1 & t2) | t3");
        assert_eq!(f.format(&Proposition::empty()), "∅");
        assert_eq!(
            alloc::format!("{:#}", f.display(&Proposition::empty())),
            "empty"
        );
        assert_eq!(f.format(&p(&[&[1]])), "t1");
        assert_eq!(f.format(&p(&[&[1, 2]])), "t1 & t2");
    }

    #[test]
    fn generate_small_sizes() {
        assert_eq!(generate(0), vec![Proposition::empty()]);
        assert_eq!(generate(1).len(), 2);
        let two = generate(2);
        assert_eq!(
            two,
            vec![
                Proposition::empty(),
                p(&[&[1, 2]]),
                p(&[&[1]]),
                p(&[&[2]]),
                p(&[&[1], &[2]])
            ]
        );
        assert_eq!(generate(3).len(), 19);
    }

    #[test]
    fn canonical_order_is_cardinality_first() {
        let all = generate(3);
        let cards: Vec<u64> = all.iter().map(|x| x.free_cardinality(3)).collect();
        assert!(cards.windows(2).all(|w| w[0] <= w[1]));
        assert_eq!(cards[0], 0);
        assert_eq!(*cards.last().unwrap(), 7);
    }

    #[test]
    fn free_cardinality_scales_with_frame() {
        let t1 = p(&[&[1]]);
        assert_eq!(t1.free_cardinality(1), 1);
        assert_eq!(t1.free_cardinality(3), 4);
        assert_eq!(Proposition::total_ignorance(4).free_cardinality(4), 15);
        assert_eq!(Proposition::empty().free_cardinality(3), 0);
    }

    #[test]
    fn term_order() {
        let t = |ix: &[usize]| Term::from_indices(ix.iter().copied()).unwrap();
        let mut terms = vec![t(&[1, 2]), t(&[0]), t(&[0, 2]), t(&[1]), t(&[0, 1])];
        terms.sort();
        assert_eq!(
            terms,
            vec![t(&[0]), t(&[1]), t(&[0, 1]), t(&[0, 2]), t(&[1, 2])]
        );
    }

    #[test]
    fn frame_validation() {
        assert!(matches!(
            Frame::new(["a", "a"]),
            Err(FrameError::Duplicate(_))
        ));
        assert!(matches!(
            Frame::new(["a b"]),
            Err(FrameError::InvalidName(_))
        ));
        assert!(matches!(
            Frame::new(["empty"]),
            Err(FrameError::InvalidName(_))
        ));
        assert!(matches!(
            Frame::new((0..17).map(|i| alloc::format!("h{i}"))),
            Err(FrameError::TooLarge(17))
        ));
        assert!(Frame::new(["M", "C", "T"]).is_ok());
        assert!(Frame::new(Vec::<String>::new()).unwrap().is_empty());
    }
}
