//! Tuple enumeration and hybrid routing shared by the precise, interval and
//! label rules.

use alloc::vec::Vec;

use crate::model::Model;
use crate::proposition::Proposition;

/// Arithmetic needed to combine masses of one kind.
pub(crate) trait MassValue: Clone {
    /// True for the additive unit; such entries are not focal.
    fn is_null(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
}

impl MassValue for f64 {
    fn is_null(&self) -> bool {
        *self == 0.0
    }

    fn plus(&self, other: &Self) -> Self {
        self + other
    }

    fn times(&self, other: &Self) -> Self {
        self * other
    }
}

/// Where the hybrid rule credits the product of one tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Route {
    /// The meet survives: credited to it.
    Meet(Proposition),
    /// Every member is empty: credited to the union of the hypotheses they
    /// mention, or to total ignorance if that union is empty too.
    Ignorance(Proposition),
    /// Some member survives but the meet does not: credited to the union.
    Union(Proposition),
}

impl Route {
    pub(crate) fn target(&self) -> &Proposition {
        match self {
            Route::Meet(p) | Route::Ignorance(p) | Route::Union(p) => p,
        }
    }
}

pub(crate) fn meet_all<'a, I: IntoIterator<Item = &'a Proposition>>(props: I) -> Proposition {
    let mut it = props.into_iter();
    let first = it.next().cloned().unwrap_or_default();
    it.fold(first, |acc, p| acc.meet(p))
}

pub(crate) fn join_all<'a, I: IntoIterator<Item = &'a Proposition>>(props: I) -> Proposition {
    props
        .into_iter()
        .fold(Proposition::empty(), |acc, p| acc.join(p))
}

pub(crate) fn route(focals: &[&Proposition], model: &Model) -> Route {
    let meet = model.reduce(&meet_all(focals.iter().copied()));
    if !meet.is_empty() {
        return Route::Meet(meet);
    }
    if focals.iter().all(|x| model.is_empty(x)) {
        let u = model.reduce(&join_all(
            focals
                .iter()
                .map(|x| x.hypotheses())
                .collect::<Vec<_>>()
                .iter(),
        ));
        if u.is_empty() {
            Route::Ignorance(model.total_ignorance())
        } else {
            Route::Ignorance(u)
        }
    } else {
        Route::Union(model.reduce(&join_all(focals.iter().copied())))
    }
}

/// Non-null entries of one source.
pub(crate) fn focal<'a, V: MassValue + 'a, I>(entries: I) -> Vec<(Proposition, V)>
where
    I: IntoIterator<Item = (&'a Proposition, &'a V)>,
{
    entries
        .into_iter()
        .filter(|(_, v)| !v.is_null())
        .map(|(p, v)| (p.clone(), v.clone()))
        .collect()
}

/// Calls `f` with every tuple of focal elements (one per source) and the
/// product of their masses. Sources with no focal element yield no tuple.
pub(crate) fn for_each_tuple<V, F>(sources: &[Vec<(Proposition, V)>], mut f: F)
where
    V: MassValue,
    F: FnMut(&[&Proposition], &[&V], V),
{
    if sources.is_empty() || sources.iter().any(Vec::is_empty) {
        return;
    }
    let s = sources.len();
    let mut idx = alloc::vec![0usize; s];
    let mut props: Vec<&Proposition> = Vec::with_capacity(s);
    let mut masses: Vec<&V> = Vec::with_capacity(s);
    loop {
        props.clear();
        masses.clear();
        for (src, &i) in sources.iter().zip(&idx) {
            props.push(&src[i].0);
            masses.push(&src[i].1);
        }
        let product = masses[1..]
            .iter()
            .fold(masses[0].clone(), |acc, m| acc.times(m));
        f(&props, &masses, product);

        let mut k = s;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < sources[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// The hybrid rule over any mass kind: every tuple product is credited to
/// its [`route`] target.
pub(crate) fn hybrid<V: MassValue>(
    sources: &[Vec<(Proposition, V)>],
    model: &Model,
) -> alloc::collections::BTreeMap<Proposition, V> {
    let mut out: alloc::collections::BTreeMap<Proposition, V> = alloc::collections::BTreeMap::new();
    for_each_tuple(sources, |props, _, product| {
        accumulate(&mut out, route(props, model).target().clone(), product);
    });
    out
}

pub(crate) fn accumulate<V: MassValue>(
    map: &mut alloc::collections::BTreeMap<Proposition, V>,
    key: Proposition,
    value: V,
) {
    match map.get_mut(&key) {
        Some(v) => *v = v.plus(&value),
        None => {
            map.insert(key, value);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proposition::Frame;

    #[test]
    fn tuples_cover_the_product() {
        let f = Frame::numbered(3);
        let a = alloc::vec![(f.parse("t1").unwrap(), 0.5), (f.parse("t2").unwrap(), 0.5)];
        let b = alloc::vec![
            (f.parse("t3").unwrap(), 0.25),
            (f.parse("t1").unwrap(), 0.75)
        ];
        let mut count = 0;
        let mut total = 0.0;
        for_each_tuple(&[a.clone(), b, a], |props, _, p| {
            assert_eq!(props.len(), 3);
            count += 1;
            total += p;
        });
        assert_eq!(count, 8);
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn routing_cases() {
        let f = Frame::numbered(3);
        let p = |s: &str| f.parse(s).unwrap();
        let m = Model::hybrid(3, [p("t1 & t2"), p("t1 & t3"), p("t2 & t3"), p("t3")]).unwrap();
        assert_eq!(route(&[&p("t1"), &p("t1 | t2")], &m), Route::Meet(p("t1")));
        assert_eq!(route(&[&p("t1"), &p("t2")], &m), Route::Union(p("t1 | t2")));
        assert_eq!(route(&[&p("t1"), &p("t3")], &m), Route::Union(p("t1")));
        assert_eq!(
            route(&[&p("t3"), &p("t3")], &m),
            Route::Ignorance(p("t1 | t2"))
        );
        assert_eq!(
            route(&[&p("t1 & t3"), &p("t3")], &m),
            Route::Ignorance(p("t1"))
        );
        assert_eq!(
            route(&[&p("t3"), &p("∅")], &m),
            Route::Ignorance(p("t1 | t2"))
        );
    }
}
